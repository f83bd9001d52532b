// opcore.hpp — Dense operators, density matrices and tensor-space primitives

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace mfgkit {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kEigenFloor = -1e-10;

// Invalid input (shape, domain, precondition).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Quadrature, eigensolver or integrator failure.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Largest |A - A^H| entry relative to the largest |A| entry (0 for the zero matrix).
template <typename Derived>
double hermiticity_deviation(const Eigen::MatrixBase<Derived>& a) {
    if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
    const double scale = a.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return (a - a.adjoint()).cwiseAbs().maxCoeff() / scale;
}

class HermitianOperator {
public:
    HermitianOperator() = default;
    explicit HermitianOperator(Matrix entries, double tol = kHermitianTol);

    Index dim() const { return entries_.rows(); }
    const Matrix& matrix() const { return entries_; }

private:
    Matrix entries_;
};

class DensityMatrix {
public:
    DensityMatrix() = default;
    // Validates hermiticity, unit trace and the eigenvalue floor.
    explicit DensityMatrix(Matrix entries);

    Index dim() const { return entries_.rows(); }
    const Matrix& matrix() const { return entries_; }

    // Eigenvalues ascending; values in (kEigenFloor, 0) read out as 0.
    RealVector eigenvalues() const;
    // Diagonal in the current basis as reals.
    RealVector populations() const;
    double purity() const;

    // Hermitize, clip negative eigenvalues and renormalize. Records the most
    // negative eigenvalue seen (0 if none) in `clamp`.
    static DensityMatrix project(const Matrix& m, double* clamp = nullptr);

private:
    Matrix entries_;
};

struct TensorSpace {
    std::vector<Index> factor_dims;

    Index total_dim() const;
};

struct Eigh {
    RealVector values;  // ascending
    Matrix vectors;     // columns
};

Eigh eigh(const HermitianOperator& h);
Eigh eigh(const Matrix& h);

template <typename A, typename B>
auto kron(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    using Scalar = typename A::Scalar;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                              a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

template <typename A, typename B>
auto commutator(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    return (a * b - b * a).eval();
}

// Reduced matrix on factor `keep` of a row-major tensor product (factor 0 slowest).
template <typename Derived>
auto partial_trace_matrix(const Eigen::MatrixBase<Derived>& m, std::span<const Index> dims,
                          std::size_t keep) {
    using Scalar = typename Derived::Scalar;
    if (keep >= dims.size()) throw DomainError("partial_trace: factor index out of range");
    Index total = 1;
    for (Index d : dims) total *= d;
    if (m.rows() != total || m.cols() != total)
        throw DomainError("partial_trace: matrix dimension does not match tensor space");
    Index inner = 1;
    for (std::size_t k = keep + 1; k < dims.size(); ++k) inner *= dims[k];
    const Index kept = dims[keep];
    const Index outer = total / (inner * kept);
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(kept, kept);
    for (Index o = 0; o < outer; ++o)
        for (Index a = 0; a < kept; ++a)
            for (Index b = 0; b < kept; ++b) {
                const Index r = (o * kept + a) * inner;
                const Index c = (o * kept + b) * inner;
                Scalar acc{0};
                for (Index q = 0; q < inner; ++q) acc += m(r + q, c + q);
                out(a, b) += acc;
            }
    return out;
}

// e^A. Hermitian and anti-Hermitian input go through an eigendecomposition,
// everything else through Eigen's scaling-and-squaring Pade routine.
template <typename Derived>
auto matrix_exp(const Eigen::MatrixBase<Derived>& a) {
    using Scalar = typename Derived::Scalar;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    if (a.rows() != a.cols()) throw DomainError("matrix_exp: matrix must be square");
    if (!a.allFinite()) throw DomainError("matrix_exp: non-finite entries");
    if (a.rows() == 0) return Mat(a);
    const double scale = a.cwiseAbs().maxCoeff();
    if (scale == 0.0) return Mat(Mat::Identity(a.rows(), a.cols()));
    const double herm = (a - a.adjoint()).cwiseAbs().maxCoeff() / scale;
    if (herm < 1e-14) {
        Eigen::SelfAdjointEigenSolver<Mat> es(Mat(a).template selfadjointView<Eigen::Lower>());
        const auto& v = es.eigenvectors();
        return Mat(v * es.eigenvalues().array().exp().matrix().asDiagonal() * v.adjoint());
    }
    if constexpr (Eigen::NumTraits<Scalar>::IsComplex) {
        const double anti = (a + a.adjoint()).cwiseAbs().maxCoeff() / scale;
        if (anti < 1e-14) {
            // A = iH with H Hermitian
            const Mat h = (Scalar(0, -1) * a).eval();
            Eigen::SelfAdjointEigenSolver<Mat> es(h);
            const auto& v = es.eigenvectors();
            Eigen::Matrix<Scalar, Eigen::Dynamic, 1> ph(es.eigenvalues().size());
            for (Index k = 0; k < ph.size(); ++k)
                ph(k) = std::exp(Scalar(0, es.eigenvalues()(k)));
            return Mat(v * ph.asDiagonal() * v.adjoint());
        }
    }
    return Mat(Mat(a).exp());
}

// e^{-beta H} / tr e^{-beta H}, evaluated after shifting H by its lowest eigenvalue.
DensityMatrix gibbs(const HermitianOperator& h, double beta);

DensityMatrix partial_trace(const DensityMatrix& rho, const TensorSpace& space, std::size_t keep);

// (1/2) sum of singular values of a - b.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);
double trace_distance(const Matrix& a, const Matrix& b);

// Column-stacking vectorization and its inverse.
Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, Index dim);

namespace pauli {
Matrix identity();
Matrix x();
Matrix y();
Matrix z();
Matrix plus();   // |0><1|
Matrix minus();  // |1><0|
} // namespace pauli

} // namespace mfgkit
