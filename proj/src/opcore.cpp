// opcore.cpp — Dense operator primitives

#include "mfgkit/opcore.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mfgkit {

HermitianOperator::HermitianOperator(Matrix entries, double tol) : entries_(std::move(entries)) {
    if (entries_.rows() == 0 || entries_.rows() != entries_.cols())
        throw DomainError("HermitianOperator: matrix must be square and non-empty");
    if (!entries_.allFinite()) throw DomainError("HermitianOperator: non-finite entries");
    const double dev = hermiticity_deviation(entries_);
    if (dev > tol) {
        std::ostringstream os;
        os << "HermitianOperator: hermiticity deviation " << dev << " exceeds " << tol;
        throw DomainError(os.str());
    }
}

DensityMatrix::DensityMatrix(Matrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() == 0 || entries_.rows() != entries_.cols())
        throw DomainError("DensityMatrix: matrix must be square and non-empty");
    if (!entries_.allFinite()) throw DomainError("DensityMatrix: non-finite entries");
    if (hermiticity_deviation(entries_) > kHermitianTol)
        throw DomainError("DensityMatrix: not Hermitian");
    const double tr = entries_.trace().real();
    if (std::abs(tr - 1.0) > kTraceTol) {
        std::ostringstream os;
        os << "DensityMatrix: trace " << tr << " differs from 1";
        throw DomainError(os.str());
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(entries_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) < kEigenFloor) {
        std::ostringstream os;
        os << "DensityMatrix: eigenvalue " << es.eigenvalues()(0) << " below floor";
        throw DomainError(os.str());
    }
}

RealVector DensityMatrix::eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(entries_, Eigen::EigenvaluesOnly);
    RealVector w = es.eigenvalues();
    for (Index k = 0; k < w.size(); ++k)
        if (w(k) < 0.0 && w(k) > kEigenFloor) w(k) = 0.0;
    return w;
}

RealVector DensityMatrix::populations() const { return entries_.diagonal().real(); }

double DensityMatrix::purity() const { return (entries_ * entries_).trace().real(); }

DensityMatrix DensityMatrix::project(const Matrix& m, double* clamp) {
    const Matrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    RealVector w = es.eigenvalues();
    double most_negative = 0.0;
    for (Index k = 0; k < w.size(); ++k) {
        most_negative = std::min(most_negative, w(k));
        w(k) = std::max(w(k), 0.0);
    }
    if (clamp) *clamp = most_negative;
    const double tr = w.sum();
    if (!(tr > 0.0)) throw NumericalError("DensityMatrix::project: no positive weight");
    Matrix out = es.eigenvectors() * (w / tr).cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    out = 0.5 * (out + out.adjoint()).eval();
    return DensityMatrix(std::move(out));
}

Index TensorSpace::total_dim() const {
    Index n = 1;
    for (Index d : factor_dims) n *= d;
    return n;
}

Eigh eigh(const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) throw NumericalError("eigh: eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

Eigh eigh(const HermitianOperator& h) { return eigh(h.matrix()); }

DensityMatrix gibbs(const HermitianOperator& h, double beta) {
    if (!std::isfinite(beta)) throw DomainError("gibbs: beta must be finite");
    if (!(beta > 0.0)) throw DomainError("gibbs: beta must be positive");
    const Eigh e = eigh(h);
    RealVector w = (-beta * (e.values.array() - e.values(0))).exp();
    w /= w.sum();
    Matrix out = e.vectors * w.cast<cplx>().asDiagonal() * e.vectors.adjoint();
    out = 0.5 * (out + out.adjoint()).eval();
    return DensityMatrix(std::move(out));
}

DensityMatrix partial_trace(const DensityMatrix& rho, const TensorSpace& space, std::size_t keep) {
    if (rho.dim() != space.total_dim())
        throw DomainError("partial_trace: density matrix does not match tensor space");
    Matrix out = partial_trace_matrix(rho.matrix(), space.factor_dims, keep);
    return DensityMatrix(std::move(out));
}

double trace_distance(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DomainError("trace_distance: dimension mismatch");
    const Matrix d = a - b;
    if (hermiticity_deviation(d) < 1e-12) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
        return 0.5 * es.eigenvalues().cwiseAbs().sum();
    }
    Eigen::JacobiSVD<Matrix> svd(d);
    return 0.5 * svd.singularValues().sum();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    return trace_distance(a.matrix(), b.matrix());
}

Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unvec(const Vector& v, Index dim) {
    if (v.size() != dim * dim) throw DomainError("unvec: size mismatch");
    return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

namespace pauli {
Matrix identity() { return Matrix::Identity(2, 2); }
Matrix x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
Matrix y() {
    Matrix m(2, 2);
    m << 0, cplx(0, -1), cplx(0, 1), 0;
    return m;
}
Matrix z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}
Matrix plus() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1;
    return m;
}
Matrix minus() {
    Matrix m = Matrix::Zero(2, 2);
    m(1, 0) = 1;
    return m;
}
} // namespace pauli

} // namespace mfgkit
