// finitebath.cpp — Exact finite-bath oracle

#include "mfgkit/finitebath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace mfgkit::finite {

void FiniteBathSpec::validate() const {
    if (fock_cutoff < 1) throw DomainError("FiniteBathSpec: fock_cutoff must be >= 1");
    for (const auto& m : modes)
        if (!(m.omega > 0.0) || !std::isfinite(m.omega))
            throw DomainError("FiniteBathSpec: mode frequencies must be positive and finite");
}

namespace {

// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
std::pair<RealVector, RealVector> gauss_legendre(int n) {
    RealMatrix t = RealMatrix::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        t(k, k - 1) = b;
        t(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(t);
    RealVector x = es.eigenvalues();
    RealVector w = 2.0 * es.eigenvectors().row(0).transpose().array().square();
    return {x, w};
}

} // namespace

std::vector<Mode> discretize(const bath::SpectralDensity& J, int n, double omega_max, Scheme scheme) {
    if (n < 1) throw DomainError("discretize: N must be >= 1");
    if (!(omega_max > 0.0) || !std::isfinite(omega_max))
        throw DomainError("discretize: omega_max must be positive and finite");
    std::vector<Mode> modes;
    modes.reserve(static_cast<std::size_t>(n));
    if (scheme == Scheme::Linear) {
        const double dw = omega_max / n;
        for (int k = 0; k < n; ++k) {
            const double w = (k + 0.5) * dw;
            modes.push_back({w, std::sqrt(std::max(J(w), 0.0) * dw)});
        }
    } else {
        auto [x, wt] = gauss_legendre(n);
        for (int k = 0; k < n; ++k) {
            const double w = 0.5 * omega_max * (x(k) + 1.0);
            const double weight = 0.5 * omega_max * wt(k);
            modes.push_back({w, std::sqrt(std::max(J(w), 0.0) * weight)});
        }
    }
    return modes;
}

TensorSpace GlobalModel::space() const {
    TensorSpace s;
    s.factor_dims.push_back(system_dim_);
    s.factor_dims.insert(s.factor_dims.end(), bath_dims_.begin(), bath_dims_.end());
    return s;
}

const GlobalModel::Spectrum& GlobalModel::spectrum() const {
    std::call_once(*once_, [this] {
        auto s = std::make_shared<Spectrum>();
        if (real_) {
            Eigen::SelfAdjointEigenSolver<RealMatrix> es(h_tot_.real());
            if (es.info() != Eigen::Success) throw NumericalError("GlobalModel: eigendecomposition failed");
            s->values = es.eigenvalues();
            s->real_vectors = es.eigenvectors();
            s->real = true;
        } else {
            Eigen::SelfAdjointEigenSolver<Matrix> es(h_tot_);
            if (es.info() != Eigen::Success) throw NumericalError("GlobalModel: eigendecomposition failed");
            s->values = es.eigenvalues();
            s->vectors = es.eigenvectors();
        }
        spectrum_ = std::move(s);
    });
    return *spectrum_;
}

const RealVector& GlobalModel::energies() const { return spectrum().values; }

Matrix GlobalModel::eigenvectors() const {
    const Spectrum& s = spectrum();
    return s.real ? Matrix(s.real_vectors.cast<cplx>()) : s.vectors;
}

GlobalModel assemble(const HermitianOperator& h_s, const HermitianOperator& x, double lambda,
                     const FiniteBathSpec& spec, Index dimension_cap) {
    return assemble(h_s, std::vector<BathCoupling>{{x.matrix(), spec}}, lambda, dimension_cap);
}

GlobalModel assemble(const HermitianOperator& h_s, const std::vector<BathCoupling>& couplings,
                     double lambda, Index dimension_cap) {
    if (!std::isfinite(lambda)) throw DomainError("assemble: lambda must be finite");
    const Index ds = h_s.dim();
    GlobalModel g;
    g.system_dim_ = ds;
    g.h_s_ = h_s;
    g.lambda_ = lambda;

    struct Flat {
        double omega;
        cplx g;
        std::size_t bath;
    };
    std::vector<Flat> flat;
    long double total = static_cast<long double>(ds);
    for (std::size_t b = 0; b < couplings.size(); ++b) {
        const auto& c = couplings[b];
        c.spec.validate();
        if (c.x.rows() != ds || c.x.cols() != ds) throw DomainError("assemble: coupling dimension mismatch");
        if (hermiticity_deviation(c.x) > kHermitianTol) throw DomainError("assemble: X must be Hermitian");
        std::vector<Mode> sorted = c.spec.modes;
        std::stable_sort(sorted.begin(), sorted.end(),
                         [](const Mode& a, const Mode& m) { return a.omega < m.omega; });
        BathCoupling stored{c.x, c.spec};
        stored.spec.modes = sorted;
        g.couplings_.push_back(stored);
        for (const auto& m : sorted) {
            flat.push_back({m.omega, m.g, b});
            g.bath_dims_.push_back(c.spec.fock_cutoff + 1);
            total *= static_cast<long double>(c.spec.fock_cutoff + 1);
        }
    }
    if (total > static_cast<long double>(dimension_cap)) {
        std::ostringstream os;
        os << "assemble: global dimension " << static_cast<double>(total) << " exceeds the cap "
           << dimension_cap;
        throw DomainError(os.str());
    }
    const Index nb = static_cast<Index>(total) / ds;
    const Index dim = ds * nb;
    const std::size_t nm = flat.size();

    // Mixed-radix strides of the bath register, first mode slowest.
    std::vector<Index> stride(nm, 1);
    for (std::size_t k = nm; k-- > 1;) stride[k - 1] = stride[k] * g.bath_dims_[k];

    // System-only operator: H_S plus counter terms.
    Matrix hs = h_s.matrix();
    for (const auto& c : g.couplings_) {
        if (!c.spec.counter_term) continue;
        double mom = 0.0;
        for (const auto& m : c.spec.modes) mom += std::norm(m.g) / m.omega;
        hs += lambda * lambda * mom * (c.x * c.x);
    }

    Matrix h = Matrix::Zero(dim, dim);
    std::vector<int> occ(nm, 0);
    for (Index b = 0; b < nb; ++b) {
        Index r = b;
        double eb = 0.0;
        for (std::size_t k = 0; k < nm; ++k) {
            occ[k] = static_cast<int>(r / stride[k]);
            r %= stride[k];
            eb += occ[k] * flat[k].omega;
        }
        for (Index s = 0; s < ds; ++s) {
            for (Index s2 = 0; s2 < ds; ++s2) h(s * nb + b, s2 * nb + b) += hs(s, s2);
            h(s * nb + b, s * nb + b) += eb;
        }
        // lambda X (g a^dag + conj(g) a): raise mode k from occ to occ + 1.
        for (std::size_t k = 0; k < nm; ++k) {
            if (occ[k] >= g.bath_dims_[k] - 1) continue;
            const Index b_up = b + stride[k];
            const cplx amp = lambda * flat[k].g * std::sqrt(static_cast<double>(occ[k] + 1));
            const Matrix& xk = g.couplings_[flat[k].bath].x;
            for (Index s = 0; s < ds; ++s)
                for (Index s2 = 0; s2 < ds; ++s2) {
                    const cplx v = amp * xk(s, s2);
                    if (v == cplx(0.0)) continue;
                    h(s * nb + b_up, s2 * nb + b) += v;
                    h(s2 * nb + b, s * nb + b_up) += std::conj(v);
                }
        }
    }
    g.h_tot_ = std::move(h);
    g.real_ = g.h_tot_.imag().cwiseAbs().maxCoeff() == 0.0;
    return g;
}

namespace {

// Boltzmann weights exp(-beta (E - E0)) for the model's spectrum.
RealVector boltzmann(const RealVector& e, double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("exact_mfg: beta must be positive");
    return (-beta * (e.array() - e.minCoeff())).exp();
}

} // namespace

DensityMatrix exact_mfg(const GlobalModel& model, double beta) {
    const auto& sp = model.spectrum();
    const RealVector w = boltzmann(sp.values, beta);
    const Index ds = model.system_dim();
    const Index nb = model.dim() / ds;
    const double cut = 1e-300;
    Matrix rho = Matrix::Zero(ds, ds);
    // rho_S(i, j) = sum_k w_k sum_b V(i nb + b, k) conj(V(j nb + b, k)).
    std::vector<Index> keep;
    for (Index k = 0; k < w.size(); ++k)
        if (w(k) > cut) keep.push_back(k);
    if (sp.real) {
        RealMatrix m(model.dim(), static_cast<Index>(keep.size()));
        for (std::size_t c = 0; c < keep.size(); ++c)
            m.col(static_cast<Index>(c)) = sp.real_vectors.col(keep[c]) * std::sqrt(w(keep[c]));
        for (Index i = 0; i < ds; ++i)
            for (Index j = 0; j <= i; ++j) {
                const double v = (m.middleRows(i * nb, nb).array() * m.middleRows(j * nb, nb).array()).sum();
                rho(i, j) = v;
                rho(j, i) = v;
            }
    } else {
        Matrix m(model.dim(), static_cast<Index>(keep.size()));
        for (std::size_t c = 0; c < keep.size(); ++c)
            m.col(static_cast<Index>(c)) = sp.vectors.col(keep[c]) * std::sqrt(w(keep[c]));
        for (Index i = 0; i < ds; ++i)
            for (Index j = 0; j <= i; ++j) {
                const cplx v = (m.middleRows(i * nb, nb).array() * m.middleRows(j * nb, nb).conjugate().array()).sum();
                rho(i, j) = v;
                rho(j, i) = std::conj(v);
            }
    }
    rho /= rho.trace().real();
    return DensityMatrix(std::move(rho));
}

Matrix exact_gibbs(const GlobalModel& model, double beta) {
    const auto& sp = model.spectrum();
    RealVector w = boltzmann(sp.values, beta);
    w /= w.sum();
    if (sp.real)
        return (sp.real_vectors * w.asDiagonal() * sp.real_vectors.transpose()).cast<cplx>();
    return sp.vectors * w.cast<cplx>().asDiagonal() * sp.vectors.adjoint();
}

double partition_ratio(const GlobalModel& model, double beta) {
    const RealVector& e = model.energies();
    const double e0 = e.minCoeff();
    double zsb = (-beta * (e.array() - e0)).exp().sum();
    // Bare truncated bath: product of per-mode sums, shifted by the same e0.
    double log_zb = 0.0;
    for (const auto& c : model.couplings())
        for (const auto& m : c.spec.modes) {
            double z = 0.0;
            for (int n = 0; n <= c.spec.fock_cutoff; ++n) z += std::exp(-beta * n * m.omega);
            log_zb += std::log(z);
        }
    return std::exp(std::log(zsb) - beta * e0 - log_zb);
}

Matrix exact_evolve(const GlobalModel& model, const Matrix& rho_sb0, double t) {
    if (rho_sb0.rows() != model.dim() || rho_sb0.cols() != model.dim())
        throw DomainError("exact_evolve: state dimension mismatch");
    if (t == 0.0) return rho_sb0;
    const auto& sp = model.spectrum();
    const Vector phase = (-cplx(0.0, 1.0) * t * sp.values.cast<cplx>().array()).exp();
    Matrix r;
    if (sp.real) {
        const Matrix v = sp.real_vectors.cast<cplx>();
        Matrix in = v.adjoint() * rho_sb0 * v;
        in = phase.asDiagonal() * in * phase.conjugate().asDiagonal();
        r = v * in * v.adjoint();
    } else {
        Matrix in = sp.vectors.adjoint() * rho_sb0 * sp.vectors;
        in = phase.asDiagonal() * in * phase.conjugate().asDiagonal();
        r = sp.vectors * in * sp.vectors.adjoint();
    }
    return 0.5 * (r + r.adjoint());
}

EffectiveDimension effective_dimension(const Matrix& rho_sb0, const GlobalModel& model) {
    if (rho_sb0.rows() != model.dim() || rho_sb0.cols() != model.dim())
        throw DomainError("effective_dimension: state dimension mismatch");
    const auto& sp = model.spectrum();
    const Matrix v = sp.real ? Matrix(sp.real_vectors.cast<cplx>()) : sp.vectors;
    const Matrix rv = rho_sb0 * v;
    RealVector p(model.dim());
    for (Index k = 0; k < model.dim(); ++k) p(k) = v.col(k).dot(rv.col(k)).real();
    EffectiveDimension d;
    d.value = 1.0 / p.squaredNorm() * std::pow(p.sum(), 2);
    for (Index k = 1; k < sp.values.size(); ++k)
        if (sp.values(k) - sp.values(k - 1) < 1e-10) ++d.near_degenerate_pairs;
    return d;
}

DBeta discrete_d_beta(const std::vector<Mode>& modes, double beta) {
    auto value = [modes, beta](double w) {
        double s = 0.0;
        for (const auto& m : modes) {
            const double c = 1.0 / std::tanh(0.5 * beta * m.omega);
            s += std::norm(m.g) * ((w * c + m.omega) / (m.omega * m.omega - w * w) - 1.0 / m.omega);
        }
        return s;
    };
    auto deriv = [modes, beta](double w) {
        double s = 0.0;
        for (const auto& m : modes) {
            const double c = 1.0 / std::tanh(0.5 * beta * m.omega);
            const double den = m.omega * m.omega - w * w;
            s += std::norm(m.g) * (c * (m.omega * m.omega + w * w) + 2.0 * w * m.omega) / (den * den);
        }
        return s;
    };
    return {value, deriv};
}

double discrete_reorganization(const std::vector<Mode>& modes, double lambda) {
    double s = 0.0;
    for (const auto& m : modes) s += std::norm(m.g) / m.omega;
    return lambda * lambda * s;
}

TruncationStudy truncation_study(const std::function<double(int)>& observable, int n_max_start,
                                 int rungs, double tol, int step) {
    if (n_max_start < 1 || rungs < 2 || step < 1 || !(tol > 0.0))
        throw DomainError("truncation_study: need n_max >= 1, at least two rungs, step >= 1, tol > 0");
    TruncationStudy st;
    for (int r = 0; r < rungs; ++r) {
        const int n = n_max_start + r * step;
        TruncationRow row{n, observable(n), std::numeric_limits<double>::quiet_NaN()};
        if (!st.rows.empty()) row.change = std::abs(row.value - st.rows.back().value);
        st.rows.push_back(row);
        if (r > 0 && row.change < tol) {
            st.value = row.value;
            st.cutoff = st.rows[st.rows.size() - 2].n_max;
            st.converged = true;
            return st;
        }
    }
    std::ostringstream os;
    os << "truncation_study: no convergence to " << tol << " within n_max <= " << st.rows.back().n_max
       << " (last change " << st.rows.back().change << ")";
    throw NumericalError(os.str());
}

} // namespace mfgkit::finite
