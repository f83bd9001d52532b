// mfstatics.cpp — Weak, ultrastrong and high-temperature mean force Gibbs states

#include "mfgkit/mfstatics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mfgkit {

std::string to_string(Regime r) {
    switch (r) {
    case Regime::Weak: return "weak";
    case Regime::Ultrastrong: return "ultrastrong";
    case Regime::HighT: return "high_t";
    case Regime::Gibbs: return "gibbs";
    }
    return "unknown";
}

DBeta DBeta::continuum(const bath::SpectralDensity& J, double beta) {
    return {[J, beta](double w) { return bath::d_beta(J, beta, w); },
            [J, beta](double w) { return bath::d_beta_deriv(J, beta, w); }};
}

Matrix weak_correction(const HermitianOperator& h_s, const BohrDecomposition& bohr, double beta,
                       const DBeta& d) {
    const Index n = h_s.dim();
    const Matrix tau = gibbs(h_s, beta).matrix();
    Matrix out = Matrix::Zero(n, n);
    const auto& modes = bohr.modes;
    std::vector<double> dv(modes.size(), 0.0);
    for (std::size_t m = 0; m < modes.size(); ++m)
        dv[m] = modes[m].omega == 0.0 ? 0.0 : d.value(modes[m].omega);

    for (std::size_t m = 0; m < modes.size(); ++m) {
        const Matrix& xm = modes[m].op;
        const double w = modes[m].omega;
        if (w == 0.0) continue;  // D_beta(0) = 0 and [X_0^dag, tau X_0] = 0
        const Matrix xx = xm * xm.adjoint();
        const cplx tr = (tau * xx).trace();
        out += beta * dv[m] * (tau * xx - tr * tau);
        const Matrix xd = xm.adjoint();
        out += d.deriv(w) * (xd * tau * xm - tau * xm * xd);
    }
    for (std::size_t m = 0; m < modes.size(); ++m) {
        if (modes[m].omega == 0.0) continue;
        const Matrix xmd_tau = modes[m].op.adjoint() * tau;
        for (std::size_t k = 0; k < modes.size(); ++k) {
            if (k == m) continue;
            const double gap = modes[k].omega - modes[m].omega;
            if (std::abs(gap) < bohr.degeneracy_tol)
                throw NumericalError("weak_correction: unmerged degenerate Bohr frequencies");
            const Matrix c = modes[k].op * xmd_tau - xmd_tau * modes[k].op;
            out += (c + c.adjoint()) * (dv[m] / gap);
        }
    }
    return out;
}

double weak_validity_bound(const HermitianOperator& h_s, const BohrDecomposition& bohr, double beta,
                           const DBeta& d) {
    const Matrix tau = gibbs(h_s, beta).matrix();
    double s = 0.0;
    for (const auto& m : bohr.modes) {
        if (m.omega == 0.0) continue;
        s += (tau * m.op * m.op.adjoint()).trace().real() * d.value(m.omega);
    }
    s = std::abs(beta * s);
    if (s == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / std::sqrt(s);
}

double weak_validity_bound(const HermitianOperator& h_s, const HermitianOperator& x,
                           const bath::BathParams& bath) {
    bath.validate();
    return weak_validity_bound(h_s, decompose(h_s, x), bath.beta, DBeta::continuum(bath.J, bath.beta));
}

MfgResult mfg_weak(const HermitianOperator& h_s, const HermitianOperator& x, double beta,
                   double lambda, const DBeta& d) {
    if (h_s.dim() != x.dim()) throw DomainError("mfg_weak: dimension mismatch");
    if (!(lambda >= 0.0)) throw DomainError("mfg_weak: lambda must be non-negative");
    const DensityMatrix tau = gibbs(h_s, beta);
    MfgResult r{tau, Regime::Weak, lambda, {}};
    if (lambda == 0.0) {
        r.diagnostics["clamp"] = 0.0;
        return r;
    }
    const BohrDecomposition bohr = decompose(h_s, x);
    const double bound = weak_validity_bound(h_s, bohr, beta, d);
    r.diagnostics["validity_lambda_max"] = bound;
    if (lambda > 10.0 * bound) {
        std::ostringstream os;
        os << "mfg_weak: lambda = " << lambda << " exceeds ten times the weak-coupling bound " << bound;
        throw DomainError(os.str());
    }
    r.diagnostics["above_validity_bound"] = lambda > bound ? 1.0 : 0.0;
    const Matrix t2 = weak_correction(h_s, bohr, beta, d);
    double clamp = 0.0;
    r.state = DensityMatrix::project(tau.matrix() + lambda * lambda * t2, &clamp);
    r.diagnostics["clamp"] = clamp;
    return r;
}

MfgResult mfg_weak(const HermitianOperator& h_s, const HermitianOperator& x,
                   const bath::BathParams& bath) {
    bath.validate();
    return mfg_weak(h_s, x, bath.beta, bath.lambda, DBeta::continuum(bath.J, bath.beta));
}

namespace {

// Eigenvectors of a non-degenerate Hermitian X, eigenvalues descending, each
// column phased so its largest component is real and positive.
std::pair<Matrix, RealVector> pointer_basis(const HermitianOperator& x) {
    const Eigh e = eigh(x);
    const Index n = x.dim();
    const double scale = std::max(e.values.cwiseAbs().maxCoeff(), 1e-300);
    for (Index k = 1; k < n; ++k)
        if (e.values(k) - e.values(k - 1) <= 1e-9 * scale)
            throw DomainError("coupling operator X has a degenerate spectrum; the pointer-basis "
                              "construction requires rank-one eigenprojectors");
    Matrix v(n, n);
    RealVector w(n);
    for (Index k = 0; k < n; ++k) {
        Vector col = e.vectors.col(n - 1 - k);
        Index imax = 0;
        col.cwiseAbs().maxCoeff(&imax);
        col *= std::conj(col(imax)) / std::abs(col(imax));
        v.col(k) = col;
        w(k) = e.values(n - 1 - k);
    }
    return {v, w};
}

} // namespace

PointerSplit pointer_split(const HermitianOperator& h_s, const HermitianOperator& x) {
    if (h_s.dim() != x.dim()) throw DomainError("pointer_split: dimension mismatch");
    auto [v, w] = pointer_basis(x);
    const Matrix rotated = v.adjoint() * h_s.matrix() * v;
    PointerSplit s;
    s.pointer_basis = v;
    s.x_values = w;
    s.eps = rotated.diagonal().real();
    s.h_eps = s.eps.cast<cplx>().asDiagonal();
    s.h_j = rotated - s.h_eps;
    s.h_j.diagonal().setZero();
    s.delta = s.h_j;
    return s;
}

MfgResult mfg_ultrastrong(const HermitianOperator& h_s, const HermitianOperator& x, double beta) {
    const PointerSplit s = pointer_split(h_s, x);
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("mfg_ultrastrong: bad beta");
    RealVector p = (-beta * (s.eps.array() - s.eps.minCoeff())).exp();
    p /= p.sum();
    Matrix state = s.pointer_basis * p.cast<cplx>().asDiagonal() * s.pointer_basis.adjoint();
    state = 0.5 * (state + state.adjoint()).eval();
    return {DensityMatrix(std::move(state)), Regime::Ultrastrong, std::numeric_limits<double>::infinity(), {}};
}

MfgResult mfg_high_t(const HermitianOperator& h_s, const std::vector<Matrix>& projectors,
                     const std::vector<double>& reorganization, double beta) {
    const Index n = h_s.dim();
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("mfg_high_t: bad beta");
    if (projectors.size() != static_cast<std::size_t>(n))
        throw DomainError("mfg_high_t: need one site projector per basis state");
    if (reorganization.size() != projectors.size())
        throw DomainError("mfg_high_t: one reorganization energy per projector");
    Matrix basis(n, n);
    Matrix total = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < projectors.size(); ++k) {
        const Matrix& p = projectors[k];
        if (p.rows() != n || p.cols() != n) throw DomainError("mfg_high_t: projector dimension mismatch");
        if ((p * p - p).cwiseAbs().maxCoeff() > 1e-10 || hermiticity_deviation(p) > 1e-12)
            throw DomainError("mfg_high_t: X_n must be an orthogonal projector");
        if (std::abs(p.trace().real() - 1.0) > 1e-10)
            throw DomainError("mfg_high_t: X_n must have rank one");
        const Eigh e = eigh(p);
        basis.col(static_cast<Index>(k)) = e.vectors.col(n - 1);
        total += p;
        if (!(reorganization[k] >= 0.0)) throw DomainError("mfg_high_t: negative reorganization energy");
    }
    if ((total - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10)
        throw DomainError("mfg_high_t: projectors must resolve the identity in one orthonormal basis");
    const Matrix rotated = basis.adjoint() * h_s.matrix() * basis;
    Matrix h_eps = Matrix::Zero(n, n);
    h_eps.diagonal() = rotated.diagonal().real().cast<cplx>();
    Matrix h_j = rotated - h_eps;
    RealVector dress(n);
    double ell_max = 0.0;
    for (Index k = 0; k < n; ++k) {
        dress(k) = std::exp(-beta * reorganization[static_cast<std::size_t>(k)] / 6.0);
        ell_max = std::max(ell_max, reorganization[static_cast<std::size_t>(k)]);
    }
    const Matrix dressed = dress.cast<cplx>().asDiagonal() * h_j * dress.cast<cplx>().asDiagonal();
    Matrix h_eff = h_eps + dressed;
    h_eff = 0.5 * (h_eff + h_eff.adjoint()).eval();
    const DensityMatrix site = gibbs(HermitianOperator(h_eff), beta);
    Matrix state = basis * site.matrix() * basis.adjoint();
    state = 0.5 * (state + state.adjoint()).eval();
    MfgResult r{DensityMatrix(std::move(state)), Regime::HighT, 0.0, {}};
    r.diagnostics["ell_beta"] = ell_max * beta;
    return r;
}

MfgResult mfg_high_t(const HermitianOperator& h_s, const std::vector<Matrix>& projectors,
                     const std::vector<SiteBath>& baths, double beta) {
    std::vector<double> ell;
    ell.reserve(baths.size());
    double lam = 0.0;
    for (const auto& b : baths) {
        ell.push_back(bath::reorganization_energy(b.J, b.lambda));
        lam = std::max(lam, b.lambda);
    }
    MfgResult r = mfg_high_t(h_s, projectors, ell, beta);
    r.lambda = lam;
    return r;
}

HermitianOperator mean_force_hamiltonian(const DensityMatrix& tau_mf, double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("mean_force_hamiltonian: bad beta");
    const Eigh e = eigh(tau_mf.matrix());
    if (!(e.values(0) > 0.0))
        throw DomainError("mean_force_hamiltonian: state is singular (zero eigenvalue)");
    const RealVector h = -e.values.array().log() / beta;
    Matrix m = e.vectors * h.cast<cplx>().asDiagonal() * e.vectors.adjoint();
    m = 0.5 * (m + m.adjoint()).eval();
    return HermitianOperator(std::move(m));
}

} // namespace mfgkit
