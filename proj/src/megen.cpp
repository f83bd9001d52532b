// megen.cpp — Master-equation generators, evolution and steady states

#include "mfgkit/megen.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace mfgkit::me {

std::string to_string(Kind k) {
    switch (k) {
    case Kind::Davies: return "davies";
    case Kind::BrmeAsymptotic: return "brme";
    case Kind::BrmeAtTime: return "brme_at_time";
    case Kind::SecularFull: return "secular_full";
    case Kind::SecularPartial: return "secular_partial";
    case Kind::BrmeRealOnly: return "brme_real_only";
    case Kind::PauliUltrastrong: return "pauli_ultrastrong";
    }
    return "unknown";
}

Matrix Liouvillian::apply(const Matrix& rho) const {
    if (rho.rows() != dim || rho.cols() != dim) throw DomainError("Liouvillian::apply: dimension mismatch");
    return unvec(matrix * vec(rho), dim);
}

Matrix commutator_superop(const Matrix& h) {
    const Index d = h.rows();
    const Matrix id = Matrix::Identity(d, d);
    return cplx(0.0, -1.0) * (kron(id, h) - kron(Matrix(h.transpose()), id));
}

Matrix dissipator_superop(const Matrix& a, const Matrix& b) {
    const Index d = a.rows();
    const Matrix id = Matrix::Identity(d, d);
    const Matrix k = b.adjoint() * a;
    return kron(Matrix(b.conjugate()), a) - 0.5 * (kron(id, k) + kron(Matrix(k.transpose()), id));
}

namespace {

Ingredients base_ingredients(const HermitianOperator& h_s, const HermitianOperator& x,
                             const bath::BathParams& bath, bool counter_term) {
    bath.validate();
    if (h_s.dim() != x.dim()) throw DomainError("generator: H_S and X dimensions differ");
    Ingredients in;
    in.h_s = h_s;
    in.bohr = decompose(h_s, x);
    in.lambda = bath.lambda;
    in.beta = bath.beta;
    in.counter_term = counter_term;
    in.reorganization = counter_term ? bath::reorganization_energy(bath.J, 1.0) : 0.0;
    return in;
}

// Generator from an ingredient set. Pairs (m, n) are kept when `keep(m, n)`;
// the counter term enters as Gamma_m -> Gamma_m + i * reorganization.
Liouvillian assemble_brme(const Ingredients& in, const std::function<bool(std::size_t, std::size_t)>& keep,
                          bool real_only, Kind kind) {
    const Index d = in.h_s.dim();
    const auto& modes = in.bohr.modes;
    const double l2 = in.lambda * in.lambda;
    std::vector<cplx> g(in.gamma.size());
    for (std::size_t m = 0; m < g.size(); ++m) {
        g[m] = real_only ? cplx(in.gamma[m].real(), 0.0) : in.gamma[m];
        if (!real_only && in.counter_term) g[m] += cplx(0.0, in.reorganization);
    }
    Liouvillian L;
    L.kind = kind;
    L.dim = d;
    L.lambda = in.lambda;
    L.time = in.time;
    L.lamb_shift = Matrix::Zero(d, d);
    L.lamb_shift_perp = Matrix::Zero(d, d);
    Matrix diss = Matrix::Zero(d * d, d * d);
    if (l2 != 0.0) {
        for (std::size_t m = 0; m < modes.size(); ++m)
            for (std::size_t n = 0; n < modes.size(); ++n) {
                if (!keep(m, n)) continue;
                ++L.terms;
                const cplx gmn = g[m] + std::conj(g[n]);
                const cplx shift = (g[m] - std::conj(g[n])) / cplx(0.0, 2.0);
                const Matrix k = modes[n].op.adjoint() * modes[m].op;
                (m == n ? L.lamb_shift : L.lamb_shift_perp) += l2 * shift * k;
                if (gmn != cplx(0.0)) diss += l2 * gmn * dissipator_superop(modes[m].op, modes[n].op);
            }
    }
    L.lamb_shift = 0.5 * (L.lamb_shift + L.lamb_shift.adjoint()).eval();
    L.lamb_shift_perp = 0.5 * (L.lamb_shift_perp + L.lamb_shift_perp.adjoint()).eval();
    L.matrix = commutator_superop(in.h_s.matrix() + L.lamb_shift + L.lamb_shift_perp) + diss;
    return L;
}

} // namespace

Ingredients ingredients(const HermitianOperator& h_s, const HermitianOperator& x,
                        const bath::BathParams& bath, bath::Asymptotic, bool counter_term) {
    Ingredients in = base_ingredients(h_s, x, bath, counter_term);
    for (const auto& m : in.bohr.modes) in.gamma.push_back(bath::gamma_m(bath.J, bath.beta, m.omega, bath::kAsymptotic));
    return in;
}

Ingredients ingredients(const HermitianOperator& h_s, const HermitianOperator& x,
                        const bath::BathParams& bath, double t, bool counter_term) {
    Ingredients in = base_ingredients(h_s, x, bath, counter_term);
    in.time = t;
    for (const auto& m : in.bohr.modes) in.gamma.push_back(bath::gamma_m(bath.J, bath.beta, m.omega, t));
    return in;
}

Liouvillian davies_generator(const Ingredients& in) {
    return assemble_brme(in, [](std::size_t m, std::size_t n) { return m == n; }, false, Kind::Davies);
}

Liouvillian davies_generator(const HermitianOperator& h_s, const HermitianOperator& x,
                             const bath::BathParams& bath, bool counter_term) {
    return davies_generator(ingredients(h_s, x, bath, bath::kAsymptotic, counter_term));
}

Liouvillian brme_generator(const Ingredients& in) {
    const Kind kind = std::isinf(in.time) ? Kind::BrmeAsymptotic : Kind::BrmeAtTime;
    return assemble_brme(in, [](std::size_t, std::size_t) { return true; }, false, kind);
}

Liouvillian brme_generator(const HermitianOperator& h_s, const HermitianOperator& x,
                           const bath::BathParams& bath, bath::Asymptotic, bool counter_term) {
    return brme_generator(ingredients(h_s, x, bath, bath::kAsymptotic, counter_term));
}

Liouvillian brme_generator(const HermitianOperator& h_s, const HermitianOperator& x,
                           const bath::BathParams& bath, double t, bool counter_term) {
    return brme_generator(ingredients(h_s, x, bath, t, counter_term));
}

Liouvillian secular_filter(const Ingredients& in, double cutoff) {
    if (cutoff == kFullSecular) {
        Liouvillian L = assemble_brme(in, [](std::size_t m, std::size_t n) { return m == n; }, false,
                                      Kind::SecularFull);
        L.cutoff = 0.0;
        return L;
    }
    if (!(cutoff >= 0.0)) throw DomainError("secular_filter: cutoff must be non-negative or FULL");
    const auto& modes = in.bohr.modes;
    Liouvillian L = assemble_brme(
        in,
        [&modes, cutoff](std::size_t m, std::size_t n) {
            return std::abs(modes[m].omega - modes[n].omega) <= cutoff;
        },
        false, Kind::SecularPartial);
    L.cutoff = cutoff;
    return L;
}

Liouvillian brme_real_only(const Ingredients& in) {
    return assemble_brme(in, [](std::size_t, std::size_t) { return true; }, true, Kind::BrmeRealOnly);
}

Liouvillian brme_real_only(const HermitianOperator& h_s, const HermitianOperator& x,
                           const bath::BathParams& bath) {
    return brme_real_only(ingredients(h_s, x, bath, bath::kAsymptotic, false));
}

RateModel RateModel::fermi(double beta, double nu0) {
    if (!(beta > 0.0) || !(nu0 > 0.0)) throw DomainError("RateModel::fermi: beta and nu0 must be positive");
    RateModel r;
    r.f = [beta, nu0](double e) {
        // Same function as nu0 / (1 + exp(-beta E)).
        return nu0 / (1.0 + std::exp(-beta * e));
    };
    r.dephasing_floor = 0.5 * nu0;
    return r;
}

namespace {

void check_kms(const RateModel& model, double beta, double scale) {
    if (!model.f) throw DomainError("pauli_ultrastrong: rate function is empty");
    const double span = std::max(30.0 / beta, 2.0 * scale);
    for (int k = 0; k <= 120; ++k) {
        const double e = span * (k / 60.0 - 1.0);
        const double fp = model.f(e), fm = model.f(-e);
        if (!(fp >= 0.0) || !(fm >= 0.0)) throw DomainError("pauli_ultrastrong: rate function must be non-negative");
        const double rhs = std::exp(-beta * e) * fp;
        if (std::abs(fm - rhs) > 1e-8 * std::max({fm, rhs, 1e-300})) {
            std::ostringstream os;
            os << "pauli_ultrastrong: rate function violates f(-E) = exp(-beta E) f(E) at E = " << e;
            throw DomainError(os.str());
        }
    }
}

} // namespace

RealMatrix pauli_rates(const PointerSplit& split, const RateModel& model) {
    const Index d = split.eps.size();
    RealMatrix k = RealMatrix::Zero(d, d);
    for (Index m = 0; m < d; ++m)
        for (Index n = 0; n < d; ++n)
            if (m != n) k(m, n) = std::norm(split.delta(m, n)) * model.f(split.eps(n) - split.eps(m));
    return k;
}

Liouvillian pauli_ultrastrong(const PointerSplit& split, double beta, const RateModel& model) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("pauli_ultrastrong: bad beta");
    const Index d = split.eps.size();
    const double scale = d > 1 ? split.eps.maxCoeff() - split.eps.minCoeff() : 0.0;
    check_kms(model, beta, scale);
    const RealMatrix k = pauli_rates(split, model);
    double fastest = 0.0;
    for (Index n = 0; n < d; ++n) fastest = std::max(fastest, k.col(n).sum());
    const double deph = std::max(fastest, model.dephasing_floor);

    Matrix lp = Matrix::Zero(d * d, d * d);
    for (Index m = 0; m < d; ++m)
        for (Index n = 0; n < d; ++n) {
            const Index row = m + n * d;
            if (m == n) {
                for (Index q = 0; q < d; ++q) {
                    if (q == m) continue;
                    lp(row, q + q * d) += k(m, q);
                    lp(row, row) -= k(q, m);
                }
            } else {
                lp(row, row) = cplx(-deph, -(split.eps(m) - split.eps(n)));
            }
        }
    const Matrix s = kron(Matrix(split.pointer_basis.conjugate()), split.pointer_basis);
    Liouvillian L;
    L.kind = Kind::PauliUltrastrong;
    L.dim = d;
    L.matrix = s * lp * s.adjoint();
    L.lambda = std::numeric_limits<double>::infinity();
    L.lamb_shift = Matrix::Zero(d, d);
    L.lamb_shift_perp = Matrix::Zero(d, d);
    L.terms = static_cast<std::size_t>((k.array() > 0.0).count());
    return L;
}

namespace {

Monitor monitor(const Matrix& rho, cplx tr0) {
    Monitor mo;
    mo.trace_deviation = std::abs(rho.trace() - tr0);
    mo.hermiticity_deviation = hermiticity_deviation(rho);
    const Matrix h = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    mo.min_eigenvalue = es.eigenvalues()(0);
    return mo;
}

// Dormand-Prince 5(4) on y' = A y from t0 to t1 with step-size memory `h`.
// hermitian_dim > 0 projects each accepted step onto Hermitian matrices.
void dopri_segment(const Matrix& a, Vector& y, double t0, double t1, double& h, const EvolveOptions& opt,
                   std::size_t& steps, Index hermitian_dim) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
    (void)c2, (void)c3, (void)c4, (void)c5;
    double t = t0;
    Vector k1 = a * y;
    while (t < t1) {
        if (steps >= opt.max_steps) throw NumericalError("evolve: step budget exhausted");
        const bool last = t + h >= t1;
        const double hh = last ? t1 - t : h;
        const Vector k2 = a * (y + hh * (a21 * k1));
        const Vector k3 = a * (y + hh * (a31 * k1 + a32 * k2));
        const Vector k4 = a * (y + hh * (a41 * k1 + a42 * k2 + a43 * k3));
        const Vector k5 = a * (y + hh * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Vector k6 = a * (y + hh * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const Vector yn = y + hh * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Vector k7 = a * yn;
        const Vector err = hh * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double en = 0.0;
        for (Index i = 0; i < y.size(); ++i) {
            const double sc = opt.atol + opt.rtol * std::max(std::abs(y(i)), std::abs(yn(i)));
            en = std::max(en, std::abs(err(i)) / sc);
        }
        ++steps;
        const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
        if (en <= 1.0) {
            t = last ? t1 : t + hh;
            y = yn;
            k1 = k7;
            if (hermitian_dim > 0) {
                const Matrix m = unvec(y, hermitian_dim);
                y = vec(0.5 * (m + m.adjoint()));
                k1 = a * y;
            }
            if (!last || fac < 1.0) h = hh * fac;
        } else {
            h = hh * fac;
            if (h < 1e-14 * std::max(std::abs(t), 1.0)) throw NumericalError("evolve: step size underflow");
        }
    }
}

Trajectory evolve_impl(const std::vector<double>& breaks, const std::vector<const Liouvillian*>& gens,
                       const Matrix& rho0, const std::vector<double>& t_grid, const EvolveOptions& opt) {
    const Index d = gens.front()->dim;
    if (rho0.rows() != d || rho0.cols() != d) throw DomainError("evolve: rho0 dimension mismatch");
    if (t_grid.empty() || t_grid.front() != 0.0) throw DomainError("evolve: t_grid must start at 0");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1])) throw DomainError("evolve: t_grid must be strictly ascending");
    const cplx tr0 = rho0.trace();
    const bool hermitian = (rho0 - rho0.adjoint()).cwiseAbs().maxCoeff() == 0.0;
    Trajectory tr;
    Vector y = vec(rho0);
    double norm = 0.0;
    for (const auto* g : gens) norm = std::max(norm, g->matrix.cwiseAbs().rowwise().sum().maxCoeff());
    double h = norm > 0.0 ? 0.05 / norm : 1.0;
    if (t_grid.size() > 1) h = std::min(h, t_grid[1]);
    auto record = [&](double t) {
        Matrix rho = unvec(y, d);
        Monitor mo = monitor(rho, tr0);
        if (mo.trace_deviation > opt.trace_abort) {
            std::ostringstream os;
            os << "evolve: trace drift " << mo.trace_deviation << " at t = " << t;
            throw NumericalError(os.str());
        }
        tr.times.push_back(t);
        tr.states.push_back(std::move(rho));
        tr.monitors.push_back(mo);
    };
    record(0.0);
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        double t = t_grid[i - 1];
        const double t_end = t_grid[i];
        while (t < t_end) {
            // Active piece and its right edge.
            std::size_t p = 0;
            while (p + 1 < breaks.size() && breaks[p + 1] <= t) ++p;
            const double edge = p + 1 < breaks.size() ? std::min(breaks[p + 1], t_end) : t_end;
            dopri_segment(gens[p]->matrix, y, t, edge, h, opt, tr.steps, hermitian ? d : 0);
            t = edge;
        }
        record(t_end);
    }
    return tr;
}

} // namespace

Trajectory evolve(const Liouvillian& L, const Matrix& rho0, const std::vector<double>& t_grid,
                  const EvolveOptions& opt) {
    return evolve_impl({0.0}, {&L}, rho0, t_grid, opt);
}

Trajectory evolve_piecewise(const std::vector<double>& breaks, const std::vector<Liouvillian>& generators,
                            const Matrix& rho0, const std::vector<double>& t_grid, const EvolveOptions& opt) {
    if (generators.empty() || breaks.size() != generators.size() || breaks.front() != 0.0)
        throw DomainError("evolve_piecewise: need one break per generator, starting at 0");
    for (std::size_t i = 1; i < breaks.size(); ++i)
        if (!(breaks[i] > breaks[i - 1])) throw DomainError("evolve_piecewise: breaks must ascend");
    std::vector<const Liouvillian*> g;
    for (const auto& l : generators) {
        if (l.dim != generators.front().dim) throw DomainError("evolve_piecewise: generator dimensions differ");
        g.push_back(&l);
    }
    return evolve_impl(breaks, g, rho0, t_grid, opt);
}

namespace {

// Orthonormal (Frobenius, real inner product) Hermitian basis of the span of
// the Hermitian and anti-Hermitian parts of the given matrices.
std::vector<Matrix> hermitian_basis(const std::vector<Matrix>& ms, std::size_t want) {
    std::vector<Matrix> basis;
    auto add = [&](Matrix h) {
        for (const auto& b : basis) h -= (b.adjoint() * h).trace().real() * b;
        const double n = h.norm();
        if (n > 1e-6) basis.push_back(h / n);
    };
    // Trace-carrying combinations first so that the leading states are well-conditioned.
    for (const auto& m : ms) {
        const cplx tr = m.trace();
        const Matrix r = std::abs(tr) > 1e-12 ? Matrix(m / tr) : m;
        add(0.5 * (r + r.adjoint()));
        if (basis.size() == want) break;
        add(cplx(0.0, -0.5) * (r - r.adjoint()));
        if (basis.size() == want) break;
    }
    return basis;
}

// Larger-trace part of the Jordan decomposition, trace normalized.
DensityMatrix dominant_part(const Matrix& h) {
    const Eigh e = eigh(0.5 * (h + h.adjoint()));
    RealVector pos = e.values.cwiseMax(0.0), neg = (-e.values).cwiseMax(0.0);
    const RealVector& keep = pos.sum() >= neg.sum() ? pos : neg;
    Matrix r = e.vectors * keep.cast<cplx>().asDiagonal() * e.vectors.adjoint();
    r /= r.trace().real();
    return DensityMatrix::project(0.5 * (r + r.adjoint()));
}

} // namespace

SteadyStateReport steady_state(const Liouvillian& L) {
    const Index d = L.dim;
    const Index n = d * d;
    if (L.matrix.rows() != n || L.matrix.cols() != n) throw DomainError("steady_state: malformed generator");
    const double lnorm = L.matrix.norm();
    Eigen::ComplexEigenSolver<Matrix> es(L.matrix, true);
    if (es.info() != Eigen::Success) throw NumericalError("steady_state: eigendecomposition failed");
    const Vector& ev = es.eigenvalues();

    SteadyStateReport rep;
    std::vector<Index> null;
    for (double rel : {1e-10, 1e-9, 1e-8}) {
        null.clear();
        for (Index k = 0; k < n; ++k)
            if (std::abs(ev(k)) <= rel * lnorm) null.push_back(k);
        rep.null_tolerance = rel;
        if (!null.empty()) break;
    }
    if (null.empty()) throw NumericalError("steady_state: empty numerical null space");

    double gap = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < n; ++k)
        if (std::find(null.begin(), null.end(), k) == null.end()) gap = std::min(gap, -ev(k).real());
    rep.spectral_gap = gap;
    rep.unique = null.size() == 1;

    std::vector<Matrix> ms;
    for (Index k : null) ms.push_back(unvec(es.eigenvectors().col(k), d));
    if (rep.unique) {
        const cplx tr = ms[0].trace();
        if (std::abs(tr) < 1e-12 * ms[0].norm())
            throw NumericalError("steady_state: null vector is traceless");
        const Matrix r = ms[0] / tr;
        rep.states.push_back(DensityMatrix::project(0.5 * (r + r.adjoint())));
    } else {
        for (const auto& h : hermitian_basis(ms, null.size())) rep.states.push_back(dominant_part(h));
    }
    for (const auto& s : rep.states) rep.residual = std::max(rep.residual, (L.matrix * vec(s.matrix())).norm());
    return rep;
}

double trace_preservation_error(const Liouvillian& L) {
    const Vector id = vec(Matrix::Identity(L.dim, L.dim));
    return (id.adjoint() * L.matrix).cwiseAbs().maxCoeff();
}

double hermiticity_preservation_error(const Liouvillian& L, unsigned seed, int probes) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> nd;
    double worst = 0.0;
    for (int p = 0; p < probes; ++p) {
        Matrix r(L.dim, L.dim);
        for (Index i = 0; i < r.size(); ++i) r.data()[i] = cplx(nd(rng), nd(rng));
        const Matrix a = L.apply(r.adjoint());
        const Matrix b = L.apply(r).adjoint();
        worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
    }
    return worst;
}

} // namespace mfgkit::me
