// cli_tasks.cpp — Task runners: statics, dynamics, steady-state comparison,
// finite-bath oracle and oscillator statics

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "mfgkit/clexact.hpp"
#include "mfgkit/cli.hpp"
#include "mfgkit/eigenops.hpp"
#include "mfgkit/finitebath.hpp"
#include "mfgkit/megen.hpp"
#include "mfgkit/mfstatics.hpp"

namespace mfgkit::cli {

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

void Table::add(std::vector<std::string> row) {
    if (row.size() != columns.size()) throw std::logic_error("table " + name + ": row width mismatch");
    rows.push_back(std::move(row));
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Formula {
    std::string name;
    std::optional<DensityMatrix> state;
    std::string note;
};

// Non-degenerate pointer operator whose eigenprojectors are the site projectors.
Matrix site_pointer(Index d) {
    Matrix x = Matrix::Zero(d, d);
    for (Index k = 0; k < d; ++k) x(k, k) = double(d - 1 - k);
    return x;
}

Matrix pointer_operator(const Scenario& s) {
    return s.model == CouplingModel::Sites ? site_pointer(s.h_s.rows()) : s.x;
}

struct WeakState {
    std::optional<DensityMatrix> state;
    double bound = std::numeric_limits<double>::infinity();
    double clamp = 0.0;
    std::string note;
};

// tau + lambda^2 sum_b tau^(2)_b over independent baths sharing one D_beta.
WeakState weak_state(const Scenario& s, double lambda, const DBeta& d) {
    const HermitianOperator h(s.h_s);
    const DensityMatrix tau = gibbs(h, s.beta);
    WeakState w;
    if (lambda == 0.0) {
        w.state = tau;
        return w;
    }
    Matrix t2 = Matrix::Zero(h.dim(), h.dim());
    double inv_b2 = 0.0;
    for (const Matrix& x : s.coupling_operators()) {
        const BohrDecomposition bohr = decompose(h, HermitianOperator(x));
        const double b = weak_validity_bound(h, bohr, s.beta, d);
        if (std::isfinite(b)) inv_b2 += 1.0 / (b * b);
        t2 += weak_correction(h, bohr, s.beta, d);
    }
    w.bound = inv_b2 > 0.0 ? 1.0 / std::sqrt(inv_b2) : std::numeric_limits<double>::infinity();
    if (lambda > 10.0 * w.bound) {
        w.note = "lambda exceeds ten times the weak-coupling bound " + fmt(w.bound);
        return w;
    }
    w.state = DensityMatrix::project(tau.matrix() + lambda * lambda * t2, &w.clamp);
    return w;
}

Formula ultrastrong_formula(const Scenario& s) {
    Formula f{"ultrastrong", std::nullopt, ""};
    try {
        f.state = mfg_ultrastrong(HermitianOperator(s.h_s), HermitianOperator(pointer_operator(s)), s.beta).state;
    } catch (const DomainError& e) {
        f.note = e.what();
    }
    return f;
}

Formula high_t_formula(const Scenario& s, const std::vector<double>& ell) {
    Formula f{"high_t", std::nullopt, ""};
    if (s.model != CouplingModel::Sites) {
        f.note = "needs one bath per site projector (coupling.model = sites)";
        return f;
    }
    f.state = mfg_high_t(HermitianOperator(s.h_s), s.coupling_operators(), ell, s.beta).state;
    return f;
}

std::vector<Formula> formulae(const Scenario& s, const WeakState& weak) {
    const double ell = bath::reorganization_energy(s.J, s.lambda);
    std::vector<Formula> out;
    const DensityMatrix tau = gibbs(HermitianOperator(s.h_s), s.beta);
    if (s.lambda == 0.0) {
        const std::string note = "zero coupling: the mean force state is the Gibbs state";
        return {{"gibbs", tau, ""}, {"weak", tau, ""}, {"ultrastrong", tau, note}, {"high_t", tau, note}};
    }
    out.push_back({"gibbs", tau, ""});
    out.push_back({"weak", weak.state, weak.note});
    out.push_back(ultrastrong_formula(s));
    out.push_back(high_t_formula(s, std::vector<double>(std::size_t(s.h_s.rows()), ell)));
    return out;
}

// State observables in the H_S eigenbasis (ascending energy).
struct Observer {
    Matrix v;
    Index d = 0;

    explicit Observer(const Matrix& h) : v(eigh(HermitianOperator(h)).vectors), d(h.rows()) {}

    std::vector<std::string> columns() const {
        std::vector<std::string> c;
        for (Index k = 0; k < d; ++k) c.push_back("pop_e" + std::to_string(k));
        for (Index j = 0; j < d; ++j)
            for (Index k = j + 1; k < d; ++k) {
                const std::string p = "coh_e" + std::to_string(j) + std::to_string(k);
                c.push_back(p + "_re");
                c.push_back(p + "_im");
                c.push_back(p + "_abs");
            }
        if (d == 2) {
            c.push_back("excited_pop");
            c.push_back("coherence_abs");
        }
        return c;
    }

    std::vector<std::string> values(const Matrix& rho) const {
        const Matrix r = v.adjoint() * rho * v;
        std::vector<std::string> out;
        for (Index k = 0; k < d; ++k) out.push_back(fmt(r(k, k).real()));
        for (Index j = 0; j < d; ++j)
            for (Index k = j + 1; k < d; ++k) {
                out.push_back(fmt(r(j, k).real()));
                out.push_back(fmt(r(j, k).imag()));
                out.push_back(fmt(std::abs(r(j, k))));
            }
        if (d == 2) {
            out.push_back(fmt(r(1, 1).real()));
            out.push_back(fmt(std::abs(r(0, 1))));
        }
        return out;
    }

    std::vector<std::string> blanks() const { return std::vector<std::string>(columns().size(), "nan"); }

    Matrix state(const std::string& kind) const {
        Matrix r = Matrix::Zero(d, d);
        if (kind == "ground") r(0, 0) = 1.0;
        else if (kind == "excited") r(d - 1, d - 1) = 1.0;
        else if (kind == "mixed") r = Matrix::Identity(d, d) / double(d);
        else if (kind == "plus") r(0, 0) = r(0, d - 1) = r(d - 1, 0) = r(d - 1, d - 1) = 0.5;
        return v * r * v.adjoint();
    }
};

std::vector<std::string> matrix_columns(Index d) {
    std::vector<std::string> c;
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) {
            const std::string p = "rho_" + std::to_string(i) + std::to_string(j);
            c.push_back(p + "_re");
            c.push_back(p + "_im");
        }
    return c;
}

std::vector<std::string> matrix_values(const Matrix& m) {
    std::vector<std::string> out;
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) {
            out.push_back(fmt(m(i, j).real()));
            out.push_back(fmt(m(i, j).imag()));
        }
    return out;
}

template <typename... V>
std::vector<std::string> cat(std::vector<std::string> a, const V&... rest) {
    (a.insert(a.end(), rest.begin(), rest.end()), ...);
    return a;
}

me::Liouvillian combine(std::vector<me::Liouvillian> parts, const Matrix& h) {
    me::Liouvillian L = std::move(parts.front());
    for (std::size_t k = 1; k < parts.size(); ++k) {
        L.matrix += parts[k].matrix - me::commutator_superop(h);
        L.terms += parts[k].terms;
        if (L.lamb_shift.size() == parts[k].lamb_shift.size()) L.lamb_shift += parts[k].lamb_shift;
        if (L.lamb_shift_perp.size() == parts[k].lamb_shift_perp.size()) L.lamb_shift_perp += parts[k].lamb_shift_perp;
    }
    return L;
}

me::Liouvillian generator(const Scenario& s, const std::string& name, double t = INFINITY) {
    const HermitianOperator h(s.h_s);
    if (name == "pauli")
        return me::pauli_ultrastrong(pointer_split(h, HermitianOperator(pointer_operator(s))), s.beta,
                                     me::RateModel::fermi(s.beta, s.dynamics.pauli_nu0));
    const bath::BathParams bp{s.J, s.beta, s.lambda};
    std::vector<me::Liouvillian> parts;
    for (const Matrix& xm : s.coupling_operators()) {
        const HermitianOperator x(xm);
        const me::Ingredients in = std::isinf(t) ? me::ingredients(h, x, bp, bath::kAsymptotic, s.counter_term)
                                                 : me::ingredients(h, x, bp, t, s.counter_term);
        if (name == "davies") parts.push_back(me::davies_generator(in));
        else if (name == "brme" || name == "brme_t") parts.push_back(me::brme_generator(in));
        else if (name == "secular_full") parts.push_back(me::secular_filter(in, me::kFullSecular));
        else if (name == "secular_partial") parts.push_back(me::secular_filter(in, s.dynamics.partial_cutoff));
        else if (name == "real_only") parts.push_back(me::brme_real_only(in));
        else throw SchemaError("unknown generator '" + name + "'");
    }
    return combine(std::move(parts), s.h_s);
}

me::EvolveOptions evolve_options(const Tolerances& tol) {
    me::EvolveOptions o;
    o.rtol = tol.evolve_rtol;
    o.atol = tol.evolve_atol;
    o.trace_abort = tol.trace_abort;
    return o;
}

// ---------------------------------------------------------------- STATICS_ALL

TaskResult statics_all(const Scenario& s) {
    TaskResult res;
    const Index d = s.h_s.rows();
    const Observer obs(s.h_s);
    const WeakState weak = weak_state(s, s.lambda, DBeta::continuum(s.J, s.beta));
    const std::vector<Formula> fs = formulae(s, weak);

    Table states{"statics_states", cat(std::vector<std::string>{"formula", "status", "note"}, obs.columns(),
                                       matrix_columns(d)),
                 {}};
    for (const auto& f : fs) {
        if (f.state)
            states.add(cat(std::vector<std::string>{f.name, "ok", ""}, obs.values(f.state->matrix()),
                           matrix_values(f.state->matrix())));
        else
            states.add(cat(std::vector<std::string>{f.name, "n/a", f.note}, obs.blanks(),
                           std::vector<std::string>(std::size_t(2 * d * d), "nan")));
    }

    Table dist{"statics_distances", {"formula_a", "formula_b", "trace_distance"}, {}};
    for (std::size_t a = 0; a < fs.size(); ++a)
        for (std::size_t b = a + 1; b < fs.size(); ++b) {
            const double v = fs[a].state && fs[b].state ? trace_distance(*fs[a].state, *fs[b].state) : kNaN;
            dist.add({fs[a].name, fs[b].name, fmt(v)});
            res.summary.emplace_back("dist." + fs[a].name + "." + fs[b].name, v);
        }

    const double ell = bath::reorganization_energy(s.J, s.lambda);
    std::vector<std::pair<std::string, double>> diag{
        {"beta", s.beta},
        {"lambda", s.lambda},
        {"reorganization_energy", ell},
        {"ell_beta", ell * s.beta},
        {"weak_validity_lambda_max", weak.bound},
        {"weak_above_bound", s.lambda > weak.bound ? 1.0 : 0.0},
        {"weak_clamp", weak.clamp},
    };
    if (s.si) {
        diag.emplace_back("temperature_K", units::kelvin_from_beta(s.beta, s.omega_ref));
        diag.emplace_back("reorganization_energy_J", units::energy_to_si(ell, s.omega_ref));
    }
    if (s.polaron) diag.emplace_back("polaron_kappa", bath::polaron_kappa(s.J, s.beta, s.lambda));
    Table dg{"statics_diagnostics", {"name", "value"}, {}};
    for (const auto& [k, v] : diag) dg.add({k, fmt(v)});

    const Matrix v = eigh(HermitianOperator(s.h_s)).vectors;
    res.summary.emplace_back("gibbs.excited_pop", (v.adjoint() * fs[0].state->matrix() * v)(d - 1, d - 1).real());
    for (const auto& [k, val] : diag) res.summary.emplace_back(k, val);
    for (const auto& f : fs)
        if (!f.state) res.warnings.push_back(f.name + " not applicable: " + f.note);
    res.tables = {states, dist, dg};
    return res;
}

// ---------------------------------------------------------------- DYNAMICS

TaskResult dynamics(const Scenario& s, const Tolerances& tol) {
    TaskResult res;
    const Observer obs(s.h_s);
    const auto& D = s.dynamics;
    const Matrix rho0 = D.initial == "matrix" ? D.initial_matrix : obs.state(D.initial);
    std::vector<double> grid(std::size_t(D.points));
    for (int k = 0; k < D.points; ++k) grid[std::size_t(k)] = D.t_max * double(k) / double(D.points - 1);

    std::vector<std::string> head{"generator", "t"};
    if (s.si) head.push_back("t_s");
    Table traj{"dynamics", cat(head, obs.columns(), std::vector<std::string>{"trace_dev", "herm_dev", "min_eig"}), {}};
    Table mon{"dynamics_monitor",
              {"generator", "max_trace_dev", "max_herm_dev", "min_eigenvalue", "negative_eigenvalues", "first_negative_t",
               "steps"},
              {}};
    const me::EvolveOptions opt = evolve_options(tol);
    for (const auto& g : D.generators) {
        me::Trajectory tr;
        if (g == "brme_t") {
            const double memory = std::min(5.0 / s.J.scale(), D.t_max);
            std::vector<double> breaks;
            std::vector<me::Liouvillian> gens;
            for (int k = 0; k < D.snapshots; ++k) {
                const double a = memory * k / D.snapshots, b = memory * (k + 1) / D.snapshots;
                breaks.push_back(a);
                gens.push_back(generator(s, g, 0.5 * (a + b)));
            }
            breaks.push_back(memory);
            gens.push_back(generator(s, "brme"));
            tr = me::evolve_piecewise(breaks, gens, rho0, grid, opt);
        } else {
            tr = me::evolve(generator(s, g), rho0, grid, opt);
        }
        double mt = 0.0, mh = 0.0, me_ = INFINITY, first_neg = kNaN;
        for (std::size_t k = 0; k < tr.times.size(); ++k) {
            const auto& m = tr.monitors[k];
            std::vector<std::string> row{g, fmt(tr.times[k])};
            if (s.si) row.push_back(fmt(units::time_to_si(tr.times[k], s.omega_ref)));
            traj.add(cat(row, obs.values(tr.states[k]),
                         std::vector<std::string>{fmt(m.trace_deviation), fmt(m.hermiticity_deviation),
                                                  fmt(m.min_eigenvalue)}));
            mt = std::max(mt, m.trace_deviation);
            mh = std::max(mh, m.hermiticity_deviation);
            me_ = std::min(me_, m.min_eigenvalue);
            if (m.min_eigenvalue < kEigenFloor && std::isnan(first_neg)) first_neg = tr.times[k];
        }
        const bool neg = !std::isnan(first_neg);
        mon.add({g, fmt(mt), fmt(mh), fmt(me_), neg ? "1" : "0", fmt(first_neg), std::to_string(tr.steps)});
        if (neg)
            res.warnings.push_back(g + ": negative eigenvalue " + fmt(me_) + " first seen at t = " + fmt(first_neg));
        const Matrix& last = tr.states.back();
        const std::vector<std::string> fin = obs.values(last);
        for (Index k = 0; k < s.h_s.rows(); ++k)
            res.summary.emplace_back(g + ".final_pop_e" + std::to_string(k), std::stod(fin[std::size_t(k)]));
        res.summary.emplace_back(g + ".max_trace_dev", mt);
        res.summary.emplace_back(g + ".max_herm_dev", mh);
        res.summary.emplace_back(g + ".min_eigenvalue", me_);
    }
    res.tables = {traj, mon};
    return res;
}

// ---------------------------------------------------------------- STEADY_COMPARE

TaskResult steady_compare(const Scenario& s) {
    TaskResult res;
    const Observer obs(s.h_s);
    const WeakState weak = weak_state(s, s.lambda, DBeta::continuum(s.J, s.beta));
    const std::vector<Formula> fs = formulae(s, weak);
    std::vector<std::string> cols{"generator", "unique", "residual", "spectral_gap"};
    for (const auto& f : fs) cols.push_back("dist_" + f.name);
    Table t{"steady_compare", cat(cols, obs.columns()), {}};
    for (const auto& g : s.dynamics.generators) {
        if (g == "brme_t") {
            res.warnings.push_back("brme_t has no single steady state; its asymptotic generator is 'brme'");
            continue;
        }
        const me::SteadyStateReport rep = me::steady_state(generator(s, g));
        const DensityMatrix& ss = rep.states.front();
        std::vector<std::string> row{g, rep.unique ? "1" : "0", fmt(rep.residual), fmt(rep.spectral_gap)};
        for (const auto& f : fs) {
            const double v = f.state ? trace_distance(ss, *f.state) : kNaN;
            row.push_back(fmt(v));
            res.summary.emplace_back(g + ".dist_" + f.name, v);
        }
        t.add(cat(row, obs.values(ss.matrix())));
        if (!rep.unique) res.warnings.push_back(g + ": steady state is not unique; the first null vector is reported");
    }
    res.tables = {t};
    return res;
}

// ---------------------------------------------------------------- ORACLE

std::string cache_key(const Scenario& s, const std::vector<finite::Mode>& modes, int n_max, double lambda) {
    std::ostringstream os;
    os.precision(17);
    os << "mfg|" << s.beta << '|' << lambda << '|' << n_max << '|' << s.counter_term << '|';
    for (Index k = 0; k < s.h_s.size(); ++k) os << s.h_s.data()[k] << ',';
    for (const Matrix& x : s.coupling_operators())
        for (Index k = 0; k < x.size(); ++k) os << x.data()[k] << ',';
    for (const auto& m : modes) os << m.omega << ':' << m.g << ',';
    return config_hash(Json(os.str()));
}

std::optional<Matrix> cache_load(const std::string& key, Index d) {
    const char* dir = std::getenv("MFGKIT_CACHE_DIR");
    if (!dir || !*dir) return std::nullopt;
    std::ifstream in(std::filesystem::path(dir) / (key + ".mfg"));
    if (!in) return std::nullopt;
    Matrix m(d, d);
    for (Index k = 0; k < m.size(); ++k) {
        double re = 0.0, im = 0.0;
        if (!(in >> re >> im)) return std::nullopt;
        m.data()[k] = cplx(re, im);
    }
    return m;
}

void cache_store(const std::string& key, const Matrix& m) {
    const char* dir = std::getenv("MFGKIT_CACHE_DIR");
    if (!dir || !*dir) return;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::ofstream out(std::filesystem::path(dir) / (key + ".mfg"));
    for (Index k = 0; k < m.size(); ++k) out << fmt(m.data()[k].real()) << ' ' << fmt(m.data()[k].imag()) << '\n';
}

TaskResult oracle(const Scenario& s, const Tolerances& tol) {
    TaskResult res;
    const auto& O = s.oracle;
    const HermitianOperator h(s.h_s);
    const std::vector<finite::Mode> modes =
        finite::discretize(s.J, O.modes, O.omega_max, O.scheme == "gauss" ? finite::Scheme::Gauss : finite::Scheme::Linear);
    const DBeta dd = finite::discrete_d_beta(modes, s.beta);
    auto build = [&](double lambda, int n_max) {
        std::vector<finite::BathCoupling> cs;
        for (const Matrix& x : s.coupling_operators()) cs.push_back({x, finite::FiniteBathSpec{modes, n_max, s.counter_term}});
        return finite::assemble(h, cs, lambda);
    };
    const std::size_t baths = s.coupling_operators().size();
    auto global_dim = [&](int n_max) {
        Index d = h.dim();
        for (std::size_t b = 0; b < baths * std::size_t(O.modes); ++b) d *= n_max + 1;
        return d;
    };
    std::optional<finite::GlobalModel> last;
    auto exact = [&](double lambda, int n_max) -> DensityMatrix {
        const std::string key = cache_key(s, modes, n_max, lambda);
        if (auto m = cache_load(key, h.dim())) return DensityMatrix(*m);
        last = build(lambda, n_max);
        const DensityMatrix r = finite::exact_mfg(*last, s.beta);
        cache_store(key, r.matrix());
        return r;
    };

    const Observer obs(s.h_s);
    Table t{"oracle",
            cat(std::vector<std::string>{"lambda", "dim", "dist_weak", "dist_gibbs", "dist_ultrastrong", "dist_high_t",
                                         "weak_ratio"},
                obs.columns()),
            {}};
    const Formula ultra = ultrastrong_formula(s);
    const DensityMatrix tau = gibbs(h, s.beta);
    double prev = kNaN;
    std::map<std::pair<double, int>, double> weak_dist;
    Index dim = 0;
    for (std::size_t k = 0; k < O.lambdas.size(); ++k) {
        const double lam = O.lambdas[k];
        const DensityMatrix ex = exact(lam, O.n_max);
        dim = global_dim(O.n_max);
        const WeakState w = weak_state(s, lam, dd);
        const double ell = finite::discrete_reorganization(modes, lam);
        const Formula ht = high_t_formula(s, std::vector<double>(std::size_t(h.dim()), ell));
        const double dw = w.state ? trace_distance(ex, *w.state) : kNaN;
        const double du = ultra.state ? trace_distance(ex, *ultra.state) : kNaN;
        const double dh = ht.state ? trace_distance(ex, *ht.state) : kNaN;
        t.add(cat(std::vector<std::string>{fmt(lam), std::to_string(dim), fmt(dw), fmt(trace_distance(ex, tau)), fmt(du),
                                           fmt(dh), fmt(prev / dw)},
                  obs.values(ex.matrix())));
        weak_dist[{lam, O.n_max}] = dw;
        prev = dw;
        const std::string p = "lambda[" + std::to_string(k) + "].";
        res.summary.emplace_back(p + "dist_weak", dw);
        res.summary.emplace_back(p + "dist_gibbs", trace_distance(ex, tau));
        res.summary.emplace_back(p + "dist_high_t", dh);
    }
    res.summary.emplace_back("dim", double(dim));
    res.tables.push_back(t);

    if (O.deff_samples > 0) {
        const double lam = O.lambdas.back();
        if (!last || last->lambda() != lam || last->dim() != dim) last = build(lam, O.n_max);
        std::mt19937_64 rng(s.seed);
        std::normal_distribution<double> nd;
        Table td{"oracle_deff", {"sample", "lambda", "modes", "d_eff", "near_degenerate_pairs"}, {}};
        double mean = 0.0;
        const auto dims = last->space().factor_dims;
        for (int k = 0; k < O.deff_samples; ++k) {
            Vector psi = Vector::Ones(1);
            for (Index f : dims) {
                Vector v(f);
                for (Index i = 0; i < f; ++i) v(i) = cplx(nd(rng), nd(rng));
                v.normalize();
                Vector next(psi.size() * f);
                for (Index a = 0; a < psi.size(); ++a) next.segment(a * f, f) = psi(a) * v;
                psi = next;
            }
            const finite::EffectiveDimension e = finite::effective_dimension(psi * psi.adjoint(), *last);
            td.add({std::to_string(k), fmt(lam), std::to_string(O.modes), fmt(e.value), std::to_string(e.near_degenerate_pairs)});
            mean += e.value / O.deff_samples;
        }
        res.summary.emplace_back("deff_mean", mean);
        res.tables.push_back(td);
    }
    if (!O.truncation_ladder.empty()) {
        const double lam = *std::max_element(O.lambdas.begin(), O.lambdas.end());
        const WeakState w = weak_state(s, lam, dd);
        Table tt{"oracle_truncation", {"lambda", "n_max", "dim", "dist_weak", "change", "converged"}, {}};
        double before = kNaN;
        for (int n : O.truncation_ladder) {
            double v = 0.0;
            if (auto it = weak_dist.find({lam, n}); it != weak_dist.end()) v = it->second;
            else v = w.state ? trace_distance(exact(lam, n), *w.state) : kNaN;
            const double ch = std::abs(v - before);
            tt.add({fmt(lam), std::to_string(n), std::to_string(global_dim(n)), fmt(v), fmt(ch),
                    ch < tol.truncation_tol ? "1" : "0"});
            before = v;
        }
        res.tables.push_back(tt);
    }

    return res;
}

// ---------------------------------------------------------------- OSCILLATOR

TaskResult oscillator(const Scenario& s) {
    TaskResult res;
    const auto* dl = std::get_if<bath::DrudeLorentz>(&s.J.variant());
    if (!dl) throw SchemaError("task OSCILLATOR needs a drude_lorentz spectral density");
    // lambda^2 J is the density seen by the oscillator.
    const cl::CLParams p{s.omega_0, s.lambda * s.lambda * dl->gamma, dl->omega_d, s.beta};
    const cl::OscillatorMoments m = cl::moments(p);
    const bath::SpectralDensity Jeff = bath::DrudeLorentz{p.gamma, p.omega_d};
    const double xx_corr = s.omega_0 * cl::position_correlation(Jeff, s.beta, s.omega_0, 0.0);
    const cl::GaussianState g = cl::gaussian_covariance_state(m);
    const auto roots = cl::cubic_roots(p);
    std::vector<std::pair<std::string, double>> q{
        {"omega_0", p.omega_0},
        {"gamma", p.gamma},
        {"omega_d", p.omega_d},
        {"beta", p.beta},
        {"log_partition", cl::log_partition(p)},
        {"xx", m.xx},
        {"pp", m.pp},
        {"px_re", m.px.real()},
        {"px_im", m.px.imag()},
        {"xx_correlation_route", xx_corr},
        {"cross_route_relative_residual", std::abs(m.xx - xx_corr) / m.xx},
        {"xx_uncoupled", 0.5 / std::tanh(0.5 * s.beta * s.omega_0)},
        {"n_bar", g.n_bar},
        {"squeezing", g.squeezing},
        {"fock_cutoff", double(cl::fock_cutoff(m))},
    };
    for (std::size_t k = 0; k < roots.size(); ++k) {
        q.emplace_back("mu" + std::to_string(k) + "_re", roots[k].real());
        q.emplace_back("mu" + std::to_string(k) + "_im", roots[k].imag());
    }
    Table t{"oscillator", {"quantity", "value"}, {}};
    for (const auto& [k, v] : q) t.add({k, fmt(v)});
    res.summary = q;
    res.tables = {t};
    return res;
}

} // namespace

TaskResult run_task(const Scenario& s, const Tolerances& tol) {
    switch (s.task) {
    case Task::StaticsAll: return statics_all(s);
    case Task::Dynamics: return dynamics(s, tol);
    case Task::SteadyCompare: return steady_compare(s);
    case Task::Oracle: return oracle(s, tol);
    case Task::Oscillator: return oscillator(s);
    }
    throw SchemaError("unknown task");
}

} // namespace mfgkit::cli
