// cli_scenario.cpp — Scenario presets, parsing, unit conversion and validation

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mfgkit/cli.hpp"

namespace mfgkit::cli {

namespace units {
double energy_to_natural(double joules, double omega_ref) { return joules / (kHbar * omega_ref); }
double energy_to_si(double e, double omega_ref) { return e * kHbar * omega_ref; }
double frequency_to_natural(double rad_per_s, double omega_ref) { return rad_per_s / omega_ref; }
double frequency_to_si(double w, double omega_ref) { return w * omega_ref; }
double time_to_natural(double seconds, double omega_ref) { return seconds * omega_ref; }
double time_to_si(double t, double omega_ref) { return t / omega_ref; }
double beta_from_kelvin(double kelvin, double omega_ref) { return kHbar * omega_ref / (kBoltzmann * kelvin); }
double kelvin_from_beta(double beta, double omega_ref) { return kHbar * omega_ref / (kBoltzmann * beta); }
} // namespace units

std::string to_string(Task t) {
    switch (t) {
    case Task::StaticsAll: return "STATICS_ALL";
    case Task::Dynamics: return "DYNAMICS";
    case Task::SteadyCompare: return "STEADY_COMPARE";
    case Task::Oracle: return "ORACLE";
    case Task::Oscillator: return "OSCILLATOR";
    }
    return "?";
}

std::vector<Matrix> Scenario::coupling_operators() const {
    if (model == CouplingModel::Single) return {x};
    std::vector<Matrix> ps;
    for (Index n = 0; n < h_s.rows(); ++n) {
        Matrix p = Matrix::Zero(h_s.rows(), h_s.cols());
        p(n, n) = 1.0;
        ps.push_back(p);
    }
    return ps;
}

void Tolerances::set(const std::string& name, double value) {
    if (!(value > 0.0) || !std::isfinite(value)) throw SchemaError("tolerance '" + name + "' must be positive");
    if (name == "evolve_rtol") evolve_rtol = value;
    else if (name == "evolve_atol") evolve_atol = value;
    else if (name == "trace_abort") trace_abort = value;
    else if (name == "truncation_tol") truncation_tol = value;
    else
        throw SchemaError("unknown tolerance '" + name +
                          "' (known: evolve_rtol, evolve_atol, trace_abort, truncation_tol)");
}

namespace {

Json fig1(const std::string& name, double strength_joules) {
    const double half_gap = 2e-21 / std::sqrt(2.0);
    return Json{
        {"name", name},
        {"units", "si"},
        {"reference_frequency", 1e13},
        {"seed", 1},
        {"system", {{"preset", "spin_boson"}, {"epsilon", half_gap}, {"delta", half_gap}}},
        {"coupling", {{"model", "sites"}, {"interaction_strength", strength_joules}, {"counter_term", true}}},
        {"bath",
         {{"spectral_density", {{"type", "drude_lorentz"}, {"gamma", 1e13}, {"relaxation_time", 1e-13}}},
          {"temperature", 317.0}}},
        {"task", "STATICS_ALL"},
        {"dynamics",
         {{"generators", {"davies", "brme", "real_only", "secular_full"}},
          {"t_max", 2e-12},
          {"points", 201},
          {"initial", "excited"}}},
        {"notes",
         {"interaction strength is read as the reorganization energy of each site bath",
          "bath relaxation time is read as 1/omega_D of a Drude-Lorentz density"}},
    };
}

Json oracle_preset() {
    return Json{
        {"name", "oracle"},
        {"units", "natural"},
        {"seed", 1},
        {"system", {{"preset", "spin_boson"}, {"epsilon", 1.0}, {"delta", 0.5}}},
        {"coupling", {{"model", "single"}, {"operator", "sigma_z"}, {"lambda", 0.1}, {"counter_term", true}}},
        {"bath", {{"spectral_density", {{"type", "drude_lorentz"}, {"gamma", 0.1}, {"omega_d", 5.0}}}, {"beta", 5.0}}},
        {"task", "ORACLE"},
        {"oracle",
         {{"modes", 4},
          {"n_max", 5},
          {"omega_max", 8.0},
          {"scheme", "linear"},
          {"lambdas", {0.2, 0.1, 0.05}},
          {"truncation_ladder", {3, 5}},
          {"deff_samples", 4}}},
    };
}

Json spin_boson_preset() {
    return Json{
        {"name", "spin_boson"},
        {"units", "natural"},
        {"seed", 1},
        {"system", {{"preset", "spin_boson"}, {"epsilon", 1.0}, {"delta", 0.5}}},
        {"coupling", {{"model", "single"}, {"operator", "sigma_z"}, {"lambda", 0.04}, {"counter_term", true}}},
        {"bath", {{"spectral_density", {{"type", "drude_lorentz"}, {"gamma", 0.1}, {"omega_d", 5.0}}}, {"beta", 1.0}}},
        {"task", "STEADY_COMPARE"},
        {"dynamics",
         {{"generators", {"davies", "brme", "real_only", "secular_full", "pauli"}},
          {"t_max", 200.0},
          {"points", 201},
          {"initial", "excited"}}},
    };
}

// Path-aware accessors; `where` is the dotted path of `j`.
const Json* find(const Json& j, const std::string& key) {
    if (!j.is_object()) return nullptr;
    const auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

const Json& need(const Json& j, const std::string& key, const std::string& where) {
    const Json* v = find(j, key);
    if (!v) throw SchemaError("missing field '" + where + key + "'");
    return *v;
}

double number(const Json& v, const std::string& path) {
    if (!v.is_number()) throw SchemaError("field '" + path + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw SchemaError("field '" + path + "' must be finite");
    return d;
}

double need_number(const Json& j, const std::string& key, const std::string& where) {
    return number(need(j, key, where), where + key);
}

double opt_number(const Json& j, const std::string& key, const std::string& where, double def) {
    const Json* v = find(j, key);
    return v ? number(*v, where + key) : def;
}

int opt_int(const Json& j, const std::string& key, const std::string& where, int def) {
    const Json* v = find(j, key);
    if (!v) return def;
    if (!v->is_number_integer()) throw SchemaError("field '" + where + key + "' must be an integer");
    return v->get<int>();
}

std::string opt_string(const Json& j, const std::string& key, const std::string& where, const std::string& def) {
    const Json* v = find(j, key);
    if (!v) return def;
    if (!v->is_string()) throw SchemaError("field '" + where + key + "' must be a string");
    return v->get<std::string>();
}

bool opt_bool(const Json& j, const std::string& key, const std::string& where, bool def) {
    const Json* v = find(j, key);
    if (!v) return def;
    if (!v->is_boolean()) throw SchemaError("field '" + where + key + "' must be true or false");
    return v->get<bool>();
}

const Json& need_object(const Json& j, const std::string& key, const std::string& where) {
    const Json& v = need(j, key, where);
    if (!v.is_object()) throw SchemaError("field '" + where + key + "' must be a section");
    return v;
}

// Row-major nested list; entries are numbers or [re, im] pairs.
Matrix parse_matrix(const Json& v, const std::string& path, double scale) {
    if (!v.is_array() || v.empty()) throw SchemaError("field '" + path + "' must be a non-empty list of rows");
    const Index n = static_cast<Index>(v.size());
    Matrix m(n, n);
    for (Index r = 0; r < n; ++r) {
        const Json& row = v[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Index>(row.size()) != n)
            throw SchemaError("field '" + path + "' must be square");
        for (Index c = 0; c < n; ++c) {
            const Json& e = row[static_cast<std::size_t>(c)];
            const std::string ep = path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]";
            if (e.is_number()) m(r, c) = number(e, ep) * scale;
            else if (e.is_array() && e.size() == 2)
                m(r, c) = cplx(number(e[0], ep), number(e[1], ep)) * scale;
            else
                throw SchemaError("field '" + ep + "' must be a number or [re, im]");
        }
    }
    if (hermiticity_deviation(m) > kHermitianTol) throw SchemaError("field '" + path + "' must be Hermitian");
    return m;
}

Matrix parse_operator(const Json& v, const std::string& path) {
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "sigma_x") return pauli::x();
        if (s == "sigma_y") return pauli::y();
        if (s == "sigma_z") return pauli::z();
        throw SchemaError("field '" + path + "': unknown operator '" + s + "' (sigma_x, sigma_y, sigma_z or a matrix)");
    }
    return parse_matrix(v, path, 1.0);
}

Task parse_task(const std::string& s) {
    if (s == "STATICS_ALL") return Task::StaticsAll;
    if (s == "DYNAMICS") return Task::Dynamics;
    if (s == "STEADY_COMPARE") return Task::SteadyCompare;
    if (s == "ORACLE") return Task::Oracle;
    if (s == "OSCILLATOR") return Task::Oscillator;
    throw SchemaError("field 'task': unknown task '" + s +
                      "' (STATICS_ALL, DYNAMICS, STEADY_COMPARE, ORACLE, OSCILLATOR)");
}

bath::SpectralDensity parse_density(const Json& j, bool si, double wref) {
    const std::string w = "bath.spectral_density.";
    const std::string type = opt_string(j, "type", w, "");
    if (type.empty()) throw SchemaError("missing field 'bath.spectral_density.type'");
    auto freq = [&](double v) { return si ? units::frequency_to_natural(v, wref) : v; };
    auto positive = [&](double v, const std::string& key) {
        if (!(v > 0.0)) throw SchemaError("field '" + w + key + "' must be positive");
        return v;
    };
    auto nonneg = [&](double v, const std::string& key) {
        if (!(v >= 0.0)) throw SchemaError("field '" + w + key + "' must be non-negative");
        return v;
    };
    if (type == "ohmic_exp")
        return bath::OhmicExp{nonneg(need_number(j, "gamma", w), "gamma"),
                              positive(freq(need_number(j, "omega_c", w)), "omega_c")};
    if (type == "super_ohmic_cubic")
        return bath::SuperOhmicCubic{nonneg(freq(need_number(j, "gamma", w)), "gamma"),
                                     positive(freq(need_number(j, "omega_c", w)), "omega_c")};
    if (type == "drude_lorentz") {
        double wd = 0.0;
        if (find(j, "relaxation_time")) {
            const double tau = positive(need_number(j, "relaxation_time", w), "relaxation_time");
            wd = 1.0 / (si ? units::time_to_natural(tau, wref) : tau);
        } else {
            wd = positive(freq(need_number(j, "omega_d", w)), "omega_d");
        }
        return bath::DrudeLorentz{nonneg(freq(need_number(j, "gamma", w)), "gamma"), wd};
    }
    if (type == "tabulated") {
        const std::string path = opt_string(j, "path", w, "");
        if (path.empty()) throw SchemaError("missing field 'bath.spectral_density.path'");
        try {
            return bath::load_tabulated_csv(path, wref).J;
        } catch (const DomainError& e) {
            throw SchemaError(std::string("bath.spectral_density: ") + e.what());
        }
    }
    throw SchemaError("field 'bath.spectral_density.type': unknown type '" + type +
                      "' (ohmic_exp, super_ohmic_cubic, drude_lorentz, tabulated)");
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace

std::vector<std::string> preset_names() { return {"fig1_weak", "fig1_strong", "oracle", "spin_boson"}; }

Json expand_preset(const std::string& name) {
    if (name == "fig1_weak") return fig1(name, 0.4e-21);
    if (name == "fig1_strong") return fig1(name, 4e-21);
    if (name == "oracle") return oracle_preset();
    if (name == "spin_boson") return spin_boson_preset();
    std::string known;
    for (const auto& p : preset_names()) known += (known.empty() ? "" : ", ") + p;
    throw SchemaError("unknown preset '" + name + "' (" + known + ")");
}

Json load_config(const std::string& source) {
    if (source.rfind("preset:", 0) == 0) return expand_preset(source.substr(7));
    std::ifstream in(source);
    if (!in) throw SchemaError("cannot open scenario file '" + source + "'");
    Json j;
    try {
        j = Json::parse(in, nullptr, true, true);
    } catch (const Json::parse_error& e) {
        throw SchemaError("scenario file '" + source + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw SchemaError("scenario file must hold a single object");
    if (const Json* p = find(j, "preset")) {
        if (!p->is_string()) throw SchemaError("field 'preset' must be a string");
        Json base = expand_preset(p->get<std::string>());
        j.erase("preset");
        base.merge_patch(j);
        return base;
    }
    return j;
}

Scenario parse(const Json& c) {
    if (!c.is_object()) throw SchemaError("scenario must be an object");
    Scenario s;
    s.name = opt_string(c, "name", "", "scenario");
    const std::string u = opt_string(c, "units", "", "natural");
    if (u != "natural" && u != "si") throw SchemaError("field 'units' must be 'si' or 'natural'");
    s.si = u == "si";
    if (s.si) {
        s.omega_ref = need_number(c, "reference_frequency", "");
        if (!(s.omega_ref > 0.0)) throw SchemaError("field 'reference_frequency' must be positive");
    }
    const double wref = s.omega_ref;
    auto energy = [&](double v) { return s.si ? units::energy_to_natural(v, wref) : v; };
    auto freq = [&](double v) { return s.si ? units::frequency_to_natural(v, wref) : v; };
    auto time = [&](double v) { return s.si ? units::time_to_natural(v, wref) : v; };

    if (const Json* seed = find(c, "seed")) {
        if (!seed->is_number_integer() || (!seed->is_number_unsigned() && seed->get<long long>() < 0))
            throw SchemaError("field 'seed' must be a non-negative integer");
        s.seed = seed->get<std::uint64_t>();
    }
    s.task = parse_task(opt_string(c, "task", "", "STATICS_ALL"));
    if (const Json* notes = find(c, "notes")) {
        if (!notes->is_array()) throw SchemaError("field 'notes' must be a list of strings");
        for (const auto& n : *notes) {
            if (!n.is_string()) throw SchemaError("field 'notes' must be a list of strings");
            s.notes.push_back(n.get<std::string>());
        }
    }

    // system
    const Json& sys = need_object(c, "system", "");
    if (const Json* m = find(sys, "matrix")) {
        s.h_s = parse_matrix(*m, "system.matrix", s.si ? units::energy_to_natural(1.0, wref) : 1.0);
    } else {
        const std::string p = opt_string(sys, "preset", "system.", "");
        if (p.empty()) throw SchemaError("missing field 'system.matrix' (or 'system.preset')");
        if (p != "spin_boson") throw SchemaError("field 'system.preset': unknown preset '" + p + "' (spin_boson)");
        const double eps = energy(need_number(sys, "epsilon", "system."));
        const double del = energy(need_number(sys, "delta", "system."));
        s.h_s = 0.5 * eps * pauli::z() + 0.5 * del * pauli::x();
    }
    const Index d = s.h_s.rows();

    // bath
    const Json& b = need_object(c, "bath", "");
    s.J = parse_density(need_object(b, "spectral_density", "bath."), s.si, wref);
    const bool has_beta = find(b, "beta") != nullptr, has_t = find(b, "temperature") != nullptr;
    if (has_beta && has_t) throw SchemaError("fields 'bath.beta' and 'bath.temperature' are exclusive");
    if (s.si && has_beta) throw SchemaError("SI scenarios give 'bath.temperature' in kelvin, not 'bath.beta'");
    if (!has_beta && !has_t) throw SchemaError("missing field 'bath.temperature'");
    if (has_t) {
        const double t = need_number(b, "temperature", "bath.");
        if (!(t > 0.0)) throw SchemaError("field 'bath.temperature' must be positive");
        s.beta = s.si ? units::beta_from_kelvin(t, wref) : 1.0 / t;
    } else {
        s.beta = need_number(b, "beta", "bath.");
    }
    if (!(s.beta > 0.0) || !std::isfinite(s.beta)) throw SchemaError("inverse temperature must be positive and finite");

    // coupling
    const Json& cp = need_object(c, "coupling", "");
    const std::string model = opt_string(cp, "model", "coupling.", "single");
    if (model == "single") {
        s.model = CouplingModel::Single;
        s.x = parse_operator(need(cp, "operator", "coupling."), "coupling.operator");
        if (s.x.rows() != d) throw SchemaError("field 'coupling.operator' does not match the system dimension");
    } else if (model == "sites") {
        s.model = CouplingModel::Sites;
        if (find(cp, "operator")) throw SchemaError("field 'coupling.operator' is not used with model 'sites'");
    } else {
        throw SchemaError("field 'coupling.model' must be 'single' or 'sites'");
    }
    s.counter_term = opt_bool(cp, "counter_term", "coupling.", true);
    const char* ell_key = s.si ? "interaction_strength" : "reorganization";
    const bool has_lambda = find(cp, "lambda") != nullptr, has_ell = find(cp, ell_key) != nullptr;
    if (has_lambda && has_ell)
        throw SchemaError(std::string("fields 'coupling.lambda' and 'coupling.") + ell_key + "' are exclusive");
    if (has_lambda) {
        s.lambda = need_number(cp, "lambda", "coupling.");
    } else if (has_ell) {
        const double ell = energy(need_number(cp, ell_key, "coupling."));
        if (!(ell >= 0.0)) throw SchemaError(std::string("field 'coupling.") + ell_key + "' must be non-negative");
        const double unit = bath::reorganization_energy(s.J, 1.0);
        if (!(unit > 0.0)) throw SchemaError("a reorganization energy needs a non-zero spectral density");
        s.lambda = std::sqrt(ell / unit);
    } else {
        throw SchemaError("missing field 'coupling.lambda'");
    }
    if (!(s.lambda >= 0.0)) throw SchemaError("field 'coupling.lambda' must be non-negative");

    // task sections
    if (const Json* st = find(c, "statics")) s.polaron = opt_bool(*st, "polaron", "statics.", false);
    if (const Json* dy = find(c, "dynamics")) {
        auto& D = s.dynamics;
        if (const Json* g = find(*dy, "generators")) {
            if (!g->is_array() || g->empty()) throw SchemaError("field 'dynamics.generators' must be a non-empty list");
            D.generators.clear();
            for (const auto& e : *g) {
                if (!e.is_string()) throw SchemaError("field 'dynamics.generators' must hold strings");
                static const std::vector<std::string> known{"davies", "brme", "brme_t", "secular_full",
                                                            "secular_partial", "real_only", "pauli"};
                const std::string name = e.get<std::string>();
                if (std::find(known.begin(), known.end(), name) == known.end())
                    throw SchemaError("field 'dynamics.generators': unknown generator '" + name + "'");
                D.generators.push_back(name);
            }
        }
        D.t_max = time(opt_number(*dy, "t_max", "dynamics.", s.si ? units::time_to_si(D.t_max, wref) : D.t_max));
        if (!(D.t_max > 0.0)) throw SchemaError("field 'dynamics.t_max' must be positive");
        D.points = opt_int(*dy, "points", "dynamics.", D.points);
        if (D.points < 2) throw SchemaError("field 'dynamics.points' must be at least 2");
        D.partial_cutoff = freq(opt_number(*dy, "partial_cutoff", "dynamics.", 0.0));
        D.pauli_nu0 = freq(opt_number(*dy, "pauli_nu0", "dynamics.", s.si ? units::frequency_to_si(1.0, wref) : 1.0));
        D.snapshots = opt_int(*dy, "snapshots", "dynamics.", D.snapshots);
        if (D.snapshots < 1) throw SchemaError("field 'dynamics.snapshots' must be positive");
        if (const Json* init = find(*dy, "initial")) {
            if (init->is_string()) {
                D.initial = init->get<std::string>();
                if (D.initial != "excited" && D.initial != "ground" && D.initial != "mixed" && D.initial != "plus")
                    throw SchemaError("field 'dynamics.initial' must be excited, ground, mixed, plus or a matrix");
            } else {
                D.initial = "matrix";
                D.initial_matrix = parse_matrix(*init, "dynamics.initial", 1.0);
                if (D.initial_matrix.rows() != d)
                    throw SchemaError("field 'dynamics.initial' does not match the system dimension");
            }
        }
    }
    if (const Json* o = find(c, "oracle")) {
        auto& O = s.oracle;
        O.modes = opt_int(*o, "modes", "oracle.", O.modes);
        O.n_max = opt_int(*o, "n_max", "oracle.", O.n_max);
        O.omega_max = freq(opt_number(*o, "omega_max", "oracle.", s.si ? units::frequency_to_si(O.omega_max, wref) : O.omega_max));
        O.scheme = opt_string(*o, "scheme", "oracle.", O.scheme);
        if (O.modes < 1 || O.n_max < 1) throw SchemaError("fields 'oracle.modes' and 'oracle.n_max' must be positive");
        if (!(O.omega_max > 0.0)) throw SchemaError("field 'oracle.omega_max' must be positive");
        if (O.scheme != "linear" && O.scheme != "gauss") throw SchemaError("field 'oracle.scheme' must be linear or gauss");
        if (const Json* l = find(*o, "lambdas")) {
            if (!l->is_array() || l->empty()) throw SchemaError("field 'oracle.lambdas' must be a non-empty list");
            O.lambdas.clear();
            for (const auto& e : *l) {
                const double v = number(e, "oracle.lambdas");
                if (!(v >= 0.0)) throw SchemaError("field 'oracle.lambdas' must be non-negative");
                O.lambdas.push_back(v);
            }
        }
        if (const Json* t = find(*o, "truncation_ladder")) {
            if (!t->is_array()) throw SchemaError("field 'oracle.truncation_ladder' must be a list");
            for (const auto& e : *t) {
                if (!e.is_number_integer() || e.get<int>() < 1)
                    throw SchemaError("field 'oracle.truncation_ladder' must hold positive integers");
                O.truncation_ladder.push_back(e.get<int>());
            }
        }
        O.deff_samples = opt_int(*o, "deff_samples", "oracle.", O.deff_samples);
        if (O.deff_samples < 0) throw SchemaError("field 'oracle.deff_samples' must be non-negative");
    }
    if (const Json* o = find(c, "oscillator")) {
        s.omega_0 = freq(opt_number(*o, "omega_0", "oscillator.", s.si ? units::frequency_to_si(1.0, wref) : 1.0));
        if (!(s.omega_0 > 0.0)) throw SchemaError("field 'oscillator.omega_0' must be positive");
    }
    return s;
}

std::vector<std::string> validate(const Json& c) {
    std::vector<std::string> issues;
    Scenario s;
    try {
        s = parse(c);
    } catch (const std::exception& e) {
        issues.emplace_back(e.what());
        return issues;
    }
    const std::string jname = s.J.name();
    if (s.polaron && s.J.low_frequency_exponent() <= 2.0 + 1e-9)
        issues.push_back("statics.polaron: the polaron factor kappa needs the integral of J(w)/w^2 coth(beta w/2), "
                         "which diverges whenever J(w) is proportional to w^s with s <= 2 at small w; '" +
                         jname + "' is not admissible");
    if (s.task == Task::Oscillator && !std::holds_alternative<bath::DrudeLorentz>(s.J.variant()))
        issues.push_back("task OSCILLATOR: the exact oscillator statics need a drude_lorentz spectral density, got '" +
                         jname + "'");
    if (s.task == Task::Oracle) {
        double dim = double(s.h_s.rows());
        const std::size_t baths = s.model == CouplingModel::Sites ? std::size_t(s.h_s.rows()) : 1;
        for (std::size_t b = 0; b < baths; ++b) dim *= std::pow(double(s.oracle.n_max + 1), s.oracle.modes);
        if (dim > 16384.0)
            issues.push_back("oracle: global dimension " + fmt(dim) + " exceeds the cap 16384");
    }
    if (s.task == Task::Dynamics || s.task == Task::SteadyCompare) {
        const auto& g = s.dynamics.generators;
        if (std::find(g.begin(), g.end(), "secular_partial") != g.end() && !(s.dynamics.partial_cutoff > 0.0))
            issues.push_back("dynamics.partial_cutoff must be positive when secular_partial is requested");
    }
    try {
        HermitianOperator h(s.h_s);
        if (s.model == CouplingModel::Single) HermitianOperator x(s.x);
    } catch (const std::exception& e) {
        issues.emplace_back(e.what());
    }
    return issues;
}

std::string config_hash(const Json& config) {
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << fnv1a(config.dump());
    return os.str();
}

std::vector<double> parse_grid(const std::string& grid) {
    std::vector<double> out;
    auto num = [&](const std::string& t) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(t, &pos);
        } catch (const std::exception&) {
            throw SchemaError("--grid: '" + t + "' is not a number");
        }
        if (pos != t.size()) throw SchemaError("--grid: '" + t + "' is not a number");
        return v;
    };
    std::vector<std::string> parts;
    const char sep = (grid.rfind("lin:", 0) == 0 || grid.rfind("log:", 0) == 0) ? ':' : ',';
    std::string cur;
    std::istringstream is(grid);
    while (std::getline(is, cur, sep)) parts.push_back(cur);
    if (sep == ':') {
        if (parts.size() != 4) throw SchemaError("--grid: expected lin:a:b:n or log:a:b:n");
        const double a = num(parts[1]), b = num(parts[2]);
        const double nd = num(parts[3]);
        const int n = static_cast<int>(nd);
        if (n < 1 || double(n) != nd) throw SchemaError("--grid: point count must be a positive integer");
        const bool log = parts[0] == "log";
        if (log && !(a > 0.0 && b > 0.0)) throw SchemaError("--grid: log grids need positive ends");
        for (int k = 0; k < n; ++k) {
            const double f = n == 1 ? 0.0 : double(k) / double(n - 1);
            out.push_back(log ? a * std::pow(b / a, f) : a + (b - a) * f);
        }
    } else {
        for (const auto& p : parts) out.push_back(num(p));
    }
    if (out.empty()) throw SchemaError("--grid: no points");
    return out;
}

Json with_param(const Json& config, const std::string& path, double value) {
    Json out = config;
    Json* node = &out;
    std::istringstream is(path);
    std::string key;
    std::vector<std::string> keys;
    while (std::getline(is, key, '.')) keys.push_back(key);
    if (keys.empty() || std::any_of(keys.begin(), keys.end(), [](const auto& k) { return k.empty(); }))
        throw SchemaError("--param: malformed path '" + path + "'");
    for (std::size_t k = 0; k + 1 < keys.size(); ++k) {
        if (!node->is_object()) throw SchemaError("--param: '" + path + "' does not name a field");
        node = &(*node)[keys[k]];
        if (node->is_null()) *node = Json::object();
    }
    if (!node->is_object()) throw SchemaError("--param: '" + path + "' does not name a field");
    Json& leaf = (*node)[keys.back()];
    if (leaf.is_number_integer() || leaf.is_number_unsigned()) {
        if (std::round(value) != value) throw SchemaError("--param: '" + path + "' takes integer values");
        leaf = static_cast<long long>(value);
    } else {
        leaf = value;
    }
    return out;
}

} // namespace mfgkit::cli
