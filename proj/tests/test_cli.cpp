// test_cli.cpp — Scenario parsing, unit conversion, task outputs and exit codes

#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "mfgkit/cli.hpp"

using namespace mfgkit;
using namespace mfgkit::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("mfgkit_test_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_json(const fs::path& dir, const Json& j) {
    const fs::path p = dir / "scenario.json";
    std::ofstream(p) << j.dump(2);
    return p;
}

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "mfgkit");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return cli::main(int(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Data rows of a CSV as column-name -> value maps; `#` lines skipped.
std::vector<std::map<std::string, std::string>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::vector<std::string> cols;
    std::vector<std::map<std::string, std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream is(line);
        while (std::getline(is, cell, ',')) cells.push_back(cell);
        if (cols.empty()) {
            cols = cells;
            continue;
        }
        std::map<std::string, std::string> r;
        for (std::size_t k = 0; k < cols.size() && k < cells.size(); ++k) r[cols[k]] = cells[k];
        rows.push_back(r);
    }
    return rows;
}

double metric(const TaskResult& r, const std::string& name) {
    for (const auto& [k, v] : r.summary)
        if (k == name) return v;
    FAIL("missing metric " << name);
    return NAN;
}

} // namespace

TEST_CASE("unit round trip") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> e(-25.0, -19.0), t(0.0, 3.0);
    for (int k = 0; k < 50; ++k) {
        const double wref = std::pow(10.0, 11.0 + t(rng));
        const double joules = std::pow(10.0, e(rng));
        const double kelvin = std::pow(10.0, t(rng));
        const double seconds = std::pow(10.0, -15.0 + t(rng));
        CHECK(units::energy_to_si(units::energy_to_natural(joules, wref), wref) == doctest::Approx(joules).epsilon(1e-12));
        CHECK(units::kelvin_from_beta(units::beta_from_kelvin(kelvin, wref), wref) == doctest::Approx(kelvin).epsilon(1e-12));
        CHECK(units::time_to_si(units::time_to_natural(seconds, wref), wref) == doctest::Approx(seconds).epsilon(1e-12));
        CHECK(units::frequency_to_si(units::frequency_to_natural(wref * 3.0, wref), wref) ==
              doctest::Approx(wref * 3.0).epsilon(1e-12));
    }
    // k_B T at 317 K in joules divided by hbar * omega_ref
    CHECK(units::beta_from_kelvin(317.0, 1e13) == doctest::Approx(1.054571817e-21 / (1.380649e-23 * 317.0)).epsilon(1e-14));
}

TEST_CASE("presets expand to the common schema") {
    for (const auto& name : preset_names()) {
        const Json c = expand_preset(name);
        CHECK(validate(c).empty());
        CHECK_NOTHROW(parse(c));
    }
    CHECK_THROWS_AS(expand_preset("nope"), SchemaError);
}

TEST_CASE("weak qubit-relaxation preset reproduces the Gibbs excited population") {
    const fs::path dir = scratch("fig1");
    REQUIRE(run_cli({"run", "--scenario", "preset:fig1_weak", "--out", dir.string()}) == 0);
    const auto rows = read_csv(dir / "statics_states.csv");
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].at("formula") == "gibbs");
    CHECK(std::abs(std::stod(rows[0].at("excited_pop")) - 0.388) <= 1e-3);
    CHECK(std::stod(rows[0].at("coherence_abs")) == 0.0);
    const std::string text = slurp(dir / "statics_states.csv");
    CHECK(text.find("# note: interaction strength is read as the reorganization energy") != std::string::npos);
    CHECK(text.find("# units: si") != std::string::npos);
    CHECK(text.find("# config_hash: ") != std::string::npos);
    CHECK(fs::exists(dir / "scenario.expanded.json"));
    CHECK(Json::parse(slurp(dir / "scenario.expanded.json")) == expand_preset("fig1_weak"));
}

TEST_CASE("zero coupling collapses every statics formula to the Gibbs state") {
    Json c = expand_preset("spin_boson");
    c["task"] = "STATICS_ALL";
    c["coupling"]["lambda"] = 0.0;
    const TaskResult r = run_task(parse(c));
    for (const auto& [k, v] : r.summary)
        if (k.rfind("dist.", 0) == 0) CHECK(v == 0.0);
    c["coupling"] = Json{{"model", "sites"}, {"lambda", 0.0}};
    for (const auto& [k, v] : run_task(parse(c)).summary)
        if (k.rfind("dist.", 0) == 0) CHECK(v == 0.0);
}

TEST_CASE("validation reports") {
    SUBCASE("well-formed preset") { CHECK(validate(expand_preset("oracle")).empty()); }
    SUBCASE("Ohmic density with the polaron factor") {
        Json c = expand_preset("spin_boson");
        c["statics"] = Json{{"polaron", true}};
        c["bath"]["spectral_density"] = Json{{"type", "ohmic_exp"}, {"gamma", 0.1}, {"omega_c", 2.0}};
        const auto issues = validate(c);
        REQUIRE(issues.size() == 1);
        CHECK(issues[0].find("diverges") != std::string::npos);
        c["bath"]["spectral_density"] = Json{{"type", "super_ohmic_cubic"}, {"gamma", 0.1}, {"omega_c", 2.0}};
        CHECK(validate(c).empty());
    }
    SUBCASE("missing temperature names the field") {
        Json c = expand_preset("spin_boson");
        c["bath"].erase("beta");
        const auto issues = validate(c);
        REQUIRE(issues.size() == 1);
        CHECK(issues[0].find("bath.temperature") != std::string::npos);
    }
    SUBCASE("schema violations") {
        Json c = expand_preset("fig1_weak");
        c["bath"]["beta"] = 1.0;
        CHECK_FALSE(validate(c).empty());
        c = expand_preset("spin_boson");
        c["task"] = "PLOT";
        CHECK(validate(c).front().find("unknown task") != std::string::npos);
        c = expand_preset("spin_boson");
        c["system"] = Json{{"matrix", {{1.0, Json::array({0.0, 1.0})}, {Json::array({0.0, 1.0}), -1.0}}}};
        CHECK(validate(c).front().find("Hermitian") != std::string::npos);
        c = expand_preset("spin_boson");
        c["coupling"]["operator"] = Json{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
        CHECK(validate(c).front().find("dimension") != std::string::npos);
        c = expand_preset("oracle");
        c["oracle"]["modes"] = 8;
        CHECK(validate(c).front().find("cap") != std::string::npos);
    }
}

TEST_CASE("matrix literals and tabulated densities") {
    const fs::path dir = scratch("tab");
    {
        std::ofstream out(dir / "j.csv");
        out << "# units: natural\nw,J\n";
        for (int k = 0; k <= 1000; ++k) {
            const double w = 0.1 * k;
            out << w << "," << (2.0 * 0.1 * 5.0 / M_PI) * w * 5.0 / (w * w + 25.0) * std::exp(-w / 10.0) << "\n";
        }
    }
    Json c = expand_preset("spin_boson");
    c["task"] = "STATICS_ALL";
    c["system"] = Json{{"matrix", {{0.5, 0.25}, {0.25, -0.5}}}};
    c["bath"]["spectral_density"] = Json{{"type", "tabulated"}, {"path", (dir / "j.csv").string()}};
    const Scenario s = parse(c);
    CHECK(s.h_s(0, 1) == cplx(0.25, 0.0));
    const TaskResult r = run_task(s);
    CHECK(metric(r, "dist.gibbs.weak") > 0.0);
    CHECK(metric(r, "dist.gibbs.weak") < 1e-3);
}

TEST_CASE("dynamics output keeps trajectories physical and reports the monitors") {
    Json c = expand_preset("fig1_weak");
    c["task"] = "DYNAMICS";
    c["dynamics"]["generators"] = {"davies", "brme", "brme_t", "pauli"};
    c["dynamics"]["points"] = 41;
    const TaskResult r = run_task(parse(c));
    REQUIRE(r.tables.size() == 2);
    CHECK(r.tables[0].rows.size() == 4 * 41);
    CHECK(r.tables[0].columns[2] == "t_s");
    for (const std::string g : {"davies", "brme", "brme_t", "pauli"}) {
        CHECK(metric(r, g + ".max_trace_dev") < 1e-9);
        CHECK(metric(r, g + ".max_herm_dev") < 1e-9);
    }
    CHECK(metric(r, "davies.min_eigenvalue") > -1e-9);
    CHECK(std::abs(metric(r, "davies.final_pop_e1") - 0.3877) < 1e-3);
}

TEST_CASE("steady-state comparison table") {
    const TaskResult r = run_task(parse(expand_preset("spin_boson")));
    CHECK(metric(r, "davies.dist_gibbs") < 1e-9);
    CHECK(metric(r, "secular_full.dist_gibbs") < 1e-9);
    CHECK(metric(r, "pauli.dist_ultrastrong") < 1e-12);
    CHECK(metric(r, "brme.dist_weak") < 2e-4);
    CHECK(std::isnan(metric(r, "brme.dist_high_t")));
}

TEST_CASE("oracle task on a small model") {
    Json c = expand_preset("oracle");
    c["oracle"]["modes"] = 2;
    c["oracle"]["n_max"] = 6;
    c["oracle"]["truncation_ladder"] = {4, 6};
    const fs::path cache = scratch("cache");
    setenv("MFGKIT_CACHE_DIR", cache.string().c_str(), 1);
    const TaskResult a = run_task(parse(c));
    const TaskResult b = run_task(parse(c));
    unsetenv("MFGKIT_CACHE_DIR");
    CHECK(std::distance(fs::directory_iterator(cache), fs::directory_iterator{}) == 4);
    CHECK(metric(a, "lambda[0].dist_weak") / metric(a, "lambda[2].dist_weak") >= 8.0);
    CHECK(metric(a, "lambda[0].dist_weak") == metric(b, "lambda[0].dist_weak"));
    CHECK(metric(a, "deff_mean") > 1.0);
    REQUIRE(a.tables.size() == 3);
    CHECK(a.tables[2].name == "oracle_truncation");
    CHECK(a.tables[2].rows.back().back() == "1");
}

TEST_CASE("oscillator statics agree across routes") {
    Json c = expand_preset("spin_boson");
    c["task"] = "OSCILLATOR";
    c["coupling"]["lambda"] = 1.0;
    c["bath"]["beta"] = 2.0;
    c["oscillator"] = Json{{"omega_0", 1.0}};
    const TaskResult r = run_task(parse(c));
    CHECK(metric(r, "cross_route_relative_residual") < 1e-4);
    CHECK(metric(r, "px_im") == doctest::Approx(-0.5));
    c["bath"]["spectral_density"] = Json{{"type", "ohmic_exp"}, {"gamma", 0.1}, {"omega_c", 2.0}};
    CHECK_FALSE(validate(c).empty());
}

TEST_CASE("sweeps") {
    SUBCASE("five coupling strengths of the steady-state comparison") {
        const SweepResult r = sweep(expand_preset("spin_boson"), "coupling.lambda", parse_grid("lin:0.01:0.05:5"), 2);
        CHECK(r.failures == 0);
        std::map<std::string, int> per_point;
        for (const auto& row : r.table.rows) ++per_point[row[0]];
        CHECK(per_point.size() == 5);
        for (const auto& [p, n] : per_point) CHECK(n == per_point.begin()->second);
        CHECK(r.table.rows.front()[1] == "0.01");
    }
    SUBCASE("the weak-coupling bound decreases with beta") {
        Json c = expand_preset("spin_boson");
        c["task"] = "STATICS_ALL";
        const SweepResult r = sweep(c, "bath.beta", parse_grid("log:0.25:8:6"), 3);
        std::vector<double> bound;
        for (const auto& row : r.table.rows)
            if (row[2] == "weak_validity_lambda_max") bound.push_back(std::stod(row[3]));
        REQUIRE(bound.size() == 6);
        for (std::size_t k = 1; k < bound.size(); ++k) CHECK(bound[k] < bound[k - 1]);
    }
    SUBCASE("mode count of the effective dimension") {
        Json c = expand_preset("oracle");
        c["oracle"] = Json{{"modes", 1}, {"n_max", 3}, {"scheme", "gauss"}, {"lambdas", {0.3}}, {"deff_samples", 6}};
        const SweepResult r = sweep(c, "oracle.modes", {1, 2, 3}, 2);
        std::vector<double> d;
        for (const auto& row : r.table.rows)
            if (row[2] == "deff_mean") d.push_back(std::stod(row[3]));
        REQUIRE(d.size() == 3);
        CHECK(d[1] > d[0]);
        CHECK(d[2] > d[1]);
    }
    SUBCASE("grid and path parsing") {
        CHECK(parse_grid("1,2.5,4") == std::vector<double>{1, 2.5, 4});
        CHECK(parse_grid("log:1:100:3")[1] == doctest::Approx(10.0));
        CHECK_THROWS_AS(parse_grid("lin:0:1"), SchemaError);
        CHECK_THROWS_AS(parse_grid("a,b"), SchemaError);
        const Json c = with_param(expand_preset("oracle"), "oracle.modes", 3);
        CHECK(c["oracle"]["modes"].is_number_integer());
        CHECK_THROWS_AS(with_param(expand_preset("oracle"), "oracle.modes", 2.5), SchemaError);
        CHECK_THROWS_AS(with_param(expand_preset("oracle"), "name.x", 1), SchemaError);
    }
}

TEST_CASE("command-line exit codes and reproducibility") {
    const fs::path dir = scratch("exit");
    SUBCASE("schema errors exit with 2") {
        CHECK(run_cli({"run", "--scenario", (dir / "missing.json").string(), "--out", dir.string()}) == 2);
        Json c = expand_preset("spin_boson");
        c["bath"].erase("beta");
        CHECK(run_cli({"run", "--scenario", write_json(dir, c).string(), "--out", dir.string()}) == 2);
        CHECK(run_cli({"validate", "--scenario", write_json(dir, c).string()}) == 2);
        CHECK(run_cli({"run", "--scenario", "preset:spin_boson", "--out", dir.string(), "--tol-override", "x=1"}) == 2);
    }
    SUBCASE("numerical failures exit with 3") {
        Json c = expand_preset("spin_boson");
        c["task"] = "DYNAMICS";
        CHECK(run_cli({"run", "--scenario", write_json(dir, c).string(), "--out", dir.string(), "--tol-override",
                       "trace_abort=1e-300"}) == 3);
    }
    SUBCASE("partial sweep failures exit with 4") {
        CHECK(run_cli({"sweep", "--scenario", "preset:spin_boson", "--param", "coupling.lambda", "--grid", "0.01,-1",
                       "--out", dir.string()}) == 4);
        const auto rows = read_csv(dir / "sweep.csv");
        bool flagged = false;
        for (const auto& r : rows) flagged = flagged || r.at("status").rfind("error", 0) == 0;
        CHECK(flagged);
    }
    SUBCASE("a preset file with overrides") {
        const Json c{{"preset", "spin_boson"}, {"task", "STATICS_ALL"}};
        CHECK(run_cli({"validate", "--scenario", write_json(dir, c).string()}) == 0);
        CHECK(load_config(write_json(dir, c).string())["task"] == "STATICS_ALL");
    }
    SUBCASE("identical scenarios give byte-identical outputs") {
        Json c = expand_preset("fig1_strong");
        c["task"] = "DYNAMICS";
        c["dynamics"]["points"] = 21;
        const std::string path = write_json(dir, c).string();
        REQUIRE(run_cli({"run", "--scenario", path, "--out", (dir / "a").string()}) == 0);
        REQUIRE(run_cli({"run", "--scenario", path, "--out", (dir / "b").string()}) == 0);
        CHECK(slurp(dir / "a" / "dynamics.csv") == slurp(dir / "b" / "dynamics.csv"));
        CHECK(slurp(dir / "a" / "dynamics_monitor.csv") == slurp(dir / "b" / "dynamics_monitor.csv"));
        REQUIRE(run_cli({"sweep", "--scenario", "preset:spin_boson", "--param", "bath.beta", "--grid", "0.5,1,2",
                         "--jobs", "3", "--out", (dir / "c").string()}) == 0);
        REQUIRE(run_cli({"sweep", "--scenario", "preset:spin_boson", "--param", "bath.beta", "--grid", "0.5,1,2",
                         "--jobs", "1", "--out", (dir / "d").string()}) == 0);
        CHECK(slurp(dir / "c" / "sweep.csv") == slurp(dir / "d" / "sweep.csv"));
    }
}
