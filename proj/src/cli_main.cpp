// cli_main.cpp — CSV emission, parameter sweeps and the command-line entry point

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "mfgkit/cli.hpp"

namespace mfgkit::cli {

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

void prepare_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
}

} // namespace

std::string csv_header(const Json& config, const Scenario& s) {
    std::ostringstream os;
    os << "# mfgkit " << kToolVersion << "\n";
    os << "# scenario: " << s.name << "\n";
    os << "# config_hash: " << config_hash(config) << "\n";
    os << "# task: " << to_string(s.task) << "\n";
    if (s.si)
        os << "# units: si (reference_frequency " << fmt(s.omega_ref)
           << " rad/s; energies in hbar*omega_ref, times in 1/omega_ref)\n";
    else
        os << "# units: natural\n";
    os << "# beta: " << fmt(s.beta) << "\n";
    if (s.si) os << "# temperature_K: " << fmt(units::kelvin_from_beta(s.beta, s.omega_ref)) << "\n";
    os << "# lambda: " << fmt(s.lambda) << "\n";
    for (const auto& n : s.notes) os << "# note: " << n << "\n";
    return os.str();
}

std::string to_csv(const Table& t, const std::string& header) {
    std::ostringstream os;
    os << header;
    for (std::size_t k = 0; k < t.columns.size(); ++k) os << (k ? "," : "") << csv_field(t.columns[k]);
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << csv_field(row[k]);
        os << "\n";
    }
    return os.str();
}

SweepResult sweep(const Json& config, const std::string& param, const std::vector<double>& grid, int jobs,
                  const Tolerances& tol) {
    struct Point {
        std::vector<std::pair<std::string, double>> metrics;
        std::string error;
    };
    std::vector<Point> points(grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < grid.size(); k = next++) {
            Point& p = points[k];
            try {
                const Json c = with_param(config, param, grid[k]);
                const auto issues = validate(c);
                if (!issues.empty()) throw SchemaError(issues.front());
                p.metrics = run_task(parse(c), tol).summary;
            } catch (const std::exception& e) {
                p.error = e.what();
            }
        }
    };
    const std::size_t n = std::max<std::size_t>(1, std::min<std::size_t>(std::size_t(std::max(jobs, 1)), grid.size()));
    std::vector<std::thread> pool;
    for (std::size_t k = 1; k < n; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    SweepResult r;
    r.table = Table{"sweep", {"point", param, "metric", "value", "status"}, {}};
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Point& p = points[k];
        if (!p.error.empty()) {
            ++r.failures;
            r.table.add({std::to_string(k), fmt(grid[k]), "error", "nan", "error: " + p.error});
            continue;
        }
        for (const auto& [name, v] : p.metrics) r.table.add({std::to_string(k), fmt(grid[k]), name, fmt(v), "ok"});
    }
    return r;
}

int main(int argc, const char* const* argv) {
    CLI::App app{"mfgkit: mean force Gibbs states, master equations and finite-bath oracles"};
    app.require_subcommand(1);
    std::string scenario, out = "mfgkit_out", param, grid;
    int jobs = 1;
    std::vector<std::string> overrides;

    auto* run = app.add_subcommand("run", "run a scenario and write its tables");
    auto* val = app.add_subcommand("validate", "check a scenario and print a report");
    auto* swp = app.add_subcommand("sweep", "re-run a scenario over a parameter grid");
    for (auto* sc : {run, val, swp}) {
        sc->add_option("--scenario", scenario, "scenario file or preset:NAME")->required();
    }
    for (auto* sc : {run, swp}) {
        sc->add_option("--out", out, "output directory");
        sc->add_option("--tol-override", overrides, "numerical tolerance override name=value");
    }
    swp->add_option("--param", param, "dotted config path, e.g. coupling.lambda")->required();
    swp->add_option("--grid", grid, "a,b,c or lin:a:b:n or log:a:b:n")->required();
    swp->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    run->add_option("--jobs", jobs, "accepted for symmetry; a single run is sequential")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : int(ExitCode::Schema);
    }

    Json config;
    Tolerances tol;
    try {
        config = load_config(scenario);
        for (const auto& o : overrides) {
            const auto eq = o.find('=');
            if (eq == std::string::npos) throw SchemaError("--tol-override expects name=value, got '" + o + "'");
            double v = 0.0;
            try {
                v = std::stod(o.substr(eq + 1));
            } catch (const std::exception&) {
                throw SchemaError("--tol-override: '" + o.substr(eq + 1) + "' is not a number");
            }
            tol.set(o.substr(0, eq), v);
        }
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return int(ExitCode::Schema);
    }

    if (*val) {
        const auto issues = validate(config);
        Json report{{"scenario", config.value("name", std::string("scenario"))},
                    {"valid", issues.empty()},
                    {"issues", issues}};
        std::cout << report.dump(2) << "\n";
        return issues.empty() ? int(ExitCode::Ok) : int(ExitCode::Schema);
    }

    const auto issues = validate(config);
    if (!issues.empty()) {
        for (const auto& i : issues) std::cerr << "error: " << i << "\n";
        return int(ExitCode::Schema);
    }

    try {
        if (*swp) {
            const std::vector<double> points = parse_grid(grid);
            with_param(config, param, points.front());
            const Scenario base = parse(config);
            const SweepResult r = sweep(config, param, points, jobs, tol);
            prepare_dir(out);
            write_file(std::filesystem::path(out) / "scenario.expanded.json", config.dump(2) + "\n");
            write_file(std::filesystem::path(out) / "sweep.csv",
                       to_csv(r.table, csv_header(config, base) + "# sweep: " + param + " over " +
                                           std::to_string(points.size()) + " points\n"));
            std::cout << "sweep: " << points.size() << " points, " << r.failures << " failed -> " << out
                      << "/sweep.csv\n";
            return r.failures ? int(ExitCode::PartialFailure) : int(ExitCode::Ok);
        }
        const Scenario s = parse(config);
        const TaskResult r = run_task(s, tol);
        prepare_dir(out);
        write_file(std::filesystem::path(out) / "scenario.expanded.json", config.dump(2) + "\n");
        const std::string header = csv_header(config, s);
        for (const auto& t : r.tables) write_file(std::filesystem::path(out) / (t.name + ".csv"), to_csv(t, header));
        for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
        for (const auto& [k, v] : r.summary) std::cout << k << " = " << fmt(v) << "\n";
        return int(ExitCode::Ok);
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return int(ExitCode::Schema);
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return int(ExitCode::Numerical);
    }
}

} // namespace mfgkit::cli
