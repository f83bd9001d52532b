// cli.hpp — Scenario configuration, unit conversion, task runners and the
// command-line entry point

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mfgkit/bath.hpp"
#include "mfgkit/opcore.hpp"

namespace mfgkit::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

// Malformed or inconsistent scenario (exit code 2).
class SchemaError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class ExitCode : int { Ok = 0, Schema = 2, Numerical = 3, PartialFailure = 4 };

// SI <-> natural units. Energies are measured in units of hbar * omega_ref,
// frequencies in omega_ref, times in 1 / omega_ref, temperatures as k_B T.
namespace units {
inline constexpr double kBoltzmann = 1.380649e-23;   // J / K
inline constexpr double kHbar = 1.054571817e-34;     // J s

double energy_to_natural(double joules, double omega_ref);
double energy_to_si(double e, double omega_ref);
double frequency_to_natural(double rad_per_s, double omega_ref);
double frequency_to_si(double w, double omega_ref);
double time_to_natural(double seconds, double omega_ref);
double time_to_si(double t, double omega_ref);
double beta_from_kelvin(double kelvin, double omega_ref);
double kelvin_from_beta(double beta, double omega_ref);
} // namespace units

enum class Task { StaticsAll, Dynamics, SteadyCompare, Oracle, Oscillator };
enum class CouplingModel { Single, Sites };

std::string to_string(Task t);

struct DynamicsConfig {
    std::vector<std::string> generators{"davies", "brme", "real_only"};
    double t_max = 50.0;
    int points = 201;
    std::string initial = "excited";
    Matrix initial_matrix;         // used when initial == "matrix"
    double partial_cutoff = 0.0;   // secular_partial frequency cutoff
    double pauli_nu0 = 1.0;
    int snapshots = 8;             // brme_t generator snapshots over the bath memory time
};

struct OracleConfig {
    int modes = 4;
    int n_max = 5;
    double omega_max = 8.0;
    std::string scheme = "linear";
    std::vector<double> lambdas{0.2, 0.1, 0.05};
    std::vector<int> truncation_ladder;  // n_max rungs for the convergence table
    int deff_samples = 4;
};

// Fully resolved scenario in natural units.
struct Scenario {
    std::string name;
    bool si = false;
    double omega_ref = 1.0;
    std::uint64_t seed = 1;
    Task task = Task::StaticsAll;
    Matrix h_s;
    CouplingModel model = CouplingModel::Single;
    Matrix x;  // single-bath coupling operator
    double lambda = 0.0;
    bool counter_term = true;
    bath::SpectralDensity J = bath::DrudeLorentz{0.0, 1.0};
    double beta = 1.0;
    bool polaron = false;
    DynamicsConfig dynamics;
    OracleConfig oracle;
    double omega_0 = 1.0;  // oscillator frequency
    std::vector<std::string> notes;

    // Rank-one site projectors (Sites) or the single operator (Single).
    std::vector<Matrix> coupling_operators() const;
};

// Numerical knobs that --tol-override may change.
struct Tolerances {
    double evolve_rtol = 1e-8;
    double evolve_atol = 1e-12;
    double trace_abort = 1e-7;
    double truncation_tol = 1e-4;

    void set(const std::string& name, double value);
};

// Load a scenario file, or "preset:NAME". A "preset" key in a file expands the
// preset first and then applies the remaining keys as a merge patch.
Json load_config(const std::string& source);
Json expand_preset(const std::string& name);
std::vector<std::string> preset_names();

Scenario parse(const Json& config);

// Schema and physics checks. Never throws; an empty list means valid.
std::vector<std::string> validate(const Json& config);

// FNV-1a of the compact dump of the expanded config, as 16 hex digits.
std::string config_hash(const Json& config);

struct Table {
    std::string name;  // file stem
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row);
};

struct TaskResult {
    std::vector<Table> tables;
    std::vector<std::pair<std::string, double>> summary;  // scalar metrics for sweeps
    std::vector<std::string> warnings;
};

TaskResult run_task(const Scenario& s, const Tolerances& tol = {});

// Shortest round-trip formatting; "nan", "inf" and "-inf" for non-finite values.
std::string fmt(double v);

std::string csv_header(const Json& config, const Scenario& s);
std::string to_csv(const Table& t, const std::string& header);

// Comma list "a,b,c" or "lin:a:b:n" / "log:a:b:n".
std::vector<double> parse_grid(const std::string& grid);

// Set a dotted-path key (e.g. "coupling.lambda") in a config copy.
Json with_param(const Json& config, const std::string& path, double value);

struct SweepResult {
    Table table;
    std::size_t failures = 0;
};

SweepResult sweep(const Json& config, const std::string& param, const std::vector<double>& grid,
                  int jobs, const Tolerances& tol = {});

// Full command-line entry point; returns the process exit code.
int main(int argc, const char* const* argv);

} // namespace mfgkit::cli
