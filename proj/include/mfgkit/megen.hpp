// megen.hpp — Master-equation generators (Davies, Bloch-Redfield and its
// secular variants, ultrastrong Pauli), time evolution and steady states

#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "mfgkit/bath.hpp"
#include "mfgkit/eigenops.hpp"
#include "mfgkit/mfstatics.hpp"
#include "mfgkit/opcore.hpp"

namespace mfgkit::me {

enum class Kind {
    Davies,
    BrmeAsymptotic,
    BrmeAtTime,
    SecularFull,
    SecularPartial,
    BrmeRealOnly,
    PauliUltrastrong,
};

std::string to_string(Kind k);

inline constexpr double kFullSecular = -1.0;  // cutoff marker: keep m == n only

// Schrodinger-picture generator acting on column-stacked density matrices:
// d vec(rho) / dt = matrix * vec(rho).
struct Liouvillian {
    Kind kind = Kind::Davies;
    Index dim = 0;
    Matrix matrix;
    double lambda = 0.0;
    double time = std::numeric_limits<double>::infinity();  // BRME_AT_TIME snapshot
    double cutoff = std::numeric_limits<double>::infinity(); // secular cutoff
    std::size_t terms = 0;  // number of (m, n) damping terms kept
    Matrix lamb_shift;      // lambda^2 times the shift commuting with H_S
    Matrix lamb_shift_perp; // lambda^2 times the non-commuting part

    Matrix apply(const Matrix& rho) const;
};

// Superoperator building blocks (column stacking: vec(A X B) = (B^T kron A) vec X).
Matrix commutator_superop(const Matrix& h);                 // -i[h, .]
Matrix dissipator_superop(const Matrix& a, const Matrix& b); // a . b^dag - 1/2 {b^dag a, .}

// Bath-side ingredients shared by the Bloch-Redfield family.
struct Ingredients {
    HermitianOperator h_s;
    BohrDecomposition bohr;
    std::vector<cplx> gamma;  // Gamma_m per Bohr mode
    double lambda = 0.0;
    double beta = 1.0;
    double time = std::numeric_limits<double>::infinity();
    double reorganization = 0.0;  // int J / w, used for the counter term
    bool counter_term = true;
};

Ingredients ingredients(const HermitianOperator& h_s, const HermitianOperator& x,
                        const bath::BathParams& bath, bath::Asymptotic, bool counter_term = true);
Ingredients ingredients(const HermitianOperator& h_s, const HermitianOperator& x,
                        const bath::BathParams& bath, double t, bool counter_term = true);

Liouvillian davies_generator(const HermitianOperator& h_s, const HermitianOperator& x,
                             const bath::BathParams& bath, bool counter_term = true);
Liouvillian davies_generator(const Ingredients& in);

Liouvillian brme_generator(const HermitianOperator& h_s, const HermitianOperator& x,
                           const bath::BathParams& bath, bath::Asymptotic, bool counter_term = true);
Liouvillian brme_generator(const HermitianOperator& h_s, const HermitianOperator& x,
                           const bath::BathParams& bath, double t, bool counter_term = true);
Liouvillian brme_generator(const Ingredients& in);

// Keep damping and shift terms with |w_m - w_n| <= cutoff; kFullSecular keeps m == n only.
Liouvillian secular_filter(const Ingredients& in, double cutoff);

// Bloch-Redfield with every Gamma_m replaced by Re Gamma_m (no counter term).
Liouvillian brme_real_only(const HermitianOperator& h_s, const HermitianOperator& x,
                           const bath::BathParams& bath);
Liouvillian brme_real_only(const Ingredients& in);

// KMS-symmetric transition function: f(-E) = exp(-beta E) f(E), f >= 0, where
// E is the energy released by the system.
struct RateModel {
    std::function<double(double)> f;
    double dephasing_floor = 0.0;  // lower bound on the pointer-coherence decay rate

    // f(E) = nu0 exp(beta E / 2) / (2 cosh(beta E / 2)).
    static RateModel fermi(double beta, double nu0 = 1.0);
};

// Population rates k_mn (n -> m) = |Delta_mn|^2 f(eps_n - eps_m) in the pointer
// basis; coherences decay at max(fastest population rate, floor) while
// rotating at eps_m - eps_n.
Liouvillian pauli_ultrastrong(const PointerSplit& split, double beta, const RateModel& model);

// Rate matrix k(m, n) used by pauli_ultrastrong.
RealMatrix pauli_rates(const PointerSplit& split, const RateModel& model);

struct Monitor {
    double trace_deviation = 0.0;
    double hermiticity_deviation = 0.0;
    double min_eigenvalue = 0.0;
};

// States are kept as raw matrices: Bloch-Redfield evolution may leave the
// positive cone and that is reported through the min-eigenvalue monitor.
struct Trajectory {
    std::vector<double> times;
    std::vector<Matrix> states;
    std::vector<Monitor> monitors;
    std::size_t steps = 0;
};

struct EvolveOptions {
    double rtol = 1e-8;
    double atol = 1e-12;
    double trace_abort = 1e-7;
    std::size_t max_steps = 10'000'000;
};

Trajectory evolve(const Liouvillian& L, const Matrix& rho0, const std::vector<double>& t_grid,
                  const EvolveOptions& opt = {});

// Piecewise-constant generator: generators[i] acts on [breaks[i], breaks[i + 1]),
// the last one until the end of the grid. breaks[0] must be 0.
Trajectory evolve_piecewise(const std::vector<double>& breaks, const std::vector<Liouvillian>& generators,
                            const Matrix& rho0, const std::vector<double>& t_grid,
                            const EvolveOptions& opt = {});

struct SteadyStateReport {
    std::vector<DensityMatrix> states;
    double residual = 0.0;       // max ||L(rho)|| over reported states
    double spectral_gap = 0.0;   // -max Re over non-null eigenvalues
    double null_tolerance = 0.0; // relative tolerance that produced the null space
    bool unique = false;
};

SteadyStateReport steady_state(const Liouvillian& L);

// max |(vec I)^dag L|: zero for trace-preserving generators.
double trace_preservation_error(const Liouvillian& L);
// max over random Hermitian probes of ||L(rho^dag) - L(rho)^dag||.
double hermiticity_preservation_error(const Liouvillian& L, unsigned seed = 7, int probes = 5);

} // namespace mfgkit::me
