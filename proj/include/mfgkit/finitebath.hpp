// finitebath.hpp — Exact finite-bath oracle: discretized bosonic modes with
// truncated Fock spaces, global Gibbs state and unitary dynamics

#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <vector>

#include "mfgkit/bath.hpp"
#include "mfgkit/mfstatics.hpp"
#include "mfgkit/opcore.hpp"

namespace mfgkit::finite {

struct Mode {
    double omega = 0.0;
    cplx g = 0.0;
};

enum class Scheme { Linear, Gauss };

struct FiniteBathSpec {
    std::vector<Mode> modes;
    int fock_cutoff = 4;  // n_max per mode
    bool counter_term = true;

    void validate() const;
};

// One independent bath coupled through its own system operator.
struct BathCoupling {
    Matrix x;
    FiniteBathSpec spec;
};

inline constexpr Index kDefaultDimensionCap = 16384;

// Tensor ordering: system factor first (slowest index), then every mode of
// every bath in order, modes within a bath ascending in frequency.
class GlobalModel {
public:
    Index system_dim() const { return system_dim_; }
    const std::vector<Index>& bath_dims() const { return bath_dims_; }
    Index dim() const { return h_tot_.rows(); }
    const Matrix& h_tot() const { return h_tot_; }
    TensorSpace space() const;
    const HermitianOperator& h_s() const { return h_s_; }
    const std::vector<BathCoupling>& couplings() const { return couplings_; }
    double lambda() const { return lambda_; }

    // Eigenvalues of H_tot (ascending); computed once, then shared.
    const RealVector& energies() const;
    // Eigenvectors of H_tot as columns.
    Matrix eigenvectors() const;

    struct Spectrum {
        RealVector values;
        RealMatrix real_vectors;  // used when H_tot is real
        Matrix vectors;
        bool real = false;
    };
    const Spectrum& spectrum() const;

private:
    friend GlobalModel assemble(const HermitianOperator&, const std::vector<BathCoupling>&, double, Index);

    Index system_dim_ = 0;
    std::vector<Index> bath_dims_;
    Matrix h_tot_;
    bool real_ = false;
    HermitianOperator h_s_;
    std::vector<BathCoupling> couplings_;
    double lambda_ = 0.0;
    mutable std::shared_ptr<std::once_flag> once_ = std::make_shared<std::once_flag>();
    mutable std::shared_ptr<Spectrum> spectrum_;
};

// LINEAR: midpoints of N equal panels on (0, omega_max], g_k = sqrt(J(w_k) dw).
// GAUSS: Gauss-Legendre nodes and weights on [0, omega_max], g_k = sqrt(J(w_k) w_k).
std::vector<Mode> discretize(const bath::SpectralDensity& J, int n, double omega_max, Scheme scheme);

GlobalModel assemble(const HermitianOperator& h_s, const HermitianOperator& x, double lambda,
                     const FiniteBathSpec& spec, Index dimension_cap = kDefaultDimensionCap);
GlobalModel assemble(const HermitianOperator& h_s, const std::vector<BathCoupling>& couplings,
                     double lambda, Index dimension_cap = kDefaultDimensionCap);

// Reduced system state of exp(-beta H_tot) / Z.
DensityMatrix exact_mfg(const GlobalModel& model, double beta);
// Full normalized global Gibbs state.
Matrix exact_gibbs(const GlobalModel& model, double beta);
// Z_SB / Z_B with Z_B the partition function of the truncated bare bath.
double partition_ratio(const GlobalModel& model, double beta);

// exp(-i t H_tot) rho exp(i t H_tot).
Matrix exact_evolve(const GlobalModel& model, const Matrix& rho_sb0, double t);

struct EffectiveDimension {
    double value = 1.0;
    std::size_t near_degenerate_pairs = 0;  // adjacent levels closer than 1e-10
};

// 1 / tr[rho_bar^2] for the state dephased in the H_tot eigenbasis.
EffectiveDimension effective_dimension(const Matrix& rho_sb0, const GlobalModel& model);

// D_beta(w) = sum_k |g_k|^2 [(w coth(beta w_k / 2) + w_k) / (w_k^2 - w^2) - 1 / w_k]
// and its analytic derivative, for a discrete set of modes.
DBeta discrete_d_beta(const std::vector<Mode>& modes, double beta);

// lambda^2 sum_k |g_k|^2 / w_k.
double discrete_reorganization(const std::vector<Mode>& modes, double lambda);

struct TruncationRow {
    int n_max = 0;
    double value = 0.0;
    double change = 0.0;  // |value - previous value|; NaN on the first rung
};

struct TruncationStudy {
    std::vector<TruncationRow> rows;
    double value = 0.0;
    int cutoff = 0;
    bool converged = false;
};

// Evaluate `observable(n_max)` on n_max, n_max + step, ... until the change
// between rungs drops below `tol`. The reported cutoff is the smaller n_max of
// the converged pair; the value is taken from the larger one. Throws NumericalError if the ladder runs out.
TruncationStudy truncation_study(const std::function<double(int)>& observable, int n_max_start,
                                 int rungs, double tol, int step = 2);

} // namespace mfgkit::finite
