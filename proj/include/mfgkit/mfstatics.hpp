// mfstatics.hpp — Closed-form mean force Gibbs states across coupling regimes

#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mfgkit/bath.hpp"
#include "mfgkit/eigenops.hpp"
#include "mfgkit/opcore.hpp"

namespace mfgkit {

enum class Regime { Weak, Ultrastrong, HighT, Gibbs };

std::string to_string(Regime r);

struct MfgResult {
    DensityMatrix state;
    Regime regime = Regime::Gibbs;
    double lambda = 0.0;
    std::map<std::string, double> diagnostics;
};

// D_beta and its derivative as functions of the Bohr frequency. The continuum
// version integrates J; finite-bath oracles substitute discrete mode sums.
struct DBeta {
    std::function<double(double)> value;
    std::function<double(double)> deriv;

    static DBeta continuum(const bath::SpectralDensity& J, double beta);
};

// Second-order coefficient tau^(2) of tau_MF = tau + lambda^2 tau^(2) + O(lambda^4),
// before any normalization. Traceless and Hermitian.
Matrix weak_correction(const HermitianOperator& h_s, const BohrDecomposition& modes, double beta,
                       const DBeta& d);

MfgResult mfg_weak(const HermitianOperator& h_s, const HermitianOperator& x,
                   const bath::BathParams& bath);
MfgResult mfg_weak(const HermitianOperator& h_s, const HermitianOperator& x, double beta,
                   double lambda, const DBeta& d);

// 1 / sqrt(|beta sum_m tr[tau X_m X_m^dag] D_beta(w_m)|); +inf when the sum vanishes.
double weak_validity_bound(const HermitianOperator& h_s, const HermitianOperator& x,
                           const bath::BathParams& bath);
double weak_validity_bound(const HermitianOperator& h_s, const BohrDecomposition& modes,
                           double beta, const DBeta& d);

// lambda -> infinity limit: Gibbs state of sum_n P_n H_S P_n for the rank-one
// eigenprojectors P_n of a non-degenerate X.
MfgResult mfg_ultrastrong(const HermitianOperator& h_s, const HermitianOperator& x, double beta);

// High-temperature resummation for site projectors X_n = |n><n| with
// reorganization energies ell_n:
//   tau_MF ~ exp[-beta (H_eps + e^{-beta Lambda / 6} H_J e^{-beta Lambda / 6})],
//   Lambda = sum_n ell_n X_n.
MfgResult mfg_high_t(const HermitianOperator& h_s, const std::vector<Matrix>& projectors,
                     const std::vector<double>& reorganization, double beta);

struct SiteBath {
    bath::SpectralDensity J;
    double lambda = 0.0;
};

MfgResult mfg_high_t(const HermitianOperator& h_s, const std::vector<Matrix>& projectors,
                     const std::vector<SiteBath>& baths, double beta);

// H_MF = -(1/beta) log(tau_MF), the representative with Z_MF = 1.
HermitianOperator mean_force_hamiltonian(const DensityMatrix& tau_mf, double beta);

struct PointerSplit {
    Matrix pointer_basis;  // columns: eigenvectors of X, eigenvalues descending
    RealVector x_values;   // eigenvalues of X in the same order
    Matrix h_eps;          // diagonal part of H_S in the pointer basis
    Matrix h_j;            // off-diagonal part
    RealVector eps;        // diagonal entries of h_eps
    Matrix delta;          // hopping amplitudes Delta_mn (zero diagonal)
};

PointerSplit pointer_split(const HermitianOperator& h_s, const HermitianOperator& x);

} // namespace mfgkit
