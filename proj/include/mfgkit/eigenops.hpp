// eigenops.hpp — Bohr-frequency eigenoperator decomposition of a coupling operator

#pragma once

#include <vector>

#include "mfgkit/opcore.hpp"

namespace mfgkit {

struct BohrMode {
    double omega = 0.0;  // [H_S, X_m] = omega X_m
    Matrix op;
};

struct BohrDecomposition {
    std::vector<BohrMode> modes;  // ascending in omega
    double degeneracy_tol = 0.0;

    // Index of the mode with frequency -omega_m (its adjoint partner).
    std::size_t partner(std::size_t m) const;
    Matrix sum() const;
};

// Default clustering tolerance 1e-9 * ||H_S|| (spectral norm).
double default_degeneracy_tol(const HermitianOperator& h_s);

// X = sum_m X_m with X_m = sum_{E_a - E_b ~ omega_m} P_a X P_b. Bohr frequencies
// within `degeneracy_tol` of each other (single linkage) merge into one mode.
BohrDecomposition decompose(const HermitianOperator& h_s, const HermitianOperator& x,
                            double degeneracy_tol);
BohrDecomposition decompose(const HermitianOperator& h_s, const HermitianOperator& x);

} // namespace mfgkit
