// clexact.hpp — Exact mean-force statics of the Caldeira-Leggett oscillator
// with a Drude-Lorentz bath

#pragma once

#include <array>
#include <string>

#include "mfgkit/bath.hpp"
#include "mfgkit/opcore.hpp"

namespace mfgkit::cl {

struct CLParams {
    double omega_0 = 1.0;  // bare oscillator frequency
    double gamma = 0.0;    // damping frequency
    double omega_d = 1.0;  // Drude frequency
    double beta = 1.0;

    double nu() const;  // first Matsubara frequency 2 pi / beta
    void validate() const;
};

// Moments in the unit-free variables x~ = sqrt(omega_0) x, p~ = p / sqrt(omega_0).
struct OscillatorMoments {
    double xx = 0.5;
    double pp = 0.5;
    cplx px{0.0, -0.5};
};

// Roots of mu^3 - omega_D mu^2 + (omega_0^2 + gamma omega_D) mu - omega_D omega_0^2,
// real root first, then the remaining roots by descending imaginary part.
std::array<cplx, 3> cubic_roots(const CLParams& p);

// Principal branch of log Gamma(z) for Re z > 0.
cplx log_gamma(cplx z);

// ln Z with Z = (beta omega_0 / (4 pi^2)) prod_j Gamma(mu_j / nu) / Gamma(omega_D / nu).
double log_partition(const CLParams& p);

// Human-readable statement of the partition-function reading above.
std::string partition_reading();

// <x~^2> = -(1/beta) d ln Z / d omega_0,
// <p~^2> = <x~^2> - (2 gamma / (beta omega_0)) d ln Z / d gamma.
OscillatorMoments moments(const CLParams& p);

// (1/pi) int_0^inf dw cos(w dt) coth(beta w / 2) Im G(w) for a unit-mass
// oscillator, G(w) = -1 / (w^2 - omega_0^2 [1 - chi(w)]),
// omega_0^2 chi(w) = w^2 PV int_0^inf dxi J(xi) / (xi (xi^2 - w^2)) + i pi J(w) / 2.
// At dt = 0 this is <x^2>.
double position_correlation(const bath::SpectralDensity& J, double beta, double omega_0, double dt);

struct GaussianState {
    RealMatrix covariance;  // [[xx, 0], [0, pp]]
    double n_bar = 0.0;     // sqrt(xx pp) = n_bar + 1/2
    double squeezing = 0.0; // r with xx = (n_bar + 1/2) e^{-2r}
};

GaussianState gaussian_covariance_state(const OscillatorMoments& m);

// Smallest n_max whose Fock block carries all but `tail` of the population.
int fock_cutoff(const OscillatorMoments& m, double tail = 1e-10);

// Squeezed thermal state in the Fock basis |0>, ..., |n_max>, renormalized.
DensityMatrix gaussian_fock_state(const OscillatorMoments& m, int n_max);

} // namespace mfgkit::cl
