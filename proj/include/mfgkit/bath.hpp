// bath.hpp — Bosonic spectral densities and the bath functions built from them

#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "mfgkit/opcore.hpp"
#include "mfgkit/quadrature.hpp"

namespace mfgkit::bath {

// J(w) = gamma * w * exp(-w / omega_c); gamma is dimensionless.
struct OhmicExp {
    double gamma = 0.0;
    double omega_c = 1.0;
};

// J(w) = (gamma / 2) * (w / omega_c)^3 * exp(-w / omega_c).
struct SuperOhmicCubic {
    double gamma = 0.0;
    double omega_c = 1.0;
};

// J(w) = (2 gamma omega_D / pi) * w omega_D / (w^2 + omega_D^2).
struct DrudeLorentz {
    double gamma = 0.0;
    double omega_d = 1.0;
};

// Natural cubic spline through (w, J) samples. J is zero past the last node;
// a (0, 0) node is prepended when the grid does not start at zero.
class Tabulated {
public:
    Tabulated(std::vector<double> omega, std::vector<double> j);

    double operator()(double w) const;
    double slope_at_zero() const;
    double last_omega() const { return w_.back(); }
    double peak_omega() const;
    // Power s in J ~ w^s from the first two positive nodes.
    double low_frequency_exponent() const;
    // J at the last node relative to the largest sample.
    double tail_ratio() const;

    const std::vector<double>& omega() const { return w_; }
    const std::vector<double>& values() const { return j_; }

private:
    std::vector<double> w_, j_, m_;  // nodes, values, second derivatives
};

class SpectralDensity {
public:
    using Variant = std::variant<OhmicExp, SuperOhmicCubic, DrudeLorentz, Tabulated>;

    SpectralDensity(Variant v);  // NOLINT: implicit from any variant member
    template <typename T>
        requires(!std::is_same_v<std::decay_t<T>, Variant> && std::is_constructible_v<Variant, T>)
    SpectralDensity(T v) : SpectralDensity(Variant(std::move(v))) {}  // NOLINT

    const Variant& variant() const { return v_; }
    std::string name() const;

    double operator()(double w) const;
    // lim_{w -> 0} J(w) / w.
    double slope_at_zero() const;
    // Characteristic frequency used to map [0, inf) onto [0, 1).
    double scale() const;
    // Power s of the low-frequency behaviour J ~ w^s.
    double low_frequency_exponent() const;
    // Upper end of the support (infinity for analytic families).
    double support_end() const;
    bool zero() const;

private:
    Variant v_;
};

struct BathParams {
    SpectralDensity J;
    double beta = 1.0;
    double lambda = 0.0;

    void validate() const;
};

// Marker for the t -> infinity limit of the half-Fourier coefficients.
struct Asymptotic {};
inline constexpr Asymptotic kAsymptotic{};

double eval_J(const SpectralDensity& J, double omega);

// D_beta(w_m) = PV int_0^inf dw J(w) [(w_m coth(beta w / 2) + w) / (w^2 - w_m^2) - 1 / w].
double d_beta(const SpectralDensity& J, double beta, double omega_m,
              const quad::Tolerance& tol = {});
// dD_beta / dw_m by Richardson-extrapolated central differences.
double d_beta_deriv(const SpectralDensity& J, double beta, double omega_m);

// G(t) = int_0^inf dw J(w) [coth(beta w / 2) cos(w t) - i sin(w t)].
cplx corr_fn(const SpectralDensity& J, double beta, double t);

// Gamma_m(t) = int_0^t dr exp(-i w_m r) G(r).
cplx gamma_m(const SpectralDensity& J, double beta, double omega_m, double t);
cplx gamma_m(const SpectralDensity& J, double beta, double omega_m, Asymptotic);

// kappa = exp[-2 lambda^2 int dw J(w) / w^2 coth(beta w / 2)].
double polaron_kappa(const SpectralDensity& J, double beta, double lambda);

// lambda^2 int_0^inf dw J(w) / w.
double reorganization_energy(const SpectralDensity& J, double lambda);

// Bose occupation 1 / (exp(beta w) - 1).
double bose(double beta, double w);

// PV int_0^end dw f(w) with a first-order pole of f at `pole` (> 0). The pole
// is removed by pairing f(pole + s) + f(pole - s) on a symmetric window.
double pv_half_line(const std::function<double(double)>& f, double pole, double window,
                    double scale, double end, const quad::Tolerance& tol);

enum class Units { Natural, SI };

struct TabulatedFile {
    SpectralDensity J;
    Units units = Units::Natural;
};

// Two-column CSV (w, J), w ascending, with a `# units: si|natural` header line.
// SI files are rescaled to natural units by `si_frequency_unit` (rad/s per unit).
TabulatedFile load_tabulated_csv(const std::string& path, double si_frequency_unit = 1.0);

} // namespace mfgkit::bath
