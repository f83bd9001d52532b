// bath.cpp — Spectral densities, correlation functions, principal-value integrals

#include "mfgkit/bath.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace mfgkit::bath {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Wynn epsilon extrapolation of a sequence of partial sums.
cplx wynn_epsilon(const std::vector<cplx>& s) {
    const std::size_t n = s.size();
    if (n < 3) return s.back();
    std::vector<cplx> prev(n + 1, cplx{0.0}), cur(s.begin(), s.end());
    cplx best = s.back();
    for (std::size_t k = 1; k < n; ++k) {
        std::vector<cplx> next(n - k);
        for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
            const cplx diff = cur[i + 1] - cur[i];
            if (std::abs(diff) < 1e-300) return k % 2 == 1 ? cur[i + 1] : best;
            next[i] = prev[i + 1] + 1.0 / diff;
        }
        prev = cur;
        cur = next;
        if (k % 2 == 0 && !cur.empty()) best = cur.back();
    }
    return best;
}

// int_0^inf f(w) dw for f oscillating with period 2 pi / t, summed over
// half-period panels and accelerated with the epsilon algorithm.
cplx oscillatory_integral(const std::function<cplx(double)>& f, double t, double scale,
                          double end, const quad::Tolerance& tol) {
    const double half = kPi / std::abs(t);
    if (std::isfinite(end) && end <= 64.0 * half) {
        quad::Tolerance t2 = tol;
        t2.max_panels = 40000;
        return quad::integrate<cplx>(f, 0.0, end, t2).value;
    }
    std::vector<cplx> partial;
    cplx sum{0.0};
    cplx last_estimate{std::numeric_limits<double>::quiet_NaN()};
    int quiet = 0;
    constexpr int kMaxPanels = 4000;
    for (int k = 0; k < kMaxPanels; ++k) {
        const double a = k * half;
        double b = (k + 1) * half;
        if (std::isfinite(end) && a >= end) return sum;
        if (std::isfinite(end)) b = std::min(b, end);
        const cplx piece = quad::integrate<cplx>(f, a, b, tol).value;
        sum += piece;
        partial.push_back(sum);
        if (partial.size() > 40) partial.erase(partial.begin());
        const bool beyond = b > 40.0 * scale;
        if (beyond && std::abs(piece) <= 1e-3 * tol.abs) {
            if (++quiet >= 4) return sum;
        } else {
            quiet = 0;
        }
        if (beyond && partial.size() >= 8) {
            const cplx est = wynn_epsilon(partial);
            if (std::abs(est - last_estimate) <= std::max(tol.abs, tol.rel * std::abs(est)))
                return est;
            last_estimate = est;
        }
    }
    throw NumericalError("oscillatory quadrature did not converge");
}

} // namespace

// ---------------------------------------------------------------- Tabulated

Tabulated::Tabulated(std::vector<double> omega, std::vector<double> j) {
    if (omega.size() != j.size() || omega.size() < 2)
        throw DomainError("Tabulated: need at least two (w, J) pairs of equal length");
    for (std::size_t k = 0; k < omega.size(); ++k) {
        if (!std::isfinite(omega[k]) || !std::isfinite(j[k]))
            throw DomainError("Tabulated: non-finite sample");
        if (j[k] < 0.0) throw DomainError("Tabulated: J must be non-negative");
        if (k > 0 && !(omega[k] > omega[k - 1]))
            throw DomainError("Tabulated: frequencies must be strictly ascending");
    }
    if (omega.front() < 0.0) throw DomainError("Tabulated: negative frequency");
    if (omega.front() == 0.0 && j.front() != 0.0)
        throw DomainError("Tabulated: J(0) must vanish");
    if (omega.front() > 0.0) {
        omega.insert(omega.begin(), 0.0);
        j.insert(j.begin(), 0.0);
    }
    w_ = std::move(omega);
    j_ = std::move(j);
    // natural spline second derivatives
    const std::size_t n = w_.size();
    m_.assign(n, 0.0);
    if (n > 2) {
        std::vector<double> c(n, 0.0), d(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = w_[i] - w_[i - 1];
            const double h1 = w_[i + 1] - w_[i];
            const double a = h0 / 6.0, b = (h0 + h1) / 3.0, cc = h1 / 6.0;
            const double r = (j_[i + 1] - j_[i]) / h1 - (j_[i] - j_[i - 1]) / h0;
            const double denom = b - a * c[i - 1];
            c[i] = cc / denom;
            d[i] = (r - a * d[i - 1]) / denom;
        }
        for (std::size_t i = n - 2; i >= 1; --i) {
            m_[i] = d[i] - c[i] * m_[i + 1];
            if (i == 1) break;
        }
    }
}

double Tabulated::operator()(double w) const {
    if (w <= 0.0 || w > w_.back()) return 0.0;
    const auto it = std::upper_bound(w_.begin(), w_.end(), w);
    std::size_t i = static_cast<std::size_t>(it - w_.begin());
    if (i >= w_.size()) i = w_.size() - 1;
    const std::size_t i0 = i - 1;
    const double h = w_[i] - w_[i0];
    const double A = (w_[i] - w) / h, B = (w - w_[i0]) / h;
    const double v = A * j_[i0] + B * j_[i] +
                     ((A * A * A - A) * m_[i0] + (B * B * B - B) * m_[i]) * h * h / 6.0;
    return std::max(v, 0.0);
}

double Tabulated::slope_at_zero() const {
    const double h = w_[1] - w_[0];
    return (j_[1] - j_[0]) / h - h * (2.0 * m_[0] + m_[1]) / 6.0;
}

double Tabulated::peak_omega() const {
    const auto it = std::max_element(j_.begin(), j_.end());
    return w_[static_cast<std::size_t>(it - j_.begin())];
}

double Tabulated::low_frequency_exponent() const {
    std::size_t i = 1;
    while (i + 1 < w_.size() && j_[i] <= 0.0) ++i;
    if (i + 1 >= w_.size() || j_[i + 1] <= 0.0) return 1.0;
    return std::log(j_[i + 1] / j_[i]) / std::log(w_[i + 1] / w_[i]);
}

double Tabulated::tail_ratio() const {
    const double peak = *std::max_element(j_.begin(), j_.end());
    return peak > 0.0 ? j_.back() / peak : 0.0;
}

// ---------------------------------------------------------------- SpectralDensity

SpectralDensity::SpectralDensity(Variant v) : v_(std::move(v)) {
    std::visit(Overloaded{
                   [](const OhmicExp& p) {
                       if (!(p.gamma >= 0.0) || !(p.omega_c > 0.0))
                           throw DomainError("OhmicExp: need gamma >= 0 and omega_c > 0");
                   },
                   [](const SuperOhmicCubic& p) {
                       if (!(p.gamma >= 0.0) || !(p.omega_c > 0.0))
                           throw DomainError("SuperOhmicCubic: need gamma >= 0 and omega_c > 0");
                   },
                   [](const DrudeLorentz& p) {
                       if (!(p.gamma >= 0.0) || !(p.omega_d > 0.0))
                           throw DomainError("DrudeLorentz: need gamma >= 0 and omega_D > 0");
                   },
                   [](const Tabulated&) {},
               },
               v_);
}

std::string SpectralDensity::name() const {
    return std::visit(Overloaded{
                          [](const OhmicExp&) { return std::string("ohmic_exp"); },
                          [](const SuperOhmicCubic&) { return std::string("super_ohmic_cubic"); },
                          [](const DrudeLorentz&) { return std::string("drude_lorentz"); },
                          [](const Tabulated&) { return std::string("tabulated"); },
                      },
                      v_);
}

double SpectralDensity::operator()(double w) const {
    if (w <= 0.0) return 0.0;
    return std::visit(Overloaded{
                          [w](const OhmicExp& p) { return p.gamma * w * std::exp(-w / p.omega_c); },
                          [w](const SuperOhmicCubic& p) {
                              const double x = w / p.omega_c;
                              return 0.5 * p.gamma * x * x * x * std::exp(-x);
                          },
                          [w](const DrudeLorentz& p) {
                              return 2.0 * p.gamma * p.omega_d / kPi * w * p.omega_d /
                                     (w * w + p.omega_d * p.omega_d);
                          },
                          [w](const Tabulated& t) { return t(w); },
                      },
                      v_);
}

double SpectralDensity::slope_at_zero() const {
    return std::visit(Overloaded{
                          [](const OhmicExp& p) { return p.gamma; },
                          [](const SuperOhmicCubic&) { return 0.0; },
                          [](const DrudeLorentz& p) { return 2.0 * p.gamma / kPi; },
                          [](const Tabulated& t) { return std::max(t.slope_at_zero(), 0.0); },
                      },
                      v_);
}

double SpectralDensity::scale() const {
    return std::visit(Overloaded{
                          [](const OhmicExp& p) { return p.omega_c; },
                          [](const SuperOhmicCubic& p) { return p.omega_c; },
                          [](const DrudeLorentz& p) { return p.omega_d; },
                          [](const Tabulated& t) { return std::max(t.peak_omega(), 1e-300); },
                      },
                      v_);
}

double SpectralDensity::low_frequency_exponent() const {
    return std::visit(Overloaded{
                          [](const OhmicExp&) { return 1.0; },
                          [](const SuperOhmicCubic&) { return 3.0; },
                          [](const DrudeLorentz&) { return 1.0; },
                          [](const Tabulated& t) { return t.low_frequency_exponent(); },
                      },
                      v_);
}

double SpectralDensity::support_end() const {
    if (const auto* t = std::get_if<Tabulated>(&v_)) return t->last_omega();
    return std::numeric_limits<double>::infinity();
}

bool SpectralDensity::zero() const {
    return std::visit(Overloaded{
                          [](const OhmicExp& p) { return p.gamma == 0.0; },
                          [](const SuperOhmicCubic& p) { return p.gamma == 0.0; },
                          [](const DrudeLorentz& p) { return p.gamma == 0.0; },
                          [](const Tabulated& t) {
                              return std::all_of(t.values().begin(), t.values().end(),
                                                 [](double v) { return v == 0.0; });
                          },
                      },
                      v_);
}

void BathParams::validate() const {
    if (!std::isfinite(beta) || !(beta > 0.0)) throw DomainError("bath: beta must be positive and finite");
    if (!(lambda >= 0.0)) throw DomainError("bath: lambda must be non-negative");
}

namespace {

void check_beta(double beta) {
    if (!std::isfinite(beta) || !(beta > 0.0)) throw DomainError("bath: beta must be positive and finite");
}

void check_tail(const SpectralDensity& J) {
    if (const auto* t = std::get_if<Tabulated>(&J.variant())) {
        if (t->tail_ratio() > 1e-2)
            throw NumericalError(
                "tabulated spectral density does not decay at the end of its grid; "
                "the frequency integral is not controlled");
    }
}

// int_0^end f(w) dw for a regular integrand.
double half_line(const std::function<double(double)>& f, const SpectralDensity& J,
                 const quad::Tolerance& tol) {
    const double end = J.support_end();
    if (std::isfinite(end)) {
        quad::Tolerance t2 = tol;
        t2.max_panels = std::max(tol.max_panels, 20000);
        return quad::integrate<double>(f, 0.0, end, t2).value;
    }
    const double s = J.scale();
    // the integrand peaks around the scale; split there to help the mapping
    return quad::integrate<double>(f, 0.0, s, tol).value +
           quad::integrate_to_infinity<double>(f, s, s, tol).value;
}

const quad::Tolerance kTight{1e-14, 1e-13, 20000};

// Quadrature nodes below this are moved up to it; J(w) coth(beta w / 2) is
// finite at w -> 0 but overflows for denormal w.
constexpr double kTinyW = 1e-100;

} // namespace

double bose(double beta, double w) { return 1.0 / std::expm1(beta * w); }

double eval_J(const SpectralDensity& J, double omega) {
    if (!(omega >= 0.0)) throw DomainError("eval_J: omega must be non-negative");
    return J(omega);
}

double pv_half_line(const std::function<double(double)>& f, double pole, double window,
                    double scale, double end, const quad::Tolerance& tol) {
    if (!(pole > 0.0) || !(window > 0.0) || window > pole)
        throw DomainError("pv_half_line: need 0 < window <= pole");
    quad::Tolerance t2 = tol;
    t2.max_panels = std::max(tol.max_panels, 20000);
    double total = 0.0;
    const double lo = pole - window, hi = pole + window;
    if (lo > 0.0) total += quad::integrate<double>(f, 0.0, std::min(lo, end), t2).value;
    if (end > lo) {
        // The pair tends to a finite limit; below s0 cancellation only adds noise.
        const double s0 = 1e-4 * window;
        auto paired = [&](double s) {
            // Snap s so that pole + s and pole - s are both exact.
            s = (pole + std::max(s, s0)) - pole;
            return f(pole + s) + f(pole - s);
        };
        total += quad::integrate<double>(paired, 0.0, window, t2).value;
    }
    if (std::isfinite(end)) {
        if (end > hi) total += quad::integrate<double>(f, hi, end, t2).value;
    } else {
        const double s = std::max(scale, pole);
        total += quad::integrate_to_infinity<double>(f, hi, s, t2).value;
    }
    return total;
}

double d_beta(const SpectralDensity& J, double beta, double omega_m, const quad::Tolerance& tol) {
    check_beta(beta);
    if (omega_m == 0.0 || J.zero()) return 0.0;
    check_tail(J);
    const double a = std::abs(omega_m);
    auto f = [&](double w) {
        w = std::max(w, kTinyW);
        const double jw = J(w);
        if (jw == 0.0) return 0.0;
        const double c = 1.0 + 2.0 * bose(beta, w);
        return jw * ((omega_m * c + w) / ((w - a) * (w + a)) - 1.0 / w);
    };
    const double window = std::min(a, J.scale()) / 10.0;
    return pv_half_line(f, a, window, J.scale(), J.support_end(), tol);
}

double d_beta_deriv(const SpectralDensity& J, double beta, double omega_m) {
    check_beta(beta);
    if (J.zero()) return 0.0;
    const double h = 1e-3 * std::max(std::abs(omega_m), 1e-2 * J.scale());
    auto central = [&](double step) {
        return (d_beta(J, beta, omega_m + step, kTight) - d_beta(J, beta, omega_m - step, kTight)) /
               (2.0 * step);
    };
    const double d1 = central(h);
    const double d2 = central(0.5 * h);
    return (4.0 * d2 - d1) / 3.0;
}

cplx corr_fn(const SpectralDensity& J, double beta, double t) {
    check_beta(beta);
    if (J.zero()) return 0.0;
    check_tail(J);
    const quad::Tolerance tol{1e-12, 1e-10, 4000};
    if (t == 0.0) {
        auto f = [&](double w) {
            w = std::max(w, kTinyW);
            const double jw = J(w);
            return jw == 0.0 ? 0.0 : jw * (1.0 + 2.0 * bose(beta, w));
        };
        double re = 0.0;
        try {
            re = half_line(f, J, tol);
        } catch (const NumericalError&) {
            throw NumericalError("corr_fn: G(0) diverges for this spectral density");
        }
        return {re, 0.0};
    }
    const double tt = std::abs(t);
    auto f = [&](double w) -> cplx {
        w = std::max(w, kTinyW);
        const double jw = J(w);
        if (jw == 0.0) return 0.0;
        const double c = 1.0 + 2.0 * bose(beta, w);
        return jw * cplx(c * std::cos(w * tt), -std::sin(w * tt));
    };
    const cplx g = oscillatory_integral(f, tt, J.scale(), J.support_end(), tol);
    return t > 0.0 ? g : std::conj(g);
}

cplx gamma_m(const SpectralDensity& J, double beta, double omega_m, double t) {
    check_beta(beta);
    if (!(t >= 0.0)) throw DomainError("gamma_m: t must be non-negative");
    if (t == 0.0 || J.zero()) return 0.0;
    check_tail(J);
    auto f = [&](double r) -> cplx { return std::exp(cplx(0.0, -omega_m * r)) * corr_fn(J, beta, r); };
    const quad::Tolerance tol{1e-10, 1e-9, 2000};
    return quad::integrate<cplx>(f, 0.0, t, tol).value;
}

cplx gamma_m(const SpectralDensity& J, double beta, double omega_m, Asymptotic) {
    check_beta(beta);
    if (J.zero()) return 0.0;
    check_tail(J);
    const double a = std::abs(omega_m);
    double re = 0.0;
    if (omega_m == 0.0) {
        re = kPi / beta * J.slope_at_zero();
    } else {
        const double n = bose(beta, a);
        re = kPi * J(a) * (omega_m > 0.0 ? n : n + 1.0);
    }
    double im = 0.0;
    if (omega_m == 0.0) {
        im = -half_line([&](double w) { return J(w) / w; }, J, kTight);
    } else {
        auto f = [&](double w) {
            w = std::max(w, kTinyW);
            const double jw = J(w);
            if (jw == 0.0) return 0.0;
            const double c = 1.0 + 2.0 * bose(beta, w);
            return jw * (omega_m * c - w) / ((w - a) * (w + a));
        };
        const double window = std::min(a, J.scale()) / 10.0;
        im = pv_half_line(f, a, window, J.scale(), J.support_end(), kTight);
    }
    return {re, im};
}

double polaron_kappa(const SpectralDensity& J, double beta, double lambda) {
    check_beta(beta);
    if (lambda == 0.0 || J.zero()) return 1.0;
    if (J.low_frequency_exponent() <= 2.0 + 1e-9)
        throw DomainError(
            "polaron_kappa: the integral of J(w)/w^2 coth(beta w/2) diverges whenever "
            "J(w) ~ w^s with s <= 2 at small w; kappa is undefined for " + J.name());
    check_tail(J);
    auto f = [&](double w) {
        w = std::max(w, kTinyW);
        const double jw = J(w);
        if (jw == 0.0) return 0.0;
        return jw / (w * w) * (1.0 + 2.0 * bose(beta, w));
    };
    const double integral = half_line(f, J, kTight);
    return std::exp(-2.0 * lambda * lambda * integral);
}

double reorganization_energy(const SpectralDensity& J, double lambda) {
    if (!(lambda >= 0.0)) throw DomainError("reorganization_energy: lambda must be non-negative");
    if (lambda == 0.0 || J.zero()) return 0.0;
    check_tail(J);
    const double integral = half_line([&](double w) { return J(w) / w; }, J, kTight);
    return lambda * lambda * integral;
}

TabulatedFile load_tabulated_csv(const std::string& path, double si_frequency_unit) {
    std::ifstream in(path);
    if (!in) throw DomainError("load_tabulated_csv: cannot open " + path);
    std::optional<Units> units;
    std::vector<double> w, j;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') {
            const auto pos = line.find("units:");
            if (pos != std::string::npos) {
                std::string u = line.substr(pos + 6);
                u.erase(0, u.find_first_not_of(" \t"));
                u.erase(u.find_last_not_of(" \t\r") + 1);
                if (u == "si") units = Units::SI;
                else if (u == "natural") units = Units::Natural;
                else throw DomainError("load_tabulated_csv: unknown units '" + u + "'");
            }
            continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream is(line);
        double a = 0.0, b = 0.0;
        if (!(is >> a >> b)) {
            // tolerate a single column-name row
            if (w.empty()) continue;
            throw DomainError("load_tabulated_csv: malformed line " + std::to_string(lineno));
        }
        w.push_back(a);
        j.push_back(b);
    }
    if (!units) throw DomainError("load_tabulated_csv: missing '# units: si|natural' header");
    if (*units == Units::SI) {
        if (!(si_frequency_unit > 0.0)) throw DomainError("load_tabulated_csv: bad frequency unit");
        for (auto& x : w) x /= si_frequency_unit;
        for (auto& x : j) x /= si_frequency_unit;
    }
    return {SpectralDensity(Tabulated(std::move(w), std::move(j))), *units};
}

} // namespace mfgkit::bath
