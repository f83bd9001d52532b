// clexact.cpp — Caldeira-Leggett partition function, moments and Gaussian state

#include "mfgkit/clexact.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "mfgkit/quadrature.hpp"

namespace mfgkit::cl {

double CLParams::nu() const { return 2.0 * std::numbers::pi / beta; }

void CLParams::validate() const {
    auto ok = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!ok(omega_0) || !ok(omega_d) || !ok(beta))
        throw DomainError("CLParams: omega_0, omega_D and beta must be positive and finite");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DomainError("CLParams: gamma must be non-negative");
}

std::array<cplx, 3> cubic_roots(const CLParams& p) {
    p.validate();
    const double c2 = -p.omega_d;
    const double c1 = p.omega_0 * p.omega_0 + p.gamma * p.omega_d;
    const double c0 = -p.omega_d * p.omega_0 * p.omega_0;
    Eigen::Matrix3d comp = Eigen::Matrix3d::Zero();
    comp(0, 0) = -c2;
    comp(0, 1) = -c1;
    comp(0, 2) = -c0;
    comp(1, 0) = 1.0;
    comp(2, 1) = 1.0;
    Eigen::EigenSolver<Eigen::Matrix3d> es(comp, false);
    std::array<cplx, 3> r;
    auto poly = [&](cplx z) { return ((z + c2) * z + c1) * z + c0; };
    auto dpoly = [&](cplx z) { return (3.0 * z + 2.0 * c2) * z + c1; };
    const double scale = std::max({p.omega_d, p.omega_0, std::sqrt(c1)});
    for (int k = 0; k < 3; ++k) {
        cplx z = es.eigenvalues()(k);
        for (int it = 0; it < 3; ++it) {
            const cplx d = dpoly(z);
            if (std::abs(d) < 1e-300) break;
            z -= poly(z) / d;
        }
        if (std::abs(z.imag()) < 1e-13 * scale) z = cplx(z.real(), 0.0);
        r[static_cast<std::size_t>(k)] = z;
    }
    std::sort(r.begin(), r.end(), [](cplx a, cplx b) {
        const bool ra = a.imag() == 0.0, rb = b.imag() == 0.0;
        if (ra != rb) return ra;
        if (ra) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    // A conjugate pair shares one real part exactly.
    if (r[1].imag() != 0.0) {
        const double re = 0.5 * (r[1].real() + r[2].real());
        const double im = 0.5 * (r[1].imag() - r[2].imag());
        r[1] = {re, im};
        r[2] = {re, -im};
    }
    return r;
}

cplx log_gamma(cplx z) {
    if (!(z.real() > 0.0)) throw DomainError("log_gamma: requires Re z > 0");
    cplx shift = 0.0;
    while (std::abs(z) < 15.0) {
        shift += std::log(z);
        z += 1.0;
    }
    const cplx w = 1.0 / z;
    const cplx w2 = w * w;
    // Stirling series through z^-13.
    const cplx series =
        w * (1.0 / 12 + w2 * (-1.0 / 360 + w2 * (1.0 / 1260 + w2 * (-1.0 / 1680 +
             w2 * (1.0 / 1188 + w2 * (-691.0 / 360360 + w2 * (1.0 / 156)))))));
    return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * std::numbers::pi) + series - shift;
}

double log_partition(const CLParams& p) {
    const auto roots = cubic_roots(p);
    const double nu = p.nu();
    cplx sum = 0.0;
    for (const cplx& m : roots) {
        if (!(m.real() > 0.0)) {
            std::ostringstream os;
            os << "log_partition: root " << m << " has non-positive real part (unstable oscillator)";
            throw DomainError(os.str());
        }
        sum += log_gamma(m / nu);
    }
    if (std::abs(sum.imag()) > 1e-10 * std::max(1.0, std::abs(sum.real())))
        throw NumericalError("log_partition: conjugate roots failed to cancel");
    const double pref = std::log(p.beta * p.omega_0 / (4.0 * std::numbers::pi * std::numbers::pi));
    return pref + sum.real() - log_gamma(cplx(p.omega_d / nu, 0.0)).real();
}

std::string partition_reading() {
    return "Z = (beta omega_0 / 4 pi^2) Gamma(mu_1/nu) Gamma(mu_2/nu) Gamma(mu_3/nu) / Gamma(omega_D/nu)";
}

namespace {

struct Derivative {
    double value;
    double disagreement;
};

template <typename F>
Derivative richardson(const F& f, double x, double h) {
    const double d1 = (f(x + h) - f(x - h)) / (2.0 * h);
    const double d2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
    const double r = (4.0 * d2 - d1) / 3.0;
    return {r, std::abs(r - d2)};
}

} // namespace

OscillatorMoments moments(const CLParams& p) {
    p.validate();
    auto lz_w = [&](double w) {
        CLParams q = p;
        q.omega_0 = w;
        return log_partition(q);
    };
    const Derivative dw = richardson(lz_w, p.omega_0, 1e-4 * p.omega_0);
    OscillatorMoments m;
    m.xx = -dw.value / p.beta;
    double err = dw.disagreement / p.beta;
    m.pp = m.xx;
    if (p.gamma > 0.0) {
        auto lz_g = [&](double g) {
            CLParams q = p;
            q.gamma = g;
            return log_partition(q);
        };
        const Derivative dg = richardson(lz_g, p.gamma, 1e-4 * p.gamma);
        const double f = 2.0 * p.gamma / (p.beta * p.omega_0);
        m.pp -= f * dg.value;
        err = std::max(err, f * dg.disagreement);
    }
    m.px = cplx(0.0, -0.5);
    if (err > 1e-5 * std::min(m.xx, m.pp) || !(m.xx > 0.0) || !(m.pp > 0.0)) {
        std::ostringstream os;
        os << "moments: finite-difference derivatives did not converge (disagreement " << err << ")";
        throw NumericalError(os.str());
    }
    return m;
}

double position_correlation(const bath::SpectralDensity& J, double beta, double omega_0, double dt) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("position_correlation: bad beta");
    if (!(omega_0 > 0.0)) throw DomainError("position_correlation: omega_0 must be positive");
    const double c0 = 1.0 / std::tanh(0.5 * beta * omega_0);
    if (J.zero()) return std::cos(omega_0 * dt) * c0 / (2.0 * omega_0);

    const quad::Tolerance inner{1e-13, 1e-11, 20000};
    const double scale = J.scale();
    const double end = J.support_end();
    // w^2 PV int J(xi) / (xi (xi^2 - w^2)) dxi.
    auto re_chi = [&](double w) {
        auto f = [&](double xi) {
            const double j = J(xi);
            if (j == 0.0) return 0.0;
            return j / (xi * (xi - w) * (xi + w));
        };
        if (w >= end) {
            auto g = [&](double xi) {
                const double j = J(xi);
                return j == 0.0 ? 0.0 : j / (xi * (xi - w) * (xi + w));
            };
            return w * w * quad::integrate<double>(g, 0.0, end, inner).value;
        }
        return w * w * bath::pv_half_line(f, w, std::min(w, scale) / 10.0, scale, end, inner);
    };
    auto integrand = [&](double w) {
        if (w == 0.0) return 0.0;
        const double a = omega_0 * omega_0 - w * w - re_chi(w);
        const double b = 0.5 * std::numbers::pi * J(w);
        const double im_g = b / (a * a + b * b);
        const double c = 1.0 / std::tanh(0.5 * beta * w);
        return std::cos(w * dt) * c * im_g;
    };
    const quad::Tolerance outer{1e-12, 1e-9, 20000};
    // Break the range at the bare resonance where Im G peaks.
    double total = quad::integrate<double>(integrand, 0.0, omega_0, outer).value;
    total += quad::integrate<double>(integrand, omega_0, 2.0 * omega_0, outer).value;
    if (std::isfinite(end) && end <= 2.0 * omega_0) return total / std::numbers::pi;
    const double hi = std::isfinite(end) ? end : std::numeric_limits<double>::infinity();
    if (std::isfinite(hi))
        total += quad::integrate<double>(integrand, 2.0 * omega_0, hi, outer).value;
    else
        total += quad::integrate_to_infinity<double>(integrand, 2.0 * omega_0, std::max(scale, omega_0), outer).value;
    return total / std::numbers::pi;
}

GaussianState gaussian_covariance_state(const OscillatorMoments& m) {
    if (!(m.xx > 0.0) || !(m.pp > 0.0)) throw DomainError("gaussian_covariance_state: moments must be positive");
    const double det = m.xx * m.pp;
    if (det < 0.25 * (1.0 - 1e-12)) {
        std::ostringstream os;
        os << "gaussian_covariance_state: Heisenberg violation, xx * pp = " << det << " < 1/4";
        throw DomainError(os.str());
    }
    GaussianState g;
    g.covariance = RealMatrix::Zero(2, 2);
    g.covariance(0, 0) = m.xx;
    g.covariance(1, 1) = m.pp;
    g.n_bar = std::max(std::sqrt(det) - 0.5, 0.0);
    g.squeezing = 0.25 * std::log(m.pp / m.xx);
    return g;
}

namespace {

// Squeezed thermal state on a working Fock space of dimension w.
Matrix squeezed_thermal(const GaussianState& g, Index w) {
    RealVector p(w);
    const double nb = g.n_bar;
    const double q = nb > 0.0 ? nb / (nb + 1.0) : 0.0;
    for (Index n = 0; n < w; ++n) p(n) = (n == 0 ? 1.0 : std::pow(q, static_cast<double>(n))) / (nb + 1.0);
    Matrix rho = p.cast<cplx>().asDiagonal();
    if (g.squeezing == 0.0) return rho;
    Matrix a = Matrix::Zero(w, w);
    for (Index n = 1; n < w; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    const Matrix a2 = a * a;
    // S = exp(r/2 (a^2 - a^dag^2)) maps x~ -> e^{-r} x~.
    const Matrix gen = 0.5 * g.squeezing * (a2 - a2.adjoint());
    const Matrix s = matrix_exp(gen);
    return s * rho * s.adjoint();
}

Index working_dim(const GaussianState& g, int n_max) {
    const double mean = (g.n_bar + 0.5) * std::cosh(2.0 * g.squeezing) - 0.5;
    return std::max<Index>(2 * (n_max + 1) + 40, static_cast<Index>(20.0 * (mean + 1.0)) + 40);
}

} // namespace

int fock_cutoff(const OscillatorMoments& m, double tail) {
    const GaussianState g = gaussian_covariance_state(m);
    const Index w = working_dim(g, 0);
    const Matrix rho = squeezed_thermal(g, w);
    double acc = 0.0;
    for (Index n = 0; n < w / 2; ++n) {
        acc += rho(n, n).real();
        if (1.0 - acc < tail) return static_cast<int>(n);
    }
    return static_cast<int>(w / 2);
}

DensityMatrix gaussian_fock_state(const OscillatorMoments& m, int n_max) {
    if (n_max < 0) throw DomainError("gaussian_fock_state: n_max must be non-negative");
    const GaussianState g = gaussian_covariance_state(m);
    const Matrix rho = squeezed_thermal(g, working_dim(g, n_max));
    Matrix block = rho.topLeftCorner(n_max + 1, n_max + 1);
    block = 0.5 * (block + block.adjoint()).eval();
    block /= block.trace().real();
    return DensityMatrix::project(block);
}

} // namespace mfgkit::cl
