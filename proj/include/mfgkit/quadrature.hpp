// quadrature.hpp — Globally adaptive Gauss-Kronrod (7/15) integration

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

#include "mfgkit/opcore.hpp"

namespace mfgkit::quad {

struct Tolerance {
    double abs = 1e-10;
    double rel = 1e-8;
    int max_panels = 4000;
};

template <typename T>
struct Result {
    T value{};
    double error = 0.0;
    int panels = 0;
    double l1 = 0.0;  // estimate of the integral of |f|
};

namespace detail {

inline constexpr std::array<double, 8> kXk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

template <typename T, typename F>
Result<T> gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const T fc = f(c);
    T kron = fc * kWk[7];
    T gauss = fc * kWg[3];
    double absk = magnitude(fc) * kWk[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXk[j];
        const T f1 = f(c - dx);
        const T f2 = f(c + dx);
        kron += (f1 + f2) * kWk[j];
        absk += (magnitude(f1) + magnitude(f2)) * kWk[j];
        if (j % 2 == 1) gauss += (f1 + f2) * kWg[j / 2];
    }
    Result<T> r;
    r.value = kron * h;
    // Floor the estimate at the rounding level of the panel sum.
    r.error = std::max(magnitude((kron - gauss) * h),
                       50.0 * std::numeric_limits<double>::epsilon() * absk * std::abs(h));
    r.panels = 1;
    r.l1 = absk * std::abs(h);
    return r;
}

} // namespace detail

// Integrate f over the finite interval [a, b].
template <typename T, typename F>
Result<T> integrate(const F& f, double a, double b, const Tolerance& tol = {}) {
    struct Panel {
        double a, b;
        Result<T> r;
        bool operator<(const Panel& o) const { return r.error < o.r.error; }
    };
    if (a == b) return {};
    std::priority_queue<Panel> heap;
    Result<T> first = detail::gk15<T>(f, a, b);
    T total = first.value;
    double err = first.error;
    double l1 = first.l1;
    heap.push({a, b, first});
    int panels = 1;
    // Also stop at the rounding level of the integral of |f|.
    auto target = [&] {
        return std::max({tol.abs, tol.rel * detail::magnitude(total), 100.0 * std::numeric_limits<double>::epsilon() * l1});
    };
    while (err > target()) {
        if (panels >= tol.max_panels) {
            throw NumericalError("quadrature: panel budget exhausted");
        }
        Panel p = heap.top();
        heap.pop();
        const double mid = 0.5 * (p.a + p.b);
        if (!(mid > p.a && mid < p.b)) throw NumericalError("quadrature: interval underflow");
        Result<T> left = detail::gk15<T>(f, p.a, mid);
        Result<T> right = detail::gk15<T>(f, mid, p.b);
        total += left.value + right.value - p.r.value;
        err += left.error + right.error - p.r.error;
        l1 += left.l1 + right.l1 - p.r.l1;
        heap.push({p.a, mid, left});
        heap.push({mid, p.b, right});
        panels += 1;
        if (!std::isfinite(detail::magnitude(total)))
            throw NumericalError("quadrature: non-finite integrand");
    }
    // Re-sum to shed accumulated cancellation in the running totals.
    T sum{};
    double esum = 0.0;
    while (!heap.empty()) {
        sum += heap.top().r.value;
        esum += heap.top().r.error;
        heap.pop();
    }
    return {sum, esum, panels, l1};
}

// Integrate f over [a, inf) with the substitution w = a + scale * u / (1 - u).
template <typename T, typename F>
Result<T> integrate_to_infinity(const F& f, double a, double scale, const Tolerance& tol = {}) {
    auto g = [&](double u) -> T {
        if (u >= 1.0) return T{};
        const double s = 1.0 - u;
        const double w = a + scale * u / s;
        const T v = f(w);
        return v * (scale / (s * s));
    };
    return integrate<T>(g, 0.0, 1.0, tol);
}

} // namespace mfgkit::quad
