// eigenops.cpp — Bohr-frequency eigenoperators

#include "mfgkit/eigenops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mfgkit {

std::size_t BohrDecomposition::partner(std::size_t m) const {
    // modes are sorted and symmetric about zero
    const std::size_t n = modes.size();
    const std::size_t p = n - 1 - m;
    if (std::abs(modes[p].omega + modes[m].omega) > 2.0 * degeneracy_tol + 1e-300)
        throw NumericalError("BohrDecomposition: mode set is not symmetric");
    return p;
}

Matrix BohrDecomposition::sum() const {
    if (modes.empty()) return {};
    Matrix s = Matrix::Zero(modes.front().op.rows(), modes.front().op.cols());
    for (const auto& m : modes) s += m.op;
    return s;
}

double default_degeneracy_tol(const HermitianOperator& h_s) {
    const Eigh e = eigh(h_s);
    const double norm = e.values.cwiseAbs().maxCoeff();
    return std::max(1e-9 * norm, 1e-14);
}

BohrDecomposition decompose(const HermitianOperator& h_s, const HermitianOperator& x) {
    return decompose(h_s, x, default_degeneracy_tol(h_s));
}

BohrDecomposition decompose(const HermitianOperator& h_s, const HermitianOperator& x,
                            double degeneracy_tol) {
    if (h_s.dim() != x.dim()) throw DomainError("decompose: dimension mismatch");
    if (!(degeneracy_tol > 0.0)) throw DomainError("decompose: degeneracy_tol must be positive");
    const Index d = h_s.dim();
    const Eigh e = eigh(h_s);
    const Matrix xe = e.vectors.adjoint() * x.matrix() * e.vectors;

    // all ordered pairs (a, b) with Bohr frequency E_a - E_b
    struct Pair {
        double omega;
        Index a, b;
    };
    std::vector<Pair> pairs;
    pairs.reserve(static_cast<std::size_t>(d * d));
    for (Index a = 0; a < d; ++a)
        for (Index b = 0; b < d; ++b) pairs.push_back({e.values(a) - e.values(b), a, b});
    std::sort(pairs.begin(), pairs.end(), [](const Pair& l, const Pair& r) { return l.omega < r.omega; });

    // single-linkage clusters on the sorted line; the list is symmetric under
    // omega -> -omega so the clusters are too
    std::vector<std::pair<std::size_t, std::size_t>> clusters;
    std::size_t start = 0;
    for (std::size_t k = 1; k <= pairs.size(); ++k) {
        if (k == pairs.size() || pairs[k].omega - pairs[k - 1].omega > degeneracy_tol) {
            clusters.emplace_back(start, k);
            start = k;
        }
    }

    BohrDecomposition out;
    out.degeneracy_tol = degeneracy_tol;
    const double xnorm = x.matrix().cwiseAbs().maxCoeff();
    for (const auto& [lo, hi] : clusters) {
        Matrix op_e = Matrix::Zero(d, d);
        double omega = 0.0;
        bool has_zero = false;
        for (std::size_t k = lo; k < hi; ++k) {
            op_e(pairs[k].a, pairs[k].b) = xe(pairs[k].a, pairs[k].b);
            omega += pairs[k].omega;
            has_zero = has_zero || pairs[k].a == pairs[k].b;
        }
        omega /= static_cast<double>(hi - lo);
        if (has_zero || std::abs(omega) <= degeneracy_tol) omega = 0.0;
        if (op_e.cwiseAbs().maxCoeff() <= 1e-14 * std::max(xnorm, 1e-300)) continue;
        out.modes.push_back({omega, e.vectors * op_e * e.vectors.adjoint()});
    }
    // make the frequency set exactly antisymmetric
    const std::size_t n = out.modes.size();
    for (std::size_t m = 0; m < n / 2; ++m) {
        const double w = 0.5 * (out.modes[n - 1 - m].omega - out.modes[m].omega);
        out.modes[m].omega = -w;
        out.modes[n - 1 - m].omega = w;
    }
    return out;
}

} // namespace mfgkit
