// support.hpp — Random operators and small helpers shared by the test suites

#pragma once

#include <random>

#include "mfgkit/opcore.hpp"

namespace mfgkit::test {

inline Matrix random_matrix(std::mt19937& rng, Index n) {
    std::normal_distribution<double> nd;
    Matrix m(n, n);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = cplx(nd(rng), nd(rng));
    return m;
}

inline Matrix random_hermitian(std::mt19937& rng, Index n) {
    const Matrix m = random_matrix(rng, n);
    return 0.5 * (m + m.adjoint());
}

inline Matrix random_density(std::mt19937& rng, Index n) {
    const Matrix m = random_matrix(rng, n);
    Matrix r = m * m.adjoint();
    return r / r.trace().real();
}

inline Matrix random_pure(std::mt19937& rng, Index n) {
    std::normal_distribution<double> nd;
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = cplx(nd(rng), nd(rng));
    v.normalize();
    return v * v.adjoint();
}

inline Matrix diag(std::initializer_list<double> d) {
    Matrix m = Matrix::Zero(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
    Index k = 0;
    for (double v : d) m(k, k) = v, ++k;
    return m;
}

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

} // namespace mfgkit::test
