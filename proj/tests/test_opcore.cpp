// test_opcore.cpp — Operators, states, partial traces and matrix exponentials

#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "mfgkit/opcore.hpp"
#include "support.hpp"

using namespace mfgkit;
using namespace mfgkit::test;

TEST_CASE("hermitian operator rejects non-hermitian input") {
    Matrix m = pauli::x();
    m(0, 1) += 1e-6;
    CHECK_THROWS_AS(HermitianOperator{m}, DomainError);
    CHECK_NOTHROW(HermitianOperator{pauli::y()});
}

TEST_CASE("density matrix invariants are enforced") {
    CHECK_THROWS_AS(DensityMatrix{diag({0.6, 0.5})}, DomainError);
    CHECK_THROWS_AS(DensityMatrix{diag({1.1, -0.1})}, DomainError);
    const DensityMatrix tiny(diag({1.0 + 5e-11, -5e-11}));
    CHECK(tiny.eigenvalues()(0) == 0.0);
}

TEST_CASE("gibbs two-level populations") {
    SUBCASE("beta E = ln 2") {
        const DensityMatrix t = gibbs(HermitianOperator(diag({0.0, std::log(2.0)})), 1.0);
        CHECK(t.populations()(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
        CHECK(t.populations()(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    }
    SUBCASE("room-temperature dimer gap") {
        const double kb = 1.380649e-23;
        const double x = 2e-21 / (kb * 317.0);
        const DensityMatrix t = gibbs(HermitianOperator(diag({0.0, x})), 1.0);
        CHECK(t.populations()(1) == doctest::Approx(0.388).epsilon(1e-3));
    }
    SUBCASE("infinite-temperature limit") {
        std::mt19937 rng(3);
        const DensityMatrix t = gibbs(HermitianOperator(random_hermitian(rng, 4)), 1e-12);
        CHECK(max_abs(t.matrix() - Matrix::Identity(4, 4) / 4.0) < 1e-9);
    }
    SUBCASE("no overflow for large beta E") {
        const DensityMatrix t = gibbs(HermitianOperator(diag({1e4, 1e4 + 1.0})), 1e3);
        CHECK(t.populations()(0) == doctest::Approx(1.0));
    }
    CHECK_THROWS_AS(gibbs(HermitianOperator(pauli::z()), 0.0), DomainError);
    CHECK_THROWS_AS(gibbs(HermitianOperator(pauli::z()), INFINITY), DomainError);
}

TEST_CASE("gibbs states satisfy the density-matrix invariants on random input") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> dim(2, 8);
    std::uniform_real_distribution<double> logb(-3.0, 3.0);
    for (int k = 0; k < 1000; ++k) {
        const Index n = dim(rng);
        const DensityMatrix t = gibbs(HermitianOperator(random_hermitian(rng, n)), std::pow(10.0, logb(rng)));
        REQUIRE(std::abs(t.matrix().trace().real() - 1.0) < 1e-10);
        REQUIRE(hermiticity_deviation(t.matrix()) < 1e-12);
        REQUIRE(t.eigenvalues()(0) >= 0.0);
    }
}

TEST_CASE("partial trace") {
    std::mt19937 rng(5);
    const Matrix a = random_density(rng, 2), b = random_density(rng, 3);
    const DensityMatrix prod(kron(a, b));
    const TensorSpace sp{{2, 3}};
    CHECK(max_abs(partial_trace(prod, sp, 0).matrix() - a) < 1e-14);
    CHECK(max_abs(partial_trace(prod, sp, 1).matrix() - b) < 1e-14);

    Vector bell = Vector::Zero(4);
    bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
    const DensityMatrix pb(bell * bell.adjoint());
    CHECK(max_abs(partial_trace(pb, TensorSpace{{2, 2}}, 0).matrix() - Matrix::Identity(2, 2) / 2.0) < 1e-15);

    // Element-wise summation oracle on 4 (x) 3.
    const Matrix r = random_density(rng, 12);
    const DensityMatrix rd(r);
    Matrix o0 = Matrix::Zero(4, 4), o1 = Matrix::Zero(3, 3);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 3; ++k) o0(i, j) += r(i * 3 + k, j * 3 + k);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 4; ++k) o1(i, j) += r(k * 3 + i, k * 3 + j);
    CHECK(max_abs(partial_trace(rd, TensorSpace{{4, 3}}, 0).matrix() - o0) < 1e-13);
    CHECK(max_abs(partial_trace(rd, TensorSpace{{4, 3}}, 1).matrix() - o1) < 1e-13);

    // Middle factor of three.
    const Matrix c = random_density(rng, 2);
    const Matrix abc = kron(kron(a, b), c);
    const std::vector<Index> dims{2, 3, 2};
    CHECK(max_abs(partial_trace_matrix(abc, dims, 1) - b) < 1e-14);

    CHECK_THROWS_AS(partial_trace(rd, TensorSpace{{4, 3}}, 2), DomainError);
    CHECK_THROWS_AS(partial_trace(rd, TensorSpace{{4, 4}}, 0), DomainError);
}

TEST_CASE("partial trace is trace preserving and linear") {
    std::mt19937 rng(8);
    const std::vector<Index> dims{3, 2, 2};
    for (int k = 0; k < 20; ++k) {
        const Matrix x = random_matrix(rng, 12), y = random_matrix(rng, 12);
        const cplx a(0.3, -1.2);
        for (std::size_t f = 0; f < 3; ++f) {
            const Matrix px = partial_trace_matrix(x, dims, f);
            CHECK(std::abs(px.trace() - x.trace()) < 1e-12);
            const Matrix lin = partial_trace_matrix(Matrix(x + a * y), dims, f);
            CHECK(max_abs(lin - px - a * partial_trace_matrix(y, dims, f)) < 1e-12);
        }
    }
}

TEST_CASE("matrix exponential") {
    CHECK(max_abs(matrix_exp(Matrix(Matrix::Zero(3, 3))) - Matrix::Identity(3, 3)) == 0.0);

    const double th = std::numbers::pi / 2;
    const Matrix a = cplx(0.0, th) * pauli::y();
    const Matrix e = matrix_exp(a);
    const Matrix expect = std::cos(th) * pauli::identity() + cplx(0.0, std::sin(th)) * pauli::y();
    CHECK(max_abs(e - expect) < 1e-14);
    Matrix rot(2, 2);
    rot << 0.0, 1.0, -1.0, 0.0;
    CHECK(max_abs(e - rot) < 1e-14);

    std::mt19937 rng(2);
    const Matrix ah = cplx(0.0, 1.0) * random_hermitian(rng, 6);
    const Matrix u = matrix_exp(ah);
    CHECK(max_abs(u * u.adjoint() - Matrix::Identity(6, 6)) < 1e-12);

    // General (non-normal) input against a Taylor series.
    Matrix g = 0.3 * random_matrix(rng, 4);
    Matrix series = Matrix::Identity(4, 4), term = Matrix::Identity(4, 4);
    for (int k = 1; k < 40; ++k) {
        term = (term * g / static_cast<double>(k)).eval();
        series += term;
    }
    CHECK(max_abs(matrix_exp(g) - series) < 1e-13);

    // Block-diagonal input.
    const Matrix b1 = random_matrix(rng, 2), b2 = random_hermitian(rng, 3);
    Matrix blk = Matrix::Zero(5, 5);
    blk.topLeftCorner(2, 2) = b1;
    blk.bottomRightCorner(3, 3) = b2;
    Matrix eb = Matrix::Zero(5, 5);
    eb.topLeftCorner(2, 2) = matrix_exp(b1);
    eb.bottomRightCorner(3, 3) = matrix_exp(b2);
    CHECK(max_abs(matrix_exp(blk) - eb) < 1e-12);

    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 0) = NAN;
    CHECK_THROWS_AS(matrix_exp(bad), DomainError);
}

TEST_CASE("trace distance") {
    const DensityMatrix a(diag({0.6, 0.4})), b(diag({0.5, 0.5}));
    CHECK(trace_distance(a, b) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(trace_distance(a, a) == 0.0);
    CHECK(trace_distance(DensityMatrix(diag({1.0, 0.0})), DensityMatrix(diag({0.0, 1.0}))) ==
          doctest::Approx(1.0));
    CHECK_THROWS_AS(trace_distance(a, DensityMatrix(diag({1.0, 0.0, 0.0}))), DomainError);

    std::mt19937 rng(17);
    for (int k = 0; k < 100; ++k) {
        const DensityMatrix x(random_density(rng, 3)), y(random_density(rng, 3)), z(random_density(rng, 3));
        const double xy = trace_distance(x, y);
        CHECK(xy == doctest::Approx(trace_distance(y, x)).epsilon(1e-13));
        CHECK(trace_distance(x, z) <= xy + trace_distance(y, z) + 1e-12);
    }
}

TEST_CASE("vectorization is column stacking") {
    Matrix m(2, 2);
    m << 1.0, 2.0, 3.0, 4.0;
    const Vector v = vec(m);
    CHECK(v(1) == cplx(3.0));
    CHECK(v(2) == cplx(2.0));
    CHECK(max_abs(unvec(v, 2) - m) == 0.0);
    // vec(A X B) = (B^T kron A) vec(X)
    std::mt19937 rng(1);
    const Matrix a = random_matrix(rng, 3), x = random_matrix(rng, 3), b = random_matrix(rng, 3);
    CHECK((vec(a * x * b) - kron(Matrix(b.transpose()), a) * vec(x)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("kron and commutator") {
    CHECK(max_abs(commutator(pauli::x(), pauli::y()) - cplx(0.0, 2.0) * pauli::z()) < 1e-15);
    const Matrix k = kron(pauli::z(), pauli::identity());
    CHECK(k.rows() == 4);
    CHECK(k(2, 2) == cplx(-1.0));
    CHECK(max_abs(pauli::plus() * pauli::minus() - diag({1.0, 0.0})) == 0.0);
}
