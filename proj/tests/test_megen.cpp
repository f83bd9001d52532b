// test_megen.cpp — Master-equation generators, evolution and steady states

#include "doctest.h"

#include <cmath>
#include <random>

#include "mfgkit/megen.hpp"
#include "support.hpp"

using namespace mfgkit;
using namespace mfgkit::me;
using namespace mfgkit::test;

namespace {

const bath::SpectralDensity kDrude = bath::DrudeLorentz{0.5, 4.0};

Matrix spin_boson(double eps, double delta) { return 0.5 * eps * pauli::z() + 0.5 * delta * pauli::x(); }

// Redfield generator written directly from the second-order Born-Markov form:
// L rho = -i[H + lambda^2 ell X^2, rho] - lambda^2 ([X, Lambda rho] - [X, rho Lambda^dag]),
// Lambda = sum_m Gamma_m X_m.
Matrix redfield_oracle(const Ingredients& in, const Matrix& x) {
    const Index d = x.rows();
    Matrix lam = Matrix::Zero(d, d);
    for (std::size_t m = 0; m < in.bohr.modes.size(); ++m) lam += in.gamma[m] * in.bohr.modes[m].op;
    const double l2 = in.lambda * in.lambda;
    const Matrix h = in.h_s.matrix() + l2 * in.reorganization * x * x;
    Matrix out = Matrix::Zero(d * d, d * d);
    for (Index k = 0; k < d * d; ++k) {
        Vector e = Vector::Zero(d * d);
        e(k) = 1.0;
        const Matrix r = unvec(e, d);
        const Matrix lr = cplx(0.0, -1.0) * commutator(h, r) -
                          l2 * (commutator(x, Matrix(lam * r)) - commutator(x, Matrix(r * lam.adjoint())));
        out.col(k) = vec(lr);
    }
    return out;
}

double coherence_order(const std::function<double(double)>& err, double lam) {
    return std::log2(err(lam) / err(0.5 * lam));
}

} // namespace

TEST_CASE("superoperator building blocks") {
    std::mt19937 rng(1);
    const Matrix h = random_hermitian(rng, 3), a = random_matrix(rng, 3), b = random_matrix(rng, 3),
                 r = random_matrix(rng, 3);
    CHECK(max_abs(unvec(commutator_superop(h) * vec(r), 3) - cplx(0.0, -1.0) * commutator(h, r)) < 1e-13);
    const Matrix k = b.adjoint() * a;
    const Matrix direct = a * r * b.adjoint() - 0.5 * (k * r + r * k);
    CHECK(max_abs(unvec(dissipator_superop(a, b) * vec(r), 3) - direct) < 1e-13);
}

TEST_CASE("Bloch-Redfield generator against the Redfield form") {
    std::mt19937 rng(3);
    const HermitianOperator h(random_hermitian(rng, 3)), x(random_hermitian(rng, 3));
    SUBCASE("asymptotic") {
        const Ingredients in = ingredients(h, x, bath::BathParams{kDrude, 0.7, 0.3}, bath::kAsymptotic);
        CHECK(max_abs(brme_generator(in).matrix - redfield_oracle(in, x.matrix())) < 1e-12);
    }
    SUBCASE("finite time") {
        const Ingredients in = ingredients(h, x, bath::BathParams{kDrude, 0.7, 0.3}, 1.5);
        const Liouvillian L = brme_generator(in);
        CHECK(L.kind == Kind::BrmeAtTime);
        CHECK(L.time == 1.5);
        CHECK(max_abs(L.matrix - redfield_oracle(in, x.matrix())) < 1e-12);
    }
    SUBCASE("without counter term") {
        const Ingredients in = ingredients(h, x, bath::BathParams{kDrude, 0.7, 0.3}, bath::kAsymptotic, false);
        CHECK(in.reorganization == 0.0);
        CHECK(max_abs(brme_generator(in).matrix - redfield_oracle(in, x.matrix())) < 1e-12);
    }
}

TEST_CASE("generators preserve trace and hermiticity") {
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> dim(2, 5);
    for (int k = 0; k < 100; ++k) {
        const Index d = dim(rng);
        const HermitianOperator h(random_hermitian(rng, d)), x(random_hermitian(rng, d));
        const Ingredients in = ingredients(h, x, bath::BathParams{kDrude, 1.0, 0.4}, bath::kAsymptotic);
        for (const Liouvillian& L : {davies_generator(in), brme_generator(in), secular_filter(in, kFullSecular),
                                     secular_filter(in, 0.5), brme_real_only(in)}) {
            REQUIRE(trace_preservation_error(L) < 1e-10);
            REQUIRE(hermiticity_preservation_error(L) < 1e-10);
        }
        const Liouvillian p = pauli_ultrastrong(pointer_split(h, x), 1.0, RateModel::fermi(1.0));
        REQUIRE(trace_preservation_error(p) < 1e-10);
        REQUIRE(hermiticity_preservation_error(p) < 1e-10);
    }
}

TEST_CASE("Davies generator") {
    const HermitianOperator h(0.5 * pauli::z()), x(pauli::x());
    const bath::BathParams b{kDrude, 1.0, 0.3};
    const Ingredients in = ingredients(h, x, b, bath::kAsymptotic);
    const Liouvillian L = davies_generator(in);
    SUBCASE("steady state is the Gibbs state") {
        const SteadyStateReport s = steady_state(L);
        CHECK(s.unique);
        CHECK(trace_distance(s.states[0], gibbs(h, 1.0)) < 1e-10);
        CHECK(s.residual < 1e-9 * L.matrix.norm());
        CHECK(s.spectral_gap > 0.0);
    }
    SUBCASE("detailed balance and positivity of the rates") {
        REQUIRE(in.bohr.modes.size() == 2);
        const double down = 2.0 * in.gamma[0].real(), up = 2.0 * in.gamma[1].real();
        CHECK(up > 0.0);
        CHECK(down / up == doctest::Approx(std::exp(1.0 * in.bohr.modes[1].omega)).epsilon(1e-10));
    }
    SUBCASE("shift commutes with the system Hamiltonian") {
        CHECK(max_abs(commutator(L.lamb_shift, h.matrix())) < 1e-12);
        CHECK(max_abs(L.lamb_shift_perp) == 0.0);
        CHECK(L.terms == 2);
    }
    SUBCASE("zero coupling is unitary") {
        const Liouvillian l0 = davies_generator(h, x, bath::BathParams{kDrude, 1.0, 0.0});
        CHECK(max_abs(l0.matrix - commutator_superop(h.matrix())) == 0.0);
        Vector v(2);
        v << 1.0, cplx(0.0, 1.0);
        v /= std::sqrt(2.0);
        EvolveOptions tight;
        tight.rtol = 1e-12;
        tight.atol = 1e-14;
        const Trajectory tr = evolve(l0, v * v.adjoint(), {0.0, 1.0, 5.0, 20.0}, tight);
        for (const Matrix& r : tr.states) CHECK(std::abs((r * r).trace().real() - 1.0) < 1e-10);
        EvolveOptions mid;
        mid.rtol = 1e-10;
        const Trajectory loose = evolve(l0, v * v.adjoint(), {0.0, 1.0, 5.0, 20.0}, mid);
        for (const Matrix& r : loose.states) CHECK(std::abs((r * r).trace().real() - 1.0) < 1e-9);
    }
}

TEST_CASE("Bloch-Redfield reduces to Davies for a single mode") {
    const HermitianOperator h(diag({0.0, 1.0})), x(diag({1.0, -1.0}));
    const Ingredients in = ingredients(h, x, bath::BathParams{kDrude, 1.0, 0.5}, bath::kAsymptotic);
    REQUIRE(in.bohr.modes.size() == 1);
    CHECK(max_abs(brme_generator(in).matrix - davies_generator(in).matrix) < 1e-12);
}

TEST_CASE("Bloch-Redfield steady state against the weak-coupling mean force state") {
    const HermitianOperator h(spin_boson(1.0, 0.5)), x(pauli::z());
    const Eigh e = eigh(h);
    auto coherence = [&](const Matrix& r) { return (e.vectors.adjoint() * r * e.vectors)(0, 1); };
    auto populations = [&](const Matrix& r) { return (e.vectors.adjoint() * r * e.vectors).diagonal().real(); };
    auto brme = [&](double lam) {
        return steady_state(brme_generator(h, x, bath::BathParams{kDrude, 1.0, lam}, bath::kAsymptotic)).states[0].matrix();
    };
    auto weak = [&](double lam) { return mfg_weak(h, x, bath::BathParams{kDrude, 1.0, lam}).state.matrix(); };
    SUBCASE("coherences agree beyond second order") {
        auto err = [&](double lam) { return std::abs(coherence(brme(lam)) - coherence(weak(lam))); };
        CHECK(coherence_order(err, 0.1) >= 3.0);
        CHECK(coherence_order(err, 0.05) >= 3.0);
        const double rel = err(0.05) / std::abs(coherence(weak(0.05)));
        CHECK(rel < err(0.1) / std::abs(coherence(weak(0.1))));
    }
    SUBCASE("populations are correct only to zeroth order") {
        const RealVector tau = populations(gibbs(h, 1.0).matrix());
        auto diag_err = [&](double lam) { return (populations(brme(lam)) - tau).cwiseAbs().maxCoeff(); };
        CHECK(coherence_order(diag_err, 0.1) == doctest::Approx(2.0).epsilon(0.05));
        // The lambda^2 coefficient of the discrepancy with mfg_weak does not vanish.
        auto weak_err = [&](double lam) {
            return (populations(brme(lam)) - populations(weak(lam))).cwiseAbs().maxCoeff() / (lam * lam);
        };
        CHECK(weak_err(0.05) > 1e-3);
        CHECK(weak_err(0.025) == doctest::Approx(weak_err(0.05)).epsilon(0.05));
    }
    SUBCASE("a diagonal gauge shift costs only fourth order") {
        Matrix w = Matrix::Zero(2, 2);
        w(0, 0) = 1.0 / std::sqrt(2.0);
        w(1, 1) = -1.0 / std::sqrt(2.0);
        const Matrix wh = e.vectors * w * e.vectors.adjoint();
        auto extra = [&](double lam) {
            const Liouvillian L = brme_generator(h, x, bath::BathParams{kDrude, 1.0, lam}, bath::kAsymptotic);
            return L.apply(lam * lam * wh).norm();
        };
        CHECK(coherence_order(extra, 0.1) == doctest::Approx(4.0).epsilon(0.02));
    }
}

TEST_CASE("secular filtering") {
    SUBCASE("full secular steady state is the Gibbs state") {
        std::mt19937 rng(8);
        const HermitianOperator h(random_hermitian(rng, 3)), x(random_hermitian(rng, 3));
        const Ingredients in = ingredients(h, x, bath::BathParams{kDrude, 0.8, 0.4}, bath::kAsymptotic);
        const Liouvillian L = secular_filter(in, kFullSecular);
        CHECK(L.kind == Kind::SecularFull);
        CHECK(max_abs(L.lamb_shift_perp) == 0.0);
        CHECK(trace_distance(steady_state(L).states[0], gibbs(h, 0.8)) < 1e-10);
        CHECK(max_abs(secular_filter(in, INFINITY).matrix - brme_generator(in).matrix) == 0.0);
    }
    SUBCASE("V system term counts") {
        const double delta = 0.05;
        const HermitianOperator h(diag({0.0, 1.0, 1.0 + delta}));
        Matrix xm = Matrix::Zero(3, 3);
        xm(0, 1) = xm(1, 0) = 1.0;
        xm(0, 2) = xm(2, 0) = 0.7;
        const Ingredients in = ingredients(h, HermitianOperator(xm), bath::BathParams{kDrude, 1.0, 0.2}, bath::kAsymptotic);
        REQUIRE(in.bohr.modes.size() == 4);
        CHECK(secular_filter(in, kFullSecular).terms == 4);
        CHECK(secular_filter(in, 0.5).terms == 8);
        CHECK(secular_filter(in, 0.01).terms == 4);
        CHECK(brme_generator(in).terms == 16);
        // Keeping the near-degenerate pair retains coherence between the excited levels.
        const Liouvillian p = secular_filter(in, 0.5);
        CHECK(max_abs(p.lamb_shift_perp) > 0.0);
        CHECK(std::abs(p.lamb_shift_perp(0, 0)) == 0.0);
        CHECK_THROWS_AS(secular_filter(in, -2.0), DomainError);
    }
}

TEST_CASE("real-part Bloch-Redfield") {
    const HermitianOperator h(spin_boson(1.0, 0.5)), x(pauli::z());
    const bath::BathParams b{kDrude, 1.0, 0.3};
    SUBCASE("steady state is the Gibbs state") {
        CHECK(trace_distance(steady_state(brme_real_only(h, x, b)).states[0], gibbs(h, 1.0)) < 1e-9);
    }
    SUBCASE("coincides with Bloch-Redfield when the imaginary parts vanish") {
        Ingredients in = ingredients(h, x, b, bath::kAsymptotic, false);
        for (auto& g : in.gamma) g = g.real();
        CHECK(max_abs(brme_real_only(in).matrix - brme_generator(in).matrix) == 0.0);
    }
    SUBCASE("differs from Bloch-Redfield by second-order coherences") {
        const Eigh e = eigh(h);
        auto diff = [&](double lam) {
            const bath::BathParams bl{kDrude, 1.0, lam};
            const Matrix a = steady_state(brme_real_only(h, x, bl)).states[0].matrix();
            const Matrix c = steady_state(brme_generator(h, x, bl, bath::kAsymptotic)).states[0].matrix();
            return std::abs((e.vectors.adjoint() * (a - c) * e.vectors)(0, 1));
        };
        CHECK(diff(0.1) > 0.0);
        CHECK(coherence_order(diff, 0.1) == doctest::Approx(2.0).epsilon(0.05));
    }
}

TEST_CASE("ultrastrong Pauli generator") {
    const double beta = 1.3;
    std::mt19937 rng(12);
    const HermitianOperator h(random_hermitian(rng, 4)), x(random_hermitian(rng, 4));
    const PointerSplit split = pointer_split(h, x);
    RateModel gauss;
    gauss.f = [beta](double e) { return std::exp(0.5 * beta * e - e * e); };
    gauss.dephasing_floor = 0.1;
    SUBCASE("steady populations are Boltzmann weights for any admissible rate function") {
        for (const RateModel& m : {RateModel::fermi(beta, 0.7), gauss}) {
            const SteadyStateReport s = steady_state(pauli_ultrastrong(split, beta, m));
            CHECK(s.unique);
            const Matrix p = split.pointer_basis.adjoint() * s.states[0].matrix() * split.pointer_basis;
            for (Index k = 1; k < 4; ++k)
                CHECK(p(k, k).real() / p(0, 0).real() ==
                      doctest::Approx(std::exp(-beta * (split.eps(k) - split.eps(0)))).epsilon(1e-10));
            CHECK(trace_distance(s.states[0], mfg_ultrastrong(h, x, beta).state) < 1e-12);
        }
    }
    SUBCASE("equal site energies give uniform populations") {
        const HermitianOperator hs(0.4 * pauli::x()), xs(pauli::z());
        const SteadyStateReport s = steady_state(pauli_ultrastrong(pointer_split(hs, xs), beta, RateModel::fermi(beta)));
        CHECK(max_abs(s.states[0].matrix() - Matrix::Identity(2, 2) / 2.0) < 1e-12);
    }
    SUBCASE("rates follow detailed balance") {
        const RealMatrix k = pauli_rates(split, RateModel::fermi(beta));
        for (Index m = 0; m < 4; ++m)
            for (Index n = 0; n < 4; ++n)
                if (m != n)
                    CHECK(k(m, n) == doctest::Approx(k(n, m) * std::exp(-beta * (split.eps(m) - split.eps(n)))).epsilon(1e-12));
    }
    SUBCASE("pointer coherences decay monotonically") {
        const Liouvillian L = pauli_ultrastrong(split, beta, RateModel::fermi(beta));
        const Matrix r0 = random_density(rng, 4);
        std::vector<double> grid;
        for (int k = 0; k <= 40; ++k) grid.push_back(0.25 * k);
        const Trajectory tr = evolve(L, r0, grid);
        double prev = INFINITY;
        for (const Matrix& r : tr.states) {
            Matrix p = split.pointer_basis.adjoint() * r * split.pointer_basis;
            p.diagonal().setZero();
            CHECK(p.norm() <= prev + 1e-12);
            prev = p.norm();
        }
        CHECK(prev < 1e-3);
    }
    SUBCASE("rate functions violating detailed balance are refused") {
        RateModel bad;
        bad.f = [](double) { return 1.0; };
        CHECK_THROWS_AS(pauli_ultrastrong(split, beta, bad), DomainError);
        RateModel neg;
        neg.f = [beta](double e) { return -std::exp(0.5 * beta * e); };
        CHECK_THROWS_AS(pauli_ultrastrong(split, beta, neg), DomainError);
    }
}

TEST_CASE("time evolution") {
    SUBCASE("Davies relaxation from the ground state") {
        const HermitianOperator h(0.5 * pauli::z()), x(pauli::x());
        const Liouvillian L = davies_generator(h, x, bath::BathParams{kDrude, 1.0, 0.3});
        const SteadyStateReport s = steady_state(L);
        const double t_end = 20.0 / s.spectral_gap;
        std::vector<double> grid;
        for (int k = 0; k <= 100; ++k) grid.push_back(t_end * k / 100.0);
        const Trajectory tr = evolve(L, diag({0.0, 1.0}), grid);
        const double target = gibbs(h, 1.0).matrix()(0, 0).real();
        double prev = 0.0;
        for (std::size_t k = 0; k < tr.states.size(); ++k) {
            const double p = tr.states[k](0, 0).real();
            CHECK(p >= prev - 1e-12);
            CHECK(p <= target + 1e-9);
            CHECK(tr.monitors[k].trace_deviation < 1e-9);
            prev = p;
        }
        CHECK(trace_distance(DensityMatrix(tr.states.back()), gibbs(h, 1.0)) < 1e-6);
    }
    SUBCASE("Bloch-Redfield near-stationarity of the weak-coupling state") {
        // Over a fixed window the drift is lambda^2 t times the O(lambda^2) population mismatch.
        const HermitianOperator h(spin_boson(1.0, 0.5)), x(pauli::z());
        auto excursion = [&](double lam) {
            const bath::BathParams b{kDrude, 1.0, lam};
            const Liouvillian L = brme_generator(h, x, b, bath::kAsymptotic);
            const Matrix r0 = mfg_weak(h, x, b).state.matrix();
            std::vector<double> grid;
            for (int k = 0; k <= 40; ++k) grid.push_back(2.0 * k);
            const Trajectory tr = evolve(L, r0, grid);
            double worst = 0.0;
            for (const Matrix& r : tr.states) worst = std::max(worst, max_abs(r - r0));
            return worst;
        };
        CHECK(coherence_order(excursion, 0.05) > 3.5);
    }
    SUBCASE("piecewise generators") {
        const HermitianOperator h(0.5 * pauli::z()), x(pauli::x());
        const Liouvillian a = davies_generator(h, x, bath::BathParams{kDrude, 1.0, 0.3});
        const Liouvillian b = davies_generator(h, x, bath::BathParams{kDrude, 1.0, 0.0});
        const Matrix r0 = diag({0.0, 1.0});
        const Trajectory pw = evolve_piecewise({0.0, 2.0}, {a, b}, r0, {0.0, 2.0, 5.0});
        const Matrix at2 = evolve(a, r0, {0.0, 2.0}).states.back();
        CHECK(max_abs(pw.states[1] - at2) < 1e-9);
        CHECK(max_abs(pw.states[2] - evolve(b, at2, {0.0, 3.0}).states.back()) < 1e-9);
        CHECK_THROWS_AS(evolve_piecewise({1.0}, {a}, r0, {0.0, 1.0}), DomainError);
    }
    SUBCASE("input validation") {
        const Liouvillian L = davies_generator(HermitianOperator(pauli::z()), HermitianOperator(pauli::x()),
                                               bath::BathParams{kDrude, 1.0, 0.3});
        CHECK_THROWS_AS(evolve(L, diag({1.0, 0.0}), {0.5, 1.0}), DomainError);
        CHECK_THROWS_AS(evolve(L, diag({1.0, 0.0}), {0.0, 1.0, 1.0}), DomainError);
        CHECK_THROWS_AS(evolve(L, diag({1.0, 0.0, 0.0}), {0.0, 1.0}), DomainError);
    }
}

TEST_CASE("steady-state degeneracy") {
    SUBCASE("zero generator") {
        Liouvillian L;
        L.dim = 2;
        L.matrix = Matrix::Zero(4, 4);
        const SteadyStateReport s = steady_state(L);
        CHECK_FALSE(s.unique);
        CHECK(s.states.size() == 4);
    }
    SUBCASE("two decoupled blocks") {
        Matrix hm = Matrix::Zero(4, 4), xm = Matrix::Zero(4, 4);
        hm.topLeftCorner(2, 2) = spin_boson(1.0, 0.3);
        hm.bottomRightCorner(2, 2) = spin_boson(2.0, 0.5) + 3.0 * Matrix::Identity(2, 2);
        xm.topLeftCorner(2, 2) = pauli::x();
        xm.bottomRightCorner(2, 2) = pauli::x();
        const HermitianOperator h(hm), x(xm);
        const SteadyStateReport s = steady_state(davies_generator(h, x, bath::BathParams{kDrude, 1.0, 0.4}));
        CHECK_FALSE(s.unique);
        REQUIRE(s.states.size() == 2);
        for (const auto& st : s.states) {
            const double upper = st.matrix().topLeftCorner(2, 2).trace().real();
            CHECK((upper < 1e-9 || upper > 1.0 - 1e-9));
            CHECK(s.residual < 1e-9 * 10.0);
        }
        const double u0 = s.states[0].matrix().topLeftCorner(2, 2).trace().real();
        const double u1 = s.states[1].matrix().topLeftCorner(2, 2).trace().real();
        CHECK(std::abs(u0 - u1) > 0.5);
    }
}
