#include <doctest.h>

#include <stdexcept>

#include <stdexcept>

#include <cmath>

#include "oracles.hpp"
#include "wigmd/morse.hpp"
#include "wigmd/units.hpp"

using namespace wigmd;

TEST_SUITE_BEGIN("morse");

static morse::MorseSpec i2_spec() {
    return morse::MorseSpec::i2(units::ReducedConstants::from(units::PhysicalConstants{}));
}

TEST_CASE("potential shape") {
    const auto spec = i2_spec();
    CHECK(morse::potential(spec, spec.q0) == 0.0);
    CHECK(morse::potential(spec, 50.0) == doctest::Approx(81.4208).epsilon(1e-3));
    // curvature at the minimum reproduces the harmonic frequency
    const double h = 1e-4;
    const double curv = (morse::potential(spec, h) - 2.0 * morse::potential(spec, 0.0) +
                         morse::potential(spec, -h)) /
                        (h * h);
    CHECK(std::sqrt(curv / spec.mu) == doctest::Approx(spec.omega()).epsilon(1e-5));
    // the reported frequency is 134.16, self-consistent to a quarter percent
    CHECK(spec.omega() == doctest::Approx(134.16).epsilon(2.5e-3));
}

TEST_CASE("force matches the potential derivative") {
    const auto spec = i2_spec();
    CHECK(morse::force(spec, spec.q0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(morse::force(spec, -0.01) > 0.0);
    CHECK(morse::force(spec, 0.01) < 0.0);
    for (double q : {-0.02, 0.02}) {
        const double fd = -oracles::central_difference(
            [&](double x) { return morse::potential(spec, x); }, q, 1e-6);
        CHECK(morse::force(spec, q) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("bound state count") {
    const auto spec = i2_spec();
    CHECK(spec.lambda() == doctest::Approx(117.06).epsilon(1e-3));
    CHECK(morse::bound_count(spec) == 116);
    CHECK(std::abs(morse::bound_count(spec) - 117) <= 1);

    // lambda = 1.6: exactly one bound state
    morse::MorseSpec small{1.0, 1.0, 0.0, 1.28, 1.0};
    CHECK(small.lambda() == doctest::Approx(1.6).epsilon(1e-12));
    CHECK(morse::bound_count(small) == 1);

    // lambda = 0.4: none
    morse::MorseSpec none{1.0, 1.0, 0.0, 0.08, 1.0};
    CHECK(none.lambda() == doctest::Approx(0.4).epsilon(1e-12));
    CHECK_THROWS_AS(morse::bound_count(none), std::domain_error);
}

TEST_CASE("spectrum against grid diagonalization") {
    const auto spec = i2_spec();
    const auto dvr = oracles::grid_diagonalization(spec, 1024, 4);
    for (int n = 0; n < 4; ++n)
        CHECK(morse::eigenenergy(spec, n) == doctest::Approx(dvr[n]).epsilon(1e-6));

    const double hw = spec.hbar * spec.omega();
    CHECK(morse::eigenenergy(spec, 1) - morse::eigenenergy(spec, 0) < hw);
    CHECK_THROWS_AS(morse::eigenenergy(spec, -1), std::domain_error);
    CHECK_THROWS_AS(morse::eigenenergy(spec, 116), std::domain_error);
    for (int n = 1; n < 20; ++n)
        CHECK(morse::eigenenergy(spec, n) > morse::eigenenergy(spec, n - 1));
}

TEST_CASE("eigenfunctions: norm, nodes, orthogonality") {
    const auto spec = i2_spec();
    const auto grid = morse::default_grid(spec);
    const double h = grid[1] - grid[0];

    for (int n : {0, 1, 2, 5, 8, 10}) {
        const auto psi = morse::eigenfunction(spec, n, grid);
        std::vector<double> sq(psi.size());
        for (std::size_t i = 0; i < psi.size(); ++i) sq[i] = psi[i] * psi[i];
        CHECK(oracles::trapezoid(sq, h) == doctest::Approx(1.0).epsilon(1e-8));

        // count strict sign changes above an amplitude floor
        int nodes = 0;
        double prev = 0.0;
        for (double v : psi) {
            if (std::abs(v) < 1e-8) continue;
            if (prev != 0.0 && v * prev < 0.0) ++nodes;
            prev = v;
        }
        CHECK(nodes == n);
    }

    const auto psi0 = morse::eigenfunction(spec, 0, grid);
    const auto psi2 = morse::eigenfunction(spec, 2, grid);
    std::vector<double> prod(psi0.size());
    for (std::size_t i = 0; i < psi0.size(); ++i) prod[i] = psi0[i] * psi2[i];
    CHECK(std::abs(oracles::trapezoid(prod, h)) < 1e-8);
}

TEST_CASE("eigenfunction energy expectation matches the spectrum") {
    const auto spec = i2_spec();
    const auto grid = morse::default_grid(spec, 8192);
    const double h = grid[1] - grid[0];

    for (int n : {0, 2, 5, 8}) {
        const auto psi = morse::eigenfunction(spec, n, grid);
        // <H> = Int (hbar^2/2mu) |psi'|^2 + V |psi|^2 (integration by parts);
        // five-point derivative keeps the quadrature below the 1e-6 target
        std::vector<double> integrand(psi.size(), 0.0);
        for (std::size_t i = 2; i + 2 < psi.size(); ++i) {
            const double dpsi =
                (-psi[i + 2] + 8.0 * psi[i + 1] - 8.0 * psi[i - 1] + psi[i - 2]) / (12.0 * h);
            integrand[i] = spec.hbar * spec.hbar / (2.0 * spec.mu) * dpsi * dpsi +
                           morse::potential(spec, grid[i]) * psi[i] * psi[i];
        }
        CHECK(oracles::trapezoid(integrand, h) ==
              doctest::Approx(morse::eigenenergy(spec, n)).epsilon(1e-6));
    }
}

TEST_CASE("tails decay monotonically outside the outer turning point") {
    const auto spec = i2_spec();
    const auto grid = morse::default_grid(spec);
    for (int n : {0, 3, 8}) {
        const auto psi = morse::eigenfunction(spec, n, grid);
        const double e = morse::eigenenergy(spec, n);
        const double q_turn = -std::log(1.0 - std::sqrt(e / spec.D)) / spec.beta;
        bool mono = true;
        double prev = -1.0;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            if (grid[i] < q_turn + 0.1 / spec.beta) continue;
            const double mag = std::abs(psi[i]);
            if (prev >= 0.0 && mag > prev + 1e-14) mono = false;
            prev = mag;
        }
        CHECK(mono);
    }
}

TEST_CASE("Hellmann-Feynman consistency in the well depth") {
    const auto spec = i2_spec();
    const auto grid = morse::default_grid(spec);
    const double h = grid[1] - grid[0];
    const int n = 3;

    const double dd = spec.D * 1e-5;
    auto e_of_d = [&](double d) {
        morse::MorseSpec s = spec;
        s.D = d;
        return morse::eigenenergy(s, n);
    };
    const double de_dd = (e_of_d(spec.D + dd) - e_of_d(spec.D - dd)) / (2.0 * dd);

    // <dV/dD> = <(1 - exp(-beta q))^2>
    const auto psi = morse::eigenfunction(spec, n, grid);
    std::vector<double> integrand(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double u = 1.0 - std::exp(-spec.beta * (grid[i] - spec.q0));
        integrand[i] = u * u * psi[i] * psi[i];
    }
    CHECK(de_dd == doctest::Approx(oracles::trapezoid(integrand, h)).epsilon(1e-3));
}

TEST_CASE("harmonic ladder emerges in the deep-well limit") {
    // fixed omega = 1, mu = 1, hbar = 1; beta -> 0 means D -> infinity
    const double beta = 0.05;
    const double d = 1.0 / (2.0 * beta * beta);
    morse::MorseSpec deep{d, beta, 0.0, 1.0, 1.0};
    CHECK(deep.omega() == doctest::Approx(1.0).epsilon(1e-12));
    for (int n = 0; n < 5; ++n) {
        const double harmonic = n + 0.5;
        const double correction = harmonic * harmonic / (4.0 * d);
        CHECK(morse::eigenenergy(deep, n) == doctest::Approx(harmonic - correction).epsilon(1e-12));
        CHECK(std::abs(morse::eigenenergy(deep, n) - harmonic) <= correction * (1.0 + 1e-12));
    }
}

TEST_CASE("narrow grids are rejected with a measured deficit") {
    const auto spec = i2_spec();
    std::vector<double> narrow(64);
    for (int i = 0; i < 64; ++i) narrow[i] = -0.002 + 0.004 * i / 63.0;
    CHECK_THROWS_AS((void)morse::eigenfunction(spec, 0, narrow), std::runtime_error);
}

TEST_CASE("spec validation") {
    CHECK_THROWS_AS((morse::MorseSpec{-1.0, 1.0, 0.0, 1.0, 1.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((morse::MorseSpec{1.0, 1.0, 0.0, 0.08, 1.0}).validate(), std::invalid_argument);
    CHECK_NOTHROW(i2_spec().validate());
}

TEST_SUITE_END();
