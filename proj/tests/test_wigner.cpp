#include <doctest.h>

#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>

#include "oracles.hpp"
#include "wigmd/wigner.hpp"

using namespace wigmd;

TEST_SUITE_BEGIN("wigner");

namespace {

const units::PhysicalConstants g_pc;
const units::ReducedConstants g_rc = units::ReducedConstants::from(g_pc);
const morse::MorseSpec g_spec = morse::MorseSpec::i2(g_rc);

const wigner::WignerGrid& grid_for(const char* state) {
    static std::map<std::string, wigner::WignerGrid> cache;
    auto it = cache.find(state);
    if (it == cache.end())
        it = cache.emplace(state, build_wigner(g_spec, wigner::Superposition::parse(state))).first;
    return it->second;
}

// momentum wavefunction by direct quadrature of the Fourier transform
std::vector<double> momentum_density(const wigner::Superposition& state,
                                     const std::vector<double>& p_axis) {
    const auto grid = morse::default_grid(g_spec, 4096);
    const double h = grid[1] - grid[0];
    std::vector<std::complex<double>> psi(grid.size(), {0.0, 0.0});
    for (const auto& term : state.terms) {
        const auto amp = morse::eigenfunction(g_spec, term.n, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) psi[i] += term.c * amp[i];
    }
    std::vector<double> out(p_axis.size());
    for (std::size_t k = 0; k < p_axis.size(); ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double phase = -p_axis[k] * grid[i] / g_spec.hbar;
            acc += psi[i] * std::complex<double>{std::cos(phase), std::sin(phase)};
        }
        out[k] = std::norm(acc) * h * h / (2.0 * M_PI * g_spec.hbar);
    }
    return out;
}

} // namespace

TEST_CASE("superposition parsing") {
    const auto s02 = wigner::Superposition::parse("0+2");
    REQUIRE(s02.terms.size() == 2);
    CHECK(s02.terms[0].n == 0);
    CHECK(s02.terms[1].n == 2);
    CHECK(s02.terms[0].c.real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(s02.terms[1].c.real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));

    const auto s58 = wigner::Superposition::parse("5+8");
    CHECK(s58.terms[0].n == 5);
    CHECK(s58.terms[1].n == 8);

    const auto weighted = wigner::Superposition::parse("0.6*0+0.8*2");
    CHECK(weighted.terms[0].c.real() == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(weighted.terms[1].c.real() == doctest::Approx(0.8).epsilon(1e-14));

    const auto complex_coef = wigner::Superposition::parse("(0,1)*1+1*3");
    CHECK(complex_coef.terms[0].c.imag() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));

    CHECK_THROWS_AS(wigner::Superposition::parse(""), std::invalid_argument);
    CHECK_THROWS_AS(wigner::Superposition::parse("x+y"), std::invalid_argument);
    CHECK_THROWS_AS(wigner::Superposition::parse("0+"), std::invalid_argument);
    CHECK_THROWS_AS(wigner::Superposition::parse("0+0").validate(116), std::invalid_argument);
    CHECK_THROWS_AS(wigner::Superposition::parse("0+200").validate(116), std::invalid_argument);
}

TEST_CASE("ground state transform is a positive hump at the origin") {
    const auto& w = grid_for("0");
    CHECK(w.integral() == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(w.min_value() >= -1e-6);
    CHECK(w.max_imag_residue < 1e-10);

    // single positive hump near (q0, 0)
    std::size_t best = 0;
    for (std::size_t c = 0; c < w.values.size(); ++c)
        if (w.values[c] > w.values[best]) best = c;
    const double q_peak = w.q_axis[best / w.p_axis.size()];
    const double p_peak = w.p_axis[best % w.p_axis.size()];
    CHECK(std::abs(q_peak - g_spec.q0) < 3.0 * w.dq);
    CHECK(std::abs(p_peak) < 3.0 * w.dp);
}

TEST_CASE("transform obeys the Wigner bound and stays real") {
    for (const char* s : {"0", "0+2", "5+8"}) {
        const auto& w = grid_for(s);
        CHECK(w.max_value() <= 1.0 / (M_PI * w.hbar) * (1.0 + 1e-6));
        CHECK(std::abs(w.min_value()) <= 1.0 / (M_PI * w.hbar) * (1.0 + 1e-6));
        CHECK(w.max_imag_residue < 1e-10);
        CHECK(w.integral() == doctest::Approx(1.0).epsilon(1e-4));
    }
}

TEST_CASE("marginals reproduce the coordinate and momentum densities") {
    for (const char* s : {"0", "0+2", "5+8"}) {
        const auto state = wigner::Superposition::parse(s);
        const auto& w = grid_for(s);
        const std::size_t nq = w.q_axis.size(), np = w.p_axis.size();

        // q-marginal vs |psi(q)|^2 at the cell centers
        std::vector<std::complex<double>> psi(nq, {0.0, 0.0});
        for (const auto& term : state.terms) {
            const auto amp = morse::eigenfunction(g_spec, term.n, w.q_axis);
            for (std::size_t i = 0; i < nq; ++i) psi[i] += term.c * amp[i];
        }
        double worst_q = 0.0;
        for (std::size_t i = 0; i < nq; ++i) {
            double m = 0.0;
            for (std::size_t k = 0; k < np; ++k) m += w.values[i * np + k];
            worst_q = std::max(worst_q, std::abs(m * w.dp - std::norm(psi[i])));
        }
        CHECK(worst_q < 1e-4);

        // p-marginal vs |psi~(p)|^2
        const auto rho_p = momentum_density(state, w.p_axis);
        double worst_p = 0.0;
        for (std::size_t k = 0; k < np; ++k) {
            double m = 0.0;
            for (std::size_t i = 0; i < nq; ++i) m += w.values[i * np + k];
            worst_p = std::max(worst_p, std::abs(m * w.dq - rho_p[k]));
        }
        CHECK(worst_p < 1e-4);
    }
}

TEST_CASE("superpositions develop genuine negative regions") {
    const auto& w = grid_for("0+2");
    CHECK(w.min_value() < -1e-3 * w.max_value());
    CHECK(w.negative_fraction() > 0.0);
}

TEST_CASE("pure states have unit quadrature purity") {
    for (const char* s : {"0", "0+2", "5+8"})
        CHECK(grid_for(s).purity_quadrature() == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("momentum reflection symmetry for real coefficients") {
    const auto& w = grid_for("0+2");
    const std::size_t nq = w.q_axis.size(), np = w.p_axis.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < nq; i += 7)
        for (std::size_t k = 0; k < np / 2; k += 5)
            worst = std::max(worst,
                             std::abs(w.values[i * np + k] - w.values[i * np + (np - 1 - k)]));
    CHECK(worst < 1e-12);
}

TEST_CASE("insufficient support is rejected with the measured deficit") {
    wigner::GridSpec narrow;
    narrow.q_lo = -0.005;
    narrow.q_hi = 0.005;
    CHECK_THROWS_AS(build_wigner(g_spec, wigner::Superposition::parse("0"), narrow),
                    std::runtime_error);
}

TEST_CASE("sampler: normalization, moments, and sign bookkeeping") {
    const auto& w = grid_for("0+2");
    const wigner::WignerSampler sampler(w);
    rng::Engine rng(42);

    const long n = 100000;
    const auto pts = sampler.sample_many(n, rng);

    double sum_sign = 0.0, sum_q = 0.0, neg = 0.0;
    for (const auto& pt : pts) {
        sum_sign += pt.sign;
        sum_q += pt.sign * pt.q;
        if (pt.sign < 0) neg += 1.0;
    }
    const double nu = sampler.one_norm();

    // signed mean of f = 1 estimates the integral of W (unity)
    const double est_norm = nu * sum_sign / double(n);
    const double se_norm = nu / std::sqrt(double(n));
    CHECK(std::abs(est_norm - 1.0) < 3.0 * se_norm);

    // negative-weight fraction matches the grid integral
    const double frac = neg / double(n);
    const double se_frac = std::sqrt(frac * (1.0 - frac) / double(n));
    CHECK(std::abs(frac - sampler.negative_fraction()) < 3.0 * se_frac);

    // signed <q> matches the quadrature expectation over the grid
    double grid_q = 0.0;
    for (std::size_t i = 0; i < w.q_axis.size(); ++i)
        for (std::size_t k = 0; k < w.p_axis.size(); ++k)
            grid_q += w.q_axis[i] * w.values[i * w.p_axis.size() + k];
    grid_q *= w.dq * w.dp;
    double var_q = 0.0;
    for (const auto& pt : pts) var_q += pt.q * pt.q;
    const double se_q = nu * std::sqrt(var_q / double(n)) / std::sqrt(double(n));
    CHECK(std::abs(nu * sum_q / double(n) - grid_q) < 3.0 * se_q);
}

TEST_CASE("sampler: signed energy expectation matches the state energy") {
    const auto state = wigner::Superposition::parse("0+2");
    const auto& w = grid_for("0+2");
    const wigner::WignerSampler sampler(w);
    rng::Engine rng(1234);

    const long n = 100000;
    double sum_h = 0.0, sum_h2 = 0.0;
    for (long i = 0; i < n; ++i) {
        const auto pt = sampler.sample(rng);
        const double h = pt.p * pt.p / (2.0 * g_spec.mu) + morse::potential(g_spec, pt.q);
        sum_h += pt.sign * h;
        sum_h2 += h * h;
    }
    const double nu = sampler.one_norm();
    double expected = 0.0;
    for (const auto& term : state.terms)
        expected += std::norm(term.c) * morse::eigenenergy(g_spec, term.n);
    const double se = nu * std::sqrt(sum_h2 / double(n)) / std::sqrt(double(n));
    CHECK(std::abs(nu * sum_h / double(n) - expected) < 5.0 * se);
}

TEST_CASE("sampler determinism and rejection of empty grids") {
    const auto& w = grid_for("0");
    const wigner::WignerSampler sampler(w);
    rng::Engine a(99), b(99);
    const auto pa = sampler.sample_many(64, a);
    const auto pb = sampler.sample_many(64, b);
    for (std::size_t i = 0; i < pa.size(); ++i) {
        CHECK(pa[i].q == pb[i].q);
        CHECK(pa[i].p == pb[i].p);
        CHECK(pa[i].sign == pb[i].sign);
    }

    wigner::WignerGrid zero = w;
    for (auto& v : zero.values) v = 0.0;
    CHECK_THROWS_AS(wigner::WignerSampler{zero}, std::invalid_argument);
}

TEST_SUITE_END();
