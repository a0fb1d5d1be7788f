#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "wigmd/forcefield.hpp"
#include "wigmd/rng.hpp"

using namespace wigmd;
using forcefield::BathMode;

TEST_SUITE_BEGIN("forcefield");

namespace {

const units::ReducedConstants g_rc = units::ReducedConstants::from(units::PhysicalConstants{});

SystemState random_state(int n_xe, double box, rng::Engine& rng) {
    SystemState s;
    s.box_length = box;
    s.q = 0.02 * (rng.uniform() - 0.5);
    s.p_q = rng.gaussian();
    s.r_com = {rng.uniform() * box, rng.uniform() * box, rng.uniform() * box};
    s.p_com = {rng.gaussian(), rng.gaussian(), rng.gaussian()};
    for (int i = 0; i < n_xe; ++i) {
        // minimal spacing keeps the energy surface smooth enough for finite
        // differences
        for (;;) {
            Vec3 r{rng.uniform() * box, rng.uniform() * box, rng.uniform() * box};
            bool ok = norm2(min_image(r - s.r_com, box)) > 0.81;
            for (const auto& other : s.xe_r)
                ok = ok && norm2(min_image(r - other, box)) > 0.81;
            if (ok) {
                s.xe_r.push_back(r);
                break;
            }
        }
        s.xe_p.push_back({rng.gaussian(), rng.gaussian(), rng.gaussian()});
    }
    return s;
}

double system_energy(const forcefield::ForceField& ff, const SystemState& state) {
    forcefield::NeighborList list(ff.xe_xe.cutoff + 0.3, 0.3);
    list.build(state);
    forcefield::Forces f;
    forcefield::total_forces(ff, state, list, f);
    return f.potential;
}

} // namespace

TEST_CASE("shifted Lennard-Jones pair") {
    const auto pair = forcefield::PairLJ::make(1.0, 1.0, 2.5);
    CHECK(pair.shift == doctest::Approx(0.0163169).epsilon(1e-4));

    const double rmin = std::pow(2.0, 1.0 / 6.0);
    const auto at_min = lj_energy_force(pair, rmin);
    CHECK(at_min.energy == doctest::Approx(-1.0 + pair.shift).epsilon(1e-12));
    CHECK(at_min.f_radial == doctest::Approx(0.0).epsilon(1e-12));

    // unshifted zero crossing at r = sigma
    CHECK(lj_energy_force(pair, 1.0).energy == doctest::Approx(pair.shift).epsilon(1e-15));

    // zero beyond the cutoff, continuous at it
    CHECK(lj_energy_force(pair, 2.5).energy == 0.0);
    CHECK(lj_energy_force(pair, 3.0).f_radial == 0.0);
    CHECK(std::abs(lj_energy_force(pair, 2.5 - 1e-8).energy) < 1e-6);

    const double fd = -oracles::central_difference(
        [&](double r) { return lj_energy_force(pair, r).energy; }, 1.3, 1e-6);
    CHECK(lj_energy_force(pair, 1.3).f_radial == doctest::Approx(fd).epsilon(1e-6));

    CHECK_THROWS_AS(lj_energy_force(pair, 0.0), std::domain_error);
    CHECK_THROWS_AS(lj_energy_force(pair, -1.0), std::domain_error);
    CHECK_THROWS_AS(forcefield::PairLJ::make(-1.0, 1.0, 2.5), std::invalid_argument);
}

TEST_CASE("breathing sphere reduces to plain LJ at q = 0") {
    const auto bs = forcefield::BreathingSphere::i2xe(g_rc, 1.0);
    CHECK(bs.epsilon == doctest::Approx(1.575066).epsilon(1e-4));
    CHECK(bs.sigma0 == doctest::Approx(1.133842).epsilon(1e-4));

    for (double r : {1.0, 1.2, 1.5, 2.2}) {
        const auto br = breathing_energy_forces(bs, r, 0.0);
        const double s6 = std::pow(bs.sigma0 / r, 6.0);
        CHECK(br.energy == doctest::Approx(4.0 * bs.epsilon * (s6 * s6 - s6)).epsilon(1e-12));
    }
}

TEST_CASE("breathing sphere partial derivatives are consistent") {
    const auto bs = forcefield::BreathingSphere::i2xe(g_rc, 1.0);
    const double r = 1.2 * bs.sigma0, q = 0.01;

    const double fd_q = -oracles::central_difference(
        [&](double x) { return breathing_energy_forces(bs, r, x).energy; }, q, 1e-7);
    CHECK(breathing_energy_forces(bs, r, q).f_q == doctest::Approx(fd_q).epsilon(1e-6));

    const double fd_r = -oracles::central_difference(
        [&](double x) { return breathing_energy_forces(bs, x, q).energy; }, r, 1e-7);
    CHECK(breathing_energy_forces(bs, r, q).f_radial == doctest::Approx(fd_r).epsilon(1e-6));
}

TEST_CASE("breathing sphere minimum moves outward as q grows") {
    const auto bs = forcefield::BreathingSphere::i2xe(g_rc, 1.0);
    auto r_min = [&](double q) { return std::pow(2.0, 1.0 / 6.0) * bs.sigma_of(q); };
    CHECK(r_min(0.1) > r_min(0.0));
    for (double q : {0.0, 0.1}) {
        CHECK(breathing_energy_forces(bs, r_min(q), q).f_radial ==
              doctest::Approx(0.0).epsilon(1e-10));
    }
    CHECK_THROWS_AS(breathing_energy_forces(bs, 1.0, -3.0 * bs.sigma0), std::domain_error);
    CHECK_THROWS_AS(breathing_energy_forces(bs, 0.0, 0.0), std::domain_error);
}

TEST_CASE("ideal-gas mode removes exactly the Xe-Xe pair energy") {
    rng::Engine rng(5);
    const auto state = random_state(10, 4.0, rng);
    auto ff_liquid = forcefield::ForceField::standard(g_rc, BathMode::liquid, 4.0, 1.0);
    auto ff_ideal = ff_liquid;
    ff_ideal.mode = BathMode::ideal_gas;

    double lj_sum = 0.0;
    for (std::size_t i = 0; i < state.xe_r.size(); ++i)
        for (std::size_t j = i + 1; j < state.xe_r.size(); ++j) {
            const double r = norm(min_image(state.xe_r[i] - state.xe_r[j], state.box_length));
            lj_sum += lj_energy_force(ff_liquid.xe_xe, r).energy;
        }
    CHECK(system_energy(ff_liquid, state) - system_energy(ff_ideal, state) ==
          doctest::Approx(lj_sum).epsilon(1e-12));
}

TEST_CASE("forces sum to zero and match the energy gradient") {
    rng::Engine rng(11);
    for (auto mode : {BathMode::liquid, BathMode::ideal_gas}) {
        const auto ff = forcefield::ForceField::standard(g_rc, mode, 4.0, 1.0);
        SystemState state = random_state(10, 4.0, rng);

        forcefield::NeighborList list(ff.xe_xe.cutoff + 0.3, 0.3);
        list.build(state);
        forcefield::Forces f;
        forcefield::total_forces(ff, state, list, f);

        Vec3 net = f.f_com;
        for (const auto& fi : f.f_xe) net += fi;
        CHECK(norm(net) < 1e-10);

        const double h = 1e-6;
        auto energy_with = [&](auto&& mutate) {
            SystemState s = state;
            mutate(s);
            return system_energy(ff, s);
        };
        auto check_grad = [&](double force, auto&& plus, auto&& minus) {
            const double e_p = energy_with(plus), e_m = energy_with(minus);
            const double fd_force = -(e_p - e_m) / (2.0 * h);
            const double scale = std::max(1.0, std::abs(fd_force));
            CHECK(std::abs(force - fd_force) / scale < 1e-6);
        };

        check_grad(f.f_q, [&](SystemState& s) { s.q += h; }, [&](SystemState& s) { s.q -= h; });
        check_grad(f.f_com.x, [&](SystemState& s) { s.r_com.x += h; },
                   [&](SystemState& s) { s.r_com.x -= h; });
        check_grad(f.f_com.y, [&](SystemState& s) { s.r_com.y += h; },
                   [&](SystemState& s) { s.r_com.y -= h; });
        for (std::size_t i = 0; i < state.n_xe(); ++i) {
            check_grad(f.f_xe[i].x, [&](SystemState& s) { s.xe_r[i].x += h; },
                       [&](SystemState& s) { s.xe_r[i].x -= h; });
            check_grad(f.f_xe[i].y, [&](SystemState& s) { s.xe_r[i].y += h; },
                       [&](SystemState& s) { s.xe_r[i].y -= h; });
            check_grad(f.f_xe[i].z, [&](SystemState& s) { s.xe_r[i].z += h; },
                       [&](SystemState& s) { s.xe_r[i].z -= h; });
        }
    }
}

TEST_CASE("reaction on the I2 sphere balances the Xe pushes exactly") {
    const auto ff = forcefield::ForceField::standard(g_rc, BathMode::ideal_gas, 6.0, 1.0);
    SystemState s;
    s.box_length = 6.0;
    s.q = 0.01;
    s.r_com = {3.0, 3.0, 3.0};
    s.xe_r = {{1.8, 3.0, 3.0}, {3.0, 4.3, 3.0}, {3.6, 2.5, 4.1}};
    s.xe_p = {{}, {}, {}};

    forcefield::NeighborList list(ff.xe_xe.cutoff + 0.3, 0.3);
    list.build(s);
    forcefield::Forces f;
    forcefield::total_forces(ff, s, list, f);
    Vec3 sum = f.f_xe[0] + f.f_xe[1] + f.f_xe[2];
    CHECK(sum.x == -f.f_com.x);
    CHECK(sum.y == -f.f_com.y);
    CHECK(sum.z == -f.f_com.z);
}

TEST_CASE("liquid forces with all pairs beyond cutoff equal ideal-gas forces") {
    auto ff_liquid = forcefield::ForceField::standard(g_rc, BathMode::liquid, 12.0, 1.0);
    auto ff_ideal = ff_liquid;
    ff_ideal.mode = BathMode::ideal_gas;

    SystemState s;
    s.box_length = 12.0;
    s.r_com = {6.0, 6.0, 6.0};
    s.xe_r = {{1.0, 1.0, 1.0}, {1.0, 6.0, 9.5}, {9.0, 2.0, 6.0}};
    s.xe_p = {{}, {}, {}};

    forcefield::NeighborList list(ff_liquid.xe_xe.cutoff + 0.3, 0.3);
    list.build(s);
    forcefield::Forces fl, fi;
    forcefield::total_forces(ff_liquid, s, list, fl);
    forcefield::total_forces(ff_ideal, s, list, fi);
    CHECK(fl.potential == fi.potential);
    CHECK(fl.f_q == fi.f_q);
    for (std::size_t i = 0; i < s.n_xe(); ++i) {
        CHECK(fl.f_xe[i].x == fi.f_xe[i].x);
        CHECK(fl.f_xe[i].y == fi.f_xe[i].y);
        CHECK(fl.f_xe[i].z == fi.f_xe[i].z);
    }
}

TEST_CASE("overlap diagnostic counts close approaches but returns energy") {
    const auto ff = forcefield::ForceField::standard(g_rc, BathMode::liquid, 8.0, 1.0);
    SystemState s;
    s.box_length = 8.0;
    s.r_com = {6.0, 6.0, 6.0};
    s.xe_r = {{1.0, 1.0, 1.0}, {1.2, 1.0, 1.0}};  // 0.2 < 0.3 sigma apart
    s.xe_p = {{}, {}};

    forcefield::NeighborList list(ff.xe_xe.cutoff + 0.3, 0.3);
    list.build(s);
    forcefield::Forces f;
    forcefield::total_forces(ff, s, list, f);
    CHECK(f.overlap_count >= 1);
    CHECK(std::isfinite(f.potential));
    CHECK(f.potential > 1e4);  // deep in the repulsive wall
}

TEST_CASE("neighbor list tracks displacements and matches brute force") {
    rng::Engine rng(3);
    SystemState s = random_state(20, 5.0, rng);
    forcefield::NeighborList list(2.8, 0.3);
    list.build(s);
    CHECK_FALSE(list.needs_rebuild(s));
    s.xe_r[0].x += 0.2;  // beyond skin/2
    CHECK(list.needs_rebuild(s));

    SystemState big = random_state(60, 9.0, rng);
    forcefield::NeighborList cells(2.8, 0.3);
    cells.build(big);
    std::size_t brute = 0;
    for (std::size_t i = 0; i < big.n_xe(); ++i)
        for (std::size_t j = i + 1; j < big.n_xe(); ++j)
            if (norm2(min_image(big.xe_r[i] - big.xe_r[j], big.box_length)) < 2.8 * 2.8) ++brute;
    CHECK(cells.pairs().size() == brute);
}

TEST_SUITE_END();
