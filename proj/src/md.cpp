#include "wigmd/md.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace wigmd::md {

void IntegrationPlan::validate(double vibration_period) const {
    if (!(dt > 0.0)) throw std::invalid_argument("IntegrationPlan: dt must be positive");
    if (dt > vibration_period / 40.0)
        throw std::invalid_argument("IntegrationPlan: dt exceeds vibration period / 40");
    if (n_steps < 0) throw std::invalid_argument("IntegrationPlan: n_steps must be >= 0");
    if (record_stride < 1 || (n_steps > 0 && n_steps % record_stride != 0))
        throw std::invalid_argument("IntegrationPlan: record_stride must divide n_steps");
}

Propagator::Propagator(const forcefield::ForceField& ff, bool clamp_q)
    : ff_(ff), list_(ff.xe_xe.cutoff + 0.3, 0.3), clamp_q_(clamp_q) {}

void Propagator::prepare(SystemState& state) {
    state.check_finite();
    state.wrap_positions();
    if (ff_.mode == forcefield::BathMode::liquid) list_.build(state);
    forcefield::total_forces(ff_, state, list_, forces_);
}

void Propagator::recompute(SystemState& state) {
    if (ff_.mode == forcefield::BathMode::liquid) list_.ensure_current(state);
    forcefield::total_forces(ff_, state, list_, forces_);
}

double Propagator::kinetic(const SystemState& state) const {
    double k = state.p_q * state.p_q / (2.0 * ff_.morse.mu) + norm2(state.p_com) / (2.0 * m_i2());
    for (const auto& p : state.xe_p) k += 0.5 * norm2(p);
    return k;
}

void Propagator::step(SystemState& state, double dt) {
    const double half = 0.5 * dt;

    if (!clamp_q_) {
        state.p_q += half * forces_.f_q;
        state.q += dt * state.p_q / ff_.morse.mu;
    }
    state.p_com += half * forces_.f_com;
    state.r_com += (dt / m_i2()) * state.p_com;
    for (std::size_t i = 0; i < state.n_xe(); ++i) {
        state.xe_p[i] += half * forces_.f_xe[i];
        state.xe_r[i] += dt * state.xe_p[i];
    }
    state.wrap_positions();
    state.time += dt;

    recompute(state);

    if (!clamp_q_) state.p_q += half * forces_.f_q;
    state.p_com += half * forces_.f_com;
    for (std::size_t i = 0; i < state.n_xe(); ++i) state.xe_p[i] += half * forces_.f_xe[i];

    // a non-finite coordinate poisons the potential within a step; locate the
    // culprit on the slow path only
    if (!std::isfinite(forces_.potential + state.q + state.p_q)) {
        state.check_finite();
        throw std::runtime_error("md::step: non-finite potential energy");
    }
}

double kinetic_temperature(const SystemState& state, double m_i2) {
    double k = norm2(state.p_com) / (2.0 * m_i2);
    for (const auto& p : state.xe_p) k += 0.5 * norm2(p);
    const double dof = 3.0 * double(state.n_xe() + 1) - 3.0;
    return 2.0 * k / dof;
}

SystemState lattice_configuration(int n_total, double density) {
    if (n_total < 2) throw std::invalid_argument("lattice_configuration: need at least 2 particles");
    if (!(density > 0.0)) throw std::invalid_argument("lattice_configuration: density must be positive");

    SystemState state;
    state.box_length = std::cbrt(double(n_total) / density);
    const int per_side = int(std::ceil(std::cbrt(double(n_total))));
    const double a = state.box_length / per_side;

    int placed = 0;
    for (int ix = 0; ix < per_side && placed < n_total; ++ix)
        for (int iy = 0; iy < per_side && placed < n_total; ++iy)
            for (int iz = 0; iz < per_side && placed < n_total; ++iz) {
                const Vec3 r{(ix + 0.5) * a, (iy + 0.5) * a, (iz + 0.5) * a};
                if (placed == 0)
                    state.r_com = r;
                else
                    state.xe_r.push_back(r);
                ++placed;
            }
    state.xe_p.assign(state.xe_r.size(), Vec3{});
    return state;
}

SystemState random_configuration(int n_total, double density, double sigma0_i2xe,
                                 rng::Engine& rng) {
    if (n_total < 2) throw std::invalid_argument("random_configuration: need at least 2 particles");
    if (!(density > 0.0)) throw std::invalid_argument("random_configuration: density must be positive");
    SystemState state;
    state.box_length = std::cbrt(double(n_total) / density);
    const double L = state.box_length;
    state.r_com = {0.5 * L, 0.5 * L, 0.5 * L};
    const double min_r2 = 0.81 * sigma0_i2xe * sigma0_i2xe;
    while (int(state.xe_r.size()) < n_total - 1) {
        const Vec3 r{rng.uniform() * L, rng.uniform() * L, rng.uniform() * L};
        if (norm2(min_image(r - state.r_com, L)) < min_r2) continue;
        state.xe_r.push_back(r);
    }
    state.xe_p.assign(state.xe_r.size(), Vec3{});
    return state;
}

void thermal_momenta(SystemState& state, double temperature, double m_i2, rng::Engine& rng) {
    const double s_xe = std::sqrt(temperature);
    const double s_i2 = std::sqrt(temperature * m_i2);
    state.p_com = {s_i2 * rng.gaussian(), s_i2 * rng.gaussian(), s_i2 * rng.gaussian()};
    for (auto& p : state.xe_p)
        p = {s_xe * rng.gaussian(), s_xe * rng.gaussian(), s_xe * rng.gaussian()};

    // subtract the center-of-mass velocity, weighted by each particle's mass
    const Vec3 v_cm = (1.0 / (m_i2 + double(state.n_xe()))) * state.total_momentum();
    state.p_com -= m_i2 * v_cm;
    for (auto& p : state.xe_p) p -= v_cm;
}

void equilibrate(SystemState& state, double temperature, const forcefield::ForceField& ff,
                 const EquilibrationParams& params, rng::Engine& rng) {
    if (!(temperature > 0.0)) throw std::invalid_argument("equilibrate: temperature must be positive");
    const double m_i2 = 4.0 * ff.morse.mu;

    state.q = ff.morse.q0;
    state.p_q = 0.0;
    thermal_momenta(state, temperature, m_i2, rng);

    Propagator prop(ff, /*clamp_q=*/true);
    prop.prepare(state);

    for (long s = 0; s < params.thermostat_steps; ++s) {
        prop.step(state, params.dt);
        if ((s + 1) % params.rescale_every == 0) {
            const double t_now = kinetic_temperature(state, m_i2);
            if (t_now > 0.0) {
                const double scale = std::sqrt(temperature / t_now);
                state.p_com *= scale;
                for (auto& p : state.xe_p) p *= scale;
            }
        }
    }

    double t_sum = 0.0;
    long t_count = 0;
    std::vector<double> trace;
    for (long s = 0; s < params.settle_steps; ++s) {
        prop.step(state, params.dt);
        if (s >= 3 * params.settle_steps / 4) {
            const double t_now = kinetic_temperature(state, m_i2);
            t_sum += t_now;
            ++t_count;
            if (trace.size() < 16) trace.push_back(t_now);
        }
    }
    const double t_mean = t_count > 0 ? t_sum / double(t_count) : 0.0;
    if (std::abs(t_mean / temperature - 1.0) > params.temperature_band) {
        std::ostringstream msg;
        msg << "equilibrate: mean T* = " << t_mean << " outside the " << params.temperature_band
            << " band around " << temperature << "; trace:";
        for (double t : trace) msg << ' ' << t;
        throw std::runtime_error(msg.str());
    }
    state.time = 0.0;
}

TrajectoryRecord run_trajectory(SystemState state, const IntegrationPlan& plan,
                                Propagator& prop, const SnapshotObserver& observer) {
    const double m_i2 = prop.m_i2();
    TrajectoryRecord rec;
    const long n_rec = plan.n_records();
    rec.times.reserve(n_rec);
    rec.q.reserve(n_rec);
    rec.p_q.reserve(n_rec);
    rec.energy.reserve(n_rec);
    rec.temperature.reserve(n_rec);

    prop.prepare(state);
    const double e0 = prop.total_energy(state);

    auto record = [&](long index) {
        const double e = prop.total_energy(state);
        rec.times.push_back(state.time);
        rec.q.push_back(state.q);
        rec.p_q.push_back(state.p_q);
        rec.energy.push_back(e);
        rec.temperature.push_back(kinetic_temperature(state, m_i2));
        if (e0 != 0.0)
            rec.max_energy_drift = std::max(rec.max_energy_drift, std::abs((e - e0) / e0));
        if (observer) observer(index, state, e);
    };

    record(0);
    for (long s = 1; s <= plan.n_steps; ++s) {
        prop.step(state, plan.dt);
        if (s % plan.record_stride == 0) record(s / plan.record_stride);
    }
    return rec;
}

TrajectoryRecord run_isolated_trajectory(double q, double p_q, const IntegrationPlan& plan,
                                         const morse::MorseSpec& spec) {
    TrajectoryRecord rec;
    double f = morse::force(spec, q);
    double t = 0.0;
    const double e0 = p_q * p_q / (2.0 * spec.mu) + morse::potential(spec, q);

    auto record = [&]() {
        const double e = p_q * p_q / (2.0 * spec.mu) + morse::potential(spec, q);
        rec.times.push_back(t);
        rec.q.push_back(q);
        rec.p_q.push_back(p_q);
        rec.energy.push_back(e);
        rec.temperature.push_back(0.0);
        if (e0 != 0.0)
            rec.max_energy_drift = std::max(rec.max_energy_drift, std::abs((e - e0) / e0));
    };

    record();
    for (long s = 1; s <= plan.n_steps; ++s) {
        p_q += 0.5 * plan.dt * f;
        q += plan.dt * p_q / spec.mu;
        f = morse::force(spec, q);
        p_q += 0.5 * plan.dt * f;
        t += plan.dt;
        if (s % plan.record_stride == 0) record();
    }
    return rec;
}

} // namespace wigmd::md
