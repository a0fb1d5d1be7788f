#pragma once

#include <functional>
#include <vector>

#include "wigmd/forcefield.hpp"
#include "wigmd/rng.hpp"
#include "wigmd/state.hpp"

namespace wigmd::md {

struct IntegrationPlan {
    double dt = 2e-4;
    long n_steps = 7500;
    long record_stride = 100;

    // throws std::invalid_argument; vibration_period bounds dt from above
    void validate(double vibration_period) const;
    long n_records() const { return n_steps / record_stride + 1; }
};

// Velocity-Verlet propagator owning the per-trajectory force state.
// clamp_q freezes the vibrational coordinate (used during bath preparation).
class Propagator {
public:
    explicit Propagator(const forcefield::ForceField& ff, bool clamp_q = false);

    void prepare(SystemState& state);           // builds neighbor list + forces
    void step(SystemState& state, double dt);   // one velocity-Verlet update

    double potential() const { return forces_.potential; }
    double kinetic(const SystemState& state) const;
    double total_energy(const SystemState& state) const { return potential() + kinetic(state); }
    const forcefield::Forces& forces() const { return forces_; }
    const forcefield::ForceField& field() const { return ff_; }
    double m_i2() const { return 4.0 * ff_.morse.mu; }

private:
    void recompute(SystemState& state);

    forcefield::ForceField ff_;
    forcefield::NeighborList list_;
    forcefield::Forces forces_;
    bool clamp_q_;
};

// Instantaneous kinetic temperature of the translational degrees of freedom.
// The 3 momentum-conservation constraints are removed from the dof count.
double kinetic_temperature(const SystemState& state, double m_i2);

// --- initial configurations -------------------------------------------------

// Simple-cubic lattice filled deterministically; site 0 becomes the I2 center
// of mass, the rest Xe. box = (n_total / density)^(1/3).
SystemState lattice_configuration(int n_total, double density);

// Uniform random placement, rejecting I2 overlap closer than 0.9 sigma0.
SystemState random_configuration(int n_total, double density, double sigma0_i2xe,
                                 rng::Engine& rng);

// Maxwell-Boltzmann momenta at temperature T for all translations, with the
// total momentum reset to zero. Leaves (q, p_q) untouched.
void thermal_momenta(SystemState& state, double temperature, double m_i2, rng::Engine& rng);

// --- equilibration -----------------------------------------------------------

struct EquilibrationParams {
    long thermostat_steps = 20000;
    long rescale_every = 20;
    long settle_steps = 2000;
    double dt = 2e-4;
    double temperature_band = 0.03;  // relative width of the acceptance band
};

// Velocity-rescaling preparation of the bath with the vibration clamped at q0,
// followed by free NVE settling. The mean kinetic temperature over the last
// quarter of the settle phase must land within the band, else throws
// std::runtime_error with a short trace.
void equilibrate(SystemState& state, double temperature, const forcefield::ForceField& ff,
                 const EquilibrationParams& params, rng::Engine& rng);

// --- production --------------------------------------------------------------

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<double> q, p_q;
    std::vector<double> energy;       // total, per recorded time
    std::vector<double> temperature;  // instantaneous kinetic, per recorded time
    double max_energy_drift = 0.0;    // max |E(t)-E(0)| / |E(0)|
};

using SnapshotObserver =
    std::function<void(long record_index, const SystemState& state, double energy)>;

// NVE propagation recording (q, p_q) and diagnostics every record_stride steps.
TrajectoryRecord run_trajectory(SystemState state, const IntegrationPlan& plan,
                                Propagator& prop, const SnapshotObserver& observer = {});

// 1-D Morse propagation used for the isolated-molecule control; arithmetic on
// (q, p_q) matches the full propagator step for a decoupled vibration.
TrajectoryRecord run_isolated_trajectory(double q, double p_q, const IntegrationPlan& plan,
                                         const morse::MorseSpec& spec);

} // namespace wigmd::md
