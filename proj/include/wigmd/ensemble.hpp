#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wigmd/md.hpp"
#include "wigmd/units.hpp"
#include "wigmd/wigner.hpp"

namespace wigmd::ensemble {

struct EnsembleSpec {
    long n_trajectories = 20000;
    std::uint64_t master_seed = 0;
    wigner::Superposition superposition;
    double temperature = 1.0;                 // reduced
    forcefield::BathMode mode = forcefield::BathMode::liquid;
    bool isolated = false;                    // bath coupling disabled entirely
    md::IntegrationPlan plan;
    int pool_size = 200;
    long pool_stride = 500;                   // clamped production steps between snapshots
    int n_particles = 108;                    // total, I2 + Xe
    double density = 0.85;
    double alpha = 1.0;
    int workers = 0;                          // 0 = hardware concurrency
    double drift_tolerance = 1e-3;
    md::EquilibrationParams equilibration{};

    void validate() const;  // throws std::invalid_argument
    double box_length() const;
    std::uint64_t content_hash() const;  // identifies checkpoints
};

// Pool of thermally equilibrated bath snapshots (vibration clamped at q0);
// trajectories draw from it with replacement.
struct BathPool {
    std::vector<SystemState> snapshots;
};

BathPool build_bath_pool(const EnsembleSpec& spec, const units::ReducedConstants& rc,
                         std::uint64_t pool_seed);

struct InitialCondition {
    SystemState state;
    int sign;
};

// Initial condition of trajectory `index`: bath snapshot chosen by the
// trajectory's own substream, (q, p_q) from the Wigner sampler.
InitialCondition make_initial(const EnsembleSpec& spec, const wigner::WignerSampler& sampler,
                              const BathPool& pool, long index);

// One recorded time across the ensemble.
struct SnapshotBatch {
    double time;
    std::span<const double> q, p;
    std::span<const std::int8_t> signs;
    std::span<const std::uint8_t> flagged;
};

struct EnsembleResult {
    std::vector<double> times;
    long n_traj = 0;
    std::vector<double> q, p;                 // row-major [time][trajectory]
    std::vector<std::int8_t> signs;           // per trajectory; fixed by sampling
    std::vector<std::uint8_t> flagged;        // 1 = excluded (energy drift)
    std::vector<double> drift;                // per trajectory, max relative
    std::vector<double> mean_energy;          // per time, over included trajectories
    std::vector<double> mean_temperature;     // per time, over included trajectories
    double one_norm = 1.0;                    // |W| integral of the sampled grid
    long n_flagged = 0;

    long n_included() const { return n_traj - n_flagged; }
    SnapshotBatch at(std::size_t time_index) const;
    long sum_signs() const;
};

struct RunOptions {
    std::string checkpoint_path;  // empty = no checkpointing
    std::function<void(long done, long total, long flagged)> progress;
};

// Propagates the whole ensemble. Work is dealt in fixed-size trajectory
// chunks so results are bitwise independent of the worker count. Throws
// std::runtime_error when more than 1% of trajectories get flagged.
EnsembleResult run_ensemble(const EnsembleSpec& spec, const units::ReducedConstants& rc,
                            const wigner::WignerGrid& grid, const BathPool* pool,
                            const RunOptions& options = {});

} // namespace wigmd::ensemble
