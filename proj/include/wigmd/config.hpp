#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wigmd/forcefield.hpp"

namespace wigmd::config {

// Resolved experiment description. Defaults are the desk preset; parsing a
// file overrides individual keys.
struct ExperimentConfig {
    // [system]
    std::vector<std::string> superpositions = {"0+2", "5+8"};
    double alpha = 1.0;
    bool include_isolated = true;

    // [bath]
    std::vector<double> temperatures = {0.8, 1.0, 2.5};  // reduced
    std::vector<forcefield::BathMode> modes = {forcefield::BathMode::liquid,
                                               forcefield::BathMode::ideal_gas};
    double density = 0.85;
    int particles = 108;

    // [ensemble]
    long trajectories = 20000;
    double dt = 2e-4;
    double t_end = 1.5;
    long record_stride = 100;
    std::uint64_t seed = 20602;
    int pool_size = 200;
    long pool_stride = 500;
    int workers = 0;
    bool checkpoint = false;
    int bins = 128;
    double lyapunov_delta0 = 1e-6;
    double drift_tolerance = 1e-3;
    long equil_steps = 20000;
    long settle_steps = 2000;

    // [output]
    std::string directory = "out";
    bool write_wigner = false;
    bool write_trajectories = false;

    void validate() const;      // throws std::invalid_argument
    std::string to_ini() const; // every key materialized
};

// "desk" (defaults) or "paper" (512 particles, 2e6 trajectories; long-running)
ExperimentConfig preset(const std::string& name);

// Parses the INI-style text over `base`; explicit keys win. Unknown sections
// or keys and malformed values are rejected with the offending line number.
ExperimentConfig parse_config(const std::string& text, const ExperimentConfig& base = {});
ExperimentConfig parse_config_file(const std::string& path, const ExperimentConfig& base = {});

} // namespace wigmd::config
