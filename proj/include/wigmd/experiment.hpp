#pragma once

#include <string>
#include <vector>

#include "wigmd/config.hpp"

namespace wigmd::experiment {

// One (superposition, temperature, bath mode) grid cell, or the isolated
// control of one superposition.
struct CellId {
    std::string superposition;
    double temperature = 0.0;  // reduced; unused for isolated cells
    forcefield::BathMode mode = forcefield::BathMode::liquid;
    bool isolated = false;

    std::string name() const;  // e.g. "0+2_T1_liquid", "5+8_isolated"
};

struct CellOutcome {
    CellId id;
    std::string csv_path;
    long n_traj = 0;
    long n_flagged = 0;
    bool ok = false;
    std::string error;
};

struct RunManifest {
    int schema_version = 1;
    std::string software;
    std::string platform;
    double wall_seconds = 0.0;
    config::ExperimentConfig resolved;
    std::vector<CellOutcome> cells;
    std::vector<std::string> plot_files;
};

// Grid expansion: superpositions x temperatures x modes, plus one isolated
// control per superposition when requested.
std::vector<CellId> enumerate_cells(const config::ExperimentConfig& cfg);

struct RunCallbacks {
    bool quiet = false;  // suppress stderr progress
};

// Runs every cell (failures isolate; surviving cells complete), writes the
// per-cell observable CSVs, the run manifest, and the plot-ready CSVs.
RunManifest run_experiment(const config::ExperimentConfig& cfg, const RunCallbacks& cb = {});

void write_manifest(const RunManifest& manifest, const std::string& path);
RunManifest read_manifest(const std::string& path);

// Re-running from a manifest reproduces the byte-identical outputs.
config::ExperimentConfig config_from_manifest(const std::string& path);

// Joins liquid / ideal-gas / isolated series per (superposition, temperature)
// and the Lyapunov pairs per temperature; returns the files written.
std::vector<std::string> emit_plots(const RunManifest& manifest, const std::string& directory);

// true when every cell succeeded with under 1% flagged trajectories
bool all_cells_ok(const RunManifest& manifest);

} // namespace wigmd::experiment
