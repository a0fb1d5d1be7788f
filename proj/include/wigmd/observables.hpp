#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wigmd/ensemble.hpp"
#include "wigmd/md.hpp"

namespace wigmd::observables {

struct BinSpec {
    int nq = 128, np = 128;
    double q_lo, q_hi, p_lo, p_hi;

    static BinSpec over_grid(const wigner::WignerGrid& grid, int nq = 128, int np = 128);
    bool same_geometry(const BinSpec& other) const;
    double cell_area() const;
};

enum class Half { A, B };  // even / odd trajectory indices

// Signed phase-space density of one half-ensemble at one time, with
// per-block integer counts retained for jackknife resampling.
struct ReducedDensityHistogram {
    BinSpec bins;
    std::vector<double> weights;                      // normalized signed density
    std::vector<std::vector<std::int64_t>> block_counts;  // [block][cell]
    std::vector<std::int64_t> block_n;                // included trajectories per block
    double one_norm = 1.0;
    std::int64_t n_included = 0;
    double outside_fraction = 0.0;

    double total_signed_weight() const;  // integrates weights over the plane
};

// Bins (q, p, sign) of the selected half. Trajectories are assigned to
// jackknife blocks by contiguous index ranges. Throws std::runtime_error when
// more than 2% of the included samples fall outside the binned range.
ReducedDensityHistogram reduce_and_bin(const ensemble::SnapshotBatch& batch, const BinSpec& bins,
                                       Half half, double one_norm, int n_blocks = 20);

struct PurityEstimate {
    double chi = 0.0;       // 2 pi hbar * integral of rho_A rho_B
    double chi_raw = 0.0;   // same without the 2 pi hbar prefactor
    double chi_err = 0.0;   // jackknife standard error (on chi)
};

// Split-halves purity: the A x B cross product removes the self-correlation
// bias of the quadratic functional. Error from delete-one-block jackknife.
// Throws std::invalid_argument on mismatched bin geometry.
PurityEstimate purity(const ReducedDensityHistogram& a, const ReducedDensityHistogram& b,
                      double hbar);

struct PuritySeries {
    std::vector<double> times;
    std::vector<double> chi, chi_err, chi_raw;
};

// Runs the split-halves estimator at every recorded time. When more than 2%
// of samples at any time fall outside `bins`, the range is widened once from
// the data and every time is re-binned with the common geometry.
PuritySeries purity_series(const ensemble::EnsembleResult& ensemble, const BinSpec& bins,
                           double hbar, int n_blocks = 20);

struct LyapunovSeries {
    std::vector<double> times;
    std::vector<double> distance;      // phase-space separation of the twin
    std::vector<double> log_distance;
    double exponent = 0.0;             // slope of ln d(t) over the fit window
    double r_squared = 0.0;
    std::size_t fit_begin = 0, fit_end = 0;  // [begin, end) indices
    bool fit_valid = false;
};

struct LyapunovOptions {
    double delta0 = 1e-6;
    bool include_momenta = true;       // positions-only distance when false
    double saturation_fraction = 0.1;  // fit stops once d > fraction * box
    double transient_fraction = 0.1;   // burn-in skipped before the fit
};

// Co-propagates the reference state and a twin whose Xe positions are
// displaced by a random direction of total norm delta0; d(t) is the Euclidean
// norm over Xe positions (minimum image) and momenta.
LyapunovSeries lyapunov(const SystemState& reference, const forcefield::ForceField& ff,
                        const md::IntegrationPlan& plan, rng::Engine& rng,
                        const LyapunovOptions& options = {});

struct Monitors {
    double kinetic_temperature = 0.0;
    double total_energy = 0.0;
    Vec3 total_momentum;
};

Monitors monitors(const SystemState& state, md::Propagator& prop);

// Fixed-order observable series ready for CSV emission; absent quantities
// (e.g. the Lyapunov columns of an isolated run) stay NaN.
struct ObservableSeries {
    std::vector<double> times;
    PuritySeries purity;
    std::optional<LyapunovSeries> lyapunov;
    std::vector<double> mean_energy;
    std::vector<double> mean_temperature;
    double eta = 1.0;  // s^-1, converts t* to seconds for the t_ps column
};

// Columns: t_star, t_ps, chi, chi_err, chi_raw, d_lyap, ln_d_lyap, E_total, T_inst.
void write_observables_csv(std::ostream& os, const ObservableSeries& series);

} // namespace wigmd::observables
