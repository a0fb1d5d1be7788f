#pragma once

#include <vector>

#include "wigmd/morse.hpp"
#include "wigmd/state.hpp"
#include "wigmd/units.hpp"

namespace wigmd::forcefield {

enum class BathMode { liquid, ideal_gas };

// Truncated, energy-shifted Lennard-Jones pair.
struct PairLJ {
    double epsilon;
    double sigma;
    double cutoff;
    double shift;  // added inside the cutoff so the energy vanishes at r_c

    static PairLJ make(double epsilon, double sigma, double cutoff);
};

struct PairResult {
    double energy;
    double f_radial;  // -d(phi)/dr; positive pushes the pair apart
};

// throws std::domain_error for r <= 0
PairResult lj_energy_force(const PairLJ& pair, double r);

// I2-Xe interaction with a vibration-dependent radius sigma(q) = sigma0 + alpha q / 2.
struct BreathingSphere {
    double epsilon;
    double sigma0;
    double alpha;

    static BreathingSphere i2xe(const units::ReducedConstants& rc, double alpha);
    double sigma_of(double q) const { return sigma0 + 0.5 * alpha * q; }
};

struct BreathingResult {
    double energy;
    double f_radial;  // -d(phi)/dr
    double f_q;       // -d(phi)/dq, generalized force on the vibration
};

// throws std::domain_error when sigma(q) <= 0 (unphysical compression)
BreathingResult breathing_energy_forces(const BreathingSphere& bs, double r, double q);

// Forces and potential energy for one configuration.
struct Forces {
    double f_q = 0.0;
    Vec3 f_com;
    std::vector<Vec3> f_xe;
    double potential = 0.0;
    int overlap_count = 0;  // pairs closer than 0.3 sigma, diagnostic only

    void resize(std::size_t n_xe);
};

// Verlet pair list for the Xe-Xe interaction, built through cell binning when
// the box accommodates it. Rebuilt when any atom has moved more than half the
// skin since the last build.
class NeighborList {
public:
    NeighborList(double list_radius, double skin);

    void build(const SystemState& state);
    bool needs_rebuild(const SystemState& state) const;
    void ensure_current(const SystemState& state);

    const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }

private:
    double radius_, skin_;
    std::vector<std::pair<int, int>> pairs_;
    std::vector<Vec3> built_positions_;
    double built_box_ = 0.0;
};

struct ForceField {
    morse::MorseSpec morse;
    PairLJ xe_xe;
    BreathingSphere i2_xe;
    BathMode mode = BathMode::liquid;

    // Standard Xe + I2 field; the Xe-Xe cutoff (2.5 sigma) is clamped to half
    // the box so the minimum-image convention stays valid in small cells.
    static ForceField standard(const units::ReducedConstants& rc, BathMode mode,
                               double box_length, double alpha = 1.0);
};

// Sums the Morse force on q, breathing-sphere terms, and (liquid mode) the
// Xe-Xe pairs from the neighbor list, all under minimum image. Newton's third
// law holds pairwise exactly.
void total_forces(const ForceField& ff, const SystemState& state, const NeighborList& list,
                  Forces& out);

} // namespace wigmd::forcefield
