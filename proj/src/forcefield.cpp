#include "wigmd/forcefield.hpp"

#include <cmath>
#include <stdexcept>

namespace wigmd::forcefield {

PairLJ PairLJ::make(double epsilon, double sigma, double cutoff) {
    if (!(epsilon > 0.0) || !(sigma > 0.0) || !(cutoff > 0.0))
        throw std::invalid_argument("PairLJ: epsilon, sigma, cutoff must be positive");
    const double sr6 = std::pow(sigma / cutoff, 6);
    PairLJ pair{epsilon, sigma, cutoff, 0.0};
    pair.shift = -4.0 * epsilon * (sr6 * sr6 - sr6);
    return pair;
}

PairResult lj_energy_force(const PairLJ& pair, double r) {
    if (!(r > 0.0)) throw std::domain_error("lj_energy_force: r must be positive");
    if (r >= pair.cutoff) return {0.0, 0.0};
    const double inv_r2 = 1.0 / (r * r);
    const double s2 = pair.sigma * pair.sigma * inv_r2;
    const double s6 = s2 * s2 * s2;
    const double s12 = s6 * s6;
    return {4.0 * pair.epsilon * (s12 - s6) + pair.shift,
            24.0 * pair.epsilon * (2.0 * s12 - s6) / r};
}

BreathingSphere BreathingSphere::i2xe(const units::ReducedConstants& rc, double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("BreathingSphere: alpha must be in (0, 1]");
    return {rc.eps_i2xe(), rc.sigma0_i2xe(), alpha};
}

BreathingResult breathing_energy_forces(const BreathingSphere& bs, double r, double q) {
    if (!(r > 0.0)) throw std::domain_error("breathing_energy_forces: r must be positive");
    const double sigma = bs.sigma_of(q);
    if (!(sigma > 0.0))
        throw std::domain_error("breathing_energy_forces: sigma(q) <= 0, unphysical compression");
    const double s = sigma / r;
    const double s2 = s * s;
    const double s6 = s2 * s2 * s2;
    const double s12 = s6 * s6;
    const double e = 4.0 * bs.epsilon * (s12 - s6);
    const double dphi_dsigma = 24.0 * bs.epsilon * (2.0 * s12 - s6) / sigma;
    return {e,
            24.0 * bs.epsilon * (2.0 * s12 - s6) / r,
            -0.5 * bs.alpha * dphi_dsigma};
}

void Forces::resize(std::size_t n_xe) {
    f_q = 0.0;
    f_com = {};
    potential = 0.0;
    overlap_count = 0;
    f_xe.assign(n_xe, Vec3{});
}

NeighborList::NeighborList(double list_radius, double skin) : radius_(list_radius), skin_(skin) {}

void NeighborList::build(const SystemState& state) {
    const int n = int(state.n_xe());
    const double box = state.box_length;
    pairs_.clear();

    const int cells = int(box / radius_);
    if (cells >= 3) {
        // cell binning; all 13 half-neighbors plus own cell
        const double cell_w = box / cells;
        std::vector<std::vector<int>> bins(std::size_t(cells) * cells * cells);
        auto bin_of = [&](const Vec3& r) {
            int cx = std::min(int(r.x / cell_w), cells - 1);
            int cy = std::min(int(r.y / cell_w), cells - 1);
            int cz = std::min(int(r.z / cell_w), cells - 1);
            return (cx * cells + cy) * cells + cz;
        };
        for (int i = 0; i < n; ++i) bins[bin_of(state.xe_r[i])].push_back(i);

        static constexpr int half[13][3] = {{1, 0, 0},  {0, 1, 0},  {0, 0, 1},  {1, 1, 0},
                                            {1, -1, 0}, {1, 0, 1},  {1, 0, -1}, {0, 1, 1},
                                            {0, 1, -1}, {1, 1, 1},  {1, 1, -1}, {1, -1, 1},
                                            {1, -1, -1}};
        const double r2max = radius_ * radius_;
        for (int cx = 0; cx < cells; ++cx)
            for (int cy = 0; cy < cells; ++cy)
                for (int cz = 0; cz < cells; ++cz) {
                    const auto& own = bins[std::size_t((cx * cells + cy) * cells + cz)];
                    for (std::size_t a = 0; a < own.size(); ++a)
                        for (std::size_t b = a + 1; b < own.size(); ++b) {
                            const Vec3 d = min_image(state.xe_r[own[a]] - state.xe_r[own[b]], box);
                            if (norm2(d) < r2max) pairs_.emplace_back(own[a], own[b]);
                        }
                    for (const auto& off : half) {
                        const int nx = (cx + off[0] + cells) % cells;
                        const int ny = (cy + off[1] + cells) % cells;
                        const int nz = (cz + off[2] + cells) % cells;
                        const auto& other = bins[std::size_t((nx * cells + ny) * cells + nz)];
                        for (int i : own)
                            for (int j : other) {
                                const Vec3 d = min_image(state.xe_r[i] - state.xe_r[j], box);
                                if (norm2(d) < r2max) pairs_.emplace_back(i, j);
                            }
                    }
                }
    } else {
        // box too small for cells; all-pairs scan
        const double r2max = radius_ * radius_;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const Vec3 d = min_image(state.xe_r[i] - state.xe_r[j], box);
                if (norm2(d) < r2max) pairs_.emplace_back(i, j);
            }
    }

    built_positions_ = state.xe_r;
    built_box_ = box;
}

bool NeighborList::needs_rebuild(const SystemState& state) const {
    if (built_positions_.size() != state.n_xe() || built_box_ != state.box_length) return true;
    const double limit2 = 0.25 * skin_ * skin_;
    for (std::size_t i = 0; i < built_positions_.size(); ++i) {
        const Vec3 d = min_image(state.xe_r[i] - built_positions_[i], state.box_length);
        if (norm2(d) > limit2) return true;
    }
    return false;
}

void NeighborList::ensure_current(const SystemState& state) {
    if (needs_rebuild(state)) build(state);
}

ForceField ForceField::standard(const units::ReducedConstants& rc, BathMode mode,
                                double box_length, double alpha) {
    ForceField ff;
    ff.morse = morse::MorseSpec::i2(rc);
    const double cutoff = std::min(2.5, 0.499999 * box_length);
    ff.xe_xe = PairLJ::make(1.0, 1.0, cutoff);
    ff.i2_xe = BreathingSphere::i2xe(rc, alpha);
    ff.mode = mode;
    return ff;
}

void total_forces(const ForceField& ff, const SystemState& state, const NeighborList& list,
                  Forces& out) {
    const double box = state.box_length;
    out.resize(state.n_xe());

    out.f_q = force(ff.morse, state.q);
    out.potential = potential(ff.morse, state.q);

    const double overlap2 = 0.09;  // (0.3 sigma)^2 in Xe units
    for (std::size_t i = 0; i < state.n_xe(); ++i) {
        const Vec3 d = min_image(state.xe_r[i] - state.r_com, box);
        const double r2 = norm2(d);
        const double r = std::sqrt(r2);
        const auto br = breathing_energy_forces(ff.i2_xe, r, state.q);
        const Vec3 f = (br.f_radial / r) * d;
        out.f_xe[i] += f;
        out.f_com -= f;
        out.f_q += br.f_q;
        out.potential += br.energy;
        if (r2 < overlap2) ++out.overlap_count;
    }

    if (ff.mode == BathMode::liquid) {
        const double cutoff2 = ff.xe_xe.cutoff * ff.xe_xe.cutoff;
        const double sig2 = ff.xe_xe.sigma * ff.xe_xe.sigma;
        for (const auto& [i, j] : list.pairs()) {
            const Vec3 d = min_image(state.xe_r[i] - state.xe_r[j], box);
            const double r2 = norm2(d);
            if (r2 >= cutoff2) continue;
            const double inv_r2 = 1.0 / r2;
            const double s2 = sig2 * inv_r2;
            const double s6 = s2 * s2 * s2;
            const double s12 = s6 * s6;
            out.potential += 4.0 * ff.xe_xe.epsilon * (s12 - s6) + ff.xe_xe.shift;
            const double f_over_r = 24.0 * ff.xe_xe.epsilon * (2.0 * s12 - s6) * inv_r2;
            const Vec3 f = f_over_r * d;
            out.f_xe[i] += f;
            out.f_xe[j] -= f;
            if (r2 < overlap2) ++out.overlap_count;
        }
    }
}

} // namespace wigmd::forcefield
