#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "wigmd/vec3.hpp"

namespace wigmd {

// Full phase point of the extended system: I2 vibration (q, p_q), I2 center
// of mass, and N Xe atoms, in reduced units (Xe mass = 1).
struct SystemState {
    double q = 0.0;
    double p_q = 0.0;
    Vec3 r_com, p_com;
    std::vector<Vec3> xe_r, xe_p;
    double box_length = 0.0;
    double time = 0.0;

    std::size_t n_xe() const { return xe_r.size(); }

    void wrap_positions() {
        r_com = wrap(r_com, box_length);
        for (auto& r : xe_r) r = wrap(r, box_length);
    }

    Vec3 total_momentum() const {
        Vec3 p = p_com;
        for (const auto& pi : xe_p) p += pi;
        return p;
    }

    // throws std::runtime_error naming the first non-finite coordinate
    void check_finite() const {
        auto bad = [](double v) { return !std::isfinite(v); };
        if (bad(q) || bad(p_q))
            throw std::runtime_error("SystemState: non-finite vibrational coordinate (q, p_q)");
        if (bad(r_com.x) || bad(r_com.y) || bad(r_com.z) || bad(p_com.x) || bad(p_com.y) ||
            bad(p_com.z))
            throw std::runtime_error("SystemState: non-finite I2 center-of-mass coordinate");
        for (std::size_t i = 0; i < xe_r.size(); ++i)
            if (bad(xe_r[i].x) || bad(xe_r[i].y) || bad(xe_r[i].z) || bad(xe_p[i].x) ||
                bad(xe_p[i].y) || bad(xe_p[i].z))
                throw std::runtime_error("SystemState: non-finite coordinate at Xe atom " +
                                         std::to_string(i));
    }
};

} // namespace wigmd
