#pragma once

#include <cmath>

namespace wigmd {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
};

inline Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
inline Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
inline Vec3 operator*(Vec3 a, double s) { return a *= s; }
inline Vec3 operator*(double s, Vec3 a) { return a *= s; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }

// Wrap a coordinate into [0, L).
inline double wrap_coord(double v, double box) {
    v -= box * std::floor(v / box);
    // floor rounding can leave v == box for v just below 0
    if (v >= box) v -= box;
    return v;
}

inline Vec3 wrap(Vec3 v, double box) {
    return {wrap_coord(v.x, box), wrap_coord(v.y, box), wrap_coord(v.z, box)};
}

// Minimum-image displacement component for a cubic box.
inline double min_image_coord(double d, double box) {
    return d - box * std::nearbyint(d / box);
}

inline Vec3 min_image(Vec3 d, double box) {
    return {min_image_coord(d.x, box), min_image_coord(d.y, box), min_image_coord(d.z, box)};
}

} // namespace wigmd
