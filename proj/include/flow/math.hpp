#pragma once

// Vectors, Euler rotators and unit-quaternion orientations.
//
// Conventions (fixed across the whole engine):
//   - right-handed, y-up world
//   - rotators are in degrees and applied intrinsically roll(X) -> pitch(Z) -> yaw(Y)
//   - angular quantities stored internally in radians

#include <cmath>
#include <numbers>

namespace flow {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Vec3&, const Vec3&) = default;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
inline Vec3 operator*(const Vec3& v, double s) { return {v.x * s, v.y * s, v.z * s}; }
inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline Vec3& operator+=(Vec3& a, const Vec3& b) {
    a.x += b.x;
    a.y += b.y;
    a.z += b.z;
    return a;
}

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

/// Euler-angle triple in degrees. Not wrapped: a delta may exceed a full turn.
struct Rotator {
    double roll = 0.0;
    double pitch = 0.0;
    double yaw = 0.0;

    friend bool operator==(const Rotator&, const Rotator&) = default;

    bool finite() const { return std::isfinite(roll) && std::isfinite(pitch) && std::isfinite(yaw); }
};

inline Rotator operator*(const Rotator& r, double s) { return {r.roll * s, r.pitch * s, r.yaw * s}; }

constexpr double deg_to_rad(double deg) { return deg * (std::numbers::pi / 180.0); }
constexpr double rad_to_deg(double rad) { return rad * (180.0 / std::numbers::pi); }

/// Unit quaternion (w, x, y, z).
struct Orientation {
    double w = 1.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Orientation&, const Orientation&) = default;

    static Orientation identity() { return {}; }

    double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
    Orientation conjugate() const { return {w, -x, -y, -z}; }
};

/// Raw Hamilton product, no renormalization.
inline Orientation hamilton(const Orientation& a, const Orientation& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

Orientation normalized(const Orientation& q);

/// Rotation of `angle_rad` about the unit vector `axis`.
Orientation axis_angle(const Vec3& axis, double angle_rad);

/// Rotation by the rotation vector `rv` (direction = axis, length = angle in radians).
/// Returns identity for a zero vector.
Orientation from_rotation_vector(const Vec3& rv);

Orientation rotator_to_orientation(const Rotator& r);

/// World-frame composition: `delta` applied after `current`. Result renormalized.
Orientation compose(const Orientation& delta, const Orientation& current);

Vec3 rotate(const Orientation& q, const Vec3& v);

/// Geodesic angle between two orientations in radians, in [0, pi].
/// Uses atan2 so that tiny angles keep full relative precision.
double geodesic_angle(const Orientation& a, const Orientation& b);

/// Heading about +Y in degrees, in (-180, 180]. Exact for yaw-only orientations.
double yaw_degrees(const Orientation& q);

bool sphere_aabb_overlap(const Vec3& center, double radius, const Vec3& box_center,
                         const Vec3& half_extents);

/// Point of the box closest to `p`.
Vec3 clamp_to_box(const Vec3& p, const Vec3& box_center, const Vec3& half_extents);

}  // namespace flow
