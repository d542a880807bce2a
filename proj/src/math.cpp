#include "flow/math.hpp"

#include <algorithm>

namespace flow {

Orientation normalized(const Orientation& q) {
    const double n = q.norm();
    return {q.w / n, q.x / n, q.y / n, q.z / n};
}

Orientation axis_angle(const Vec3& axis, double angle_rad) {
    const double half = 0.5 * angle_rad;
    const double s = std::sin(half);
    return {std::cos(half), axis.x * s, axis.y * s, axis.z * s};
}

Orientation from_rotation_vector(const Vec3& rv) {
    const double angle = rv.norm();
    if (angle == 0.0) return Orientation::identity();
    return axis_angle(rv * (1.0 / angle), angle);
}

Orientation rotator_to_orientation(const Rotator& r) {
    const Orientation roll = axis_angle({1, 0, 0}, deg_to_rad(r.roll));
    const Orientation pitch = axis_angle({0, 0, 1}, deg_to_rad(r.pitch));
    const Orientation yaw = axis_angle({0, 1, 0}, deg_to_rad(r.yaw));
    // Intrinsic sequence: each later rotation acts in the already-rotated frame.
    return normalized(hamilton(hamilton(roll, pitch), yaw));
}

Orientation compose(const Orientation& delta, const Orientation& current) {
    return normalized(hamilton(delta, current));
}

Vec3 rotate(const Orientation& q, const Vec3& v) {
    const Orientation p{0.0, v.x, v.y, v.z};
    const Orientation r = hamilton(hamilton(q, p), q.conjugate());
    return {r.x, r.y, r.z};
}

double geodesic_angle(const Orientation& a, const Orientation& b) {
    // Vector and scalar parts of conj(a) * b, grouped so that identical inputs give exactly zero.
    const double x = (a.w * b.x - b.w * a.x) - (a.y * b.z - a.z * b.y);
    const double y = (a.w * b.y - b.w * a.y) - (a.z * b.x - a.x * b.z);
    const double z = (a.w * b.z - b.w * a.z) - (a.x * b.y - a.y * b.x);
    const double w = a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
    return 2.0 * std::atan2(std::sqrt(x * x + y * y + z * z), std::abs(w));
}

double yaw_degrees(const Orientation& q) {
    // Heading of the rotated +X axis projected onto the ground plane.
    const Vec3 f = rotate(q, {1, 0, 0});
    return rad_to_deg(std::atan2(-f.z, f.x));
}

Vec3 clamp_to_box(const Vec3& p, const Vec3& c, const Vec3& h) {
    return {std::clamp(p.x, c.x - h.x, c.x + h.x), std::clamp(p.y, c.y - h.y, c.y + h.y),
            std::clamp(p.z, c.z - h.z, c.z + h.z)};
}

bool sphere_aabb_overlap(const Vec3& center, double radius, const Vec3& box_center,
                         const Vec3& half_extents) {
    const Vec3 d = center - clamp_to_box(center, box_center, half_extents);
    return dot(d, d) <= radius * radius;
}

}  // namespace flow
