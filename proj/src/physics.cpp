#include "flow/physics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace flow::physics {

namespace {

constexpr Vec3 kFloorNormal{0.0, 1.0, 0.0};

void check_finite(const Actor& a) {
    const bool ok = a.position.finite() &&
                    std::isfinite(a.orientation.w) && std::isfinite(a.orientation.x) &&
                    std::isfinite(a.orientation.y) && std::isfinite(a.orientation.z) &&
                    (!a.body || (a.body->velocity.finite() && a.body->angular_velocity.finite()));
    if (!ok) throw NumericalDivergence("non-finite state on actor '" + a.name + "'");
}

void integrate(Actor& a, const PhysicsConfig& cfg) {
    RigidBody& b = *a.body;
    const double dt = cfg.fixed_dt;
    const double r = cfg.ball_radius;
    const double inertia = cfg.rolling_inertia_factor * b.mass * r * r;

    b.velocity += b.accumulated_force * (dt / b.mass);
    b.angular_velocity += b.accumulated_torque * (dt / inertia);
    if (b.drive_mode == DriveMode::TorqueRolling)
        b.velocity = rolling_velocity(b.angular_velocity, r);
    b.velocity.y = 0.0;  // planar

    a.position += b.velocity * dt;
    a.position.y = r;
    a.orientation = compose(from_rotation_vector(b.angular_velocity * dt), a.orientation);
}

// Pushes the sphere out of the box and reflects the approaching velocity component.
// Returns true if the velocity was reflected.
bool resolve_solid(Actor& ball, const Actor& solid, const PhysicsConfig& cfg) {
    const double r = cfg.ball_radius;
    const SolidVolume& s = *solid.solid;
    if (!sphere_aabb_overlap(ball.position, r, solid.position, s.half_extents)) return false;

    const Vec3 closest = clamp_to_box(ball.position, solid.position, s.half_extents);
    Vec3 delta = ball.position - closest;
    double dist = delta.norm();
    Vec3 normal;
    if (dist > 0.0) {
        normal = delta * (1.0 / dist);
        // Axis-aligned contact: keep the normal exact so the clamp lands on the face.
        if (delta.x == 0.0 && delta.y == 0.0) normal = {0, 0, delta.z > 0 ? 1.0 : -1.0};
        if (delta.y == 0.0 && delta.z == 0.0) normal = {delta.x > 0 ? 1.0 : -1.0, 0, 0};
        ball.position = closest + normal * r;
    } else {
        // Center inside the box: leave through the nearest vertical face.
        const Vec3 lo = solid.position - s.half_extents;
        const Vec3 hi = solid.position + s.half_extents;
        const double px = ball.position.x - lo.x, nx = hi.x - ball.position.x;
        const double pz = ball.position.z - lo.z, nz = hi.z - ball.position.z;
        const double m = std::min({px, nx, pz, nz});
        if (m == px) { normal = {-1, 0, 0}; ball.position.x = lo.x - r; }
        else if (m == nx) { normal = {1, 0, 0}; ball.position.x = hi.x + r; }
        else if (m == pz) { normal = {0, 0, -1}; ball.position.z = lo.z - r; }
        else { normal = {0, 0, 1}; ball.position.z = hi.z + r; }
    }

    RigidBody& b = *ball.body;
    const double vn = dot(b.velocity, normal);
    if (vn >= 0.0) return false;
    b.velocity = b.velocity - normal * ((1.0 + s.restitution) * vn);
    b.velocity.y = 0.0;
    if (b.drive_mode == DriveMode::TorqueRolling)
        b.angular_velocity = rolling_angular_velocity(b.velocity, b.angular_velocity, r);
    return true;
}

}  // namespace

void add_force(RigidBody& body, const Vec3& f) { body.accumulated_force += f; }
void add_torque(RigidBody& body, const Vec3& t) { body.accumulated_torque += t; }

Vec3 rolling_velocity(const Vec3& w, double radius) { return cross(w, kFloorNormal) * radius; }

Vec3 rolling_angular_velocity(const Vec3& v, const Vec3& current, double radius) {
    // v = r (w x n) with n = +Y gives v = r (-w.z, 0, w.x).
    return {v.z / radius, current.y, -v.x / radius};
}

std::vector<std::pair<ActorId, ActorId>> detect_overlaps(const Scene& scene,
                                                         const PhysicsConfig& cfg) {
    std::vector<std::pair<ActorId, ActorId>> pairs;
    for (const Actor& t : scene.actors()) {
        if (!t.active || !t.trigger) continue;
        for (const Actor& b : scene.actors()) {
            if (!b.active || !b.body || b.id == t.id) continue;
            if (sphere_aabb_overlap(b.position, cfg.ball_radius, t.position, t.trigger->half_extents))
                pairs.emplace_back(t.id, b.id);
        }
    }
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

StepResult step(Scene& scene, const PhysicsConfig& cfg, AxisSample axes) {
    const std::int64_t current = scene.step_index() + 1;
    StepResult result;

    scene.dispatch_fixed_events(cfg.fixed_dt, axes);

    for (Actor& a : scene.actors())
        if (a.active && a.body) integrate(a, cfg);

    std::set<std::pair<ActorId, ActorId>> touching;
    for (Actor& a : scene.actors()) {
        if (!a.active || !a.body) continue;
        for (const Actor& s : scene.actors()) {
            if (!s.active || !s.solid) continue;
            const bool reflected = resolve_solid(a, s, cfg);
            if (reflected) result.reflected.push_back(a.id);
            if (sphere_aabb_overlap(a.position, cfg.ball_radius, s.position, s.solid->half_extents))
                touching.emplace(s.id, a.id);
        }
    }
    for (const auto& p : touching)
        if (!scene.contact_pairs().contains(p))
            result.contacts.push_back({p.first, p.second, current,
                                       std::find(result.reflected.begin(), result.reflected.end(),
                                                 p.second) != result.reflected.end()});
    scene.contact_pairs() = std::move(touching);

    const auto pairs = detect_overlaps(scene, cfg);
    for (const auto& p : pairs)
        if (!scene.overlapping_pairs().contains(p))
            result.overlaps.push_back({p.first, p.second, current});
    scene.overlapping_pairs() = {pairs.begin(), pairs.end()};

    for (Actor& a : scene.actors()) {
        if (a.body) {
            a.body->accumulated_force = {};
            a.body->accumulated_torque = {};
        }
        check_finite(a);
    }
    std::sort(result.reflected.begin(), result.reflected.end());
    result.reflected.erase(std::unique(result.reflected.begin(), result.reflected.end()),
                           result.reflected.end());
    scene.advance_step();
    return result;
}

}  // namespace flow::physics
