#pragma once

// Fixed-timestep integration for the planar ball, rail contacts and trigger overlaps.

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "flow/scene.hpp"

namespace flow::physics {

struct PhysicsConfig {
    double fixed_dt = 0.02;
    double ball_radius = 0.5;
    double rolling_inertia_factor = 0.4;  // solid sphere
};

/// Rising edge of a sphere entering a trigger volume.
struct OverlapEvent {
    ActorId trigger_owner;
    ActorId other;
    std::int64_t step_index = 0;
    friend bool operator==(const OverlapEvent&, const OverlapEvent&) = default;
};

/// Rising edge of a body touching a solid volume.
struct ContactEvent {
    ActorId solid_owner;
    ActorId other;
    std::int64_t step_index = 0;
    bool reflected = false;
};

struct StepResult {
    std::vector<OverlapEvent> overlaps;
    std::vector<ContactEvent> contacts;
    /// Bodies whose velocity was reflected by a solid during this step.
    std::vector<ActorId> reflected;
};

class NumericalDivergence : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

void add_force(RigidBody& body, const Vec3& f);
void add_torque(RigidBody& body, const Vec3& t);

/// Linear velocity of a ball rolling without slipping on a floor with normal +Y.
Vec3 rolling_velocity(const Vec3& angular_velocity, double radius);
/// Inverse of rolling_velocity for the in-plane spin; spin about the normal is kept.
Vec3 rolling_angular_velocity(const Vec3& velocity, const Vec3& current_angular, double radius);

/// One physics step. Fires fixed-tick events, integrates, resolves rails, detects
/// trigger overlaps and clears accumulators. Deferred removals are left to the caller,
/// which dispatches the returned overlap events first.
StepResult step(Scene& scene, const PhysicsConfig& cfg, AxisSample axes = {});

/// All currently overlapping (trigger owner, body) pairs among active actors, sorted.
std::vector<std::pair<ActorId, ActorId>> detect_overlaps(const Scene& scene, const PhysicsConfig& cfg);

}  // namespace flow::physics
