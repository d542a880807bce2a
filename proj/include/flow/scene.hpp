#pragma once

// Actors, components, lifecycle and deterministic event dispatch.

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "flow/math.hpp"

namespace flow {

struct ActorId {
    std::uint32_t value = 0;
    friend auto operator<=>(const ActorId&, const ActorId&) = default;
};

enum class ActorKind { Ball, Cube, Rail };
enum class DriveMode { Force, TorqueRolling };

std::string_view to_string(ActorKind kind);
std::string_view to_string(DriveMode mode);

struct RigidBody {
    double mass = 1.0;
    Vec3 velocity;
    Vec3 angular_velocity;  // rad/s
    Vec3 accumulated_force;
    Vec3 accumulated_torque;
    DriveMode drive_mode = DriveMode::Force;
};

struct TriggerVolume {
    Vec3 half_extents{0.5, 0.5, 0.5};
};

struct SolidVolume {
    Vec3 half_extents;
    double restitution = 1.0;
};

/// Per-frame input, shared by every actor.
struct AxisSample {
    double h = 0.0;  // MoveRight / Horizontal
    double v = 0.0;  // MoveForward / Vertical
    friend bool operator==(const AxisSample&, const AxisSample&) = default;
};

struct RuntimeFault {
    std::string node_id;
    std::string message;
};

class Scene;
class ActorHandle;

/// One scripting path attached to an actor: either native behaviors or node graphs.
/// Implementations are immutable; all state lives in the scene.
class ScriptingPath {
public:
    virtual ~ScriptingPath() = default;

    virtual void on_start(ActorHandle self) const = 0;
    /// Per rendered frame: input axis events, then tick.
    virtual void on_frame(ActorHandle self, double frame_dt, AxisSample axes) const = 0;
    /// Per physics step, before integration.
    virtual void on_fixed(ActorHandle self, double fixed_dt, AxisSample axes) const = 0;
    virtual void on_begin_overlap(ActorHandle self, ActorId other) const = 0;
};

enum class ScriptKind { None, Behavior, Graph };

struct Actor {
    ActorId id;
    std::string name;
    ActorKind kind = ActorKind::Cube;
    std::optional<std::string> tag;
    bool active = true;
    Vec3 position;
    Orientation orientation;
    std::optional<RigidBody> body;
    std::optional<TriggerVolume> trigger;
    std::optional<SolidVolume> solid;
    // Exclusive by construction: one path or none.
    ScriptKind script_kind = ScriptKind::None;
    std::shared_ptr<const ScriptingPath> script;
};

class InvalidConfig : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class UnknownActor : public std::runtime_error {
public:
    explicit UnknownActor(ActorId id);
    ActorId id;
};

struct SceneConfig {
    double table_size = 10.0;
    double rail_thickness = 0.5;
    double rail_height = 1.0;
    double rail_restitution = 1.0;
    int cube_count = 12;
    double cube_circle_radius = 3.0;
    double cube_edge = 1.0;
    double cube_hover = 0.25;  // gap between table surface and cube bottom
    double ball_radius = 0.5;
    double ball_mass = 1.0;
    double fixed_dt = 0.02;
    DriveMode drive_mode = DriveMode::Force;
};

enum class DispatchKind { InputAxis, Tick, FixedTick, BeginOverlap, Start };

struct DispatchRecord {
    std::int64_t step = 0;
    DispatchKind kind;
    ActorId actor;
};

class Scene {
public:
    Scene() = default;
    explicit Scene(double fixed_dt) : fixed_dt_(fixed_dt) {}

    ActorId spawn(Actor actor);

    bool contains(ActorId id) const;
    Actor& actor(ActorId id);
    const Actor& actor(ActorId id) const;
    const std::vector<Actor>& actors() const { return actors_; }
    std::vector<Actor>& actors() { return actors_; }
    std::optional<ActorId> find(std::string_view name) const;

    void attach(ActorId id, ScriptKind kind, std::shared_ptr<const ScriptingPath> script);

    /// Immediate and idempotent.
    void deactivate(ActorId id);
    /// Deferred to the end of the current step.
    void destroy(ActorId id);
    /// Deferred variant of deactivate used from inside event handlers.
    void request_deactivate(ActorId id);
    /// Applies pending destroys/deactivations. Returns ids whose state changed, in request order.
    std::vector<ActorId> flush_removals();

    std::size_t active_pickup_count() const;
    std::vector<ActorId> active_cubes() const;

    void dispatch_start();
    void dispatch_frame_events(double frame_dt, AxisSample axes);
    void dispatch_fixed_events(double fixed_dt, AxisSample axes);
    /// Fires begin-overlap on `first` (other = second), then on `second` (other = first).
    void dispatch_begin_overlap(ActorId first, ActorId second);

    double fixed_dt() const { return fixed_dt_; }
    void set_fixed_dt(double dt) { fixed_dt_ = dt; }
    std::int64_t step_index() const { return step_index_; }
    double elapsed() const { return static_cast<double>(step_index_) * fixed_dt_; }
    void advance_step() { ++step_index_; }

    void enable_dispatch_log(bool on) { log_dispatch_ = on; }
    const std::vector<DispatchRecord>& dispatch_log() const { return dispatch_log_; }

    void report_fault(RuntimeFault fault) { faults_.push_back(std::move(fault)); }
    std::vector<RuntimeFault> take_faults() { return std::exchange(faults_, {}); }

    // Rising-edge bookkeeping owned by physics.
    std::set<std::pair<ActorId, ActorId>>& overlapping_pairs() { return overlapping_; }
    std::set<std::pair<ActorId, ActorId>>& contact_pairs() { return contacts_; }

private:
    std::size_t index_of(ActorId id) const;
    void log(DispatchKind kind, ActorId id);
    std::vector<ActorId> active_scripted_ids() const;

    std::vector<Actor> actors_;
    std::uint32_t next_id_ = 0;
    double fixed_dt_ = 0.02;
    std::int64_t step_index_ = 0;
    std::vector<ActorId> pending_destroy_;
    std::vector<ActorId> pending_deactivate_;
    bool log_dispatch_ = false;
    std::vector<DispatchRecord> dispatch_log_;
    std::vector<RuntimeFault> faults_;
    std::set<std::pair<ActorId, ActorId>> overlapping_;
    std::set<std::pair<ActorId, ActorId>> contacts_;
};

/// The narrow API scripts use to touch the scene.
class ActorHandle {
public:
    ActorHandle(Scene& scene, ActorId id) : scene_(&scene), id_(id) {}

    ActorId id() const { return id_; }
    Scene& scene() const { return *scene_; }
    bool exists() const { return scene_->contains(id_); }
    ActorHandle other(ActorId id) const { return {*scene_, id}; }

    void rotate_world(const Rotator& delta) const;
    void add_force(const Vec3& f) const;
    void add_torque(const Vec3& t) const;
    void set_active(bool active) const;
    void destroy() const;
    std::optional<std::string> tag_of() const;
    bool compare_tag(std::string_view tag) const;
    void report_fault(RuntimeFault fault) const { scene_->report_fault(std::move(fault)); }

private:
    Scene* scene_;
    ActorId id_;
};

/// The default table: ball, ring of cubes tagged "Pick Up", four rails.
/// Spawn order: ball, cubes k = 0..n-1 (at angle k * 360/n degrees), rails (+x, -x, +z, -z).
Scene build_default_scene(const SceneConfig& config = {});

void validate_config(const SceneConfig& config);

inline constexpr std::string_view kPickUpTag = "Pick Up";

}  // namespace flow
