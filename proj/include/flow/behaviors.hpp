#pragma once

// Native event-callback scripting: behaviors with start/update/fixed-update/trigger hooks.

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "flow/scene.hpp"

namespace flow::behaviors {

class Behavior {
public:
    virtual ~Behavior() = default;
    virtual void on_start(ActorHandle) const {}
    /// Once per frame.
    virtual void on_update(ActorHandle, double /*dt*/) const {}
    /// Once per physics step; the only place physics may be touched.
    virtual void on_fixed_update(ActorHandle, double /*dt*/, AxisSample) const {}
    virtual void on_trigger_enter(ActorHandle /*self*/, ActorHandle /*other*/) const {}
};

/// Spins its actor by euler_rates * dt every frame.
class RotatorBehavior final : public Behavior {
public:
    explicit RotatorBehavior(Rotator euler_rates = {15.0, 30.0, 45.0}) : rates_(euler_rates) {}
    void on_update(ActorHandle self, double dt) const override;
    const Rotator& euler_rates() const { return rates_; }

private:
    Rotator rates_;
};

/// Drives the ball from the input axes: a force in Force mode, a rolling torque otherwise.
class PlayerControllerBehavior final : public Behavior {
public:
    PlayerControllerBehavior(DriveMode mode, double speed, double roll_torque)
        : mode_(mode), speed_(speed), roll_torque_(roll_torque) {}
    void on_fixed_update(ActorHandle self, double dt, AxisSample axes) const override;

private:
    DriveMode mode_;
    double speed_;
    double roll_torque_;
};

/// Deactivates whatever it touches if that actor is tagged "Pick Up".
class PickupBehavior final : public Behavior {
public:
    void on_trigger_enter(ActorHandle self, ActorHandle other) const override;
};

/// Torque that makes a ball rolling on +Y move along +X for h = 1 and +Z for v = 1.
Vec3 rolling_drive_torque(AxisSample axes, double roll_torque);

struct BehaviorParams {
    Rotator euler_rates{15.0, 30.0, 45.0};
    double speed = 10.0;
    double roll_torque = 50.0;
    DriveMode drive_mode = DriveMode::Force;
};

/// Names usable from scene files: "rotator", "player_controller", "pickup_on_ball".
/// Throws std::invalid_argument for anything else.
std::unique_ptr<Behavior> make_behavior(std::string_view name, const BehaviorParams& params);
bool is_known_behavior(std::string_view name);

/// Scripting path running a list of behaviors in order.
class BehaviorScript final : public ScriptingPath {
public:
    explicit BehaviorScript(std::vector<std::unique_ptr<Behavior>> behaviors)
        : behaviors_(std::move(behaviors)) {}

    void on_start(ActorHandle self) const override;
    void on_frame(ActorHandle self, double frame_dt, AxisSample axes) const override;
    void on_fixed(ActorHandle self, double fixed_dt, AxisSample axes) const override;
    void on_begin_overlap(ActorHandle self, ActorId other) const override;

private:
    std::vector<std::unique_ptr<Behavior>> behaviors_;
};

}  // namespace flow::behaviors
