#include "flow/behaviors.hpp"

#include <stdexcept>

namespace flow::behaviors {

void RotatorBehavior::on_update(ActorHandle self, double dt) const {
    self.rotate_world(rates_ * dt);
}

Vec3 rolling_drive_torque(AxisSample axes, double roll_torque) {
    // Rolling on +Y: v = r * (-w.z, 0, w.x). Forward (+Z) needs +X spin, right (+X) needs -Z spin.
    return {axes.v * roll_torque, 0.0, -(axes.h * roll_torque)};
}

void PlayerControllerBehavior::on_fixed_update(ActorHandle self, double, AxisSample axes) const {
    if (mode_ == DriveMode::Force) {
        const Vec3 movement{axes.h, 0.0, axes.v};
        self.add_force(movement * speed_);
    } else {
        self.add_torque(rolling_drive_torque(axes, roll_torque_));
    }
}

void PickupBehavior::on_trigger_enter(ActorHandle, ActorHandle other) const {
    if (other.compare_tag(kPickUpTag)) other.set_active(false);
}

bool is_known_behavior(std::string_view name) {
    return name == "rotator" || name == "player_controller" || name == "pickup_on_ball";
}

std::unique_ptr<Behavior> make_behavior(std::string_view name, const BehaviorParams& p) {
    if (name == "rotator") return std::make_unique<RotatorBehavior>(p.euler_rates);
    if (name == "player_controller")
        return std::make_unique<PlayerControllerBehavior>(p.drive_mode, p.speed, p.roll_torque);
    if (name == "pickup_on_ball") return std::make_unique<PickupBehavior>();
    throw std::invalid_argument("unknown behavior '" + std::string(name) + "'");
}

void BehaviorScript::on_start(ActorHandle self) const {
    for (const auto& b : behaviors_) b->on_start(self);
}

void BehaviorScript::on_frame(ActorHandle self, double frame_dt, AxisSample) const {
    for (const auto& b : behaviors_) b->on_update(self, frame_dt);
}

void BehaviorScript::on_fixed(ActorHandle self, double fixed_dt, AxisSample axes) const {
    for (const auto& b : behaviors_) b->on_fixed_update(self, fixed_dt, axes);
}

void BehaviorScript::on_begin_overlap(ActorHandle self, ActorId other) const {
    if (!self.scene().contains(other)) return;
    for (const auto& b : behaviors_) b->on_trigger_enter(self, self.other(other));
}

}  // namespace flow::behaviors
