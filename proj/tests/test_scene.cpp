#include <doctest.h>

#include <cmath>

#include "flow/behaviors.hpp"
#include "flow/physics.hpp"
#include "flow/scene.hpp"

using namespace flow;

namespace {

struct CallLog {
    std::vector<std::string> calls;
};

// Records every hook so dispatch order can be asserted.
class Recorder final : public ScriptingPath {
public:
    Recorder(CallLog& log, std::string name) : log_(&log), name_(std::move(name)) {}
    void on_start(ActorHandle) const override { log_->calls.push_back(name_ + ":start"); }
    void on_frame(ActorHandle, double, AxisSample) const override { log_->calls.push_back(name_ + ":frame"); }
    void on_fixed(ActorHandle, double, AxisSample) const override { log_->calls.push_back(name_ + ":fixed"); }
    void on_begin_overlap(ActorHandle, ActorId other) const override {
        log_->calls.push_back(name_ + ":overlap:" + std::to_string(other.value));
    }

private:
    CallLog* log_;
    std::string name_;
};

std::shared_ptr<behaviors::BehaviorScript> script_of(std::unique_ptr<behaviors::Behavior> b) {
    std::vector<std::unique_ptr<behaviors::Behavior>> list;
    list.push_back(std::move(b));
    return std::make_shared<behaviors::BehaviorScript>(std::move(list));
}

}  // namespace

TEST_CASE("the default table has a ball, twelve tagged cubes on a circle and four rails") {
    const Scene s = build_default_scene();
    REQUIRE(s.actors().size() == 17);
    CHECK(s.actor(ActorId{0}).kind == ActorKind::Ball);
    CHECK(s.actor(ActorId{0}).position == Vec3{0, 0.5, 0});
    for (std::uint32_t k = 0; k < 12; ++k) {
        const Actor& c = s.actor(ActorId{k + 1});
        CHECK(c.kind == ActorKind::Cube);
        CHECK(c.tag == std::string(kPickUpTag));
        const double angle = deg_to_rad(30.0 * k);
        CHECK(std::abs(c.position.x - 3 * std::cos(angle)) < 1e-15);
        CHECK(std::abs(c.position.z - 3 * std::sin(angle)) < 1e-15);
        CHECK(c.position.y == 0.75);
        CHECK(c.trigger.has_value());
    }
    for (std::uint32_t k = 13; k < 17; ++k) {
        CHECK(s.actor(ActorId{k}).kind == ActorKind::Rail);
        CHECK_FALSE(s.actor(ActorId{k}).tag.has_value());
    }
    CHECK(s.active_cubes().size() == 12);
    CHECK(s.active_pickup_count() == 12);
}

TEST_CASE("configuration that does not fit the table is rejected") {
    CHECK_THROWS_AS(build_default_scene({.cube_circle_radius = 4.8}), InvalidConfig);
    CHECK_THROWS_AS(build_default_scene({.fixed_dt = 0}), InvalidConfig);
    CHECK_THROWS_AS(build_default_scene({.rail_restitution = 1.5}), InvalidConfig);
    CHECK_THROWS_AS(build_default_scene({.cube_count = 0}), InvalidConfig);
}

TEST_CASE("destroy and script-initiated deactivation are deferred to the end of the step") {
    Scene s = build_default_scene();
    ActorHandle(s, ActorId{3}).destroy();
    ActorHandle(s, ActorId{4}).set_active(false);
    CHECK(s.contains(ActorId{3}));
    CHECK(s.actor(ActorId{4}).active);
    const auto changed = s.flush_removals();
    CHECK(changed == std::vector<ActorId>{ActorId{4}, ActorId{3}});
    CHECK_FALSE(s.contains(ActorId{3}));
    CHECK_FALSE(s.actor(ActorId{4}).active);
    CHECK(s.active_cubes().size() == 10);
    CHECK_THROWS_AS(s.actor(ActorId{3}), UnknownActor);
    // Removal keeps ids stable and ordering intact.
    CHECK(s.actor(ActorId{5}).name == "cube_4");
}

TEST_CASE("deactivation is idempotent") {
    Scene s = build_default_scene();
    s.deactivate(ActorId{2});
    s.deactivate(ActorId{2});
    ActorHandle(s, ActorId{2}).set_active(false);
    CHECK(s.flush_removals().empty());
    CHECK(s.active_cubes().size() == 11);
}

TEST_CASE("events reach scripts in a fixed order") {
    Scene s = build_default_scene();
    CallLog log;
    s.attach(ActorId{2}, ScriptKind::Behavior, std::make_shared<Recorder>(log, "c2"));
    s.attach(ActorId{0}, ScriptKind::Behavior, std::make_shared<Recorder>(log, "ball"));
    s.attach(ActorId{1}, ScriptKind::Behavior, std::make_shared<Recorder>(log, "c1"));
    s.dispatch_start();
    s.dispatch_frame_events(0.02, {});
    physics::step(s, {});
    s.dispatch_begin_overlap(ActorId{1}, ActorId{0});
    CHECK(log.calls == std::vector<std::string>{"ball:start", "c1:start", "c2:start", "ball:frame", "c1:frame",
                                                "c2:frame", "ball:fixed", "c1:fixed", "c2:fixed",
                                                "c1:overlap:0", "ball:overlap:1"});
}

TEST_CASE("inactive actors receive no events") {
    Scene s = build_default_scene();
    CallLog log;
    s.attach(ActorId{1}, ScriptKind::Behavior, std::make_shared<Recorder>(log, "c1"));
    s.deactivate(ActorId{1});
    s.dispatch_frame_events(0.02, {});
    s.dispatch_begin_overlap(ActorId{1}, ActorId{0});
    CHECK(log.calls.empty());
}

TEST_CASE("the rotator applies rates times dt as one world delta") {
    Scene s = build_default_scene();
    const ActorId cube{1};
    s.attach(cube, ScriptKind::Behavior, script_of(std::make_unique<behaviors::RotatorBehavior>()));
    s.dispatch_frame_events(0.02, {});
    const Orientation expected = rotator_to_orientation({0.3, 0.6, 0.9});
    const Orientation got = s.actor(cube).orientation;
    CHECK(rad_to_deg(geodesic_angle(got, expected)) < 1e-12);

    Scene still = build_default_scene();
    still.attach(cube, ScriptKind::Behavior,
                 script_of(std::make_unique<behaviors::RotatorBehavior>(Rotator{0, 0, 0})));
    for (int i = 0; i < 10; ++i) still.dispatch_frame_events(0.02, {});
    CHECK(still.actor(cube).orientation == Orientation::identity());
}

TEST_CASE("player controller: force in force mode, nothing when idle") {
    Scene s = build_default_scene();
    const ActorId ball{0};
    s.attach(ball, ScriptKind::Behavior,
             script_of(std::make_unique<behaviors::PlayerControllerBehavior>(DriveMode::Force, 10, 50)));
    s.dispatch_fixed_events(0.02, {1, 0});
    CHECK(s.actor(ball).body->accumulated_force == Vec3{10, 0, 0});
    s.actor(ball).body->accumulated_force = {};
    s.dispatch_fixed_events(0.02, {0, 0});
    CHECK(s.actor(ball).body->accumulated_force == Vec3{});
    CHECK(s.actor(ball).body->accumulated_torque == Vec3{});
    // Update does not touch physics.
    s.dispatch_frame_events(0.02, {1, 1});
    CHECK(s.actor(ball).body->accumulated_force == Vec3{});
}

TEST_CASE("pickup deactivates tagged actors only, idempotently") {
    Scene s = build_default_scene();
    const ActorId ball{0};
    s.attach(ball, ScriptKind::Behavior, script_of(std::make_unique<behaviors::PickupBehavior>()));
    s.dispatch_begin_overlap(ball, ActorId{13});  // rail, untagged
    CHECK(s.flush_removals().empty());
    CHECK(s.actor(ActorId{13}).active);

    s.dispatch_begin_overlap(ball, ActorId{5});
    CHECK(s.flush_removals() == std::vector<ActorId>{ActorId{5}});
    CHECK_FALSE(s.actor(ActorId{5}).active);

    s.dispatch_begin_overlap(ball, ActorId{5});  // ball is active, cube is not: handler runs, no change
    CHECK(s.flush_removals().empty());
}

TEST_CASE("forces on bodiless actors are ignored") {
    Scene s = build_default_scene();
    ActorHandle(s, ActorId{1}).add_force({1, 2, 3});
    ActorHandle(s, ActorId{1}).add_torque({1, 2, 3});
    CHECK_FALSE(s.actor(ActorId{1}).body.has_value());
}
