#include "flow/scene.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace flow {

std::string_view to_string(ActorKind kind) {
    switch (kind) {
        case ActorKind::Ball: return "ball";
        case ActorKind::Cube: return "cube";
        case ActorKind::Rail: return "rail";
    }
    return "?";
}

std::string_view to_string(DriveMode mode) {
    return mode == DriveMode::Force ? "force" : "torque_rolling";
}

UnknownActor::UnknownActor(ActorId actor)
    : std::runtime_error("unknown actor " + std::to_string(actor.value)), id(actor) {}

ActorId Scene::spawn(Actor actor) {
    actor.id = ActorId{next_id_++};
    actors_.push_back(std::move(actor));
    return actors_.back().id;
}

std::size_t Scene::index_of(ActorId id) const {
    // Ids are assigned monotonically and removal preserves order, so the vector stays sorted.
    const auto it = std::lower_bound(actors_.begin(), actors_.end(), id,
                                     [](const Actor& a, ActorId v) { return a.id < v; });
    if (it == actors_.end() || it->id != id) return actors_.size();
    return static_cast<std::size_t>(it - actors_.begin());
}

bool Scene::contains(ActorId id) const { return index_of(id) != actors_.size(); }

Actor& Scene::actor(ActorId id) {
    const std::size_t i = index_of(id);
    if (i == actors_.size()) throw UnknownActor(id);
    return actors_[i];
}

const Actor& Scene::actor(ActorId id) const {
    const std::size_t i = index_of(id);
    if (i == actors_.size()) throw UnknownActor(id);
    return actors_[i];
}

std::optional<ActorId> Scene::find(std::string_view name) const {
    for (const Actor& a : actors_)
        if (a.name == name) return a.id;
    return std::nullopt;
}

void Scene::attach(ActorId id, ScriptKind kind, std::shared_ptr<const ScriptingPath> script) {
    Actor& a = actor(id);
    a.script_kind = script ? kind : ScriptKind::None;
    a.script = std::move(script);
}

void Scene::deactivate(ActorId id) { actor(id).active = false; }

void Scene::destroy(ActorId id) {
    actor(id);  // throws UnknownActor
    if (std::find(pending_destroy_.begin(), pending_destroy_.end(), id) == pending_destroy_.end())
        pending_destroy_.push_back(id);
}

void Scene::request_deactivate(ActorId id) {
    actor(id);
    if (std::find(pending_deactivate_.begin(), pending_deactivate_.end(), id) ==
        pending_deactivate_.end())
        pending_deactivate_.push_back(id);
}

std::vector<ActorId> Scene::flush_removals() {
    std::vector<ActorId> changed;
    for (ActorId id : pending_deactivate_) {
        const std::size_t i = index_of(id);
        if (i == actors_.size() || !actors_[i].active) continue;
        actors_[i].active = false;
        changed.push_back(id);
    }
    pending_deactivate_.clear();
    for (ActorId id : pending_destroy_) {
        const std::size_t i = index_of(id);
        if (i == actors_.size()) continue;
        if (actors_[i].active &&
            std::find(changed.begin(), changed.end(), id) == changed.end())
            changed.push_back(id);
        actors_.erase(actors_.begin() + static_cast<std::ptrdiff_t>(i));
        std::erase_if(overlapping_, [id](const auto& p) { return p.first == id || p.second == id; });
        std::erase_if(contacts_, [id](const auto& p) { return p.first == id || p.second == id; });
    }
    pending_destroy_.clear();
    return changed;
}

std::size_t Scene::active_pickup_count() const {
    return static_cast<std::size_t>(std::count_if(actors_.begin(), actors_.end(), [](const Actor& a) {
        return a.active && a.tag && *a.tag == kPickUpTag;
    }));
}

std::vector<ActorId> Scene::active_cubes() const {
    std::vector<ActorId> ids;
    for (const Actor& a : actors_)
        if (a.active && a.kind == ActorKind::Cube) ids.push_back(a.id);
    return ids;
}

void Scene::log(DispatchKind kind, ActorId id) {
    if (log_dispatch_) dispatch_log_.push_back({step_index_, kind, id});
}

std::vector<ActorId> Scene::active_scripted_ids() const {
    std::vector<ActorId> ids;
    for (const Actor& a : actors_)
        if (a.active && a.script) ids.push_back(a.id);
    return ids;
}

void Scene::dispatch_start() {
    for (ActorId id : active_scripted_ids()) {
        const Actor& a = actor(id);
        log(DispatchKind::Start, id);
        a.script->on_start(ActorHandle(*this, id));
    }
}

void Scene::dispatch_frame_events(double frame_dt, AxisSample axes) {
    for (ActorId id : active_scripted_ids()) {
        if (!contains(id) || !actor(id).active) continue;
        // Hold a reference: the handler may not remove the actor mid-dispatch, but be explicit.
        const auto script = actor(id).script;
        log(DispatchKind::InputAxis, id);
        log(DispatchKind::Tick, id);
        script->on_frame(ActorHandle(*this, id), frame_dt, axes);
    }
}

void Scene::dispatch_fixed_events(double fixed_dt, AxisSample axes) {
    for (ActorId id : active_scripted_ids()) {
        if (!contains(id) || !actor(id).active) continue;
        const auto script = actor(id).script;
        log(DispatchKind::FixedTick, id);
        script->on_fixed(ActorHandle(*this, id), fixed_dt, axes);
    }
}

void Scene::dispatch_begin_overlap(ActorId first, ActorId second) {
    for (auto [self, other] : {std::pair{first, second}, std::pair{second, first}}) {
        if (!contains(self)) continue;
        const Actor& a = actor(self);
        if (!a.active || !a.script) continue;
        const auto script = a.script;
        log(DispatchKind::BeginOverlap, self);
        script->on_begin_overlap(ActorHandle(*this, self), other);
    }
}

void ActorHandle::rotate_world(const Rotator& delta) const {
    Actor& a = scene_->actor(id_);
    a.orientation = compose(rotator_to_orientation(delta), a.orientation);
}

void ActorHandle::add_force(const Vec3& f) const {
    Actor& a = scene_->actor(id_);
    if (a.body) a.body->accumulated_force += f;
}

void ActorHandle::add_torque(const Vec3& t) const {
    Actor& a = scene_->actor(id_);
    if (a.body) a.body->accumulated_torque += t;
}

void ActorHandle::set_active(bool active) const {
    if (!active) {
        scene_->request_deactivate(id_);
    } else {
        scene_->actor(id_).active = true;
    }
}

void ActorHandle::destroy() const { scene_->destroy(id_); }

std::optional<std::string> ActorHandle::tag_of() const { return scene_->actor(id_).tag; }

bool ActorHandle::compare_tag(std::string_view tag) const {
    const auto& t = scene_->actor(id_).tag;
    return t && *t == tag;
}

void validate_config(const SceneConfig& c) {
    auto positive = [](double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw InvalidConfig(std::string(what) + " must be positive");
    };
    positive(c.table_size, "table_size");
    positive(c.rail_thickness, "rail_thickness");
    positive(c.rail_height, "rail_height");
    positive(c.cube_circle_radius, "cube_circle_radius");
    positive(c.cube_edge, "cube_edge");
    positive(c.ball_radius, "ball_radius");
    positive(c.ball_mass, "ball_mass");
    positive(c.fixed_dt, "fixed_dt");
    if (c.cube_hover < 0.0 || !std::isfinite(c.cube_hover))
        throw InvalidConfig("cube_hover must be non-negative");
    if (c.cube_count <= 0) throw InvalidConfig("cube_count must be positive");
    if (c.rail_restitution < 0.0 || c.rail_restitution > 1.0)
        throw InvalidConfig("rail_restitution must lie in [0, 1]");
    const double half = 0.5 * c.table_size;
    if (c.cube_circle_radius + 0.5 * c.cube_edge > half)
        throw InvalidConfig("cube circle does not fit inside the rails");
    if (c.ball_radius >= half) throw InvalidConfig("ball does not fit on the table");
}

Scene build_default_scene(const SceneConfig& c) {
    validate_config(c);
    Scene scene(c.fixed_dt);

    Actor ball;
    ball.name = "ball";
    ball.kind = ActorKind::Ball;
    ball.position = {0.0, c.ball_radius, 0.0};
    ball.body = RigidBody{};
    ball.body->mass = c.ball_mass;
    ball.body->drive_mode = c.drive_mode;
    scene.spawn(std::move(ball));

    const double half_edge = 0.5 * c.cube_edge;
    for (int k = 0; k < c.cube_count; ++k) {
        const double angle = deg_to_rad(360.0 * k / c.cube_count);
        Actor cube;
        cube.name = "cube_" + std::to_string(k);
        cube.kind = ActorKind::Cube;
        cube.tag = std::string(kPickUpTag);
        cube.position = {c.cube_circle_radius * std::cos(angle), c.cube_hover + half_edge,
                         c.cube_circle_radius * std::sin(angle)};
        cube.trigger = TriggerVolume{{half_edge, half_edge, half_edge}};
        scene.spawn(std::move(cube));
    }

    const double half = 0.5 * c.table_size;
    const double t = 0.5 * c.rail_thickness;
    const double h = 0.5 * c.rail_height;
    const double span = half + c.rail_thickness;
    struct RailSpec {
        const char* name;
        Vec3 center;
        Vec3 half_extents;
    };
    const RailSpec rails[] = {
        {"rail_east", {half + t, h, 0.0}, {t, h, span}},
        {"rail_west", {-(half + t), h, 0.0}, {t, h, span}},
        {"rail_north", {0.0, h, half + t}, {span, h, t}},
        {"rail_south", {0.0, h, -(half + t)}, {span, h, t}},
    };
    for (const RailSpec& r : rails) {
        Actor rail;
        rail.name = r.name;
        rail.kind = ActorKind::Rail;
        rail.position = r.center;
        rail.solid = SolidVolume{r.half_extents, c.rail_restitution};
        scene.spawn(std::move(rail));
    }
    return scene;
}

}  // namespace flow
