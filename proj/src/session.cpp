#include "flow/session.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace flow::service {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json vec_json(const Vec3& v) { return ordered_json::array({v.x, v.y, v.z}); }
ordered_json quat_json(const Orientation& q) { return ordered_json::array({q.w, q.x, q.y, q.z}); }

}  // namespace

std::string state_frame(const harness::StepRecord& r, const Scene& scene) {
    ordered_json j;
    j["type"] = "state";
    j["step"] = r.step;
    j["t"] = r.t;
    if (r.ball)
        j["ball"] = {{"p", vec_json(r.ball->position)}, {"q", quat_json(r.ball->orientation)}};
    else
        j["ball"] = nullptr;
    ordered_json cubes = ordered_json::array();
    for (const Actor& a : scene.actors()) {
        if (a.kind != ActorKind::Cube) continue;
        cubes.push_back({{"id", a.id.value}, {"p", vec_json(a.position)}, {"q", quat_json(a.orientation)},
                         {"active", a.active}});
    }
    j["cubes"] = std::move(cubes);
    j["remaining"] = r.active_cubes.size();
    j["won"] = r.won;
    return j.dump();
}

Session::Session(SessionConfig config) : config_(std::move(config)) { rebuild(); }

void Session::rebuild() {
    sim_ = std::make_unique<harness::Simulation>(load_scene(config_.scene_file, config_.mode), config_.mode);
    recorded_.clear();
    held_ = {};
    faulted_ = false;
    if (config_.record_file) {
        record_out_.emplace(*config_.record_file, std::ios::binary | std::ios::trunc);
        if (!*record_out_) throw std::runtime_error("cannot write '" + config_.record_file->string() + "'");
    }
}

std::string Session::welcome_frame() const {
    ordered_json layout;
    const auto& cfg = sim_->physics();
    layout["fixed_dt"] = cfg.fixed_dt;
    layout["ball_radius"] = cfg.ball_radius;
    layout["mode"] = std::string(to_string(config_.mode));
    layout["scene_hash"] = sim_->header().scene_hash;
    ordered_json actors = ordered_json::array();
    for (const Actor& a : sim_->scene().actors()) {
        ordered_json o;
        o["id"] = a.id.value;
        o["name"] = a.name;
        o["kind"] = std::string(to_string(a.kind));
        o["tag"] = a.tag ? ordered_json(*a.tag) : ordered_json(nullptr);
        o["p"] = vec_json(a.position);
        o["q"] = quat_json(a.orientation);
        if (a.trigger) o["half_extents"] = vec_json(a.trigger->half_extents);
        if (a.solid) o["half_extents"] = vec_json(a.solid->half_extents);
        if (a.kind == ActorKind::Ball) o["radius"] = cfg.ball_radius;
        actors.push_back(std::move(o));
    }
    layout["actors"] = std::move(actors);
    ordered_json j;
    j["type"] = "welcome";
    j["proto"] = kProtocol;
    j["scene"] = std::move(layout);
    return j.dump();
}

std::string Session::error(std::string_view code, std::string_view message) {
    ordered_json j;
    j["type"] = "error";
    j["code"] = code;
    j["message"] = message;
    return j.dump();
}

std::string Session::malformed(std::string_view message) {
    ++malformed_;
    return error("Malformed", message);
}

std::vector<std::string> Session::on_message(std::string_view frame, bool text) {
    if (!text) return {malformed("binary frames are not part of the protocol")};
    json j = json::parse(frame, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) return {malformed("frame is not a JSON object")};
    if (!j.contains("type") || !j["type"].is_string()) return {malformed("missing string field \"type\"")};
    const std::string type = j["type"].get<std::string>();

    if (type == "hello") {
        if (greeted_) return {error("DuplicateHello", "session already greeted")};
        if (!j.contains("proto") || j["proto"] != kProtocol)
            return {error("UnsupportedProtocol", "expected proto \"flow/1\"")};
        greeted_ = true;
        return {welcome_frame()};
    }
    if (type != "input" && type != "restart" && type != "mode")
        return {error("UnknownType", "unknown message type \"" + type + "\"")};
    if (!greeted_) return {error("HelloRequired", "send hello first")};

    if (type == "input") {
        AxisSample next;
        for (auto [key, dst] : {std::pair{"h", &next.h}, std::pair{"v", &next.v}}) {
            if (!j.contains(key) || !j[key].is_number())
                return {malformed(std::string("input needs numeric \"") + key + "\"")};
            const double x = j[key].get<double>();
            if (!std::isfinite(x)) return {malformed("input values must be finite")};
            *dst = std::clamp(x, -1.0, 1.0);
        }
        held_ = next;
        return {};
    }
    if (type == "restart") {
        rebuild();
        return {welcome_frame()};
    }
    // mode
    if (!j.contains("value") || !j["value"].is_string()) return {malformed("mode needs string \"value\"")};
    const auto mode = parse_mode(j["value"].get<std::string>());
    if (!mode) return {error("BadValue", "mode must be \"graph\" or \"script\"")};
    config_.mode = *mode;
    rebuild();
    return {welcome_frame()};
}

std::optional<std::string> Session::tick() {
    if (!greeted_ || faulted_ || should_close() || sim_->won()) return std::nullopt;
    const std::int64_t index = sim_->scene().step_index();
    if (held_.h != 0.0 || held_.v != 0.0) {
        harness::TraceRecord rec{index, held_.h, held_.v};
        recorded_.push_back(rec);
        if (record_out_) {
            *record_out_ << harness::format_trace_record(rec) << '\n';
            record_out_->flush();
        }
    }
    try {
        const harness::StepRecord r = sim_->advance(held_);
        return state_frame(r, sim_->scene());
    } catch (const harness::RunFault& f) {
        faulted_ = true;
        return error("RuntimeFault", f.what());
    }
}

}  // namespace flow::service
