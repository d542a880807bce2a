#include "flow/scene_file.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "flow/graph.hpp"
#include "flow/graphlang.hpp"

namespace flow {

using nlohmann::json;

std::string_view to_string(ScriptingMode mode) { return mode == ScriptingMode::Graph ? "graph" : "script"; }

std::optional<ScriptingMode> parse_mode(std::string_view text) {
    if (text == "graph") return ScriptingMode::Graph;
    if (text == "script") return ScriptingMode::Script;
    return std::nullopt;
}

std::string FileDiagnostic::format() const {
    if (span) return graphlang::format_diagnostic(file, code, message, *span);
    return file + ": error[" + code + "]: " + message;
}

namespace {

std::string join_messages(const std::vector<FileDiagnostic>& diags) {
    std::string out;
    for (const auto& d : diags) {
        if (!out.empty()) out += '\n';
        out += d.format();
    }
    return out;
}

}  // namespace

SceneValidationError::SceneValidationError(std::vector<FileDiagnostic> diags)
    : std::runtime_error(join_messages(diags)), diagnostics(std::move(diags)) {}

std::string read_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + file.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<FileDiagnostic> check_graph_source(std::string_view source, std::string_view name) {
    std::vector<FileDiagnostic> out;
    const auto parsed = graphlang::parse(source);
    for (const auto& d : parsed.diagnostics)
        out.push_back({std::string(name), d.code, d.message, d.span});
    if (!parsed.ok()) return out;
    for (const auto& d : graph::validate(parsed.graph))
        out.push_back({std::string(name), std::string(graph::to_string(d.code)), d.message, d.span});
    return out;
}

namespace {

class SceneReader {
public:
    SceneReader(std::filesystem::path base, ScriptingMode mode, std::string name)
        : base_(std::move(base)), mode_(mode), name_(std::move(name)) {}

    LoadedScene read(std::string_view text, std::optional<double> dt_override) {
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            fail("SceneSyntax", e.what());
        }
        if (!doc.is_object()) fail("SceneSchema", "scene document must be an object");
        allow(doc, "", {"format", "config", "actors"});
        if (!doc.contains("format") || doc["format"] != "scene/1")
            fail("SceneSchema", "\"format\" must be \"scene/1\"");

        LoadedScene out;
        if (doc.contains("config")) {
            const json& c = doc["config"];
            if (!c.is_object()) fail("SceneSchema", "\"config\" must be an object");
            allow(c, "config", {"fixed_dt", "ball_radius", "rolling_inertia_factor"});
            out.physics.fixed_dt = positive(c, "fixed_dt", out.physics.fixed_dt, "config");
            out.physics.ball_radius = positive(c, "ball_radius", out.physics.ball_radius, "config");
            out.physics.rolling_inertia_factor =
                positive(c, "rolling_inertia_factor", out.physics.rolling_inertia_factor, "config");
        }
        if (dt_override) {
            if (!(*dt_override > 0.0)) fail("SceneSchema", "fixed_dt must be positive");
            out.physics.fixed_dt = *dt_override;
        }
        out.scene = Scene(out.physics.fixed_dt);

        if (!doc.contains("actors") || !doc["actors"].is_array())
            fail("SceneSchema", "\"actors\" must be an array");
        std::uint64_t hash = fnv1a(doc.dump());
        std::set<std::string> names;
        for (const json& a : doc["actors"]) read_actor(a, out, names);

        if (!diagnostics_.empty()) throw SceneValidationError(std::move(diagnostics_));
        for (const auto& [path, text_hash] : graph_hashes_) hash = fnv1a(text_hash, hash);
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
        out.hash = buf;
        return out;
    }

private:
    [[noreturn]] void fail(std::string code, std::string message) {
        diagnostics_.push_back({name_, std::move(code), std::move(message), std::nullopt});
        throw SceneValidationError(std::move(diagnostics_));
    }

    void allow(const json& obj, std::string_view where, std::initializer_list<std::string_view> keys) {
        for (const auto& [key, _] : obj.items()) {
            bool ok = false;
            for (auto k : keys) ok = ok || k == key;
            if (!ok)
                fail("SceneSchema", "unknown field \"" + key + "\"" +
                                        (where.empty() ? std::string() : " in " + std::string(where)));
        }
    }

    double number(const json& obj, const char* key, double fallback, std::string_view where) {
        if (!obj.contains(key)) return fallback;
        if (!obj[key].is_number())
            fail("SceneSchema", std::string(where) + "." + key + " must be a number");
        return obj[key].get<double>();
    }

    double positive(const json& obj, const char* key, double fallback, std::string_view where) {
        const double v = number(obj, key, fallback, where);
        if (!(v > 0.0)) fail("SceneSchema", std::string(where) + "." + key + " must be positive");
        return v;
    }

    Vec3 vec3(const json& obj, const char* key, std::optional<Vec3> fallback, std::string_view where) {
        if (!obj.contains(key)) {
            if (fallback) return *fallback;
            fail("SceneSchema", std::string(where) + " needs \"" + key + "\"");
        }
        const json& v = obj[key];
        if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number())
            fail("SceneSchema", std::string(where) + "." + key + " must be [x, y, z]");
        return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
    }

    std::vector<std::string> names_list(const json& obj, const char* key, std::string_view where) {
        std::vector<std::string> out;
        if (!obj.contains(key) || obj[key].is_null()) return out;
        const json& v = obj[key];
        auto add = [&](const json& s) {
            if (!s.is_string()) fail("SceneSchema", std::string(where) + "." + key + " must hold strings");
            if (s != "none") out.push_back(s.get<std::string>());
        };
        if (v.is_array()) for (const json& s : v) add(s);
        else add(v);
        return out;
    }

    std::shared_ptr<const graph::GraphRuntime> load_graph(const std::string& rel) {
        const std::filesystem::path path = base_ / rel;
        const std::string key = path.lexically_normal().string();
        if (const auto it = graphs_.find(key); it != graphs_.end()) return it->second;
        std::string text;
        try {
            text = read_file(path);
        } catch (const std::exception& e) {
            diagnostics_.push_back({key, "MissingGraph", e.what(), std::nullopt});
            return nullptr;
        }
        auto diags = check_graph_source(text, key);
        if (!diags.empty()) {
            diagnostics_.insert(diagnostics_.end(), diags.begin(), diags.end());
            graphs_[key] = nullptr;
            return nullptr;
        }
        auto parsed = graphlang::parse(text);
        graph_hashes_[key] = graphlang::serialize(parsed.graph);
        auto rt = std::make_shared<const graph::GraphRuntime>(std::move(parsed.graph));
        graphs_[key] = rt;
        return rt;
    }

    void read_actor(const json& a, LoadedScene& out, std::set<std::string>& names) {
        if (!a.is_object()) fail("SceneSchema", "actor entries must be objects");
        allow(a, "actor", {"name", "kind", "tag", "position", "half_extents", "restitution", "mass",
                           "drive_mode", "active", "script", "graph", "params"});
        if (!a.contains("name") || !a["name"].is_string()) fail("SceneSchema", "actor needs a \"name\"");
        const std::string name = a["name"];
        const std::string where = "actor '" + name + "'";
        if (!names.insert(name).second) fail("SceneSchema", "duplicate actor name '" + name + "'");

        Actor actor;
        actor.name = name;
        const std::string kind = a.value("kind", "");
        if (kind == "ball") actor.kind = ActorKind::Ball;
        else if (kind == "cube") actor.kind = ActorKind::Cube;
        else if (kind == "rail") actor.kind = ActorKind::Rail;
        else fail("SceneSchema", where + ": \"kind\" must be ball, cube or rail");

        if (a.contains("tag") && !a["tag"].is_null()) {
            if (!a["tag"].is_string()) fail("SceneSchema", where + ": \"tag\" must be a string");
            actor.tag = a["tag"].get<std::string>();
        }
        if (a.contains("active")) {
            if (!a["active"].is_boolean()) fail("SceneSchema", where + ": \"active\" must be a boolean");
            actor.active = a["active"];
        }
        actor.position = vec3(a, "position", std::nullopt, where);

        behaviors::BehaviorParams params;
        if (a.contains("params")) {
            const json& p = a["params"];
            if (!p.is_object()) fail("SceneSchema", where + ": \"params\" must be an object");
            allow(p, where + ".params", {"euler_rates", "speed", "roll_torque"});
            const Vec3 r = vec3(p, "euler_rates", Vec3{params.euler_rates.roll, params.euler_rates.pitch,
                                                       params.euler_rates.yaw},
                                where + ".params");
            params.euler_rates = {r.x, r.y, r.z};
            params.speed = number(p, "speed", params.speed, where + ".params");
            params.roll_torque = number(p, "roll_torque", params.roll_torque, where + ".params");
        }

        switch (actor.kind) {
            case ActorKind::Ball: {
                RigidBody body;
                body.mass = positive(a, "mass", 1.0, where);
                const std::string drive = a.value("drive_mode", "force");
                if (drive == "force") body.drive_mode = DriveMode::Force;
                else if (drive == "torque_rolling") body.drive_mode = DriveMode::TorqueRolling;
                else fail("SceneSchema", where + ": \"drive_mode\" must be force or torque_rolling");
                params.drive_mode = body.drive_mode;
                actor.body = body;
                actor.position.y = out.physics.ball_radius;
                out.ball_params = params;
                break;
            }
            case ActorKind::Cube: {
                const Vec3 h = vec3(a, "half_extents", Vec3{0.5, 0.5, 0.5}, where);
                if (!(h.x > 0 && h.y > 0 && h.z > 0))
                    fail("SceneSchema", where + ": half_extents must be positive");
                actor.trigger = TriggerVolume{h};
                break;
            }
            case ActorKind::Rail: {
                const Vec3 h = vec3(a, "half_extents", std::nullopt, where);
                if (!(h.x > 0 && h.y > 0 && h.z > 0))
                    fail("SceneSchema", where + ": half_extents must be positive");
                const double e = number(a, "restitution", 1.0, where);
                if (e < 0.0 || e > 1.0) fail("SceneSchema", where + ": restitution must lie in [0, 1]");
                actor.solid = SolidVolume{h, e};
                break;
            }
        }

        const auto scripts = names_list(a, "script", where);
        const auto graphs = names_list(a, "graph", where);
        for (const auto& s : scripts)
            if (!behaviors::is_known_behavior(s))
                fail("UnknownBehavior", where + ": unknown behavior '" + s + "'");
        if (scripts.empty() != graphs.empty()) out.paired = false;

        const ActorId id = out.scene.spawn(std::move(actor));
        if (mode_ == ScriptingMode::Graph && !graphs.empty()) {
            std::vector<std::shared_ptr<const graph::GraphRuntime>> runtimes;
            for (const auto& g : graphs)
                if (auto rt = load_graph(g)) runtimes.push_back(std::move(rt));
            if (runtimes.size() == graphs.size())
                out.scene.attach(id, ScriptKind::Graph, std::make_shared<graph::GraphScript>(std::move(runtimes)));
        } else if (mode_ == ScriptingMode::Script && !scripts.empty()) {
            std::vector<std::unique_ptr<behaviors::Behavior>> list;
            for (const auto& s : scripts) list.push_back(behaviors::make_behavior(s, params));
            out.scene.attach(id, ScriptKind::Behavior,
                             std::make_shared<behaviors::BehaviorScript>(std::move(list)));
        }
        // Graphs are hashed in both modes so the header identifies the same scene content.
        if (mode_ == ScriptingMode::Script)
            for (const auto& g : graphs) load_graph(g);
    }

    std::filesystem::path base_;
    ScriptingMode mode_;
    std::string name_;
    std::vector<FileDiagnostic> diagnostics_;
    std::map<std::string, std::shared_ptr<const graph::GraphRuntime>> graphs_;
    std::map<std::string, std::string> graph_hashes_;
};

}  // namespace

LoadedScene load_scene_text(std::string_view text, const std::filesystem::path& base_dir,
                            ScriptingMode mode, std::optional<double> dt_override,
                            std::string_view display_name) {
    return SceneReader(base_dir, mode, std::string(display_name)).read(text, dt_override);
}

LoadedScene load_scene(const std::filesystem::path& file, ScriptingMode mode,
                       std::optional<double> dt_override) {
    std::string text;
    try {
        text = read_file(file);
    } catch (const std::exception& e) {
        throw SceneValidationError({{file.string(), "MissingScene", e.what(), std::nullopt}});
    }
    return load_scene_text(text, file.parent_path(), mode, dt_override, file.string());
}

}  // namespace flow
