#include "flow/harness.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <map>

#include <json.hpp>

#include "flow/behaviors.hpp"

namespace flow::harness {

using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Input traces

InputTrace::InputTrace(std::vector<TraceRecord> records) : records_(std::move(records)) {
    for (std::size_t i = 0; i < records_.size(); ++i) {
        TraceRecord& r = records_[i];
        if (r.step < 0) throw std::invalid_argument("trace step must be non-negative");
        if (i > 0 && r.step <= records_[i - 1].step)
            throw std::invalid_argument("trace steps must be strictly increasing");
        if (!std::isfinite(r.h) || !std::isfinite(r.v))
            throw std::invalid_argument("trace values must be finite");
        r.h = std::clamp(r.h, -1.0, 1.0);
        r.v = std::clamp(r.v, -1.0, 1.0);
    }
}

AxisSample InputTrace::at(std::int64_t step) const {
    const auto it = std::lower_bound(records_.begin(), records_.end(), step,
                                     [](const TraceRecord& r, std::int64_t s) { return r.step < s; });
    if (it == records_.end() || it->step != step) return {};
    return {it->h, it->v};
}

InputTrace parse_trace(std::string_view text) {
    std::vector<TraceRecord> records;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const std::size_t nl = text.find('\n');
        const std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        const std::string where = "trace line " + std::to_string(line_no) + ": ";
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw TraceFormatError(where + e.what());
        }
        if (!j.is_object() || !j.contains("step") || !j["step"].is_number_integer())
            throw TraceFormatError(where + "expected {\"step\":k,\"h\":x,\"v\":y}");
        for (const auto& [key, _] : j.items())
            if (key != "step" && key != "h" && key != "v")
                throw TraceFormatError(where + "unknown field \"" + key + "\"");
        TraceRecord r;
        r.step = j["step"].get<std::int64_t>();
        for (auto [key, dst] : {std::pair{"h", &r.h}, std::pair{"v", &r.v}}) {
            if (!j.contains(key) || !j[key].is_number())
                throw TraceFormatError(where + "\"" + key + "\" must be a number");
            *dst = j[key].get<double>();
        }
        records.push_back(r);
    }
    try {
        return InputTrace(std::move(records));
    } catch (const std::invalid_argument& e) {
        throw TraceFormatError(e.what());
    }
}

InputTrace load_trace(const std::filesystem::path& file) { return parse_trace(read_file(file)); }

std::string format_trace_record(const TraceRecord& r) {
    ordered_json j;
    j["step"] = r.step;
    j["h"] = r.h;
    j["v"] = r.v;
    return j.dump();
}

std::string format_trace(const InputTrace& trace) {
    std::string out;
    for (const auto& r : trace.records()) out += format_trace_record(r) + '\n';
    return out;
}

// ---------------------------------------------------------------------------
// Trajectory serialization

namespace {

ordered_json vec_json(const Vec3& v) { return ordered_json::array({v.x, v.y, v.z}); }
ordered_json quat_json(const Orientation& q) { return ordered_json::array({q.w, q.x, q.y, q.z}); }

}  // namespace

std::string header_json(const TrajectoryHeader& h) {
    ordered_json j;
    j["format"] = "traj/1";
    j["fixed_dt"] = h.fixed_dt;
    j["scene_hash"] = h.scene_hash;
    j["mode"] = std::string(to_string(h.mode));
    return j.dump();
}

std::string record_json(const StepRecord& r) {
    ordered_json j;
    j["step"] = r.step;
    j["t"] = r.t;
    if (r.ball) {
        j["ball"] = {{"position", vec_json(r.ball->position)},
                     {"orientation", quat_json(r.ball->orientation)},
                     {"velocity", vec_json(r.ball->velocity)},
                     {"angular_velocity", vec_json(r.ball->angular_velocity)}};
    } else {
        j["ball"] = nullptr;
    }
    ordered_json cubes = ordered_json::array();
    for (const auto& c : r.cubes)
        cubes.push_back({{"id", c.id.value}, {"position", vec_json(c.position)},
                         {"orientation", quat_json(c.orientation)}});
    j["cubes"] = std::move(cubes);
    ordered_json active = ordered_json::array();
    for (ActorId id : r.active_cubes) active.push_back(id.value);
    j["active_cubes"] = std::move(active);
    ordered_json events = ordered_json::array();
    for (const auto& e : r.events) events.push_back({{"kind", e.kind}, {"actor", e.actor.value}});
    j["events"] = std::move(events);
    j["won"] = r.won;
    return j.dump();
}

std::string to_jsonl(const Trajectory& t) {
    std::string out = header_json(t.header) + '\n';
    for (const auto& r : t.steps) out += record_json(r) + '\n';
    return out;
}

// ---------------------------------------------------------------------------
// Simulation

RunFault::RunFault(std::int64_t s, RuntimeFault f)
    : std::runtime_error("runtime fault at step " + std::to_string(s) + " in node '" + f.node_id +
                         "': " + f.message),
      step(s),
      fault(std::move(f)) {}

Simulation::Simulation(LoadedScene loaded, ScriptingMode mode)
    : scene_(std::move(loaded.scene)),
      physics_(loaded.physics),
      ball_params_(loaded.ball_params),
      hash_(std::move(loaded.hash)),
      mode_(mode) {
    scene_.set_fixed_dt(physics_.fixed_dt);
    scene_.dispatch_start();
    won_ = scene_.active_cubes().empty();
}

TrajectoryHeader Simulation::header() const { return {physics_.fixed_dt, hash_, mode_}; }

StepRecord Simulation::snapshot() const {
    StepRecord r;
    r.step = scene_.step_index();
    r.t = scene_.elapsed();
    for (const Actor& a : scene_.actors()) {
        if (a.kind == ActorKind::Ball && a.body && !r.ball)
            r.ball = BallState{a.position, a.orientation, a.body->velocity, a.body->angular_velocity};
        if (a.kind == ActorKind::Cube && a.active) {
            r.cubes.push_back({a.id, a.position, a.orientation});
            r.active_cubes.push_back(a.id);
        }
    }
    r.won = won_;
    return r;
}

StepRecord Simulation::advance(AxisSample axes) {
    axes.h = std::clamp(axes.h, -1.0, 1.0);
    axes.v = std::clamp(axes.v, -1.0, 1.0);
    const double dt = physics_.fixed_dt;
    std::vector<TrajectoryEvent> events;

    scene_.dispatch_frame_events(dt, axes);
    const physics::StepResult result = physics::step(scene_, physics_, axes);
    for (const auto& o : result.overlaps) {
        events.push_back({"overlap", o.trigger_owner});
        scene_.dispatch_begin_overlap(o.trigger_owner, o.other);
    }
    for (const auto& c : result.contacts) {
        events.push_back({"contact", c.solid_owner});
        scene_.dispatch_begin_overlap(c.solid_owner, c.other);
    }
    std::map<ActorId, ActorKind> kinds;
    for (const Actor& a : scene_.actors()) kinds[a.id] = a.kind;
    std::vector<ActorId> removed = scene_.flush_removals();
    std::sort(removed.begin(), removed.end());
    for (ActorId id : removed)
        if (kinds[id] == ActorKind::Cube) events.push_back({"removed", id});

    won_ = scene_.active_cubes().empty();
    StepRecord r = snapshot();
    r.events = std::move(events);

    auto faults = scene_.take_faults();
    if (!faults.empty()) throw RunFault(r.step, std::move(faults.front()));
    return r;
}

Trajectory run(LoadedScene loaded, ScriptingMode mode, const InputTrace& trace, std::int64_t steps) {
    if (steps <= 0) throw std::invalid_argument("steps must be positive");
    Simulation sim(std::move(loaded), mode);
    Trajectory t;
    t.header = sim.header();
    for (std::int64_t i = 0; i < steps && !sim.won(); ++i) t.steps.push_back(sim.advance(trace.at(i)));
    return t;
}

Trajectory run(const RunOptions& o) {
    return run(load_scene(o.scene_file, o.mode, o.fixed_dt), o.mode, o.trace, o.steps);
}

// ---------------------------------------------------------------------------
// Equivalence

namespace {

void flatten(const StepRecord& r, std::vector<std::pair<std::string, double>>& out) {
    out.clear();
    auto vec = [&](const std::string& name, const Vec3& v) {
        out.emplace_back(name + ".x", v.x);
        out.emplace_back(name + ".y", v.y);
        out.emplace_back(name + ".z", v.z);
    };
    auto quat = [&](const std::string& name, const Orientation& q) {
        out.emplace_back(name + ".w", q.w);
        out.emplace_back(name + ".x", q.x);
        out.emplace_back(name + ".y", q.y);
        out.emplace_back(name + ".z", q.z);
    };
    out.emplace_back("t", r.t);
    if (r.ball) {
        vec("ball.position", r.ball->position);
        quat("ball.orientation", r.ball->orientation);
        vec("ball.velocity", r.ball->velocity);
        vec("ball.angular_velocity", r.ball->angular_velocity);
    }
    for (const auto& c : r.cubes) {
        const std::string base = "cube[" + std::to_string(c.id.value) + "]";
        vec(base + ".position", c.position);
        quat(base + ".orientation", c.orientation);
    }
}

std::vector<RemovalStep> removals(const Trajectory& t) {
    std::vector<RemovalStep> out;
    for (const auto& r : t.steps)
        for (const auto& e : r.events)
            if (e.kind == "removed") out.push_back({e.actor, r.step});
    return out;
}

}  // namespace

EquivalenceReport compare(const Trajectory& a, const Trajectory& b, double tolerance) {
    EquivalenceReport rep;
    rep.tolerance = tolerance;
    rep.steps_a = static_cast<std::int64_t>(a.steps.size());
    rep.steps_b = static_cast<std::int64_t>(b.steps.size());
    rep.removal_steps_a = removals(a);
    rep.removal_steps_b = removals(b);
    bool structural_ok = rep.steps_a == rep.steps_b;

    auto diverge = [&](std::int64_t step, std::string field, double av, double bv) {
        if (!rep.first_divergence)
            rep.first_divergence = Divergence{step, std::move(field), av, bv, std::abs(av - bv)};
    };
    if (!structural_ok)
        diverge(std::min(rep.steps_a, rep.steps_b) + 1, "steps", static_cast<double>(rep.steps_a),
                static_cast<double>(rep.steps_b));

    std::vector<std::pair<std::string, double>> fa, fb;
    const std::size_t n = std::min(a.steps.size(), b.steps.size());
    for (std::size_t i = 0; i < n; ++i) {
        const StepRecord& ra = a.steps[i];
        const StepRecord& rb = b.steps[i];
        if (ra.active_cubes != rb.active_cubes || ra.ball.has_value() != rb.ball.has_value() ||
            ra.step != rb.step) {
            structural_ok = false;
            diverge(ra.step, "active_cubes", static_cast<double>(ra.active_cubes.size()),
                    static_cast<double>(rb.active_cubes.size()));
            continue;
        }
        flatten(ra, fa);
        flatten(rb, fb);
        for (std::size_t k = 0; k < fa.size(); ++k) {
            const double d = std::abs(fa[k].second - fb[k].second);
            if (!(d <= rep.max_abs_diff)) rep.max_abs_diff = d;  // NaN propagates as divergence
            if (!(d <= tolerance)) diverge(ra.step, fa[k].first, fa[k].second, fb[k].second);
        }
    }
    rep.equivalent = structural_ok && rep.max_abs_diff <= tolerance &&
                     rep.removal_steps_a == rep.removal_steps_b;
    return rep;
}

EquivalenceReport check_equivalence(const std::filesystem::path& scene_file, const InputTrace& trace,
                                    std::int64_t steps, double tolerance, std::optional<double> fixed_dt) {
    LoadedScene graph_scene = load_scene(scene_file, ScriptingMode::Graph, fixed_dt);
    LoadedScene script_scene = load_scene(scene_file, ScriptingMode::Script, fixed_dt);
    if (!graph_scene.paired)
        throw SceneValidationError({{scene_file.string(), "UnpairedScene",
                                     "every scripted actor needs both a graph and a script",
                                     std::nullopt}});
    // The two runs share nothing mutable.
    auto graph_run = std::async(std::launch::async, [&] {
        return run(std::move(graph_scene), ScriptingMode::Graph, trace, steps);
    });
    const Trajectory script_traj = run(std::move(script_scene), ScriptingMode::Script, trace, steps);
    const Trajectory graph_traj = graph_run.get();
    return compare(graph_traj, script_traj, tolerance);
}

std::string report_json(const EquivalenceReport& r) {
    ordered_json j;
    j["equivalent"] = r.equivalent;
    j["tolerance"] = r.tolerance;
    j["max_abs_diff"] = r.max_abs_diff;
    j["steps_graph"] = r.steps_a;
    j["steps_script"] = r.steps_b;
    if (r.first_divergence) {
        const auto& d = *r.first_divergence;
        j["first_divergence"] = {{"step", d.step}, {"field", d.field}, {"graph", d.a_value},
                                 {"script", d.b_value}, {"abs_diff", d.abs_diff}};
    } else {
        j["first_divergence"] = nullptr;
    }
    for (const auto& [key, list] : {std::pair{"removal_steps_graph", &r.removal_steps_a},
                                    std::pair{"removal_steps_script", &r.removal_steps_b}}) {
        ordered_json arr = ordered_json::array();
        for (const auto& s : *list) arr.push_back({{"cube", s.cube.value}, {"step", s.step}});
        j[key] = std::move(arr);
    }
    return j.dump(2);
}

// ---------------------------------------------------------------------------
// Frame-rate experiment

Orientation spin(double rate_hz, double duration_s, Rotator euler_rates, std::int64_t* frames_out) {
    Scene scene(1.0 / rate_hz);
    Actor cube;
    cube.name = "cube";
    cube.kind = ActorKind::Cube;
    cube.trigger = TriggerVolume{};
    const ActorId id = scene.spawn(std::move(cube));
    std::vector<std::unique_ptr<behaviors::Behavior>> list;
    list.push_back(std::make_unique<behaviors::RotatorBehavior>(euler_rates));
    scene.attach(id, ScriptKind::Behavior, std::make_shared<behaviors::BehaviorScript>(std::move(list)));

    const std::int64_t frames = std::llround(duration_s * rate_hz);
    const double dt = 1.0 / rate_hz;
    for (std::int64_t i = 0; i < frames; ++i) scene.dispatch_frame_events(dt, {});
    if (frames_out) *frames_out = frames;
    return scene.actor(id).orientation;
}

FramerateTable framerate_experiment(std::span<const double> rates, double duration, Rotator euler_rates,
                                    std::optional<double> reference_hz) {
    if (rates.size() < 2) throw std::invalid_argument("need at least two frame rates");
    if (!(duration > 0.0)) throw std::invalid_argument("duration must be positive");
    for (double r : rates)
        if (!(r > 0.0)) throw std::invalid_argument("frame rates must be positive");

    FramerateTable table;
    auto row = [&](double rate) {
        FramerateRow fr;
        fr.rate_hz = rate;
        fr.final_orientation = spin(rate, duration, euler_rates, &fr.frames);
        fr.yaw_deg = yaw_degrees(fr.final_orientation);
        return fr;
    };
    if (reference_hz) table.reference = row(*reference_hz);
    for (double r : rates) {
        FramerateRow fr = row(r);
        if (table.reference)
            fr.deviation_deg = rad_to_deg(geodesic_angle(fr.final_orientation, table.reference->final_orientation));
        table.rows.push_back(fr);
    }
    for (std::size_t i = 0; i < table.rows.size(); ++i)
        for (std::size_t k = i + 1; k < table.rows.size(); ++k)
            table.pairs.push_back({table.rows[i].rate_hz, table.rows[k].rate_hz,
                                   rad_to_deg(geodesic_angle(table.rows[i].final_orientation,
                                                             table.rows[k].final_orientation))});
    return table;
}

std::string framerate_json(const FramerateTable& t) {
    ordered_json j;
    auto row_json = [](const FramerateRow& r) {
        ordered_json o;
        o["rate_hz"] = r.rate_hz;
        o["frames"] = r.frames;
        o["orientation"] = quat_json(r.final_orientation);
        o["yaw_deg"] = r.yaw_deg;
        if (r.deviation_deg) o["deviation_deg"] = *r.deviation_deg;
        return o;
    };
    ordered_json rows = ordered_json::array();
    for (const auto& r : t.rows) rows.push_back(row_json(r));
    j["rows"] = std::move(rows);
    ordered_json pairs = ordered_json::array();
    for (const auto& p : t.pairs)
        pairs.push_back({{"rate_a", p.rate_a}, {"rate_b", p.rate_b}, {"angle_deg", p.angle_deg}});
    j["pairs"] = std::move(pairs);
    j["reference"] = t.reference ? row_json(*t.reference) : ordered_json(nullptr);
    return j.dump(2);
}

// ---------------------------------------------------------------------------
// Tour planning

InputTrace plan_tour(LoadedScene loaded, ScriptingMode mode, std::int64_t max_steps, double cruise) {
    Simulation sim(std::move(loaded), mode);
    const auto& p = sim.ball_params();
    const auto& cfg = sim.physics();
    double mass = 1.0;
    for (const Actor& a : sim.scene().actors())
        if (a.kind == ActorKind::Ball && a.body) mass = a.body->mass;
    // Velocity change produced in one step by a full-scale axis.
    const double gain = p.drive_mode == DriveMode::Force
                            ? p.speed * cfg.fixed_dt / mass
                            : p.roll_torque * cfg.fixed_dt / (cfg.rolling_inertia_factor * mass * cfg.ball_radius);
    auto quantize = [](double x) { return std::round(std::clamp(x, -1.0, 1.0) * 64.0) / 64.0; };

    std::vector<TraceRecord> records;
    for (std::int64_t i = 0; i < max_steps && !sim.won(); ++i) {
        const StepRecord s = sim.snapshot();
        if (!s.ball) break;
        const Vec3 pos = s.ball->position;
        const CubeState* target = nullptr;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : s.cubes) {
            const double dx = c.position.x - pos.x, dz = c.position.z - pos.z;
            const double d = dx * dx + dz * dz;
            if (d < best) {
                best = d;
                target = &c;
            }
        }
        AxisSample axes;
        if (target) {
            Vec3 dir{target->position.x - pos.x, 0.0, target->position.z - pos.z};
            const double len = dir.norm();
            if (len > 0.0) dir = dir * (1.0 / len);
            const Vec3 want = dir * cruise;
            axes.h = quantize((want.x - s.ball->velocity.x) / gain);
            axes.v = quantize((want.z - s.ball->velocity.z) / gain);
        }
        if (axes.h != 0.0 || axes.v != 0.0) records.push_back({i, axes.h, axes.v});
        sim.advance(axes);
    }
    return InputTrace(std::move(records));
}

}  // namespace flow::harness
