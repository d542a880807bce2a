#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "flow/graph.hpp"
#include "flow/graphlang.hpp"
#include "flow/scene_file.hpp"
#include "test_support.hpp"

using namespace flow;
using namespace flow::graph;
using flow::testing::parse_ok;

namespace {

std::vector<DiagnosticCode> codes_of(const Graph& g) {
    std::vector<DiagnosticCode> out;
    for (const auto& d : validate(g)) out.push_back(d.code);
    return out;
}

bool has(const std::vector<DiagnosticCode>& v, DiagnosticCode c) {
    return std::find(v.begin(), v.end(), c) != v.end();
}

Graph shipped(const std::string& name) { return parse_ok(read_file(flow::testing::graph_path(name))); }

/// Fires `event_node` for `owner` on a fresh default table.
FireResult fire(const Graph& g, const std::string& event_node, FiringContext ctx, Scene& scene) {
    const GraphRuntime rt(g);
    ctx.event_node = event_node;
    return rt.fire_event(ctx, scene);
}

}  // namespace

TEST_CASE("every shipped graph validates clean") {
    for (const auto& e : std::filesystem::directory_iterator(flow::testing::data_dir() / "graphs")) {
        CAPTURE(e.path());
        CHECK(validate(parse_ok(read_file(e.path()))).empty());
    }
}

TEST_CASE("the shipped corpus covers the whole node catalog") {
    std::set<std::string_view> seen;
    for (const auto& e : std::filesystem::directory_iterator(flow::testing::data_dir() / "graphs"))
        for (const Node& n : parse_ok(read_file(e.path())).nodes) seen.insert(spec_of(n.kind).name);
    for (const KindSpec& k : catalog()) {
        CAPTURE(k.name);
        CHECK(seen.contains(k.name));
    }
}

TEST_CASE("a Float wired into a Vector input is a TypeMismatch") {
    const Graph ok = parse_ok(R"(graph G {
      node tick : EventTick
      node mul : MultiplyFloat(b=2)
      node v : MakeVector
      node self : SelfActor
      node push : AddTorque
      exec tick.out -> push.in
      data tick.DeltaSeconds -> mul.a
      data mul.out -> v.x
      data v.out -> push.torque
      data self.out -> push.target
    })");
    CHECK(validate(ok).empty());

    const Graph bad = parse_ok(R"(graph G {
      node tick : EventTick
      node mul : MultiplyFloat(b=2)
      node self : SelfActor
      node push : AddTorque
      exec tick.out -> push.in
      data tick.DeltaSeconds -> mul.a
      data mul.out -> push.torque
      data self.out -> push.target
    })");
    const auto d = validate(bad);
    REQUIRE(d.size() == 1);
    CHECK(d[0].code == DiagnosticCode::TypeMismatch);
    CHECK(d[0].node == "push");
    CHECK(d[0].pin == "torque");
    REQUIRE(d[0].span.has_value());
    CHECK(d[0].span->begin.line == 8);
}

TEST_CASE("reading a tick payload from an input-axis chain is a CrossEventPayload") {
    const Graph g = parse_ok(R"(graph G {
      node tick : EventTick
      node axis : EventInputAxis(axis_name="MoveRight")
      node v : MakeVector
      node self : SelfActor
      node push : AddForce
      exec axis.out -> push.in
      data tick.DeltaSeconds -> v.x
      data v.out -> push.force
      data self.out -> push.target
    })");
    CHECK(codes_of(g) == std::vector{DiagnosticCode::CrossEventPayload});
}

TEST_CASE("a literal on a data input satisfies it; a missing one is UnwiredInput") {
    Graph g = parse_ok(R"(graph G {
      node hit : EventActorBeginOverlap
      node hide : SetActorActive(active=false)
      exec hit.out -> hide.in
      data hit.OtherActor -> hide.target
    })");
    CHECK(validate(g).empty());
    g.nodes[1].params.clear();
    const auto d = validate(g);
    REQUIRE(d.size() == 1);
    CHECK(d[0].code == DiagnosticCode::UnwiredInput);
    CHECK(d[0].pin == "active");
}

TEST_CASE("an empty graph is valid") { CHECK(validate(parse_ok("graph G { }")).empty()); }

TEST_CASE("each crafted corpus file triggers its diagnostic code") {
    std::set<std::string> triggered;
    for (const auto& e : std::filesystem::directory_iterator(flow::testing::source_dir() / "tests/corpus/invalid")) {
        const std::string text = read_file(e.path());
        const std::string header = "# expect: ";
        REQUIRE(text.rfind(header, 0) == 0);
        const std::string expected = text.substr(header.size(), text.find('\n') - header.size());
        CAPTURE(e.path());
        const auto diags = check_graph_source(text, e.path().string());
        REQUIRE_FALSE(diags.empty());
        CHECK(diags.front().code == expected);
        for (const auto& d : diags) CHECK(d.span.has_value());
        triggered.insert(expected);
    }
    for (const char* code : {"TypeMismatch", "UnwiredInput", "DataCycle", "ExecCycle", "UnknownKind",
                             "DuplicateNodeId", "CrossEventPayload", "ExecIntoPure"}) {
        CAPTURE(code);
        CHECK(triggered.contains(code));
    }
}

TEST_CASE("building a runtime from an invalid graph throws with the diagnostics") {
    const Graph g = parse_ok(read_file(flow::testing::source_dir() / "tests/corpus/invalid/data_cycle.fg"));
    try {
        GraphRuntime rt(g);
        FAIL("expected ValidationFailed");
    } catch (const ValidationFailed& e) {
        CHECK(has([&] {
            std::vector<DiagnosticCode> c;
            for (const auto& d : e.diagnostics) c.push_back(d.code);
            return c;
        }(), DiagnosticCode::DataCycle));
    }
}

TEST_CASE("cube rotator graph: one AddWorldRotation of yaw 0.4 degrees at dt 0.02") {
    Scene scene = build_default_scene();
    const ActorId cube{1};
    const FireResult r = fire(shipped("cube_rotator.fg"), "tick", {.owner = cube, .delta_seconds = 0.02}, scene);
    CHECK_FALSE(r.fault.has_value());
    REQUIRE(r.log.size() == 1);
    CHECK(r.log[0].kind == NodeKind::AddWorldRotation);
    CHECK(r.log[0].target == cube);
    const Rotator delta = std::get<Rotator>(*r.log[0].value);
    CHECK(delta.roll == 0.0);
    CHECK(delta.pitch == 0.0);
    CHECK(delta.yaw == 0.02 * 20.0);
    CHECK(rad_to_deg(geodesic_angle(scene.actor(cube).orientation, rotator_to_orientation({0, 0, 0.4}))) < 1e-12);
}

TEST_CASE("z-up roll-right graph (axis into MakeVector.x): AxisValue -1 gives torque (-50,0,0)") {
    const Graph g = parse_ok(R"(graph RollRight {
      node axis : EventInputAxis(axis_name="MoveRight")
      node roll_torque : ConstFloat(value=50)
      node mul : MultiplyFloat
      node vec : MakeVector
      node self : SelfActor
      node torque : AddTorque
      exec axis.out -> torque.in
      data axis.AxisValue -> mul.a
      data roll_torque.out -> mul.b
      data mul.out -> vec.x
      data vec.out -> torque.torque
      data self.out -> torque.target
    })");
    Scene scene = build_default_scene();
    const ActorId ball{0};
    const FireResult r = fire(g, "axis", {.owner = ball, .axis_value = -1.0}, scene);
    REQUIRE(r.log.size() == 1);
    CHECK(std::get<Vec3>(*r.log[0].value) == Vec3{-50, 0, 0});
    CHECK(scene.actor(ball).body->accumulated_torque == Vec3{-50, 0, 0});
}

TEST_CASE("shipped y-up roll graph rolls right for h = 1 and forward for v = 1") {
    const GraphRuntime rt(shipped("ball_roll.fg"));
    Scene scene = build_default_scene();
    const ActorId ball{0};
    rt.fire_event({.event_node = "right", .owner = ball, .axis_value = 1.0}, scene);
    CHECK(scene.actor(ball).body->accumulated_torque == Vec3{0, 0, -50});
    scene.actor(ball).body->accumulated_torque = {};
    rt.fire_event({.event_node = "forward", .owner = ball, .axis_value = 1.0}, scene);
    CHECK(scene.actor(ball).body->accumulated_torque == Vec3{50, 0, 0});
}

TEST_CASE("removal graph: overlap destroys self") {
    Scene scene = build_default_scene();
    const ActorId cube{4}, ball{0};
    const FireResult r = fire(shipped("cube_removal.fg"), "hit", {.owner = cube, .other_actor = ball}, scene);
    REQUIRE(r.log.size() == 1);
    CHECK(r.log[0].kind == NodeKind::DestroyActor);
    CHECK(r.log[0].target == cube);
    CHECK(scene.contains(cube));  // deferred
    scene.flush_removals();
    CHECK_FALSE(scene.contains(cube));
}

TEST_CASE("tag filter graph ignores untagged actors and hides pickups") {
    const GraphRuntime rt(shipped("pickup_filter.fg"));
    Scene scene = build_default_scene();
    const ActorId ball{0};
    auto r = rt.fire_event({.event_node = "hit", .owner = ball, .other_actor = ActorId{14}}, scene);
    REQUIRE(r.log.size() == 1);  // only the branch ran
    CHECK(r.log[0].kind == NodeKind::Branch);
    CHECK(std::get<bool>(*r.log[0].value) == false);
    r = rt.fire_event({.event_node = "hit", .owner = ball, .other_actor = ActorId{2}}, scene);
    REQUIRE(r.log.size() == 2);
    CHECK(r.log[1].kind == NodeKind::SetActorActive);
    CHECK(r.log[1].target == ActorId{2});
    CHECK(scene.flush_removals() == std::vector{ActorId{2}});
}

TEST_CASE("a target that no longer exists raises a RuntimeFault naming the node") {
    Scene scene = build_default_scene();
    scene.destroy(ActorId{3});
    scene.flush_removals();
    const FireResult r = fire(shipped("pickup_filter.fg"), "hit", {.owner = ActorId{0}, .other_actor = ActorId{3}},
                              scene);
    REQUIRE(r.fault.has_value());
    CHECK(r.fault->node_id == "is_pickup");
}

TEST_CASE("GraphScript fires axis events before tick, graph by graph") {
    Scene scene = build_default_scene();
    scene.enable_dispatch_log(true);
    const ActorId ball{0};
    scene.attach(ball, ScriptKind::Graph,
                 std::make_shared<GraphScript>(std::vector<std::shared_ptr<const GraphRuntime>>{
                     std::make_shared<const GraphRuntime>(shipped("ball_force.fg")),
                     std::make_shared<const GraphRuntime>(shipped("ball_drift.fg"))}));
    scene.dispatch_frame_events(0.02, {1, -1});
    CHECK(scene.actor(ball).body->accumulated_force == Vec3{10, 0, -10});
    scene.dispatch_fixed_events(0.02, {});
    const Vec3 f = scene.actor(ball).body->accumulated_force;
    CHECK(f.x == 10 + 0.5 * 0.02);
    CHECK(f.z == -10 + -0.25 * 0.02);
}

TEST_CASE("validation is sound on 200 mutated graphs: accepted graphs run, rejected graphs refuse to load") {
    std::vector<Graph> seeds;
    for (const auto& e : std::filesystem::directory_iterator(flow::testing::data_dir() / "graphs"))
        seeds.push_back(parse_ok(read_file(e.path())));
    std::sort(seeds.begin(), seeds.end(), [](const Graph& a, const Graph& b) { return a.name < b.name; });

    std::mt19937_64 rng(1234);
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    int accepted = 0, rejected = 0;
    for (int i = 0; i < 200; ++i) {
        Graph g = seeds[pick(seeds.size())];
        const int edits = 1 + static_cast<int>(pick(3));
        for (int e = 0; e < edits; ++e) {
            switch (pick(6)) {
                case 0:
                    if (!g.data_wires.empty()) g.data_wires.erase(g.data_wires.begin() + pick(g.data_wires.size()));
                    break;
                case 1:
                    if (!g.exec_wires.empty()) g.exec_wires.erase(g.exec_wires.begin() + pick(g.exec_wires.size()));
                    break;
                case 2:
                    if (g.data_wires.size() > 1) {
                        auto& w = g.data_wires[pick(g.data_wires.size())];
                        w.from = g.data_wires[pick(g.data_wires.size())].from;
                    }
                    break;
                case 3:
                    if (!g.data_wires.empty()) g.data_wires.push_back(g.data_wires[pick(g.data_wires.size())]);
                    break;
                case 4:
                    if (!g.nodes.empty()) g.nodes[pick(g.nodes.size())].params.clear();
                    break;
                case 5:
                    if (g.exec_wires.size() > 1) {
                        auto& w = g.exec_wires[pick(g.exec_wires.size())];
                        w.to = g.exec_wires[pick(g.exec_wires.size())].to;
                    }
                    break;
            }
        }
        const auto diags = validate(g);
        if (diags.empty()) {
            ++accepted;
            const GraphRuntime rt(g);
            Scene scene = build_default_scene();
            for (const Node& n : g.nodes) {
                if (spec_of(n.kind).category != NodeCategory::Event) continue;
                const FireResult r = rt.fire_event(
                    {.event_node = n.id, .owner = ActorId{0}, .delta_seconds = 0.02, .axis_value = 1.0,
                     .other_actor = ActorId{1}},
                    scene);
                CHECK_FALSE(r.fault.has_value());
            }
        } else {
            ++rejected;
            CHECK_THROWS_AS(GraphRuntime{g}, ValidationFailed);
        }
    }
    CHECK(accepted > 0);
    CHECK(rejected > 0);
}
