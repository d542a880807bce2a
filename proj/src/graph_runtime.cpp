#include <algorithm>

#include "flow/graph.hpp"

namespace flow::graph {

ValidationFailed::ValidationFailed(std::string what, std::vector<Diagnostic> diags)
    : std::runtime_error(std::move(what)), diagnostics(std::move(diags)) {}

GraphRuntime::GraphRuntime(Graph g) : graph_(std::move(g)) {
    auto diags = validate(graph_);
    if (!diags.empty())
        throw ValidationFailed("graph '" + graph_.name + "' failed validation", std::move(diags));
    for (std::size_t i = 0; i < graph_.nodes.size(); ++i) index_.emplace(graph_.nodes[i].id, i);
    for (const Wire& w : graph_.exec_wires) exec_next_.emplace(w.from, w.to);
    for (const Wire& w : graph_.data_wires) data_driver_.emplace(w.to, w.from);
}

std::size_t GraphRuntime::index(std::string_view id) const {
    const auto it = index_.find(id);
    return it == index_.end() ? graph_.nodes.size() : it->second;
}

std::vector<std::string> GraphRuntime::events(NodeKind kind, std::string_view axis) const {
    std::vector<std::string> ids;
    for (const Node& n : graph_.nodes) {
        if (n.kind != kind) continue;
        if (kind == NodeKind::EventInputAxis) {
            const auto it = n.params.find("axis_name");
            if (it == n.params.end() || std::get<std::string>(it->second) != axis) continue;
        }
        ids.push_back(n.id);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

namespace {

struct Fault {
    RuntimeFault fault;
};

}  // namespace

// Lazy, uncached, depth-first evaluation of data pins for one firing.
struct GraphRuntime::Pull {
    const GraphRuntime& rt;
    const FiringContext& ctx;
    Scene& scene;

    [[noreturn]] void fail(const Node& n, std::string message) const {
        throw Fault{{n.id, std::move(message)}};
    }

    ActorId existing(const Node& n, ActorId id) const {
        if (!scene.contains(id))
            fail(n, "actor " + std::to_string(id.value) + " no longer exists");
        return id;
    }

    Value input(const Node& n, std::string_view pin) const {
        if (const auto it = rt.data_driver_.find(PinRef{n.id, std::string(pin)});
            it != rt.data_driver_.end())
            return output(rt.graph_.nodes[rt.index(it->second.node)], it->second.pin);
        if (const auto it = n.params.find(std::string(pin)); it != n.params.end()) return it->second;
        const DataPinSpec* spec = spec_of(n.kind).data_in(pin);
        if (spec && spec->default_value) return *spec->default_value;
        fail(n, "input '" + std::string(pin) + "' has no value");
    }

    template <typename T>
    T in(const Node& n, std::string_view pin) const {
        return std::get<T>(input(n, pin));
    }

    Value output(const Node& n, std::string_view pin) const {
        switch (n.kind) {
            case NodeKind::EventTick:
            case NodeKind::EventFixedTick:
            case NodeKind::EventInputAxis:
            case NodeKind::EventActorBeginOverlap:
                if (n.id != ctx.event_node) fail(n, "payload of an event that is not firing");
                if (n.kind == NodeKind::EventInputAxis) return ctx.axis_value;
                if (n.kind == NodeKind::EventActorBeginOverlap) return ctx.other_actor;
                return ctx.delta_seconds;
            case NodeKind::ConstFloat:
            case NodeKind::ConstText:
            case NodeKind::ConstVector:
                return n.params.at("value");
            case NodeKind::MultiplyFloat:
                return in<double>(n, "a") * in<double>(n, "b");
            case NodeKind::ScaleVector:
                return in<Vec3>(n, "v") * in<double>(n, "s");
            case NodeKind::MakeVector:
                return Vec3{in<double>(n, "x"), in<double>(n, "y"), in<double>(n, "z")};
            case NodeKind::MakeRotator:
                return Rotator{in<double>(n, "roll"), in<double>(n, "pitch"), in<double>(n, "yaw")};
            case NodeKind::CompareTag: {
                const ActorId id = existing(n, in<ActorId>(n, "actor"));
                return ActorHandle(scene, id).compare_tag(in<std::string>(n, "tag"));
            }
            case NodeKind::SelfActor:
                return ctx.owner;
            default:
                fail(n, "node has no data output '" + std::string(pin) + "'");
        }
    }
};

FireResult GraphRuntime::fire_event(const FiringContext& ctx, Scene& scene) const {
    FireResult result;
    const std::size_t start = index(ctx.event_node);
    if (start == graph_.nodes.size() ||
        spec_of(graph_.nodes[start].kind).category != NodeCategory::Event) {
        result.fault = RuntimeFault{ctx.event_node, "not an event node"};
        return result;
    }
    const Pull pull{*this, ctx, scene};

    auto next = [&](const std::string& node, std::string_view pin) -> const Node* {
        const auto it = exec_next_.find(PinRef{node, std::string(pin)});
        return it == exec_next_.end() ? nullptr : &graph_.nodes[index(it->second.node)];
    };

    try {
        const Node* cur = next(ctx.event_node, "out");
        // Acyclic exec graph: no node can run twice. The bound guards against misuse.
        for (std::size_t guard = 0; cur && guard <= graph_.nodes.size(); ++guard) {
            const Node& n = *cur;
            std::string_view out_pin = "out";
            switch (n.kind) {
                case NodeKind::AddWorldRotation: {
                    const ActorId target = pull.existing(n, pull.in<ActorId>(n, "target"));
                    const Rotator delta = pull.in<Rotator>(n, "delta");
                    ActorHandle(scene, target).rotate_world(delta);
                    result.log.push_back({n.id, n.kind, target, delta});
                    break;
                }
                case NodeKind::AddTorque:
                case NodeKind::AddForce: {
                    const bool torque = n.kind == NodeKind::AddTorque;
                    const ActorId target = pull.existing(n, pull.in<ActorId>(n, "target"));
                    const Vec3 v = pull.in<Vec3>(n, torque ? "torque" : "force");
                    const ActorHandle h(scene, target);
                    torque ? h.add_torque(v) : h.add_force(v);
                    result.log.push_back({n.id, n.kind, target, v});
                    break;
                }
                case NodeKind::DestroyActor: {
                    const ActorId target = pull.existing(n, pull.in<ActorId>(n, "target"));
                    ActorHandle(scene, target).destroy();
                    result.log.push_back({n.id, n.kind, target, std::nullopt});
                    break;
                }
                case NodeKind::SetActorActive: {
                    const ActorId target = pull.existing(n, pull.in<ActorId>(n, "target"));
                    const bool active = pull.in<bool>(n, "active");
                    ActorHandle(scene, target).set_active(active);
                    result.log.push_back({n.id, n.kind, target, active});
                    break;
                }
                case NodeKind::Branch: {
                    const bool c = pull.in<bool>(n, "condition");
                    out_pin = c ? "true" : "false";
                    result.log.push_back({n.id, n.kind, ctx.owner, c});
                    break;
                }
                default:
                    pull.fail(n, "node is not executable");
            }
            cur = next(n.id, out_pin);
        }
    } catch (const Fault& f) {
        result.fault = f.fault;
    }
    return result;
}

void GraphScript::fire_all(ActorHandle self, NodeKind kind, std::string_view axis,
                           FiringContext ctx) const {
    for (const auto& g : graphs_) {
        for (const std::string& ev : g->events(kind, axis)) {
            ctx.event_node = ev;
            ctx.owner = self.id();
            FireResult r = g->fire_event(ctx, self.scene());
            if (r.fault) self.report_fault(std::move(*r.fault));
        }
    }
}

void GraphScript::on_frame(ActorHandle self, double frame_dt, AxisSample axes) const {
    FiringContext ctx;
    ctx.axis_value = axes.h;
    fire_all(self, NodeKind::EventInputAxis, kAxisMoveRight, ctx);
    ctx.axis_value = axes.v;
    fire_all(self, NodeKind::EventInputAxis, kAxisMoveForward, ctx);
    ctx = {};
    ctx.delta_seconds = frame_dt;
    fire_all(self, NodeKind::EventTick, {}, ctx);
}

void GraphScript::on_fixed(ActorHandle self, double fixed_dt, AxisSample) const {
    FiringContext ctx;
    ctx.delta_seconds = fixed_dt;
    fire_all(self, NodeKind::EventFixedTick, {}, ctx);
}

void GraphScript::on_begin_overlap(ActorHandle self, ActorId other) const {
    FiringContext ctx;
    ctx.other_actor = other;
    fire_all(self, NodeKind::EventActorBeginOverlap, {}, ctx);
}

}  // namespace flow::graph
