#pragma once

// Node graphs with exec and data wires: model, catalog, validation and interpretation.
//
// A graph is a set of nodes connected by two kinds of wires. Exec wires order side
// effects: firing an event walks exec wires from the event node through effect nodes.
// Data wires carry typed values into pins; an effect node pulls its inputs lazily and
// depth-first through pure nodes each time it runs.

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "flow/scene.hpp"
#include "flow/source_span.hpp"

namespace flow::graph {

enum class PinType { Float, Bool, Text, Vector, Rotator, ActorRef };

std::string_view to_string(PinType type);

using Value = std::variant<double, bool, std::string, Vec3, Rotator, ActorId>;

PinType type_of(const Value& v);

enum class NodeKind {
    EventTick,
    EventFixedTick,
    EventInputAxis,
    EventActorBeginOverlap,
    ConstFloat,
    ConstText,
    ConstVector,
    MultiplyFloat,
    ScaleVector,
    MakeVector,
    MakeRotator,
    CompareTag,
    SelfActor,
    AddWorldRotation,
    AddTorque,
    AddForce,
    DestroyActor,
    SetActorActive,
    Branch,
    Unknown,
};

enum class NodeCategory { Event, Pure, Effect };

struct DataPinSpec {
    std::string_view name;
    PinType type;
    std::optional<Value> default_value = std::nullopt;
};

/// A literal that is not a pin (ConstFloat.value, EventInputAxis.axis_name).
struct ParamSpec {
    std::string_view name;
    PinType type;
};

struct KindSpec {
    NodeKind kind;
    std::string_view name;
    NodeCategory category;
    bool exec_in = false;
    std::vector<std::string_view> exec_outs;
    std::vector<DataPinSpec> data_ins;
    std::vector<DataPinSpec> data_outs;
    std::vector<ParamSpec> params;

    const DataPinSpec* data_in(std::string_view pin) const;
    const DataPinSpec* data_out(std::string_view pin) const;
    const ParamSpec* param(std::string_view name) const;
    bool has_exec_out(std::string_view pin) const;
};

std::span<const KindSpec> catalog();
const KindSpec* find_kind(std::string_view name);
const KindSpec& spec_of(NodeKind kind);

struct Node {
    std::string id;
    NodeKind kind = NodeKind::Unknown;
    std::string kind_name;  // as written; equals the catalog name for known kinds
    /// Kind parameters and literals for unwired data-in pins.
    std::map<std::string, Value> params;
    std::optional<SourceSpan> span;
};

struct PinRef {
    std::string node;
    std::string pin;
    friend auto operator<=>(const PinRef&, const PinRef&) = default;
};

struct Wire {
    PinRef from;
    PinRef to;
    std::optional<SourceSpan> span;
};

bool wire_less(const Wire& a, const Wire& b);

struct Graph {
    std::string name = "Graph";
    std::vector<Node> nodes;
    std::vector<Wire> exec_wires;
    std::vector<Wire> data_wires;

    const Node* find(std::string_view id) const;
};

/// Same name, same nodes (id, kind, params) and same wire sets; ignores order and spans.
bool structurally_equal(const Graph& a, const Graph& b);

enum class DiagnosticCode {
    TypeMismatch,
    UnwiredInput,
    DataCycle,
    ExecCycle,
    UnknownKind,
    DuplicateNodeId,
    CrossEventPayload,
    ExecIntoPure,
    UnknownPin,
    ExecFanOut,
    DuplicateInput,
};

std::string_view to_string(DiagnosticCode code);

struct Diagnostic {
    DiagnosticCode code;
    std::string node;
    std::string pin;
    std::optional<std::size_t> wire;  // index into the exec or data wire list
    std::string message;
    std::optional<SourceSpan> span;
};

std::vector<Diagnostic> validate(const Graph& g);

struct EffectRecord {
    std::string node;
    NodeKind kind;
    ActorId target;
    std::optional<Value> value;
    friend bool operator==(const EffectRecord&, const EffectRecord&) = default;
};

using EffectLog = std::vector<EffectRecord>;

/// Bindings for one event firing.
struct FiringContext {
    std::string event_node;
    ActorId owner;
    double delta_seconds = 0.0;
    double axis_value = 0.0;
    ActorId other_actor;
};

struct FireResult {
    EffectLog log;
    std::optional<RuntimeFault> fault;
};

class ValidationFailed : public std::runtime_error {
public:
    ValidationFailed(std::string what, std::vector<Diagnostic> diagnostics);
    std::vector<Diagnostic> diagnostics;
};

/// A validated graph with precomputed wiring lookups. Immutable and shareable.
class GraphRuntime {
public:
    /// Throws ValidationFailed if validate(g) is not empty.
    explicit GraphRuntime(Graph g);

    const Graph& graph() const { return graph_; }

    FireResult fire_event(const FiringContext& ctx, Scene& scene) const;

    /// Event nodes of `kind` in id order; for EventInputAxis only those bound to `axis`.
    std::vector<std::string> events(NodeKind kind, std::string_view axis = {}) const;

private:
    struct Pull;
    std::size_t index(std::string_view id) const;

    Graph graph_;
    std::map<std::string, std::size_t, std::less<>> index_;
    std::map<PinRef, PinRef> exec_next_;    // exec-out -> exec-in
    std::map<PinRef, PinRef> data_driver_;  // data-in -> data-out
};

/// Scripting path that routes scene events into one or more graphs.
class GraphScript final : public ScriptingPath {
public:
    explicit GraphScript(std::vector<std::shared_ptr<const GraphRuntime>> graphs)
        : graphs_(std::move(graphs)) {}

    void on_start(ActorHandle) const override {}
    void on_frame(ActorHandle self, double frame_dt, AxisSample axes) const override;
    void on_fixed(ActorHandle self, double fixed_dt, AxisSample axes) const override;
    void on_begin_overlap(ActorHandle self, ActorId other) const override;

private:
    void fire_all(ActorHandle self, NodeKind kind, std::string_view axis, FiringContext ctx) const;

    std::vector<std::shared_ptr<const GraphRuntime>> graphs_;
};

inline constexpr std::string_view kAxisMoveRight = "MoveRight";
inline constexpr std::string_view kAxisMoveForward = "MoveForward";

}  // namespace flow::graph
