#include <algorithm>

#include "flow/graph.hpp"

namespace flow::graph {

std::string_view to_string(PinType type) {
    switch (type) {
        case PinType::Float: return "Float";
        case PinType::Bool: return "Bool";
        case PinType::Text: return "Text";
        case PinType::Vector: return "Vector";
        case PinType::Rotator: return "Rotator";
        case PinType::ActorRef: return "ActorRef";
    }
    return "?";
}

PinType type_of(const Value& v) {
    return std::visit(
        [](const auto& x) -> PinType {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, double>) return PinType::Float;
            else if constexpr (std::is_same_v<T, bool>) return PinType::Bool;
            else if constexpr (std::is_same_v<T, std::string>) return PinType::Text;
            else if constexpr (std::is_same_v<T, Vec3>) return PinType::Vector;
            else if constexpr (std::is_same_v<T, Rotator>) return PinType::Rotator;
            else return PinType::ActorRef;
        },
        v);
}

const DataPinSpec* KindSpec::data_in(std::string_view pin) const {
    for (const auto& p : data_ins)
        if (p.name == pin) return &p;
    return nullptr;
}

const DataPinSpec* KindSpec::data_out(std::string_view pin) const {
    for (const auto& p : data_outs)
        if (p.name == pin) return &p;
    return nullptr;
}

const ParamSpec* KindSpec::param(std::string_view n) const {
    for (const auto& p : params)
        if (p.name == n) return &p;
    return nullptr;
}

bool KindSpec::has_exec_out(std::string_view pin) const {
    return std::find(exec_outs.begin(), exec_outs.end(), pin) != exec_outs.end();
}

namespace {

using enum PinType;

std::vector<KindSpec> make_catalog() {
    const DataPinSpec target{"target", ActorRef};
    std::vector<KindSpec> c;
    // Events
    c.push_back({NodeKind::EventTick, "EventTick", NodeCategory::Event, false, {"out"}, {},
                 {{"DeltaSeconds", Float}}, {}});
    c.push_back({NodeKind::EventFixedTick, "EventFixedTick", NodeCategory::Event, false, {"out"}, {},
                 {{"DeltaSeconds", Float}}, {}});
    c.push_back({NodeKind::EventInputAxis, "EventInputAxis", NodeCategory::Event, false, {"out"}, {},
                 {{"AxisValue", Float}}, {{"axis_name", Text}}});
    c.push_back({NodeKind::EventActorBeginOverlap, "EventActorBeginOverlap", NodeCategory::Event,
                 false, {"out"}, {}, {{"OtherActor", ActorRef}}, {}});
    // Pure
    c.push_back({NodeKind::ConstFloat, "ConstFloat", NodeCategory::Pure, false, {}, {},
                 {{"out", Float}}, {{"value", Float}}});
    c.push_back({NodeKind::ConstText, "ConstText", NodeCategory::Pure, false, {}, {},
                 {{"out", Text}}, {{"value", Text}}});
    c.push_back({NodeKind::ConstVector, "ConstVector", NodeCategory::Pure, false, {}, {},
                 {{"out", Vector}}, {{"value", Vector}}});
    c.push_back({NodeKind::MultiplyFloat, "MultiplyFloat", NodeCategory::Pure, false, {},
                 {{"a", Float}, {"b", Float}}, {{"out", Float}}, {}});
    c.push_back({NodeKind::ScaleVector, "ScaleVector", NodeCategory::Pure, false, {},
                 {{"v", Vector}, {"s", Float}}, {{"out", Vector}}, {}});
    c.push_back({NodeKind::MakeVector, "MakeVector", NodeCategory::Pure, false, {},
                 {{"x", Float, 0.0}, {"y", Float, 0.0}, {"z", Float, 0.0}}, {{"out", Vector}}, {}});
    c.push_back({NodeKind::MakeRotator, "MakeRotator", NodeCategory::Pure, false, {},
                 {{"roll", Float, 0.0}, {"pitch", Float, 0.0}, {"yaw", Float, 0.0}},
                 {{"out", Rotator}}, {}});
    c.push_back({NodeKind::CompareTag, "CompareTag", NodeCategory::Pure, false, {},
                 {{"actor", ActorRef}, {"tag", Text}}, {{"out", Bool}}, {}});
    c.push_back({NodeKind::SelfActor, "SelfActor", NodeCategory::Pure, false, {}, {},
                 {{"out", ActorRef}}, {}});
    // Effects
    c.push_back({NodeKind::AddWorldRotation, "AddWorldRotation", NodeCategory::Effect, true, {"out"},
                 {target, {"delta", Rotator}}, {}, {}});
    c.push_back({NodeKind::AddTorque, "AddTorque", NodeCategory::Effect, true, {"out"},
                 {target, {"torque", Vector}}, {}, {}});
    c.push_back({NodeKind::AddForce, "AddForce", NodeCategory::Effect, true, {"out"},
                 {target, {"force", Vector}}, {}, {}});
    c.push_back({NodeKind::DestroyActor, "DestroyActor", NodeCategory::Effect, true, {"out"},
                 {target}, {}, {}});
    c.push_back({NodeKind::SetActorActive, "SetActorActive", NodeCategory::Effect, true, {"out"},
                 {target, {"active", Bool}}, {}, {}});
    c.push_back({NodeKind::Branch, "Branch", NodeCategory::Effect, true, {"true", "false"},
                 {{"condition", Bool}}, {}, {}});
    return c;
}

}  // namespace

std::span<const KindSpec> catalog() {
    static const std::vector<KindSpec> kCatalog = make_catalog();
    return kCatalog;
}

const KindSpec* find_kind(std::string_view name) {
    for (const KindSpec& k : catalog())
        if (k.name == name) return &k;
    return nullptr;
}

const KindSpec& spec_of(NodeKind kind) {
    static const KindSpec kUnknown{NodeKind::Unknown, "Unknown", NodeCategory::Pure, false, {}, {}, {}, {}};
    for (const KindSpec& k : catalog())
        if (k.kind == kind) return k;
    return kUnknown;
}

std::string_view to_string(DiagnosticCode code) {
    switch (code) {
        case DiagnosticCode::TypeMismatch: return "TypeMismatch";
        case DiagnosticCode::UnwiredInput: return "UnwiredInput";
        case DiagnosticCode::DataCycle: return "DataCycle";
        case DiagnosticCode::ExecCycle: return "ExecCycle";
        case DiagnosticCode::UnknownKind: return "UnknownKind";
        case DiagnosticCode::DuplicateNodeId: return "DuplicateNodeId";
        case DiagnosticCode::CrossEventPayload: return "CrossEventPayload";
        case DiagnosticCode::ExecIntoPure: return "ExecIntoPure";
        case DiagnosticCode::UnknownPin: return "UnknownPin";
        case DiagnosticCode::ExecFanOut: return "ExecFanOut";
        case DiagnosticCode::DuplicateInput: return "DuplicateInput";
    }
    return "?";
}

}  // namespace flow::graph
