#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "flow/graph.hpp"

namespace flow::graph {

const Node* Graph::find(std::string_view id) const {
    for (const Node& n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

bool wire_less(const Wire& a, const Wire& b) {
    return std::tie(a.from, a.to) < std::tie(b.from, b.to);
}

namespace {

std::vector<Wire> sorted_wires(std::vector<Wire> w) {
    std::sort(w.begin(), w.end(), wire_less);
    return w;
}

bool same_wires(const std::vector<Wire>& a, const std::vector<Wire>& b) {
    if (a.size() != b.size()) return false;
    const auto sa = sorted_wires(a), sb = sorted_wires(b);
    for (std::size_t i = 0; i < sa.size(); ++i)
        if (sa[i].from != sb[i].from || sa[i].to != sb[i].to) return false;
    return true;
}

}  // namespace

bool structurally_equal(const Graph& a, const Graph& b) {
    if (a.name != b.name || a.nodes.size() != b.nodes.size()) return false;
    auto by_id = [](const Graph& g) {
        std::vector<const Node*> v;
        for (const Node& n : g.nodes) v.push_back(&n);
        std::stable_sort(v.begin(), v.end(), [](const Node* x, const Node* y) { return x->id < y->id; });
        return v;
    };
    const auto na = by_id(a), nb = by_id(b);
    for (std::size_t i = 0; i < na.size(); ++i) {
        if (na[i]->id != nb[i]->id || na[i]->kind != nb[i]->kind ||
            na[i]->kind_name != nb[i]->kind_name || na[i]->params != nb[i]->params)
            return false;
    }
    return same_wires(a.exec_wires, b.exec_wires) && same_wires(a.data_wires, b.data_wires);
}

namespace {

class Validator {
public:
    explicit Validator(const Graph& g) : g_(g) {}

    std::vector<Diagnostic> run() {
        check_nodes();
        check_exec_wires();
        check_data_wires();
        check_params_and_inputs();
        check_data_cycles();
        check_exec_cycles();
        check_cross_event_payloads();
        return std::move(out_);
    }

private:
    void report(DiagnosticCode code, std::string node, std::string pin, std::optional<std::size_t> wire,
                std::string message, std::optional<SourceSpan> span) {
        out_.push_back({code, std::move(node), std::move(pin), wire, std::move(message), span});
    }

    const KindSpec* kind_of(std::string_view id) const {
        const auto it = nodes_.find(std::string(id));
        if (it == nodes_.end() || it->second->kind == NodeKind::Unknown) return nullptr;
        return &spec_of(it->second->kind);
    }

    bool known_node(std::string_view id) const { return nodes_.contains(std::string(id)); }

    void check_nodes() {
        for (const Node& n : g_.nodes) {
            if (!nodes_.emplace(n.id, &n).second)
                report(DiagnosticCode::DuplicateNodeId, n.id, {}, std::nullopt,
                       "duplicate node id '" + n.id + "'", n.span);
            if (n.kind == NodeKind::Unknown)
                report(DiagnosticCode::UnknownKind, n.id, {}, std::nullopt,
                       "unknown node kind '" + n.kind_name + "'", n.span);
        }
    }

    // Endpoints on nodes of unknown kind are not checked further: UnknownKind already fired.
    void check_exec_wires() {
        std::map<PinRef, std::size_t> fan_out;
        for (std::size_t i = 0; i < g_.exec_wires.size(); ++i) {
            const Wire& w = g_.exec_wires[i];
            bool ok = true;
            for (const PinRef* end : {&w.from, &w.to}) {
                if (!known_node(end->node)) {
                    report(DiagnosticCode::UnknownPin, end->node, end->pin, i,
                           "exec wire references unknown node '" + end->node + "'", w.span);
                    ok = false;
                    continue;
                }
                const KindSpec* k = kind_of(end->node);
                if (!k) { ok = false; continue; }
                if (k->category == NodeCategory::Pure) {
                    report(DiagnosticCode::ExecIntoPure, end->node, end->pin, i,
                           "exec wire touches pure node '" + end->node + "' (" + std::string(k->name) + ")",
                           w.span);
                    ok = false;
                    continue;
                }
                const bool is_from = end == &w.from;
                const bool pin_ok = is_from ? k->has_exec_out(end->pin) : (k->exec_in && end->pin == "in");
                if (!pin_ok) {
                    report(DiagnosticCode::UnknownPin, end->node, end->pin, i,
                           std::string(k->name) + " has no exec " + (is_from ? "output" : "input") +
                               " '" + end->pin + "'",
                           w.span);
                    ok = false;
                }
            }
            if (ok) {
                exec_edges_[w.from.node].push_back(w.to.node);
                if (++fan_out[w.from] == 2)
                    report(DiagnosticCode::ExecFanOut, w.from.node, w.from.pin, i,
                           "exec output " + w.from.node + "." + w.from.pin + " has more than one wire",
                           w.span);
            }
        }
    }

    void check_data_wires() {
        for (std::size_t i = 0; i < g_.data_wires.size(); ++i) {
            const Wire& w = g_.data_wires[i];
            const DataPinSpec* out = nullptr;
            const DataPinSpec* in = nullptr;
            bool ok = true;
            for (const PinRef* end : {&w.from, &w.to}) {
                const bool is_from = end == &w.from;
                if (!known_node(end->node)) {
                    report(DiagnosticCode::UnknownPin, end->node, end->pin, i,
                           "data wire references unknown node '" + end->node + "'", w.span);
                    ok = false;
                    continue;
                }
                const KindSpec* k = kind_of(end->node);
                if (!k) { ok = false; continue; }
                const DataPinSpec* p = is_from ? k->data_out(end->pin) : k->data_in(end->pin);
                if (!p) {
                    report(DiagnosticCode::UnknownPin, end->node, end->pin, i,
                           std::string(k->name) + " has no data " + (is_from ? "output" : "input") +
                               " '" + end->pin + "'",
                           w.span);
                    ok = false;
                }
                (is_from ? out : in) = p;
            }
            if (!ok) continue;
            wired_.insert(w.to);
            if (out->type != in->type) {
                report(DiagnosticCode::TypeMismatch, w.to.node, w.to.pin, i,
                       "cannot wire " + std::string(to_string(out->type)) + " " + w.from.node + "." +
                           w.from.pin + " into " + std::string(to_string(in->type)) + " " + w.to.node +
                           "." + w.to.pin,
                       w.span);
                continue;
            }
            if (!drivers_.emplace(w.to, w.from).second) {
                report(DiagnosticCode::DuplicateInput, w.to.node, w.to.pin, i,
                       "data input " + w.to.node + "." + w.to.pin + " has more than one wire", w.span);
                continue;
            }
            data_edges_[w.from.node].push_back(w.to.node);
        }
    }

    void check_params_and_inputs() {
        for (const Node& n : g_.nodes) {
            if (n.kind == NodeKind::Unknown) continue;
            const KindSpec& k = spec_of(n.kind);
            for (const auto& [name, value] : n.params) {
                std::optional<PinType> expected;
                if (const ParamSpec* p = k.param(name)) expected = p->type;
                else if (const DataPinSpec* d = k.data_in(name)) expected = d->type;
                if (!expected) {
                    report(DiagnosticCode::UnknownPin, n.id, name, std::nullopt,
                           std::string(k.name) + " has no parameter or input '" + name + "'", n.span);
                    continue;
                }
                if (type_of(value) != *expected || *expected == PinType::ActorRef) {
                    report(DiagnosticCode::TypeMismatch, n.id, name, std::nullopt,
                           "literal for " + n.id + "." + name + " is " +
                               std::string(to_string(type_of(value))) + ", expected " +
                               std::string(to_string(*expected)),
                           n.span);
                    continue;
                }
                if (k.data_in(name) && drivers_.contains(PinRef{n.id, name}))
                    report(DiagnosticCode::DuplicateInput, n.id, name, std::nullopt,
                           "input " + n.id + "." + name + " is both wired and given a literal", n.span);
            }
            for (const ParamSpec& p : k.params)
                if (!n.params.contains(std::string(p.name)))
                    report(DiagnosticCode::UnwiredInput, n.id, std::string(p.name), std::nullopt,
                           std::string(k.name) + " '" + n.id + "' needs parameter '" +
                               std::string(p.name) + "'",
                           n.span);
            for (const DataPinSpec& d : k.data_ins) {
                if (wired_.contains(PinRef{n.id, std::string(d.name)})) continue;  // mistyped wires count
                if (n.params.contains(std::string(d.name)) || d.default_value) continue;
                report(DiagnosticCode::UnwiredInput, n.id, std::string(d.name), std::nullopt,
                       "input " + n.id + "." + std::string(d.name) + " has no wire and no literal",
                       n.span);
            }
        }
    }

    // Reports one diagnostic per back edge found by an iterative-colour DFS.
    void find_cycles(const std::map<std::string, std::vector<std::string>>& edges, DiagnosticCode code,
                     const char* what) {
        std::map<std::string, int> colour;  // 0 white, 1 grey, 2 black
        std::function<void(const std::string&)> visit = [&](const std::string& u) {
            colour[u] = 1;
            if (const auto it = edges.find(u); it != edges.end()) {
                for (const std::string& v : it->second) {
                    if (colour[v] == 1) {
                        const Node* n = g_.find(v);
                        report(code, v, {}, std::nullopt,
                               std::string(what) + " cycle through '" + u + "' -> '" + v + "'",
                               n ? n->span : std::nullopt);
                    } else if (colour[v] == 0) {
                        visit(v);
                    }
                }
            }
            colour[u] = 2;
        };
        for (const Node& n : g_.nodes)
            if (colour[n.id] == 0) visit(n.id);
    }

    void check_data_cycles() { find_cycles(data_edges_, DiagnosticCode::DataCycle, "data"); }
    void check_exec_cycles() { find_cycles(exec_edges_, DiagnosticCode::ExecCycle, "exec"); }

    std::set<std::string> exec_reachable(const std::string& event) const {
        std::set<std::string> seen;
        std::vector<std::string> stack{event};
        while (!stack.empty()) {
            const std::string u = stack.back();
            stack.pop_back();
            if (!seen.insert(u).second) continue;
            if (const auto it = exec_edges_.find(u); it != exec_edges_.end())
                for (const auto& v : it->second) stack.push_back(v);
        }
        seen.erase(event);
        return seen;
    }

    // Events whose payload pins flow (through pure nodes) into the inputs of `id`.
    std::set<std::string> payload_sources(const std::string& id) const {
        std::set<std::string> events, seen;
        std::vector<std::string> stack{id};
        while (!stack.empty()) {
            const std::string u = stack.back();
            stack.pop_back();
            if (!seen.insert(u).second) continue;
            for (const auto& [to, from] : drivers_) {
                if (to.node != u) continue;
                const KindSpec* k = kind_of(from.node);
                if (!k) continue;
                if (k->category == NodeCategory::Event) events.insert(from.node);
                else if (k->category == NodeCategory::Pure) stack.push_back(from.node);
            }
        }
        return events;
    }

    void check_cross_event_payloads() {
        std::map<std::string, std::set<std::string>> reached_by;  // exec node -> events reaching it
        for (const Node& n : g_.nodes) {
            const KindSpec* k = kind_of(n.id);
            if (!k || k->category != NodeCategory::Event || nodes_.at(n.id) != &n) continue;
            for (const auto& target : exec_reachable(n.id)) reached_by[target].insert(n.id);
        }
        for (const Node& n : g_.nodes) {
            const KindSpec* k = kind_of(n.id);
            if (!k || k->category != NodeCategory::Effect || nodes_.at(n.id) != &n) continue;
            const auto& reaching = reached_by[n.id];
            for (const std::string& src : payload_sources(n.id)) {
                if (!reaching.contains(src)) {
                    report(DiagnosticCode::CrossEventPayload, n.id, {}, std::nullopt,
                           "'" + n.id + "' reads the payload of event '" + src +
                               "' but is not executed by it",
                           n.span);
                    continue;
                }
                for (const std::string& other : reaching)
                    if (other != src)
                        report(DiagnosticCode::CrossEventPayload, n.id, {}, std::nullopt,
                               "'" + n.id + "' reads the payload of event '" + src +
                                   "' but is also executed by event '" + other + "'",
                               n.span);
            }
        }
    }

    const Graph& g_;
    std::vector<Diagnostic> out_;
    std::map<std::string, const Node*> nodes_;
    std::map<std::string, std::vector<std::string>> exec_edges_;
    std::map<std::string, std::vector<std::string>> data_edges_;
    std::map<PinRef, PinRef> drivers_;  // data-in -> data-out
    std::set<PinRef> wired_;             // every data-in with a resolvable wire, well-typed or not
};

}  // namespace

std::vector<Diagnostic> validate(const Graph& g) { return Validator(g).run(); }

}  // namespace flow::graph
