#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include <json.hpp>

#include "flow/graphlang.hpp"

namespace flow::graphlang {

using graph::Graph;
using graph::Node;
using graph::Value;
using graph::Wire;

namespace {

std::string format_number(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out.push_back(c);
        }
    }
    return out + '"';
}

std::string triple(double a, double b, double c) {
    return '(' + format_number(a) + ", " + format_number(b) + ", " + format_number(c) + ')';
}

// Catalog order: kind parameters, then data-in literals; names the catalog does not know last.
std::vector<std::pair<std::string, const Value*>> ordered_params(const Node& n) {
    std::vector<std::pair<std::string, const Value*>> out;
    std::set<std::string> used;
    if (n.kind != graph::NodeKind::Unknown) {
        const graph::KindSpec& k = graph::spec_of(n.kind);
        auto take = [&](std::string_view name) {
            const auto it = n.params.find(std::string(name));
            if (it == n.params.end()) return;
            out.emplace_back(it->first, &it->second);
            used.insert(it->first);
        };
        for (const auto& p : k.params) take(p.name);
        for (const auto& d : k.data_ins) take(d.name);
    }
    for (const auto& [name, v] : n.params)
        if (!used.contains(name)) out.emplace_back(name, &v);
    return out;
}

struct Canonical {
    std::vector<const Node*> nodes;
    std::vector<Wire> exec;
    std::vector<Wire> data;
};

Canonical canonicalize(const Graph& g) {
    Canonical c;
    c.exec = g.exec_wires;
    c.data = g.data_wires;
    std::sort(c.exec.begin(), c.exec.end(), graph::wire_less);
    std::sort(c.data.begin(), c.data.end(), graph::wire_less);

    std::map<std::string, std::vector<const Node*>> by_id;
    for (const Node& n : g.nodes) by_id[n.id].push_back(&n);
    std::set<std::string> placed;
    auto place = [&](const std::string& id) {
        if (!placed.insert(id).second) return;
        const auto it = by_id.find(id);
        if (it != by_id.end())
            for (const Node* n : it->second) c.nodes.push_back(n);
    };
    for (const auto* wires : {&c.exec, &c.data})
        for (const Wire& w : *wires) {
            place(w.from.node);
            place(w.to.node);
        }
    for (const auto& [id, _] : by_id) place(id);
    return c;
}

}  // namespace

std::string format_literal(const Value& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, double>) return format_number(x);
            else if constexpr (std::is_same_v<T, bool>) return x ? "true" : "false";
            else if constexpr (std::is_same_v<T, std::string>) return quote(x);
            else if constexpr (std::is_same_v<T, Vec3>) return triple(x.x, x.y, x.z);
            else if constexpr (std::is_same_v<T, Rotator>) return triple(x.roll, x.pitch, x.yaw);
            else return "actor(" + std::to_string(x.value) + ")";
        },
        v);
}

std::string serialize(const Graph& g) {
    const Canonical c = canonicalize(g);
    std::string out = "graph " + g.name + " {\n";
    for (const Node* n : c.nodes) {
        out += "  node " + n->id + " : " + n->kind_name;
        const auto params = ordered_params(*n);
        if (!params.empty()) {
            out += '(';
            for (std::size_t i = 0; i < params.size(); ++i) {
                if (i) out += ", ";
                out += params[i].first + '=' + format_literal(*params[i].second);
            }
            out += ')';
        }
        out += '\n';
    }
    for (const auto& [kw, wires] : {std::pair{"exec", &c.exec}, std::pair{"data", &c.data}})
        for (const Wire& w : *wires)
            out += std::string("  ") + kw + ' ' + w.from.node + '.' + w.from.pin + " -> " + w.to.node +
                   '.' + w.to.pin + '\n';
    out += "}\n";
    return out;
}

std::string to_json(const Graph& g) {
    using nlohmann::ordered_json;
    const Canonical c = canonicalize(g);
    ordered_json doc;
    doc["format"] = "fgjson/1";
    doc["name"] = g.name;
    ordered_json nodes = ordered_json::array();
    for (const Node* n : c.nodes) {
        ordered_json params = ordered_json::object();
        for (const auto& [name, v] : ordered_params(*n)) {
            params[name] = std::visit(
                [](const auto& x) -> ordered_json {
                    using T = std::decay_t<decltype(x)>;
                    if constexpr (std::is_same_v<T, Vec3>) return ordered_json::array({x.x, x.y, x.z});
                    else if constexpr (std::is_same_v<T, Rotator>)
                        return ordered_json::array({x.roll, x.pitch, x.yaw});
                    else if constexpr (std::is_same_v<T, ActorId>) return x.value;
                    else return x;
                },
                *v);
        }
        nodes.push_back({{"id", n->id}, {"kind", n->kind_name}, {"params", std::move(params)}});
    }
    doc["nodes"] = std::move(nodes);
    for (const auto& [key, wires] : {std::pair{"exec", &c.exec}, std::pair{"data", &c.data}}) {
        ordered_json arr = ordered_json::array();
        for (const Wire& w : *wires)
            arr.push_back({{"from", {{"node", w.from.node}, {"pin", w.from.pin}}},
                           {"to", {{"node", w.to.node}, {"pin", w.to.pin}}}});
        doc[key] = std::move(arr);
    }
    return doc.dump(2) + "\n";
}

}  // namespace flow::graphlang
