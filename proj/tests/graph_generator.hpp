#pragma once

// Random graphs for round-trip properties.

#include <cmath>
#include <random>
#include <string>

#include "flow/graph.hpp"

namespace flow::testing {

using namespace flow::graph;

/// Random graphs over the whole catalog with well-formed pin references (validity not required).
class GraphGenerator {
public:
    explicit GraphGenerator(std::uint64_t seed) : rng_(seed) {}

    Graph next() {
        Graph g;
        g.name = "G" + std::to_string(counter_++);
        const auto cat = catalog();
        const std::size_t n = pick(12) + 1;
        for (std::size_t i = 0; i < n; ++i) {
            const KindSpec& k = cat[pick(cat.size())];
            Node node;
            node.id = ident(i);
            node.kind = k.kind;
            node.kind_name = std::string(k.name);
            for (const ParamSpec& p : k.params)
                if (coin(0.9)) node.params[std::string(p.name)] = literal(p.type);
            for (const DataPinSpec& d : k.data_ins)
                if (d.type != PinType::ActorRef && coin(0.4)) node.params[std::string(d.name)] = literal(d.type);
            g.nodes.push_back(std::move(node));
        }
        for (std::size_t i = 0, m = pick(2 * n); i < m; ++i) {
            const Node& a = g.nodes[pick(n)];
            const Node& b = g.nodes[pick(n)];
            const KindSpec& ka = spec_of(a.kind);
            const KindSpec& kb = spec_of(b.kind);
            if (coin(0.4)) {
                if (ka.exec_outs.empty() || !kb.exec_in) continue;
                g.exec_wires.push_back({{a.id, std::string(ka.exec_outs[pick(ka.exec_outs.size())])}, {b.id, "in"}, {}});
            } else {
                if (ka.data_outs.empty() || kb.data_ins.empty()) continue;
                g.data_wires.push_back({{a.id, std::string(ka.data_outs[pick(ka.data_outs.size())].name)},
                                        {b.id, std::string(kb.data_ins[pick(kb.data_ins.size())].name)}, {}});
            }
        }
        return g;
    }

private:
    std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
    bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }

    std::string ident(std::size_t i) {
        static const char* stems[] = {"tick", "mul", "rot", "self", "apply", "x", "Node_", "a1", "_t"};
        return stems[pick(std::size(stems))] + std::to_string(i);
    }

    double number() {
        switch (pick(5)) {
            case 0: return static_cast<double>(static_cast<int>(pick(2001)) - 1000);
            case 1: return std::uniform_real_distribution<double>(-1e3, 1e3)(rng_);
            case 2: return std::ldexp(std::uniform_real_distribution<double>(-1, 1)(rng_), static_cast<int>(pick(2000)) - 1000);
            case 3: return 0.1 * static_cast<double>(pick(100));
            default: return std::uniform_real_distribution<double>(-1, 1)(rng_) * 1e-300;
        }
    }

    std::string text() {
        static const std::string alphabet = "abc XYZ_\"\\\n\t\r#{}()=->.,:09\xc3\xa9";
        std::string s;
        for (std::size_t i = 0, n = pick(10); i < n; ++i) s.push_back(alphabet[pick(alphabet.size())]);
        return s;
    }

    Value literal(PinType t) {
        switch (t) {
            case PinType::Float: return number();
            case PinType::Bool: return coin(0.5);
            case PinType::Text: return text();
            case PinType::Vector: return Vec3{number(), number(), number()};
            case PinType::Rotator: return Rotator{number(), number(), number()};
            case PinType::ActorRef: break;
        }
        return 0.0;
    }

    std::mt19937_64 rng_;
    int counter_ = 0;
};

}  // namespace flow::testing
