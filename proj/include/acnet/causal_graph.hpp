#pragma once

// Typed causal graph over situation and emotion nodes. Directed edges point from
// cause to effect; a latent-confounded edge joins a situation and an emotion
// that share an unobserved driver H_k.

#include <algorithm>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "acnet/event_sequence.hpp"

namespace acnet {

/// Forward: situation -> emotion. Backward: emotion -> situation.
enum class EdgeKind { Forward, Backward, LatentConfounded };

inline const char* to_string(EdgeKind k) {
    switch (k) {
        case EdgeKind::Forward: return "forward";
        case EdgeKind::Backward: return "backward";
        case EdgeKind::LatentConfounded: return "latent";
    }
    return "?";
}

inline EdgeKind edge_kind_from_string(const std::string& s) {
    if (s == "forward") return EdgeKind::Forward;
    if (s == "backward") return EdgeKind::Backward;
    if (s == "latent") return EdgeKind::LatentConfounded;
    throw std::invalid_argument("unknown edge kind '" + s + "'");
}

struct GraphNode {
    std::string name;
    SequenceKind kind = SequenceKind::Situation;
    bool operator==(const GraphNode&) const = default;
};

struct GraphEdge {
    std::string from;
    std::string to;
    EdgeKind kind = EdgeKind::Forward;
    std::optional<std::string> latent_id;
    // Audit fields filled in by the direction learner; absent on planted graphs.
    std::optional<bool> s1;
    std::optional<bool> s2;
    std::optional<int> eta_c;
    std::optional<int> eta_m;

    bool operator==(const GraphEdge&) const = default;
};

class GraphError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class CausalGraph {
public:
    CausalGraph() = default;

    void add_node(std::string name, SequenceKind kind) {
        if (find_node(name)) throw GraphError("duplicate node '" + name + "'");
        nodes_.push_back({std::move(name), kind});
    }

    void add_edge(GraphEdge edge) {
        if (edge.from == edge.to) throw GraphError("self-edge on '" + edge.from + "'");
        const auto* a = find_node(edge.from);
        const auto* b = find_node(edge.to);
        if (!a || !b) throw GraphError("edge " + edge.from + " - " + edge.to + " references an unknown node");
        if (has_edge_between(edge.from, edge.to))
            throw GraphError("duplicate edge between '" + edge.from + "' and '" + edge.to + "'");
        if (edge.kind == EdgeKind::LatentConfounded && !edge.latent_id)
            throw GraphError("latent-confounded edge " + edge.from + " - " + edge.to + " lacks a latent id");
        if (edge.kind != EdgeKind::LatentConfounded && edge.latent_id)
            throw GraphError("directed edge " + edge.from + " -> " + edge.to + " carries a latent id");
        edges_.push_back(std::move(edge));
    }

    bool has_edge_between(const std::string& a, const std::string& b) const {
        return std::any_of(edges_.begin(), edges_.end(), [&](const GraphEdge& e) {
            return (e.from == a && e.to == b) || (e.from == b && e.to == a);
        });
    }

    const GraphNode* find_node(const std::string& name) const {
        for (const auto& n : nodes_)
            if (n.name == name) return &n;
        return nullptr;
    }

    const std::vector<GraphNode>& nodes() const { return nodes_; }
    const std::vector<GraphEdge>& edges() const { return edges_; }
    bool empty() const { return edges_.empty(); }

    /// Situations before emotions, names ascending; edges ordered by endpoints.
    void canonicalize() {
        std::sort(nodes_.begin(), nodes_.end(), [](const GraphNode& a, const GraphNode& b) {
            return std::tie(a.kind, a.name) < std::tie(b.kind, b.name);
        });
        std::sort(edges_.begin(), edges_.end(),
                  [](const GraphEdge& a, const GraphEdge& b) { return std::tie(a.from, a.to) < std::tie(b.from, b.to); });
    }

    bool operator==(const CausalGraph&) const = default;

    std::string to_dot() const {
        std::ostringstream os;
        os << "digraph acnet {\n";
        for (const auto& n : nodes_)
            os << "  \"" << n.name << "\" [shape=" << (n.kind == SequenceKind::Situation ? "box" : "ellipse")
               << "];\n";
        for (const auto& e : edges_) {
            if (e.kind == EdgeKind::LatentConfounded) {
                os << "  \"" << *e.latent_id << "\" [shape=circle, style=dashed];\n";
                os << "  \"" << *e.latent_id << "\" -> \"" << e.from << "\" [style=dashed];\n";
                os << "  \"" << *e.latent_id << "\" -> \"" << e.to << "\" [style=dashed];\n";
            } else {
                os << "  \"" << e.from << "\" -> \"" << e.to << "\";\n";
            }
        }
        os << "}\n";
        return os.str();
    }

private:
    std::vector<GraphNode> nodes_;
    std::vector<GraphEdge> edges_;
};

/// A hidden driver shared by two observed sequences.
struct LatentFactor {
    std::string id;
    std::string situation;
    std::string emotion;
    bool operator==(const LatentFactor&) const = default;
};

/// A planted structure: the observable graph plus the latent factor definitions.
struct GroundTruthGraph {
    CausalGraph graph;
    std::vector<LatentFactor> latents;
    bool operator==(const GroundTruthGraph&) const = default;
};

/// Node set of a bundle as an edgeless canonical graph.
inline CausalGraph graph_skeleton(const SequenceBundle& bundle) {
    CausalGraph g;
    for (const auto& s : bundle.situations) g.add_node(s.name, SequenceKind::Situation);
    for (const auto& e : bundle.emotions) g.add_node(e.name, SequenceKind::Emotion);
    g.canonicalize();
    return g;
}

}  // namespace acnet
