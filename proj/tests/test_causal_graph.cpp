#include <gtest/gtest.h>

#include "acnet/causal_graph.hpp"

using namespace acnet;

namespace {

CausalGraph small_graph() {
    CausalGraph g;
    g.add_node("C1", SequenceKind::Situation);
    g.add_node("C2", SequenceKind::Situation);
    g.add_node("M1", SequenceKind::Emotion);
    g.add_node("M2", SequenceKind::Emotion);
    return g;
}

}  // namespace

TEST(CausalGraph, RejectsSelfAndDuplicateEdges) {
    auto g = small_graph();
    g.add_edge({"C1", "M1", EdgeKind::Forward});
    EXPECT_THROW(g.add_edge({"C1", "M1", EdgeKind::Forward}), GraphError);
    EXPECT_THROW(g.add_edge({"M1", "C1", EdgeKind::Backward}), GraphError);
    EXPECT_THROW(g.add_edge({"C2", "C2", EdgeKind::Forward}), GraphError);
    EXPECT_EQ(g.edges().size(), 1U);
}

TEST(CausalGraph, RejectsUnknownNodesAndDuplicateNodes) {
    auto g = small_graph();
    EXPECT_THROW(g.add_edge({"C1", "M9", EdgeKind::Forward}), GraphError);
    EXPECT_THROW(g.add_node("C1", SequenceKind::Emotion), GraphError);
}

TEST(CausalGraph, LatentIdRules) {
    auto g = small_graph();
    EXPECT_THROW(g.add_edge({"C1", "M1", EdgeKind::LatentConfounded}), GraphError);
    EXPECT_THROW(g.add_edge({"C1", "M1", EdgeKind::Forward, "H1"}), GraphError);
    g.add_edge({"C1", "M1", EdgeKind::LatentConfounded, "H1"});
    EXPECT_TRUE(g.has_edge_between("M1", "C1"));
}

TEST(CausalGraph, CanonicalFormIsOrderIndependent) {
    CausalGraph a, b;
    a.add_node("M1", SequenceKind::Emotion);
    a.add_node("C2", SequenceKind::Situation);
    a.add_node("C1", SequenceKind::Situation);
    b.add_node("C1", SequenceKind::Situation);
    b.add_node("C2", SequenceKind::Situation);
    b.add_node("M1", SequenceKind::Emotion);
    a.add_edge({"C2", "M1", EdgeKind::Forward});
    a.add_edge({"C1", "M1", EdgeKind::Forward});
    b.add_edge({"C1", "M1", EdgeKind::Forward});
    b.add_edge({"C2", "M1", EdgeKind::Forward});
    EXPECT_NE(a, b);
    a.canonicalize();
    b.canonicalize();
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.nodes().front().name, "C1");
}

TEST(CausalGraph, DotRendersLatentsAsDashedParents) {
    auto g = small_graph();
    g.add_edge({"C1", "M1", EdgeKind::Forward});
    g.add_edge({"C2", "M2", EdgeKind::LatentConfounded, "H1"});
    const auto dot = g.to_dot();
    EXPECT_NE(dot.find("\"C1\" -> \"M1\""), std::string::npos);
    EXPECT_NE(dot.find("\"H1\" -> \"C2\" [style=dashed]"), std::string::npos);
    EXPECT_NE(dot.find("\"H1\" -> \"M2\" [style=dashed]"), std::string::npos);
}

TEST(CausalGraph, EdgeKindStrings) {
    for (auto k : {EdgeKind::Forward, EdgeKind::Backward, EdgeKind::LatentConfounded})
        EXPECT_EQ(edge_kind_from_string(to_string(k)), k);
    EXPECT_THROW(edge_kind_from_string("sideways"), std::invalid_argument);
}

TEST(CausalGraph, SkeletonHasNodesOnly) {
    SequenceBundle b;
    b.grid = {10, 3};
    b.emotions.push_back({"M1", SequenceKind::Emotion, {0, 1, 0}});
    b.situations.push_back({"C1", SequenceKind::Situation, {1, 0, 0}});
    const auto g = graph_skeleton(b);
    ASSERT_EQ(g.nodes().size(), 2U);
    EXPECT_TRUE(g.empty());
    EXPECT_EQ(g.nodes()[0].kind, SequenceKind::Situation);
}
