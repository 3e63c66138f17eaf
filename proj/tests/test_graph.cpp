#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "graphtv/graph.hpp"
#include "graphtv/imaging.hpp"
#include "graphtv/oracle.hpp"
#include "test_support.hpp"

namespace graphtv {
namespace {

using testing::six_vertex_graph;

TEST(Graph, RejectsBadEdges)
{
    EXPECT_THROW(Graph(2, {{0, 2}}), std::invalid_argument);
    EXPECT_THROW(Graph(2, {{1, 1}}), std::invalid_argument);
    EXPECT_THROW(Graph(0, {}), std::invalid_argument);
}

TEST(Graph, AdjacencyMatchesEdgeList)
{
    const auto g = six_vertex_graph();
    for (std::size_t k = 0; k < g.num_edges(); ++k) {
        const auto& e = g.edges()[k];
        const auto out = g.outgoing(e.tail);
        const auto in = g.incoming(e.head);
        EXPECT_EQ(std::count(out.begin(), out.end(), k), 1);
        EXPECT_EQ(std::count(in.begin(), in.end(), k), 1);
    }
    std::size_t total = 0;
    for (index_t v = 0; v < g.num_vertices(); ++v) total += g.degree(v);
    EXPECT_EQ(total, 2 * g.num_edges());
}

TEST(Graph, DisconnectedAccepted)
{
    const Graph g(4, {{0, 1}, {2, 3}});
    EXPECT_EQ(g.num_edges(), 2u);
    EXPECT_EQ(g.degree(0), 1u);
}

TEST(Gradient, SixVertexIndicatorOfV5)
{
    const auto g = six_vertex_graph();
    VertexField f(6);
    f[4] = 1.0;
    const auto grad = gradient(g, f);
    EXPECT_EQ(grad[5], 1.0);  // e6 = (v2, v5)
    EXPECT_EQ(grad[6], 1.0);  // e7 = (v3, v5)
    EXPECT_EQ(grad[9], -1.0); // e10 = (v5, v6)
}

TEST(Gradient, ConstantIsExactlyZero)
{
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        const auto graph = oracle::random_connected_graph(2 + rng() % 30, rng() % 20, rng);
        const VertexField f(graph.num_vertices(), 3.7 * trial - 11.3);
        for (double x : gradient(graph, f)) EXPECT_EQ(x, 0.0);
    }
}

TEST(Gradient, TwoVertex)
{
    const Graph g(2, {{0, 1}});
    EXPECT_EQ(gradient(g, VertexField{0.0, 4.0}), (EdgeFlow{4.0}));
    EXPECT_THROW(gradient(g, VertexField{1.0}), std::invalid_argument);
}

TEST(Divergence, SixVertexAtV3)
{
    const auto g = six_vertex_graph();
    EdgeFlow flow(10);
    flow[1] = 1.0; // e2
    flow[4] = 2.0; // e5
    flow[7] = 3.0; // e8
    flow[3] = 1.0; // e4
    flow[6] = 2.0; // e7
    EXPECT_EQ(divergence(g, flow)[2], 3.0);
}

TEST(Divergence, ZeroAndTwoVertex)
{
    const auto g = six_vertex_graph();
    for (double x : divergence(g, EdgeFlow(10))) EXPECT_EQ(x, 0.0);
    const Graph two(2, {{0, 1}});
    EXPECT_EQ(divergence(two, EdgeFlow{1.0}), (VertexField{-1.0, 1.0}));
    EXPECT_THROW(divergence(two, EdgeFlow{1.0, 2.0}), std::invalid_argument);
}

TEST(DivergenceExcludingEdge, Examples)
{
    const Graph two(2, {{0, 1}});
    EXPECT_EQ(divergence_excluding_edge(two, EdgeFlow{1.0}, 0), std::make_pair(0.0, 0.0));

    const auto g = six_vertex_graph();
    EdgeFlow flow(10);
    flow[1] = 1.0;
    flow[4] = 2.0;
    flow[7] = 3.0;
    flow[3] = 1.0;
    flow[6] = 2.0;
    // e4 = (v3, v2): v3 is the tail.
    EXPECT_EQ(divergence_excluding_edge(g, flow, 3).first, 4.0);
    EXPECT_THROW(divergence_excluding_edge(g, flow, 10), std::out_of_range);
}

TEST(DivergenceExcludingEdge, MatchesIdentity)
{
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const auto graph = oracle::random_connected_graph(2 + rng() % 20, rng() % 15, rng);
        auto flow = testing::random_flow(graph.num_edges(), rng);
        const auto div = divergence(graph, flow);
        for (std::size_t k = 0; k < graph.num_edges(); ++k) {
            const auto& e = graph.edges()[k];
            const auto [tail, head] = divergence_excluding_edge(graph, flow, k);
            EXPECT_NEAR(tail, div[e.tail] + flow[k], 1e-14);
            EXPECT_NEAR(head, div[e.head] - flow[k], 1e-14);
        }
        // Zero flow on the excluded edge: plain divergence.
        flow[0] = 0.0;
        const auto div0 = divergence(graph, flow);
        const auto [tail, head] = divergence_excluding_edge(graph, flow, 0);
        EXPECT_NEAR(tail, div0[graph.edges()[0].tail], 1e-14);
        EXPECT_NEAR(head, div0[graph.edges()[0].head], 1e-14);
    }
}

TEST(InnerProduct, Basics)
{
    const VertexField f{1.0, -2.0, 3.0};
    EXPECT_EQ(inner_product(f, f), 14.0);
    EXPECT_EQ(inner_product(VertexField{1.0, 0.0}, VertexField{0.0, 5.0}), 0.0);
    EXPECT_EQ(inner_product(EdgeFlow{2.0, 3.0}, EdgeFlow{4.0, -1.0}), 5.0);
    EXPECT_THROW(inner_product(VertexField{1.0}, VertexField{1.0, 2.0}), std::invalid_argument);
}

TEST(InnerProduct, AdjointnessOnRandomGraphs)
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto graph = oracle::random_connected_graph(1 + rng() % 50, rng() % 60, rng);
        const auto f = testing::random_field(graph.num_vertices(), rng);
        const auto g = testing::random_flow(graph.num_edges(), rng);
        const double rhs = inner_product(g, gradient(graph, f));
        const double lhs = inner_product(divergence(graph, g), f);
        ASSERT_LE(std::abs(lhs - rhs), 1e-12 * (1.0 + std::abs(rhs)));
    }
}

TEST(Divergence, ZeroSum)
{
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const auto graph = oracle::random_connected_graph(2 + rng() % 50, rng() % 60, rng);
        const auto g = testing::random_flow(graph.num_edges(), rng, 10.0);
        double sum = 0.0, l1 = 0.0;
        for (double x : divergence(graph, g)) sum += x;
        for (double x : g) l1 += std::abs(x);
        ASSERT_LE(std::abs(sum), 1e-12 * l1);
    }
}

TEST(Coloring, SmallCases)
{
    EXPECT_EQ(greedy_edge_coloring(Graph(2, {{0, 1}})).num_colors(), 1u);
    const Graph triangle(3, {{0, 1}, {1, 2}, {2, 0}});
    const auto c = greedy_edge_coloring(triangle);
    EXPECT_EQ(c.num_colors(), 3u);
    EXPECT_TRUE(is_valid_coloring(triangle, c));
    EXPECT_EQ(greedy_edge_coloring(Graph(1, {})).num_colors(), 0u);
}

// Brute-force incidence check: every pair inside a class has four distinct
// endpoints.
bool pairwise_disjoint(const Graph& g, const EdgeColoring& coloring)
{
    for (const auto& cls : coloring.classes) {
        for (std::size_t a = 0; a < cls.size(); ++a) {
            for (std::size_t b = a + 1; b < cls.size(); ++b) {
                const auto& x = g.edges()[cls[a]];
                const auto& y = g.edges()[cls[b]];
                const std::set<index_t> ends{x.tail, x.head, y.tail, y.head};
                if (ends.size() != 4) return false;
            }
        }
    }
    return true;
}

TEST(Coloring, GridHasExplicitFourClassPartition)
{
    for (auto [w, h] : {std::pair<std::size_t, std::size_t>{5, 4}, {7, 7}, {2, 9}}) {
        const auto g = grid_graph(w, h);
        const auto explicit_classes = grid_edge_coloring(w, h);
        EXPECT_EQ(explicit_classes.num_colors(), w > 2 && h > 2 ? 4u : 3u);
        EXPECT_TRUE(pairwise_disjoint(g, explicit_classes));
        EXPECT_TRUE(is_valid_coloring(g, explicit_classes));

        const auto greedy = greedy_edge_coloring(g);
        EXPECT_LE(greedy.num_colors(), 4u);
        EXPECT_TRUE(pairwise_disjoint(g, greedy));
    }
}

TEST(Coloring, ValidAndDeterministicOnRandomGraphs)
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const auto graph = oracle::random_connected_graph(2 + rng() % 40, rng() % 80, rng);
        const auto a = greedy_edge_coloring(graph);
        EXPECT_TRUE(is_valid_coloring(graph, a));
        EXPECT_TRUE(pairwise_disjoint(graph, a));
        EXPECT_EQ(a, greedy_edge_coloring(graph));
    }
}

TEST(Coloring, ValidityDetectsBrokenColorings)
{
    const Graph path(3, {{0, 1}, {1, 2}});
    EXPECT_FALSE(is_valid_coloring(path, EdgeColoring{{{0, 1}}}));
    EXPECT_FALSE(is_valid_coloring(path, EdgeColoring{{{0}}}));
    EXPECT_FALSE(is_valid_coloring(path, EdgeColoring{{{0}, {0, 1}}}));
    EXPECT_TRUE(is_valid_coloring(path, EdgeColoring{{{1}, {0}}}));
}

TEST(GraphText, ReadWrite)
{
    std::istringstream in("3 2\n0 1\n2 1\n");
    const auto g = read_graph(in);
    EXPECT_EQ(g.num_vertices(), 3u);
    EXPECT_EQ(g.edges()[1], (Edge{2, 1}));
    std::ostringstream out;
    write_graph(out, g);
    EXPECT_EQ(out.str(), "3 2\n0 1\n2 1\n");

    std::istringstream truncated("3 2\n0 1\n");
    EXPECT_THROW(read_graph(truncated), std::runtime_error);
    std::istringstream loop("2 1\n1 1\n");
    EXPECT_THROW(read_graph(loop), std::invalid_argument);
}

} // namespace
} // namespace graphtv
