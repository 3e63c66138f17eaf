#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "graphtv/imaging.hpp"
#include "graphtv/oracle.hpp"
#include "graphtv/tv_model.hpp"
#include "test_support.hpp"

namespace graphtv {
namespace {

const Graph kEdge(2, {{0, 1}});

TEST(RofProblem, Validation)
{
    EXPECT_THROW(RofProblem(kEdge, VertexField{0.0, 4.0}, 0.0), std::invalid_argument);
    EXPECT_THROW(RofProblem(kEdge, VertexField{0.0, 4.0}, -1.0), std::invalid_argument);
    EXPECT_THROW(RofProblem(kEdge, VertexField{0.0}, 1.0), std::invalid_argument);
}

TEST(BvSeminorm, Examples)
{
    EXPECT_EQ(bv_seminorm(testing::six_vertex_graph(), VertexField(6, 2.5)), 0.0);
    EXPECT_EQ(bv_seminorm(kEdge, VertexField{0.0, 4.0}), 4.0);
    // Row-major [[0, 1], [0, 1]]: two horizontal jumps of 1, no vertical ones.
    EXPECT_EQ(bv_seminorm(grid_graph(2, 2), VertexField{0.0, 1.0, 0.0, 1.0}), 2.0);
    EXPECT_THROW(bv_seminorm(kEdge, VertexField{1.0}), std::invalid_argument);
}

TEST(BvSeminorm, ZeroOnlyForComponentwiseConstant)
{
    const Graph two_parts(4, {{0, 1}, {2, 3}});
    EXPECT_EQ(bv_seminorm(two_parts, VertexField{1.0, 1.0, 5.0, 5.0}), 0.0);
    EXPECT_GT(bv_seminorm(two_parts, VertexField{1.0, 1.0, 5.0, 5.5}), 0.0);
}

TEST(BvSeminorm, EqualsL1OfGradient)
{
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 50; ++trial) {
        const auto graph = oracle::random_connected_graph(2 + rng() % 30, rng() % 30, rng);
        const auto u = testing::random_field(graph.num_vertices(), rng, -5.0, 5.0);
        auto grad = gradient(graph, u);
        for (auto& x : grad) x = std::abs(x);
        const EdgeFlow ones(graph.num_edges(), 1.0);
        EXPECT_NEAR(bv_seminorm(graph, u), inner_product(grad, ones), 1e-12);
    }
}

TEST(RofEnergy, Examples)
{
    const RofProblem p(kEdge, VertexField{0.0, 4.0}, 1.0);
    EXPECT_EQ(rof_energy(p, p.u0()), 4.0);
    EXPECT_EQ(rof_energy(p, VertexField{0.0, 0.0}), 8.0);
    EXPECT_EQ(rof_energy(p, VertexField{1.0, 3.0}), 3.0);
    EXPECT_THROW(rof_energy(p, VertexField{1.0}), std::invalid_argument);
}

TEST(RofEnergy, ConvexAlongSegments)
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const auto graph = oracle::random_connected_graph(2 + rng() % 20, rng() % 20, rng);
        const std::size_t n = graph.num_vertices();
        const RofProblem p(graph, testing::random_field(n, rng, 0.0, 10.0), 0.1 + (rng() % 50) / 10.0);
        const auto a = testing::random_field(n, rng, 0.0, 10.0);
        const auto b = testing::random_field(n, rng, 0.0, 10.0);
        for (double lambda : {0.25, 0.5, 0.75}) {
            VertexField mix(n);
            for (std::size_t v = 0; v < n; ++v) mix[v] = lambda * a[v] + (1 - lambda) * b[v];
            EXPECT_LE(rof_energy(p, mix), lambda * rof_energy(p, a) + (1 - lambda) * rof_energy(p, b) + 1e-10);
        }
    }
}

TEST(DualObjective, Examples)
{
    const RofProblem p(kEdge, VertexField{0.0, 4.0}, 1.0);
    EXPECT_DOUBLE_EQ(dual_objective(p, EdgeFlow{0.0}), 4.0);
    EXPECT_DOUBLE_EQ(dual_objective(p, EdgeFlow{1.0}), std::sqrt(10.0));
    const RofProblem p2(kEdge, VertexField{0.0, 4.0}, 2.0);
    EXPECT_DOUBLE_EQ(dual_objective(p2, EdgeFlow{2.0}), 2.0 * std::sqrt(2.0));
    EXPECT_EQ(fixed_point_residual(p2, EdgeFlow{2.0}), 0.0);
}

TEST(DualObjective, PrimalDualConsistency)
{
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        const auto graph = oracle::random_connected_graph(2 + rng() % 20, rng() % 20, rng);
        const double t = 0.5 + (rng() % 10);
        const RofProblem p(graph, testing::random_field(graph.num_vertices(), rng, 0.0, 10.0), t);
        const auto g = testing::random_flow(graph.num_edges(), rng, t);
        const auto u = primal_from_flow(p, g);
        EXPECT_TRUE(std::isfinite(rof_energy(p, u)));
        double dist = 0.0;
        for (std::size_t v = 0; v < u.size(); ++v) dist += (p.u0()[v] - u[v]) * (p.u0()[v] - u[v]);
        // ||u0 - u|| = ||div g||, and the dual objective is ||u||.
        double norm_u = 0.0;
        for (double x : u) norm_u += x * x;
        EXPECT_NEAR(dual_objective(p, g), std::sqrt(norm_u), 1e-12 * (1 + std::sqrt(norm_u)));
        double div_norm = 0.0;
        for (double x : divergence(graph, g)) div_norm += x * x;
        EXPECT_NEAR(dist, div_norm, 1e-10 * (1 + div_norm));
    }
}

TEST(FixedPointResidual, Examples)
{
    const RofProblem p(kEdge, VertexField{0.0, 4.0}, 1.0);
    EXPECT_EQ(fixed_point_residual(p, EdgeFlow{1.0}), 0.0);
    EXPECT_EQ(fixed_point_residual(p, EdgeFlow{0.0}), 1.0);
    const RofProblem flat(testing::six_vertex_graph(), VertexField(6, 7.0), 1.0);
    EXPECT_EQ(fixed_point_residual(flat, EdgeFlow(10)), 0.0);
    EXPECT_THROW(fixed_point_residual(p, EdgeFlow{1.5}), std::invalid_argument);
}

TEST(KValue, Examples)
{
    const RofProblem p(kEdge, VertexField{0.0, 4.0}, 1.0);
    EXPECT_EQ(k_value(p, EdgeFlow{0.0}, 0), 2.0);
    // K ignores the flow on its own edge.
    const RofProblem wide(kEdge, VertexField{0.0, 4.0}, 3.0);
    EXPECT_EQ(k_value(wide, EdgeFlow{2.0}, 0), 2.0);
    const RofProblem flat(testing::six_vertex_graph(), VertexField(6, 1.5), 1.0);
    for (std::size_t k = 0; k < 10; ++k) EXPECT_EQ(k_value(flat, EdgeFlow(10), k), 0.0);
    EXPECT_THROW(k_value(p, EdgeFlow{0.0}, 1), std::out_of_range);
}

TEST(KValue, MinimizesDualObjectiveAlongEdge)
{
    // Finite-difference check: K is the stationary point of the smooth
    // one-variable function x -> ||u0 - div g(x)||^2.
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        const auto graph = oracle::random_connected_graph(3 + rng() % 10, rng() % 10, rng);
        const RofProblem p(graph, testing::random_field(graph.num_vertices(), rng, 0.0, 10.0), 100.0);
        auto g = testing::random_flow(graph.num_edges(), rng, 2.0);
        const std::size_t k = rng() % graph.num_edges();
        const double kg = k_value(p, g, k);
        auto objective = [&](double x) {
            g[k] = x;
            const double d = dual_objective(p, g);
            return d * d;
        };
        const double h = 1e-4;
        const double slope = (objective(kg + h) - objective(kg - h)) / (2 * h);
        EXPECT_NEAR(slope, 0.0, 1e-6);
        EXPECT_GT(objective(kg + 0.1), objective(kg));
        EXPECT_GT(objective(kg - 0.1), objective(kg));
    }
}

} // namespace
} // namespace graphtv
