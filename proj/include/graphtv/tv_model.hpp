#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

#include "graph.hpp"

namespace graphtv {

/*
 * ROF problem on a graph:
 *
 *      minimize  1/2 ||u0 - u||_2^2 + t * sum_e |grad u(e)|
 *
 * The graph is shared so that problems differing only in t or u0 do not
 * copy it.
 */
class RofProblem {
public:
    RofProblem(std::shared_ptr<const Graph> graph, VertexField u0, double t)
        : graph_(std::move(graph)), u0_(std::move(u0)), t_(t)
    {
        if (!graph_) throw std::invalid_argument("RofProblem: null graph");
        require_matches(*graph_, u0_);
        if (!(t_ > 0.0) || !std::isfinite(t_)) {
            throw std::invalid_argument("RofProblem: t must be positive and finite");
        }
    }

    RofProblem(Graph graph, VertexField u0, double t)
        : RofProblem(std::make_shared<const Graph>(std::move(graph)), std::move(u0), t)
    {}

    const Graph& graph() const { return *graph_; }
    const std::shared_ptr<const Graph>& shared_graph() const { return graph_; }
    const VertexField& u0() const { return u0_; }
    double t() const { return t_; }

    RofProblem with_t(double t) const { return RofProblem(graph_, u0_, t); }

private:
    std::shared_ptr<const Graph> graph_;
    VertexField u0_;
    double t_;
};

/// Anisotropic graph total variation, sum_e |u(head) - u(tail)|.
inline double bv_seminorm(const Graph& graph, const VertexField& u)
{
    require_matches(graph, u);
    double sum = 0.0;
    for (const auto& e : graph.edges()) sum += std::abs(u[e.head] - u[e.tail]);
    return sum;
}

inline double rof_energy(const RofProblem& problem, const VertexField& u)
{
    require_matches(problem.graph(), u);
    double fidelity = 0.0;
    for (std::size_t v = 0; v < u.size(); ++v) {
        const double d = problem.u0()[v] - u[v];
        fidelity += d * d;
    }
    return 0.5 * fidelity + problem.t() * bv_seminorm(problem.graph(), u);
}

/// ||u0 - div g||_2, the quantity the edge updates drive down.
inline double dual_objective(const RofProblem& problem, const EdgeFlow& g)
{
    const auto div = divergence(problem.graph(), g);
    double sum = 0.0;
    for (std::size_t v = 0; v < div.size(); ++v) {
        const double d = problem.u0()[v] - div[v];
        sum += d * d;
    }
    return std::sqrt(sum);
}

inline double clamp_to_ball(double x, double t) { return std::clamp(x, -t, t); }

namespace detail {

/// Unconstrained minimizer over the flow on one edge, given the divergence
/// at its endpoints with that edge's own flow removed.
inline double edge_minimizer(double u0_tail, double u0_head, double div_tail_excl,
                             double div_head_excl)
{
    return ((u0_head - div_head_excl) - (u0_tail - div_tail_excl)) / 2.0;
}

inline void require_feasible(const EdgeFlow& g, double t, const char* who)
{
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!(std::abs(g[k]) <= t)) {
            throw std::invalid_argument(std::string(who) + ": flow on edge " +
                                        std::to_string(k) + " lies outside [-t, t]");
        }
    }
}

} // namespace detail

/*
 * K g(e_k): the minimizer of ||u0 - div g||^2 over the flow on e_k with
 * every other edge held fixed. Does not depend on g(e_k) itself.
 */
inline double k_value(const RofProblem& problem, const EdgeFlow& g, std::size_t k)
{
    const auto [div_tail, div_head] = divergence_excluding_edge(problem.graph(), g, k);
    const auto& e = problem.graph().edges()[k];
    return detail::edge_minimizer(problem.u0()[e.tail], problem.u0()[e.head], div_tail, div_head);
}

/// max_k |clamp(K g(e_k), -t, t) - g(e_k)|. Zero exactly at the fixed points
/// of the sweep operator, which are the optimal flows.
inline double fixed_point_residual(const RofProblem& problem, const EdgeFlow& g)
{
    const auto& graph = problem.graph();
    require_matches(graph, g);
    detail::require_feasible(g, problem.t(), "fixed_point_residual");
    const auto div = divergence(graph, g);
    const auto& u0 = problem.u0();
    double worst = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto& e = graph.edges()[k];
        const double kg = detail::edge_minimizer(u0[e.tail], u0[e.head], div[e.tail] + g[k],
                                                 div[e.head] - g[k]);
        worst = std::max(worst, std::abs(clamp_to_ball(kg, problem.t()) - g[k]));
    }
    return worst;
}

/// u = u0 - div g.
inline VertexField primal_from_flow(const RofProblem& problem, const EdgeFlow& g)
{
    auto u = divergence(problem.graph(), g);
    for (std::size_t v = 0; v < u.size(); ++v) u[v] = problem.u0()[v] - u[v];
    return u;
}

} // namespace graphtv
