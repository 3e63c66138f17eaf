#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "graph.hpp"
#include "solver.hpp"
#include "tv_model.hpp"

// Small-instance ground truth for the solver. Nothing here calls solve();
// the pre-image search in verify_dual_ball uses FlowState directly because
// that is the construction under test.

namespace graphtv::oracle {

/// Exact ROF minimizer of the one-edge graph tail -> head.
inline std::pair<double, double> solve_single_edge(double u0_tail, double u0_head, double t)
{
    if (!(t > 0.0)) throw std::invalid_argument("solve_single_edge: t must be positive");
    const double c = std::clamp((u0_head - u0_tail) / 2.0, -t, t);
    return {u0_tail + c, u0_head - c};
}

inline constexpr std::size_t max_bruteforce_vertices = 6;

/*
 * Exhaustive primal minimization. The minimizer groups the vertices into
 * clusters of equal value with a strict order between clusters; every such
 * weak ordering fixes the sign of each edge difference, and on that face
 * the energy is a separable quadratic in the cluster values with a closed
 * form stationary point. Evaluating the true energy at every face's
 * stationary point and keeping the smallest recovers the unique minimizer,
 * since the minimizer's own face yields it exactly.
 */
inline VertexField solve_bruteforce(const RofProblem& problem)
{
    const auto& graph = problem.graph();
    const std::size_t n = graph.num_vertices();
    if (n > max_bruteforce_vertices) {
        throw std::invalid_argument("solve_bruteforce: at most 6 vertices supported");
    }
    const auto& u0 = problem.u0();
    const double t = problem.t();

    std::vector<std::size_t> level(n, 0);
    std::vector<double> sum_u0, push, count;
    VertexField candidate(n), best = u0;
    double best_energy = rof_energy(problem, u0);

    for (;;) {
        const std::size_t levels = *std::max_element(level.begin(), level.end()) + 1;
        std::vector<char> used(levels, 0);
        for (auto l : level) used[l] = 1;
        if (std::all_of(used.begin(), used.end(), [](char c) { return c != 0; })) {
            sum_u0.assign(levels, 0.0);
            push.assign(levels, 0.0);
            count.assign(levels, 0.0);
            for (std::size_t v = 0; v < n; ++v) {
                sum_u0[level[v]] += u0[v];
                count[level[v]] += 1.0;
            }
            // d/dx of t * s * (x_head - x_tail) with s the sign of the
            // level difference.
            for (const auto& e : graph.edges()) {
                const auto lt = level[e.tail], lh = level[e.head];
                if (lt == lh) continue;
                const double s = lh > lt ? 1.0 : -1.0;
                push[lh] += t * s;
                push[lt] -= t * s;
            }
            for (std::size_t v = 0; v < n; ++v) {
                const auto l = level[v];
                candidate[v] = (sum_u0[l] - push[l]) / count[l];
            }
            const double energy = rof_energy(problem, candidate);
            if (energy < best_energy) {
                best_energy = energy;
                best = candidate;
            }
        }
        std::size_t v = 0;
        while (v < n && ++level[v] == n) level[v++] = 0;
        if (v == n) break;
    }
    return best;
}

/*
 * Product-grid search over a lattice shared by all coordinates, so that
 * equal-valued clusters stay representable. The first grid spans
 * [min u0, max u0]; each refinement recenters a window of +-2 old steps
 * around the incumbent. Refines at least twice and until the step is at
 * most grid_step.
 */
inline VertexField solve_grid_search(const RofProblem& problem, double grid_step)
{
    const auto& graph = problem.graph();
    const std::size_t n = graph.num_vertices();
    if (n > max_bruteforce_vertices) {
        throw std::invalid_argument("solve_grid_search: at most 6 vertices supported");
    }
    if (!(grid_step > 0.0)) throw std::invalid_argument("solve_grid_search: grid_step must be positive");
    const auto& u0 = problem.u0();
    const auto [lo_it, hi_it] = std::minmax_element(u0.begin(), u0.end());
    const double lo = *lo_it, hi = *hi_it;
    if (hi == lo) return u0;

    constexpr double budget = 4e5;
    const auto points = static_cast<std::size_t>(
        std::max(5.0, std::floor(std::pow(budget, 1.0 / static_cast<double>(n)))));

    double step = (hi - lo) / static_cast<double>(points - 1);
    const double base = lo;
    std::vector<long long> first(n, 0), last(n, static_cast<long long>(points - 1));
    VertexField best = u0;
    double best_energy = std::numeric_limits<double>::infinity();

    for (int round = 0;; ++round) {
        std::vector<long long> idx = first;
        VertexField u(n);
        for (;;) {
            for (std::size_t v = 0; v < n; ++v) u[v] = base + static_cast<double>(idx[v]) * step;
            const double energy = rof_energy(problem, u);
            if (energy < best_energy) {
                best_energy = energy;
                best = u;
            }
            std::size_t v = 0;
            while (v < n && ++idx[v] > last[v]) idx[v] = first[v], ++v;
            if (v == n) break;
        }
        if (round >= 2 && step <= grid_step) break;
        if (round > 200) break;

        const double window = 2.0 * step;
        step = 2.0 * window / static_cast<double>(points - 1);
        for (std::size_t v = 0; v < n; ++v) {
            first[v] = static_cast<long long>(std::floor((best[v] - window - base) / step));
            last[v] = first[v] + static_cast<long long>(points) - 1;
        }
    }
    return best;
}

/*
 * Dual norm of the graph BV seminorm,
 *
 *      sup { <psi, h> : ||grad h||_1 <= 1 }.
 *
 * By the coarea formula the supremum is attained at indicator functions of
 * vertex sets, giving max_S <psi, 1_S> / cut(S). Infinite when psi has
 * nonzero sum over some union of connected components.
 */
inline double bv_dual_norm(const Graph& graph, const VertexField& psi, double zero_tol = 1e-9)
{
    require_matches(graph, psi);
    const std::size_t n = graph.num_vertices();
    if (n > 20) throw std::invalid_argument("bv_dual_norm: at most 20 vertices supported");
    double scale = 1.0;
    for (double x : psi) scale += std::abs(x);

    double best = 0.0;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        double mass = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            if (mask >> v & 1u) mass += psi[v];
        }
        std::size_t cut = 0;
        for (const auto& e : graph.edges()) {
            cut += ((mask >> e.tail) & 1u) != ((mask >> e.head) & 1u);
        }
        if (cut == 0) {
            if (std::abs(mass) > zero_tol * scale) return std::numeric_limits<double>::infinity();
            continue;
        }
        best = std::max(best, mass / static_cast<double>(cut));
    }
    return best;
}

struct DualBallReport {
    /// max(0, ||div g||_BV* - t) over sampled g with ||g||_inf <= t.
    double outer_violation = 0.0;
    /// max ||psi - div g|| over sampled psi with ||psi||_BV* <= t, where g is
    /// the best flow in the t-ball found for psi.
    double inner_violation = 0.0;
    std::size_t outer_samples = 0;
    std::size_t inner_samples = 0;
    /// The largest <div g, h> / ||grad h||_1 seen over random h, kept
    /// separately from the indicator-based value as a cross-check.
    double random_direction_sup = 0.0;

    bool passed(double tol = 1e-6) const
    {
        return outer_violation <= tol && inner_violation <= tol;
    }
};

namespace detail {

/// Closest div g to psi over g in the t-ball by repeated sweeps with psi as
/// the data term. Returns ||psi - div g||.
inline double preimage_distance(const Graph& graph, const VertexField& psi, double t,
                                std::size_t max_sweeps = 200000, double target = 1e-11)
{
    const RofProblem problem(std::make_shared<const Graph>(graph), psi, t);
    FlowState state(problem, EdgeFlow(graph.num_edges()));
    auto distance = [&] {
        double sum = 0.0;
        for (std::size_t v = 0; v < psi.size(); ++v) {
            const double d = psi[v] - state.divergence()[v];
            sum += d * d;
        }
        return std::sqrt(sum);
    };
    double dist = distance();
    for (std::size_t sweep = 1; sweep <= max_sweeps && dist > target; ++sweep) {
        state.sweep_sequential();
        if (sweep % 64 == 0) {
            state.resync();
            dist = distance();
        }
    }
    state.resync();
    return distance();
}

/// Subtracts the mean on every connected component.
inline void remove_component_means(const Graph& graph, VertexField& psi)
{
    const std::size_t n = graph.num_vertices();
    std::vector<std::size_t> parent(n);
    for (std::size_t v = 0; v < n; ++v) parent[v] = v;
    auto find = [&](std::size_t v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (const auto& e : graph.edges()) parent[find(e.tail)] = find(e.head);
    std::vector<double> sum(n, 0.0), count(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
        sum[find(v)] += psi[v];
        count[find(v)] += 1.0;
    }
    for (std::size_t v = 0; v < n; ++v) psi[v] -= sum[find(v)] / count[find(v)];
}

} // namespace detail

/*
 * Numerical check that div maps the t-ball of l-infinity onto the t-ball of
 * the BV dual norm, on a tiny graph.
 *
 * Outer inclusion: every corner of the box [-t, t]^M plus `samples` random
 * interior flows; the dual norm of div g is computed exactly from vertex
 * sets and also estimated from seeded random directions h.
 * Inner inclusion: `samples` random mean-zero psi scaled into the dual
 * ball (half of them onto its boundary) plus psi = 0 and psi = div of a
 * box corner; a pre-image in the t-ball is searched by coordinate sweeps.
 */
inline DualBallReport verify_dual_ball(const Graph& graph, double t, std::size_t samples,
                                       std::uint64_t seed = 1)
{
    if (graph.num_vertices() > 6 || graph.num_edges() > 10) {
        throw std::invalid_argument("verify_dual_ball: graph too large (N <= 6, M <= 10)");
    }
    if (!(t > 0.0)) throw std::invalid_argument("verify_dual_ball: t must be positive");
    const std::size_t n = graph.num_vertices();
    const std::size_t m = graph.num_edges();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    std::vector<VertexField> directions;
    for (std::size_t i = 0; i < 64; ++i) {
        VertexField h(n);
        for (auto& x : h) x = unit(rng);
        if (bv_seminorm(graph, h) > 0.0) directions.push_back(std::move(h));
    }

    DualBallReport report;
    auto check_outer = [&](const EdgeFlow& g) {
        const auto psi = divergence(graph, g);
        report.outer_violation = std::max(report.outer_violation, bv_dual_norm(graph, psi) - t);
        for (const auto& h : directions) {
            const double ratio = inner_product(psi, h) / bv_seminorm(graph, h);
            report.random_direction_sup = std::max(report.random_direction_sup, ratio);
            report.outer_violation = std::max(report.outer_violation, ratio - t);
        }
        ++report.outer_samples;
    };
    for (std::uint32_t corner = 0; corner < (1u << m); ++corner) {
        EdgeFlow g(m);
        for (std::size_t k = 0; k < m; ++k) g[k] = (corner >> k & 1u) ? t : -t;
        check_outer(g);
    }
    for (std::size_t i = 0; i < samples; ++i) {
        EdgeFlow g(m);
        for (auto& x : g) x = t * unit(rng);
        check_outer(g);
    }

    auto check_inner = [&](const VertexField& psi) {
        report.inner_violation = std::max(report.inner_violation,
                                          detail::preimage_distance(graph, psi, t));
        ++report.inner_samples;
    };
    check_inner(VertexField(n));
    {
        EdgeFlow corner(m, t);
        check_inner(divergence(graph, corner));
    }
    std::uniform_real_distribution<double> fraction(0.0, 1.0);
    for (std::size_t i = 0; i < samples; ++i) {
        VertexField psi(n);
        for (auto& x : psi) x = unit(rng);
        detail::remove_component_means(graph, psi);
        const double norm = bv_dual_norm(graph, psi);
        if (!(norm > 0.0) || !std::isfinite(norm)) continue;
        const double target = (i % 2 == 0) ? t : t * fraction(rng);
        for (auto& x : psi) x *= target / norm;
        check_inner(psi);
    }
    return report;
}

/// u = u0 - div g and the fixed-point residual of g, both within tol, with
/// g feasible.
inline bool check_certificate(const RofProblem& problem, const VertexField& u, const EdgeFlow& g,
                              double tol)
{
    const auto& graph = problem.graph();
    if (u.size() != graph.num_vertices() || g.size() != graph.num_edges()) return false;
    for (double x : g) {
        if (!(std::abs(x) <= problem.t())) return false;
    }
    const auto expected = primal_from_flow(problem, g);
    for (std::size_t v = 0; v < u.size(); ++v) {
        if (!(std::abs(u[v] - expected[v]) <= tol)) return false;
    }
    return fixed_point_residual(problem, g) <= tol;
}

/// Random connected graph: a random spanning tree plus `extra_edges`
/// further edges, random directions, no parallel or antiparallel pairs.
template <class Rng>
Graph random_connected_graph(std::size_t n, std::size_t extra_edges, Rng& rng)
{
    if (n == 0) throw std::invalid_argument("random_connected_graph: n must be positive");
    std::vector<Edge> edges;
    std::set<std::pair<index_t, index_t>> present;
    auto add = [&](index_t a, index_t b) {
        const auto key = std::minmax(a, b);
        if (a == b || !present.insert(key).second) return false;
        if (rng() & 1u) std::swap(a, b);
        edges.push_back({a, b});
        return true;
    };
    std::vector<index_t> order(n);
    for (std::size_t v = 0; v < n; ++v) order[v] = static_cast<index_t>(v);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 1; i < n; ++i) {
        add(order[i], order[rng() % i]);
    }
    const std::size_t max_edges = n * (n - 1) / 2;
    const std::size_t target = std::min(max_edges, edges.size() + extra_edges);
    while (edges.size() < target) {
        add(static_cast<index_t>(rng() % n), static_cast<index_t>(rng() % n));
    }
    return Graph(n, std::move(edges));
}

} // namespace graphtv::oracle
