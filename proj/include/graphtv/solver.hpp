#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "graph.hpp"
#include "parallel.hpp"
#include "tv_model.hpp"

namespace graphtv {

enum class Schedule { Sequential, Colored };
enum class Stopping { FixedPointResidual, RelativeChange };
enum class Termination { Converged, MaxIterations };

struct SolverConfig {
    double epsilon = 1e-5;
    std::size_t max_iterations = 100000;
    Schedule schedule = Schedule::Sequential;
    Stopping stopping = Stopping::RelativeChange;
    /// Starting flow; zero when empty. Must lie in the t-ball.
    std::optional<EdgeFlow> initial_flow;
    /// Workers for within-color updates. Only used by the Colored schedule.
    unsigned threads = 1;
    /// Recompute the cached divergence from scratch every this many sweeps.
    std::size_t resync_interval = 1000;
};

struct TraceRecord {
    std::size_t sweep;
    double dual_objective;
    double fixed_point_residual;
    double relative_change;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct SolveReport {
    std::size_t iterations_run = 0;
    Termination termination = Termination::MaxIterations;
    /// ||u0 - div g|| for the starting flow, before any sweep.
    double initial_dual_objective = 0.0;
    std::vector<TraceRecord> trace;
    double final_residual = 0.0;

    friend bool operator==(const SolveReport&, const SolveReport&) = default;
};

struct SolveResult {
    VertexField u_opt;
    EdgeFlow flow;
    SolveReport report;
};

/*
 * Flow together with its divergence, kept in sync incrementally: an edge
 * update touches one flow entry and the divergence at the edge's two
 * endpoints. Updates on edges with disjoint endpoints may run concurrently.
 */
class FlowState {
public:
    FlowState(const RofProblem& problem, EdgeFlow flow)
        : problem_(&problem), flow_(std::move(flow)), div_(problem.graph().num_vertices())
    {
        require_matches(problem.graph(), flow_);
        detail::require_feasible(flow_, problem.t(), "FlowState");
        resync();
    }

    const EdgeFlow& flow() const { return flow_; }
    const VertexField& divergence() const { return div_; }

    /// Replaces g(e_k) by clamp(K g(e_k), -t, t).
    void update_edge(std::size_t k)
    {
        const Edge e = problem_->graph().edges()[k];
        const auto& u0 = problem_->u0();
        const double old = flow_[k];
        const double kg = detail::edge_minimizer(u0[e.tail], u0[e.head], div_[e.tail] + old,
                                                 div_[e.head] - old);
        const double next = clamp_to_ball(kg, problem_->t());
        const double delta = next - old;
        if (delta != 0.0) {
            flow_[k] = next;
            div_[e.tail] -= delta;
            div_[e.head] += delta;
        }
    }

    void sweep_sequential()
    {
        for (std::size_t k = 0; k < flow_.size(); ++k) update_edge(k);
    }

    void sweep_colored(const EdgeColoring& coloring, WorkerTeam& team)
    {
        for (const auto& cls : coloring.classes) {
            if (team.size() == 1 || cls.size() < 2 * team.size()) {
                for (auto k : cls) update_edge(k);
                continue;
            }
            team.run([&](unsigned w, unsigned n) {
                const auto [lo, hi] = WorkerTeam::slice(cls.size(), w, n);
                for (std::size_t i = lo; i < hi; ++i) update_edge(cls[i]);
            });
        }
    }

    /// Recomputes the divergence from the flow, discarding accumulated
    /// rounding from incremental updates.
    void resync() { div_ = graphtv::divergence(problem_->graph(), flow_); }

    double residual() const
    {
        const auto& graph = problem_->graph();
        const auto& u0 = problem_->u0();
        double worst = 0.0;
        for (std::size_t k = 0; k < flow_.size(); ++k) {
            const auto& e = graph.edges()[k];
            const double kg = detail::edge_minimizer(u0[e.tail], u0[e.head],
                                                     div_[e.tail] + flow_[k], div_[e.head] - flow_[k]);
            worst = std::max(worst, std::abs(clamp_to_ball(kg, problem_->t()) - flow_[k]));
        }
        return worst;
    }

    EdgeFlow release() && { return std::move(flow_); }

private:
    const RofProblem* problem_;
    EdgeFlow flow_;
    VertexField div_;
};

/// Single edge update T_k applied to a copy of g.
inline EdgeFlow apply_tk(const RofProblem& problem, const EdgeFlow& g, std::size_t k)
{
    require_matches(problem.graph(), g);
    detail::require_feasible(g, problem.t(), "apply_tk");
    const double kg = k_value(problem, g, k);
    EdgeFlow out = g;
    out[k] = clamp_to_ball(kg, problem.t());
    return out;
}

/// T = T_M ... T_1: every edge in id order, each seeing earlier updates.
inline EdgeFlow sweep_sequential(const RofProblem& problem, const EdgeFlow& g)
{
    FlowState state(problem, g);
    state.sweep_sequential();
    return std::move(state).release();
}

/// T = T_{E_L} ... T_{E_1}. The result does not depend on `threads`.
inline EdgeFlow sweep_colored(const RofProblem& problem, const EdgeFlow& g,
                              const EdgeColoring& coloring, unsigned threads = 1)
{
    if (!is_valid_coloring(problem.graph(), coloring)) {
        throw std::invalid_argument("sweep_colored: coloring is not a proper edge coloring");
    }
    FlowState state(problem, g);
    WorkerTeam team(threads);
    state.sweep_colored(coloring, team);
    return std::move(state).release();
}

/*
 * Iterates g <- T g from the configured starting flow until the stopping
 * rule holds or max_iterations sweeps have run, then returns
 * u_opt = u0 - div g.
 *
 * Stopping rules, checked after each sweep k with u^k = u0 - div g^k:
 *  - FixedPointResidual: fixed_point_residual(g^k) <= epsilon;
 *  - RelativeChange: ||u^k - u^{k-1}|| / ||u^k|| < epsilon, where a zero
 *    iterate counts as converged only if it did not change.
 */
inline SolveResult solve(const RofProblem& problem, const SolverConfig& config)
{
    if (!(config.epsilon > 0.0)) throw std::invalid_argument("solve: epsilon must be positive");
    if (config.resync_interval == 0) throw std::invalid_argument("solve: resync_interval must be positive");
    const auto& graph = problem.graph();

    FlowState state(problem, config.initial_flow ? *config.initial_flow : EdgeFlow(graph.num_edges()));
    std::optional<EdgeColoring> coloring;
    std::optional<WorkerTeam> team;
    if (config.schedule == Schedule::Colored) {
        coloring = greedy_edge_coloring(graph);
        team.emplace(config.threads);
    }

    const auto& u0 = problem.u0();
    const std::size_t n = graph.num_vertices();
    auto iterate_norm = [&](const VertexField& div) {
        double sum = 0.0;
        for (std::size_t v = 0; v < n; ++v) sum += (u0[v] - div[v]) * (u0[v] - div[v]);
        return std::sqrt(sum);
    };

    SolveReport report;
    report.initial_dual_objective = iterate_norm(state.divergence());
    VertexField previous_div;

    for (std::size_t sweep = 1; sweep <= config.max_iterations; ++sweep) {
        previous_div = state.divergence();
        if (coloring) {
            state.sweep_colored(*coloring, *team);
        } else {
            state.sweep_sequential();
        }
        if (sweep % config.resync_interval == 0) state.resync();

        const auto& div = state.divergence();
        double change = 0.0;
        for (std::size_t v = 0; v < n; ++v) change += (div[v] - previous_div[v]) * (div[v] - previous_div[v]);
        change = std::sqrt(change);
        const double norm = iterate_norm(div);
        const double relative = norm > 0.0 ? change / norm : (change == 0.0 ? 0.0 : INFINITY);
        const double residual = state.residual();

        report.trace.push_back({sweep, norm, residual, relative});
        report.iterations_run = sweep;

        const bool met = config.stopping == Stopping::FixedPointResidual
                             ? residual <= config.epsilon
                             : relative < config.epsilon;
        if (met) {
            report.termination = Termination::Converged;
            break;
        }
    }

    report.final_residual = report.trace.empty() ? state.residual() : report.trace.back().fixed_point_residual;
    SolveResult result;
    result.flow = std::move(state).release();
    result.u_opt = primal_from_flow(problem, result.flow);
    result.report = std::move(report);
    return result;
}

/// CSV with header "sweep,dual_objective,fixed_point_residual,relative_change",
/// reals printed with 17 significant digits.
inline void write_trace_csv(std::ostream& out, const SolveReport& report)
{
    out << "sweep,dual_objective,fixed_point_residual,relative_change\n";
    char line[128];
    for (const auto& r : report.trace) {
        std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g\n", r.sweep, r.dual_objective,
                      r.fixed_point_residual, r.relative_change);
        out << line;
    }
}

} // namespace graphtv
