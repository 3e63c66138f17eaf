#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "graph.hpp"
#include "imaging.hpp"
#include "oracle.hpp"
#include "solver.hpp"
#include "tv_model.hpp"

namespace graphtv {

struct VerifyOptions {
    std::uint64_t seed = 20240601;
    /// Fault injection: the solver clamps to this multiple of t while the
    /// oracles keep t. Anything other than 1 must make the suite fail.
    double clamp_bound_scale = 1.0;
};

struct CheckOutcome {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Fixtures for the dual-ball checks.
namespace fixtures {

inline Graph single_edge() { return Graph(2, {{0, 1}}); }
inline Graph path2() { return Graph(3, {{0, 1}, {1, 2}}); }
inline Graph cycle3() { return Graph(3, {{0, 1}, {1, 2}, {2, 0}}); }
inline Graph grid2x2() { return grid_graph(2, 2); }

} // namespace fixtures

namespace detail {

struct NamedCheck {
    const char* name;
    std::function<CheckOutcome(const VerifyOptions&)> run;
};

inline CheckOutcome outcome(const char* name, bool passed, double measured, double bound)
{
    std::ostringstream os;
    os.precision(3);
    os << "measured " << std::scientific << measured << " vs bound " << bound;
    return {name, passed, os.str()};
}

inline RofProblem solver_side(const RofProblem& problem, const VerifyOptions& opt)
{
    return problem.with_t(problem.t() * opt.clamp_bound_scale);
}

inline double max_abs_diff(const VertexField& a, const VertexField& b)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

inline CheckOutcome solver_vs_bruteforce(const char* name, Schedule schedule, const VerifyOptions& opt)
{
    std::mt19937_64 rng(opt.seed + (schedule == Schedule::Colored ? 7 : 3));
    std::uniform_real_distribution<double> value(0.0, 10.0);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng() % 4;
        auto graph = std::make_shared<const Graph>(oracle::random_connected_graph(n, rng() % 4, rng));
        VertexField u0(n);
        for (auto& x : u0) x = value(rng);
        for (double t : {0.1, 1.0, 10.0}) {
            const RofProblem problem(graph, u0, t);
            SolverConfig cfg;
            cfg.epsilon = 1e-10;
            cfg.stopping = Stopping::FixedPointResidual;
            cfg.schedule = schedule;
            cfg.max_iterations = 1000000;
            const auto result = solve(solver_side(problem, opt), cfg);
            worst = std::max(worst, max_abs_diff(result.u_opt, oracle::solve_bruteforce(problem)));
        }
    }
    return outcome(name, worst <= 1e-4, worst, 1e-4);
}

inline CheckOutcome dual_ball(const char* name, const Graph& graph)
{
    const auto report = oracle::verify_dual_ball(graph, 1.0, 24);
    const double worst = std::max(report.outer_violation, report.inner_violation);
    return outcome(name, report.passed(1e-6), worst, 1e-6);
}

inline const std::vector<NamedCheck>& verification_checks()
{
    static const std::vector<NamedCheck> checks = {
        {"adjointness",
         [](const VerifyOptions& opt) {
             std::mt19937_64 rng(opt.seed);
             std::uniform_real_distribution<double> unit(-1.0, 1.0);
             double worst = 0.0;
             for (int trial = 0; trial < 200; ++trial) {
                 const std::size_t n = 1 + rng() % 50;
                 const auto graph = oracle::random_connected_graph(n, rng() % (2 * n), rng);
                 VertexField f(n);
                 EdgeFlow g(graph.num_edges());
                 for (auto& x : f) x = unit(rng);
                 for (auto& x : g) x = unit(rng);
                 const double rhs = inner_product(g, gradient(graph, f));
                 const double lhs = inner_product(divergence(graph, g), f);
                 worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
             }
             return outcome("adjointness", worst <= 1e-12, worst, 1e-12);
         }},
        {"zero_sum_divergence",
         [](const VerifyOptions& opt) {
             std::mt19937_64 rng(opt.seed + 1);
             std::uniform_real_distribution<double> unit(-1.0, 1.0);
             double worst = 0.0;
             for (int trial = 0; trial < 200; ++trial) {
                 const std::size_t n = 2 + rng() % 49;
                 const auto graph = oracle::random_connected_graph(n, rng() % (2 * n), rng);
                 EdgeFlow g(graph.num_edges());
                 double l1 = 0.0;
                 for (auto& x : g) l1 += std::abs(x = unit(rng));
                 double sum = 0.0;
                 for (double d : divergence(graph, g)) sum += d;
                 worst = std::max(worst, std::abs(sum) / l1);
             }
             return outcome("zero_sum_divergence", worst <= 1e-12, worst, 1e-12);
         }},
        {"closed_form_two_vertex",
         [](const VerifyOptions& opt) {
             double worst = 0.0;
             for (double t : {1.0, 3.0, 0.5}) {
                 const RofProblem problem(fixtures::single_edge(), VertexField{0.0, 4.0}, t);
                 SolverConfig cfg;
                 cfg.stopping = Stopping::FixedPointResidual;
                 cfg.epsilon = 1e-14;
                 const auto result = solve(solver_side(problem, opt), cfg);
                 const auto [a, b] = oracle::solve_single_edge(0.0, 4.0, t);
                 worst = std::max({worst, std::abs(result.u_opt[0] - a), std::abs(result.u_opt[1] - b)});
             }
             return outcome("closed_form_two_vertex", worst <= 1e-12, worst, 1e-12);
         }},
        {"solver_vs_bruteforce_sequential",
         [](const VerifyOptions& opt) {
             return solver_vs_bruteforce("solver_vs_bruteforce_sequential", Schedule::Sequential, opt);
         }},
        {"solver_vs_bruteforce_colored",
         [](const VerifyOptions& opt) {
             return solver_vs_bruteforce("solver_vs_bruteforce_colored", Schedule::Colored, opt);
         }},
        {"certificate",
         [](const VerifyOptions& opt) {
             std::mt19937_64 rng(opt.seed + 5);
             std::uniform_real_distribution<double> value(0.0, 10.0);
             std::size_t failures = 0;
             for (int trial = 0; trial < 20; ++trial) {
                 const std::size_t n = 2 + rng() % 5;
                 const RofProblem problem(oracle::random_connected_graph(n, rng() % 5, rng),
                                          [&] {
                                              VertexField u0(n);
                                              for (auto& x : u0) x = value(rng);
                                              return u0;
                                          }(),
                                          1.0);
                 SolverConfig cfg;
                 cfg.epsilon = 1e-10;
                 cfg.stopping = Stopping::FixedPointResidual;
                 cfg.max_iterations = 1000000;
                 const auto result = solve(solver_side(problem, opt), cfg);
                 if (!oracle::check_certificate(problem, result.u_opt, result.flow, 1e-8)) ++failures;
             }
             return outcome("certificate", failures == 0, static_cast<double>(failures), 0.0);
         }},
        {"dual_ball_single_edge", [](const VerifyOptions&) { return dual_ball("dual_ball_single_edge", fixtures::single_edge()); }},
        {"dual_ball_path2", [](const VerifyOptions&) { return dual_ball("dual_ball_path2", fixtures::path2()); }},
        {"dual_ball_cycle3", [](const VerifyOptions&) { return dual_ball("dual_ball_cycle3", fixtures::cycle3()); }},
        {"dual_ball_grid2x2", [](const VerifyOptions&) { return dual_ball("dual_ball_grid2x2", fixtures::grid2x2()); }},
    };
    return checks;
}

} // namespace detail

inline std::vector<std::string> verification_check_names()
{
    std::vector<std::string> names;
    for (const auto& check : detail::verification_checks()) names.emplace_back(check.name);
    return names;
}

/// Runs every oracle check; a check that throws counts as failed.
inline std::vector<CheckOutcome> run_verification(const VerifyOptions& options = {})
{
    std::vector<CheckOutcome> results;
    for (const auto& check : detail::verification_checks()) {
        try {
            results.push_back(check.run(options));
        } catch (const std::exception& ex) {
            results.push_back({check.name, false, std::string("exception: ") + ex.what()});
        }
    }
    return results;
}

} // namespace graphtv
