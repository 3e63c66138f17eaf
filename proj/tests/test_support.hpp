#pragma once

// Shared fixtures and test-only oracles. The oracles here evaluate the ROF
// energy directly and never go through the library's solver or oracle code.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "graphtv/graph.hpp"

namespace graphtv::testing {

/// The six-vertex, ten-edge example graph (ids shifted to 0-based):
/// e1=(v1,v2) e2=(v1,v3) e3=(v4,v1) e4=(v3,v2) e5=(v4,v3)
/// e6=(v2,v5) e7=(v3,v5) e8=(v6,v3) e9=(v6,v4) e10=(v5,v6)
inline Graph six_vertex_graph()
{
    return Graph(6, {{0, 1}, {0, 2}, {3, 0}, {2, 1}, {3, 2}, {1, 4}, {2, 4}, {5, 2}, {5, 3}, {4, 5}});
}

inline VertexField random_field(std::size_t n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0)
{
    std::uniform_real_distribution<double> dist(lo, hi);
    VertexField f(n);
    for (auto& x : f) x = dist(rng);
    return f;
}

inline EdgeFlow random_flow(std::size_t m, std::mt19937_64& rng, double bound = 1.0)
{
    std::uniform_real_distribution<double> dist(-bound, bound);
    EdgeFlow g(m);
    for (auto& x : g) x = dist(rng);
    return g;
}

/// Direct energy evaluation straight from the definition.
inline double naive_energy(const std::vector<Edge>& edges, const std::vector<double>& u0,
                           const std::vector<double>& u, double t)
{
    double e = 0.0;
    for (std::size_t v = 0; v < u.size(); ++v) e += 0.5 * (u0[v] - u[v]) * (u0[v] - u[v]);
    for (const auto& edge : edges) e += t * std::abs(u[edge.head] - u[edge.tail]);
    return e;
}

/// Dense grid minimization of 1/2(a-x)^2 + 1/2(b-y)^2 + t|y-x| over
/// [lo, hi]^2 with the given step.
inline std::pair<double, double> grid_single_edge(double a, double b, double t, double lo,
                                                  double hi, double step)
{
    const auto n = static_cast<long long>(std::llround((hi - lo) / step));
    double best = std::numeric_limits<double>::infinity();
    std::pair<double, double> arg{lo, lo};
    for (long long i = 0; i <= n; ++i) {
        const double x = lo + static_cast<double>(i) * step;
        for (long long j = 0; j <= n; ++j) {
            const double y = lo + static_cast<double>(j) * step;
            const double e = 0.5 * (a - x) * (a - x) + 0.5 * (b - y) * (b - y) + t * std::abs(y - x);
            if (e < best) {
                best = e;
                arg = {x, y};
            }
        }
    }
    return arg;
}

} // namespace graphtv::testing
