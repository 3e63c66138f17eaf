#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace graphtv {

using index_t = std::uint32_t;

/// Directed edge e = (tail, head), flow is positive from tail to head.
struct Edge {
    index_t tail;
    index_t head;

    friend bool operator==(const Edge&, const Edge&) = default;
};

namespace detail {

inline void check_size(std::size_t got, std::size_t want, const char* what)
{
    if (got != want) {
        throw std::invalid_argument(std::string(what) + ": expected length " +
                                    std::to_string(want) + ", got " +
                                    std::to_string(got));
    }
}

/// Compressed adjacency list: ids of the edges attached to each vertex.
struct Csr {
    std::vector<std::size_t> offsets;
    std::vector<index_t> ids;

    std::span<const index_t> row(index_t v) const
    {
        return {ids.data() + offsets[v], offsets[v + 1] - offsets[v]};
    }
};

template <class KeyFn>
Csr build_csr(std::size_t num_vertices, const std::vector<Edge>& edges, KeyFn key)
{
    Csr csr;
    csr.offsets.assign(num_vertices + 1, 0);
    for (const auto& e : edges) ++csr.offsets[key(e) + 1];
    for (std::size_t v = 0; v < num_vertices; ++v) csr.offsets[v + 1] += csr.offsets[v];
    csr.ids.resize(edges.size());
    auto cursor = csr.offsets;
    for (std::size_t k = 0; k < edges.size(); ++k) {
        csr.ids[cursor[key(edges[k])]++] = static_cast<index_t>(k);
    }
    return csr;
}

} // namespace detail

/*
 * Immutable finite directed graph. Edge k runs from edges()[k].tail to
 * edges()[k].head; self-loops are rejected, connectivity is not required.
 */
class Graph {
public:
    Graph(std::size_t num_vertices, std::vector<Edge> edges)
        : num_vertices_(num_vertices), edges_(std::move(edges))
    {
        if (num_vertices_ == 0) throw std::invalid_argument("Graph: needs at least one vertex");
        for (std::size_t k = 0; k < edges_.size(); ++k) {
            const auto& e = edges_[k];
            if (e.tail >= num_vertices_ || e.head >= num_vertices_) {
                throw std::invalid_argument("Graph: edge " + std::to_string(k) +
                                            " has an endpoint out of range");
            }
            if (e.tail == e.head) {
                throw std::invalid_argument("Graph: edge " + std::to_string(k) + " is a self-loop");
            }
        }
        outgoing_ = detail::build_csr(num_vertices_, edges_, [](const Edge& e) { return e.tail; });
        incoming_ = detail::build_csr(num_vertices_, edges_, [](const Edge& e) { return e.head; });
    }

    std::size_t num_vertices() const { return num_vertices_; }
    std::size_t num_edges() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }

    const Edge& edge(std::size_t k) const
    {
        if (k >= edges_.size()) {
            throw std::out_of_range("Graph: edge id " + std::to_string(k) + " out of range");
        }
        return edges_[k];
    }

    std::span<const index_t> incoming(index_t v) const { return incoming_.row(v); }
    std::span<const index_t> outgoing(index_t v) const { return outgoing_.row(v); }
    std::size_t degree(index_t v) const { return incoming(v).size() + outgoing(v).size(); }

private:
    std::size_t num_vertices_;
    std::vector<Edge> edges_;
    detail::Csr incoming_;
    detail::Csr outgoing_;
};

namespace detail {

/// Owning real array with a tag so vertex and edge data cannot be mixed up.
template <class Tag>
class Field {
public:
    Field() = default;
    explicit Field(std::size_t n, double value = 0.0) : values_(n, value) {}
    explicit Field(std::vector<double> values) : values_(std::move(values)) {}
    Field(std::initializer_list<double> values) : values_(values) {}

    std::size_t size() const { return values_.size(); }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    const std::vector<double>& vector() const { return values_; }
    auto begin() { return values_.begin(); }
    auto end() { return values_.end(); }
    auto begin() const { return values_.begin(); }
    auto end() const { return values_.end(); }

    friend bool operator==(const Field&, const Field&) = default;

private:
    std::vector<double> values_;
};

struct VertexTag {};
struct EdgeTag {};

} // namespace detail

/// Real-valued function on the vertices of a graph.
using VertexField = detail::Field<detail::VertexTag>;
/// Real-valued function on the edges of a graph (a flow).
using EdgeFlow = detail::Field<detail::EdgeTag>;

inline void require_matches(const Graph& graph, const VertexField& f)
{
    detail::check_size(f.size(), graph.num_vertices(), "VertexField");
}

inline void require_matches(const Graph& graph, const EdgeFlow& g)
{
    detail::check_size(g.size(), graph.num_edges(), "EdgeFlow");
}

/// grad f(e) = f(head) - f(tail).
inline EdgeFlow gradient(const Graph& graph, const VertexField& f)
{
    require_matches(graph, f);
    EdgeFlow out(graph.num_edges());
    const auto& edges = graph.edges();
    for (std::size_t k = 0; k < edges.size(); ++k) {
        out[k] = f[edges[k].head] - f[edges[k].tail];
    }
    return out;
}

/// div g(v) = incoming flow minus outgoing flow. Adjoint of gradient:
/// <div g, f> = <g, grad f>.
inline VertexField divergence(const Graph& graph, const EdgeFlow& g)
{
    require_matches(graph, g);
    VertexField out(graph.num_vertices());
    const auto& edges = graph.edges();
    for (std::size_t k = 0; k < edges.size(); ++k) {
        out[edges[k].tail] -= g[k];
        out[edges[k].head] += g[k];
    }
    return out;
}

/// Divergence at one vertex ignoring the flow on edge `skip`.
inline double divergence_at(const Graph& graph, const EdgeFlow& g, index_t v,
                            std::size_t skip = static_cast<std::size_t>(-1))
{
    double sum = 0.0;
    for (auto k : graph.incoming(v)) {
        if (k != skip) sum += g[k];
    }
    for (auto k : graph.outgoing(v)) {
        if (k != skip) sum -= g[k];
    }
    return sum;
}

/// Divergence at the tail and head of edge k, leaving out the flow on k.
inline std::pair<double, double> divergence_excluding_edge(const Graph& graph,
                                                           const EdgeFlow& g, std::size_t k)
{
    require_matches(graph, g);
    const auto& e = graph.edge(k);
    return {divergence_at(graph, g, e.tail, k), divergence_at(graph, g, e.head, k)};
}

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b, const char* what)
{
    check_size(b.size(), a.size(), what);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

} // namespace detail

inline double inner_product(const VertexField& a, const VertexField& b)
{
    return detail::dot(a.values(), b.values(), "inner_product(VertexField)");
}

inline double inner_product(const EdgeFlow& a, const EdgeFlow& b)
{
    return detail::dot(a.values(), b.values(), "inner_product(EdgeFlow)");
}

/// Partition of the edge ids into classes of pairwise non-incident edges.
struct EdgeColoring {
    std::vector<std::vector<index_t>> classes;

    std::size_t num_colors() const { return classes.size(); }
    friend bool operator==(const EdgeColoring&, const EdgeColoring&) = default;
};

/// True iff `coloring` covers every edge exactly once and no class holds two
/// edges sharing a vertex.
inline bool is_valid_coloring(const Graph& graph, const EdgeColoring& coloring)
{
    std::vector<char> seen(graph.num_edges(), 0);
    std::vector<std::size_t> stamp(graph.num_vertices(), 0);
    std::size_t covered = 0;
    for (std::size_t c = 0; c < coloring.classes.size(); ++c) {
        for (auto k : coloring.classes[c]) {
            if (k >= graph.num_edges() || seen[k]) return false;
            seen[k] = 1;
            ++covered;
            const auto& e = graph.edges()[k];
            if (stamp[e.tail] == c + 1 || stamp[e.head] == c + 1) return false;
            stamp[e.tail] = stamp[e.head] = c + 1;
        }
    }
    return covered == graph.num_edges();
}

/// Greedy proper edge coloring: edges in id order take the smallest color
/// not used by an already-colored incident edge. Uses at most 2*maxdeg - 1
/// colors.
inline EdgeColoring greedy_edge_coloring(const Graph& graph)
{
    constexpr index_t uncolored = static_cast<index_t>(-1);
    std::vector<index_t> color(graph.num_edges(), uncolored);
    std::vector<char> taken;
    EdgeColoring out;
    const auto& edges = graph.edges();
    for (std::size_t k = 0; k < edges.size(); ++k) {
        taken.assign(out.classes.size() + 1, 0);
        for (auto v : {edges[k].tail, edges[k].head}) {
            for (auto list : {graph.incoming(v), graph.outgoing(v)}) {
                for (auto other : list) {
                    if (color[other] != uncolored) taken[color[other]] = 1;
                }
            }
        }
        const auto c = static_cast<index_t>(std::find(taken.begin(), taken.end(), 0) - taken.begin());
        if (c == out.classes.size()) out.classes.emplace_back();
        out.classes[c].push_back(static_cast<index_t>(k));
        color[k] = c;
    }
    return out;
}

/// Reads "N M" followed by M lines "i j" (0-based).
inline Graph read_graph(std::istream& in)
{
    std::size_t n = 0, m = 0;
    if (!(in >> n >> m)) throw std::runtime_error("read_graph: missing \"N M\" header");
    std::vector<Edge> edges;
    edges.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
        long long i = 0, j = 0;
        if (!(in >> i >> j)) {
            throw std::runtime_error("read_graph: expected " + std::to_string(m) +
                                     " edges, got " + std::to_string(k));
        }
        if (i < 0 || j < 0) throw std::runtime_error("read_graph: negative vertex index");
        edges.push_back({static_cast<index_t>(i), static_cast<index_t>(j)});
    }
    return Graph(n, std::move(edges));
}

inline void write_graph(std::ostream& out, const Graph& graph)
{
    out << graph.num_vertices() << ' ' << graph.num_edges() << '\n';
    for (const auto& e : graph.edges()) out << e.tail << ' ' << e.head << '\n';
}

} // namespace graphtv
