/**
 * @file metric_graph.hpp
 * @brief Metric graphs with half-lines and the topological tests used to
 *        decide existence of NLS ground states (Assumption (H), bubble towers).
 */
#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qgnls {

/// Index of a vertex inside its owning MetricGraph.
struct VertexId {
    std::size_t index{};
    friend bool operator==(VertexId, VertexId) = default;
    friend auto operator<=>(VertexId, VertexId) = default;
};

/// Index of an edge inside its owning MetricGraph.
struct EdgeId {
    std::size_t index{};
    friend bool operator==(EdgeId, EdgeId) = default;
    friend auto operator<=>(EdgeId, EdgeId) = default;
};

inline constexpr double kHalfline = std::numeric_limits<double>::infinity();

struct Vertex {
    std::string name;
    bool at_infinity = false;
    friend bool operator==(const Vertex&, const Vertex&) = default;
};

/// An edge identified with [0, length]; arclength 0 sits at `from`.
/// A half-line has length kHalfline and `to` is its vertex at infinity.
struct Edge {
    VertexId from;
    VertexId to;
    double length = 1.0;

    [[nodiscard]] bool is_halfline() const { return length == kHalfline; }
    [[nodiscard]] bool is_loop() const { return from == to; }
    friend bool operator==(const Edge&, const Edge&) = default;
};

/// One end of an edge seen from a vertex.
struct EdgeEnd {
    EdgeId edge;
    bool at_from;  ///< true if the vertex is the edge's `from` endpoint
};

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Immutable metric graph. Structural validity is not enforced at
/// construction; use validate().
class MetricGraph {
public:
    MetricGraph() = default;
    MetricGraph(std::vector<Vertex> vertices, std::vector<Edge> edges);

    [[nodiscard]] const std::vector<Vertex>& vertices() const { return vertices_; }
    [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
    [[nodiscard]] const Vertex& vertex(VertexId v) const { return vertices_.at(v.index); }
    [[nodiscard]] const Edge& edge(EdgeId e) const { return edges_.at(e.index); }
    [[nodiscard]] std::size_t num_vertices() const { return vertices_.size(); }
    [[nodiscard]] std::size_t num_edges() const { return edges_.size(); }

    /// Incident edge ends; a self-loop appears twice.
    [[nodiscard]] const std::vector<EdgeEnd>& incident(VertexId v) const { return adjacency_.at(v.index); }
    [[nodiscard]] std::size_t degree(VertexId v) const { return incident(v).size(); }

    [[nodiscard]] std::optional<VertexId> find_vertex(std::string_view name) const;
    [[nodiscard]] std::size_t num_halflines() const;
    [[nodiscard]] bool is_compact() const { return num_halflines() == 0; }

    /// The endpoint of `e` opposite to `v` (v itself for a loop).
    [[nodiscard]] VertexId other_end(EdgeId e, VertexId v) const;

    friend bool operator==(const MetricGraph& a, const MetricGraph& b) {
        return a.vertices_ == b.vertices_ && a.edges_ == b.edges_;
    }

private:
    std::vector<Vertex> vertices_;
    std::vector<Edge> edges_;
    std::vector<std::vector<EdgeEnd>> adjacency_;
};

/// Incremental construction by vertex name.
class GraphBuilder {
public:
    VertexId vertex(const std::string& name);
    VertexId infinity(const std::string& name);
    EdgeId edge(const std::string& a, const std::string& b, double length);
    EdgeId halfline(const std::string& finite, const std::string& at_infinity);
    [[nodiscard]] MetricGraph build() const { return MetricGraph(vertices_, edges_); }

private:
    VertexId lookup(const std::string& name) const;
    std::vector<Vertex> vertices_;
    std::vector<Edge> edges_;
};

enum class Rule {
    disconnected,
    infinity_degree,
    infinity_to_infinity,
    nonpositive_length,
    halfline_orientation,
    dangling_reference,
    duplicate_name,
};

[[nodiscard]] std::string_view to_string(Rule r);

struct Violation {
    Rule rule;
    std::string detail;
};

/// Every structural rule the graph breaks; empty iff the graph is valid.
[[nodiscard]] std::vector<Violation> validate(const MetricGraph& g);
[[nodiscard]] inline bool is_valid(const MetricGraph& g) { return validate(g).empty(); }

struct AssumptionH {
    bool holds = false;
    /// An edge whose removal leaves a component with no vertex at infinity.
    std::optional<EdgeId> witness;
};

/// Second formulation: removing any edge, every component reaches infinity.
[[nodiscard]] AssumptionH check_assumption_h(const MetricGraph& g);

/// First formulation: every edge lies on a trail joining two distinct
/// vertices at infinity. Decided by unit-capacity max-flow per edge.
[[nodiscard]] bool check_assumption_h_trails(const MetricGraph& g);

/// True iff edge `e` lies on a trail joining two distinct vertices at infinity.
[[nodiscard]] bool edge_on_infinite_trail(const MetricGraph& g, EdgeId e);

/// Components of g with `skip` removed, as a label per vertex.
[[nodiscard]] std::vector<std::size_t> component_labels(const MetricGraph& g,
                                                        std::optional<EdgeId> skip = std::nullopt);

/// Structure of a recognised bubble tower after degree-2 vertices have been
/// smoothed away. `arcs[i]` is the common arc length of the i-th bubble
/// counted from the base; `top_loop` is the length of the closing loop (0 if
/// the tower ends in a bubble whose top vertex was smoothed into a loop, or
/// if there are no bubbles at all).
struct BubbleTower {
    VertexId base;
    std::vector<double> arcs;
    double top_loop = 0.0;
};

inline constexpr double kDefaultTowerTolerance = 1e-9;

/// Matches two half-lines at a base vertex followed by a chain of bubbles,
/// each bubble two parallel arcs of equal length (relative `tol`), optionally
/// closed by a single loop. Degree-2 vertices are smoothed first.
[[nodiscard]] std::optional<BubbleTower> match_bubble_tower(const MetricGraph& g,
                                                            double tol = kDefaultTowerTolerance);
[[nodiscard]] inline bool is_bubble_tower(const MetricGraph& g, double tol = kDefaultTowerTolerance) {
    return match_bubble_tower(g, tol).has_value();
}

// ---------------------------------------------------------------------------
// Text format

class ParseError : public GraphError {
public:
    ParseError(std::size_t line, const std::string& what);
    [[nodiscard]] std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Parses `vertex`, `infinity`, `edge` and `halfline` records ('#' comments).
[[nodiscard]] MetricGraph parse_graph(std::string_view text);
[[nodiscard]] MetricGraph load_graph(const std::string& path);
[[nodiscard]] std::string serialize_graph(const MetricGraph& g);

// ---------------------------------------------------------------------------
// Named graphs

namespace graphs {
[[nodiscard]] MetricGraph halfline();
[[nodiscard]] MetricGraph line();
[[nodiscard]] MetricGraph star(std::size_t n_halflines);
[[nodiscard]] MetricGraph line_with_pendant(double pendant_length);
/// Three half-lines and a pendant of length `pendant_length` at one vertex.
[[nodiscard]] MetricGraph g_ell(double pendant_length);
/// Bubble tower with the given arc lengths, one pair per bubble, base first.
[[nodiscard]] MetricGraph bubble_tower(const std::vector<double>& arcs);
/// A tower drawn as in the usual picture: bubbles closed by a self-loop on top.
[[nodiscard]] MetricGraph bubble_tower_with_loop(const std::vector<double>& arcs, double top_loop);
/// Line with a short cycle, a multi-edge block and several pendants.
[[nodiscard]] MetricGraph showcase();
/// Circle of the given length through a single vertex.
[[nodiscard]] MetricGraph circle(double length);
}  // namespace graphs

}  // namespace qgnls
