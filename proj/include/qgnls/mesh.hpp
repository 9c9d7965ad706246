/**
 * @file mesh.hpp
 * @brief P1 meshes on truncated metric graphs and the functions living on them.
 */
#pragma once

#include "qgnls/metric_graph.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace qgnls {

/// One P1 element: global nodes `a` (at the smaller arclength) and `b`.
struct Segment {
    std::uint32_t a;
    std::uint32_t b;
    double h;
    std::uint32_t edge;
};

/// Nodes of one edge, ordered by arclength from the edge's `from` vertex.
struct EdgeMesh {
    std::vector<double> knots;
    std::vector<std::uint32_t> nodes;
    [[nodiscard]] double length() const { return knots.back(); }
};

inline constexpr std::uint32_t kNoNode = static_cast<std::uint32_t>(-1);

/// Mesh of a metric graph whose half-lines are cut at a finite length and
/// closed with a homogeneous Dirichlet node. Vertices own exactly one node,
/// which makes every nodal vector continuous on the graph.
class Mesh {
public:
    [[nodiscard]] const MetricGraph& graph() const { return graph_; }
    [[nodiscard]] std::size_t num_nodes() const { return dirichlet_.size(); }
    [[nodiscard]] std::size_t num_free_nodes() const { return num_free_; }
    [[nodiscard]] const std::vector<EdgeMesh>& edges() const { return edges_; }
    [[nodiscard]] const EdgeMesh& edge(EdgeId e) const { return edges_.at(e.index); }
    [[nodiscard]] std::span<const Segment> segments() const { return segments_; }
    [[nodiscard]] bool is_dirichlet(std::size_t node) const { return dirichlet_[node] != 0; }
    [[nodiscard]] std::span<const char> dirichlet_flags() const { return dirichlet_; }
    [[nodiscard]] std::uint32_t vertex_node(VertexId v) const { return vertex_node_.at(v.index); }
    /// Index among non-Dirichlet nodes, or kNoNode.
    [[nodiscard]] std::uint32_t free_index(std::size_t node) const { return free_index_[node]; }

    /// CSR incidence: for node i, entries [offsets[i], offsets[i+1]) of
    /// `incidence()` hold 2*segment + side (side 0: node is `a`).
    [[nodiscard]] std::span<const std::uint32_t> incidence_offsets() const { return inc_offsets_; }
    [[nodiscard]] std::span<const std::uint32_t> incidence() const { return incidence_; }

    /// Half-line truncation length used when this mesh was built.
    [[nodiscard]] double truncation() const { return truncation_; }
    [[nodiscard]] double max_spacing() const;
    [[nodiscard]] double min_spacing() const;

    friend std::shared_ptr<const Mesh> build_mesh_from_knots(const MetricGraph&, std::vector<std::vector<double>>,
                                                             double);

private:
    Mesh() = default;

    MetricGraph graph_;
    std::vector<EdgeMesh> edges_;
    std::vector<Segment> segments_;
    std::vector<char> dirichlet_;
    std::vector<std::uint32_t> vertex_node_;
    std::vector<std::uint32_t> free_index_;
    std::vector<std::uint32_t> inc_offsets_;
    std::vector<std::uint32_t> incidence_;
    std::size_t num_free_ = 0;
    double truncation_ = 0.0;
};

using MeshPtr = std::shared_ptr<const Mesh>;

class MeshError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Uniform subdivision: every edge gets ceil(length / h_max) intervals (at
/// least two), every half-line becomes a segment of length `truncation`.
[[nodiscard]] MeshPtr build_mesh(const MetricGraph& g, double h_max, double truncation);

/// Mesh with explicit knots per edge. Each knot list starts at 0, is strictly
/// increasing, ends at the edge length (finite edges) or at the truncation
/// point (half-lines), and has at least three entries.
[[nodiscard]] MeshPtr build_mesh_from_knots(const MetricGraph& g, std::vector<std::vector<double>> knots,
                                            double truncation);

/// Continuous piecewise-linear function, one value per global node.
struct GraphFunction {
    MeshPtr mesh;
    std::vector<double> values;

    GraphFunction() = default;
    explicit GraphFunction(MeshPtr m) : mesh(std::move(m)), values(mesh->num_nodes(), 0.0) {}
    GraphFunction(MeshPtr m, std::vector<double> v);

    [[nodiscard]] std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    /// Value at arclength x along edge e (linear interpolation).
    [[nodiscard]] double at(EdgeId e, double x) const;
    /// Nodal values along one edge, in knot order.
    [[nodiscard]] std::vector<double> along(EdgeId e) const;
    [[nodiscard]] double max_value() const;
    [[nodiscard]] bool is_nonnegative() const;
};

/// Samples f(edge, arclength) at every node. A vertex node is sampled through
/// its first incident edge; Dirichlet nodes are set to 0.
[[nodiscard]] GraphFunction sample(const MeshPtr& mesh, const std::function<double(EdgeId, double)>& f);

/// A point of the graph: arclength `offset` along `edge`.
struct GraphPoint {
    EdgeId edge;
    double offset = 0.0;
};

[[nodiscard]] GraphPoint vertex_point(const MetricGraph& g, VertexId v);

/// Geodesic distance on the (truncated) graph from `p` to every mesh node.
[[nodiscard]] std::vector<double> distance_from(const Mesh& mesh, GraphPoint p);

/// Profile CSV: `edge_id,arclength,value`, one row per node of each edge in
/// edge order, arclength ascending.
void write_profile_csv(std::ostream& os, const GraphFunction& u);

}  // namespace qgnls
