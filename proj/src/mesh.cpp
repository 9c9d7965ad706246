#include "qgnls/mesh.hpp"

#include "qgnls/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>

namespace qgnls {

double Mesh::max_spacing() const {
    double h = 0.0;
    for (const Segment& s : segments_) h = std::max(h, s.h);
    return h;
}

double Mesh::min_spacing() const {
    double h = std::numeric_limits<double>::infinity();
    for (const Segment& s : segments_) h = std::min(h, s.h);
    return h;
}

MeshPtr build_mesh(const MetricGraph& g, double h_max, double truncation) {
    if (!(h_max > 0.0)) throw MeshError("h_max must be positive");
    if (!(truncation > 0.0)) throw MeshError("half-line truncation must be positive");
    std::vector<std::vector<double>> knots;
    knots.reserve(g.num_edges());
    for (const Edge& e : g.edges()) {
        const double len = e.is_halfline() ? truncation : e.length;
        if (!(len > 0.0) || !std::isfinite(len)) throw MeshError("edge length must be positive and finite");
        const auto n = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(len / h_max - 1e-12)));
        std::vector<double> k(n + 1);
        for (std::size_t i = 0; i <= n; ++i) k[i] = len * static_cast<double>(i) / static_cast<double>(n);
        k[n] = len;
        knots.push_back(std::move(k));
    }
    return build_mesh_from_knots(g, std::move(knots), truncation);
}

MeshPtr build_mesh_from_knots(const MetricGraph& g, std::vector<std::vector<double>> knots, double truncation) {
    if (auto violations = validate(g); !violations.empty())
        throw MeshError("invalid graph: " + std::string(to_string(violations.front().rule)) + ": " +
                        violations.front().detail);
    if (knots.size() != g.num_edges()) throw MeshError("one knot list per edge is required");

    std::shared_ptr<Mesh> m(new Mesh());
    m->graph_ = g;
    m->truncation_ = truncation;

    const std::size_t nv = g.num_vertices();
    std::vector<char> dirichlet(nv, 0);
    m->vertex_node_.resize(nv);
    for (std::size_t v = 0; v < nv; ++v) {
        m->vertex_node_[v] = static_cast<std::uint32_t>(v);
        dirichlet[v] = g.vertices()[v].at_infinity ? 1 : 0;
    }

    std::uint32_t next = static_cast<std::uint32_t>(nv);
    m->edges_.resize(g.num_edges());
    for (std::size_t i = 0; i < g.num_edges(); ++i) {
        const Edge& e = g.edges()[i];
        std::vector<double>& k = knots[i];
        if (k.size() < 3) throw MeshError("every edge needs at least two intervals");
        if (k.front() != 0.0) throw MeshError("knots must start at 0");
        for (std::size_t j = 1; j < k.size(); ++j)
            if (!(k[j] > k[j - 1])) throw MeshError("knots must be strictly increasing");
        if (!e.is_halfline() && std::abs(k.back() - e.length) > 1e-12 * e.length)
            throw MeshError("knots must end at the edge length");
        if (!e.is_halfline()) k.back() = e.length;

        EdgeMesh& em = m->edges_[i];
        em.knots = std::move(k);
        em.nodes.resize(em.knots.size());
        em.nodes.front() = m->vertex_node_[e.from.index];
        em.nodes.back() = m->vertex_node_[e.to.index];
        for (std::size_t j = 1; j + 1 < em.knots.size(); ++j) {
            em.nodes[j] = next++;
            dirichlet.push_back(0);
        }
        for (std::size_t j = 0; j + 1 < em.knots.size(); ++j)
            m->segments_.push_back({em.nodes[j], em.nodes[j + 1], em.knots[j + 1] - em.knots[j],
                                    static_cast<std::uint32_t>(i)});
    }
    m->dirichlet_ = std::move(dirichlet);

    const std::size_t nn = m->dirichlet_.size();
    m->free_index_.assign(nn, kNoNode);
    for (std::size_t i = 0; i < nn; ++i)
        if (!m->dirichlet_[i]) m->free_index_[i] = static_cast<std::uint32_t>(m->num_free_++);

    m->inc_offsets_.assign(nn + 1, 0);
    for (const Segment& s : m->segments_) {
        ++m->inc_offsets_[s.a + 1];
        ++m->inc_offsets_[s.b + 1];
    }
    for (std::size_t i = 0; i < nn; ++i) m->inc_offsets_[i + 1] += m->inc_offsets_[i];
    m->incidence_.resize(m->inc_offsets_.back());
    std::vector<std::uint32_t> fill(m->inc_offsets_.begin(), m->inc_offsets_.end() - 1);
    for (std::size_t s = 0; s < m->segments_.size(); ++s) {
        m->incidence_[fill[m->segments_[s].a]++] = static_cast<std::uint32_t>(2 * s);
        m->incidence_[fill[m->segments_[s].b]++] = static_cast<std::uint32_t>(2 * s + 1);
    }
    return m;
}

// ---------------------------------------------------------------------------

GraphFunction::GraphFunction(MeshPtr m, std::vector<double> v) : mesh(std::move(m)), values(std::move(v)) {
    if (values.size() != mesh->num_nodes()) throw MeshError("value count does not match mesh");
}

double GraphFunction::at(EdgeId e, double x) const {
    const EdgeMesh& em = mesh->edge(e);
    if (x <= 0.0) return values[em.nodes.front()];
    if (x >= em.knots.back()) return values[em.nodes.back()];
    const auto it = std::upper_bound(em.knots.begin(), em.knots.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - em.knots.begin());
    const double x0 = em.knots[j - 1];
    const double x1 = em.knots[j];
    const double t = (x - x0) / (x1 - x0);
    return (1.0 - t) * values[em.nodes[j - 1]] + t * values[em.nodes[j]];
}

std::vector<double> GraphFunction::along(EdgeId e) const {
    const EdgeMesh& em = mesh->edge(e);
    std::vector<double> out(em.nodes.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = values[em.nodes[j]];
    return out;
}

double GraphFunction::max_value() const {
    return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

bool GraphFunction::is_nonnegative() const {
    return std::all_of(values.begin(), values.end(), [](double x) { return x >= 0.0; });
}

GraphFunction sample(const MeshPtr& mesh, const std::function<double(EdgeId, double)>& f) {
    GraphFunction u(mesh);
    std::vector<char> done(mesh->num_nodes(), 0);
    for (std::size_t i = 0; i < mesh->edges().size(); ++i) {
        const EdgeMesh& em = mesh->edges()[i];
        for (std::size_t j = 0; j < em.nodes.size(); ++j) {
            const std::uint32_t n = em.nodes[j];
            if (done[n]) continue;
            done[n] = 1;
            u[n] = mesh->is_dirichlet(n) ? 0.0 : f(EdgeId{i}, em.knots[j]);
        }
    }
    return u;
}

GraphPoint vertex_point(const MetricGraph& g, VertexId v) {
    const auto& inc = g.incident(v);
    if (inc.empty()) throw GraphError("vertex has no incident edge");
    const EdgeEnd end = inc.front();
    const Edge& e = g.edge(end.edge);
    return {end.edge, end.at_from ? 0.0 : e.length};
}

std::vector<double> distance_from(const Mesh& mesh, GraphPoint p) {
    const MetricGraph& g = mesh.graph();
    const std::size_t nv = g.num_vertices();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dv(nv, inf);

    const EdgeMesh& src = mesh.edge(p.edge);
    const double src_len = src.length();
    const double offset = std::clamp(p.offset, 0.0, src_len);
    const Edge& se = g.edge(p.edge);

    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    auto relax = [&](std::size_t v, double d) {
        if (d < dv[v]) {
            dv[v] = d;
            pq.push({d, v});
        }
    };
    relax(se.from.index, offset);
    relax(se.to.index, src_len - offset);
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d > dv[v]) continue;
        for (const EdgeEnd& end : g.incident(VertexId{v})) {
            const double len = mesh.edge(end.edge).length();
            relax(g.other_end(end.edge, VertexId{v}).index, d + len);
        }
    }

    std::vector<double> out(mesh.num_nodes(), inf);
    for (std::size_t i = 0; i < mesh.edges().size(); ++i) {
        const EdgeMesh& em = mesh.edges()[i];
        const Edge& e = g.edges()[i];
        const double len = em.length();
        for (std::size_t j = 0; j < em.nodes.size(); ++j) {
            const double x = em.knots[j];
            double d = std::min(dv[e.from.index] + x, dv[e.to.index] + len - x);
            if (i == p.edge.index) d = std::min(d, std::abs(x - offset));
            out[em.nodes[j]] = std::min(out[em.nodes[j]], d);
        }
    }
    return out;
}

void write_profile_csv(std::ostream& os, const GraphFunction& u) {
    os << "edge_id,arclength,value\n";
    const auto& edges = u.mesh->edges();
    for (std::size_t i = 0; i < edges.size(); ++i) {
        for (std::size_t j = 0; j < edges[i].nodes.size(); ++j)
            os << i << ',' << fmt_num(edges[i].knots[j]) << ',' << fmt_num(u[edges[i].nodes[j]]) << '\n';
    }
}

}  // namespace qgnls
