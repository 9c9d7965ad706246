#include "qgnls/metric_graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

namespace qgnls {

MetricGraph::MetricGraph(std::vector<Vertex> vertices, std::vector<Edge> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)), adjacency_(vertices_.size()) {
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const Edge& e = edges_[i];
        if (e.from.index < adjacency_.size()) adjacency_[e.from.index].push_back({EdgeId{i}, true});
        if (e.to.index < adjacency_.size()) adjacency_[e.to.index].push_back({EdgeId{i}, false});
    }
}

std::optional<VertexId> MetricGraph::find_vertex(std::string_view name) const {
    for (std::size_t i = 0; i < vertices_.size(); ++i)
        if (vertices_[i].name == name) return VertexId{i};
    return std::nullopt;
}

std::size_t MetricGraph::num_halflines() const {
    return static_cast<std::size_t>(
        std::count_if(edges_.begin(), edges_.end(), [](const Edge& e) { return e.is_halfline(); }));
}

VertexId MetricGraph::other_end(EdgeId e, VertexId v) const {
    const Edge& ed = edge(e);
    return ed.from == v ? ed.to : ed.from;
}

// ---------------------------------------------------------------------------

VertexId GraphBuilder::vertex(const std::string& name) {
    vertices_.push_back({name, false});
    return VertexId{vertices_.size() - 1};
}

VertexId GraphBuilder::infinity(const std::string& name) {
    vertices_.push_back({name, true});
    return VertexId{vertices_.size() - 1};
}

VertexId GraphBuilder::lookup(const std::string& name) const {
    for (std::size_t i = 0; i < vertices_.size(); ++i)
        if (vertices_[i].name == name) return VertexId{i};
    throw GraphError("unknown vertex '" + name + "'");
}

EdgeId GraphBuilder::edge(const std::string& a, const std::string& b, double length) {
    edges_.push_back({lookup(a), lookup(b), length});
    return EdgeId{edges_.size() - 1};
}

EdgeId GraphBuilder::halfline(const std::string& finite, const std::string& at_infinity) {
    edges_.push_back({lookup(finite), lookup(at_infinity), kHalfline});
    return EdgeId{edges_.size() - 1};
}

// ---------------------------------------------------------------------------

std::string_view to_string(Rule r) {
    switch (r) {
        case Rule::disconnected: return "disconnected";
        case Rule::infinity_degree: return "infinity_degree";
        case Rule::infinity_to_infinity: return "infinity_to_infinity";
        case Rule::nonpositive_length: return "nonpositive_length";
        case Rule::halfline_orientation: return "halfline_orientation";
        case Rule::dangling_reference: return "dangling_reference";
        case Rule::duplicate_name: return "duplicate_name";
    }
    return "unknown";
}

namespace {

struct DisjointSets {
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
    std::vector<std::size_t> parent;
};

std::string edge_label(const MetricGraph& g, std::size_t i) {
    const Edge& e = g.edges()[i];
    auto name = [&](VertexId v) {
        return v.index < g.num_vertices() ? g.vertex(v).name : "#" + std::to_string(v.index);
    };
    return "edge " + std::to_string(i) + " (" + name(e.from) + " - " + name(e.to) + ")";
}

}  // namespace

std::vector<std::size_t> component_labels(const MetricGraph& g, std::optional<EdgeId> skip) {
    DisjointSets sets(g.num_vertices());
    for (std::size_t i = 0; i < g.num_edges(); ++i) {
        if (skip && skip->index == i) continue;
        sets.unite(g.edges()[i].from.index, g.edges()[i].to.index);
    }
    std::vector<std::size_t> labels(g.num_vertices());
    for (std::size_t v = 0; v < labels.size(); ++v) labels[v] = sets.find(v);
    return labels;
}

std::vector<Violation> validate(const MetricGraph& g) {
    std::vector<Violation> out;
    const std::size_t nv = g.num_vertices();

    std::set<std::string> names;
    for (const Vertex& v : g.vertices())
        if (!names.insert(v.name).second) out.push_back({Rule::duplicate_name, "vertex '" + v.name + "'"});

    bool dangling = false;
    for (std::size_t i = 0; i < g.num_edges(); ++i) {
        const Edge& e = g.edges()[i];
        if (e.from.index >= nv || e.to.index >= nv) {
            out.push_back({Rule::dangling_reference, edge_label(g, i)});
            dangling = true;
            continue;
        }
        const bool inf_a = g.vertex(e.from).at_infinity;
        const bool inf_b = g.vertex(e.to).at_infinity;
        if (inf_a && inf_b) {
            out.push_back({Rule::infinity_to_infinity, edge_label(g, i)});
            continue;
        }
        if (e.is_halfline()) {
            if (inf_a || !inf_b) out.push_back({Rule::halfline_orientation, edge_label(g, i)});
        } else {
            if (!(e.length > 0.0) || !std::isfinite(e.length))
                out.push_back({Rule::nonpositive_length, edge_label(g, i)});
            if (inf_a || inf_b) out.push_back({Rule::halfline_orientation, edge_label(g, i)});
        }
    }
    if (dangling) return out;

    for (std::size_t v = 0; v < nv; ++v) {
        if (g.vertices()[v].at_infinity && g.degree(VertexId{v}) != 1)
            out.push_back({Rule::infinity_degree, "vertex '" + g.vertices()[v].name + "' has degree " +
                                                      std::to_string(g.degree(VertexId{v}))});
    }

    if (nv > 0) {
        const auto labels = component_labels(g);
        std::set<std::size_t> distinct(labels.begin(), labels.end());
        if (distinct.size() > 1)
            out.push_back({Rule::disconnected, std::to_string(distinct.size()) + " connected components"});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Assumption (H)

AssumptionH check_assumption_h(const MetricGraph& g) {
    if (g.num_edges() == 0) return {false, std::nullopt};
    for (std::size_t i = 0; i < g.num_edges(); ++i) {
        const auto labels = component_labels(g, EdgeId{i});
        std::vector<char> reaches(g.num_vertices(), 0);
        for (std::size_t v = 0; v < g.num_vertices(); ++v)
            if (g.vertices()[v].at_infinity) reaches[labels[v]] = 1;
        for (std::size_t v = 0; v < g.num_vertices(); ++v)
            if (!reaches[labels[v]]) return {false, EdgeId{i}};
    }
    return {true, std::nullopt};
}

namespace {

/// Unit-capacity flow network, just large enough for the two augmentations we need.
class FlowNetwork {
public:
    explicit FlowNetwork(std::size_t n) : head_(n, npos) {}

    void add_arc(std::size_t a, std::size_t b, int cap) {
        arcs_.push_back({b, cap, head_[a]});
        head_[a] = arcs_.size() - 1;
        arcs_.push_back({a, 0, head_[b]});
        head_[b] = arcs_.size() - 1;
    }

    void add_undirected(std::size_t a, std::size_t b) {
        arcs_.push_back({b, 1, head_[a]});
        head_[a] = arcs_.size() - 1;
        arcs_.push_back({a, 1, head_[b]});
        head_[b] = arcs_.size() - 1;
    }

    /// Augments along shortest paths until `limit` units flow or none remain.
    int max_flow(std::size_t s, std::size_t t, int limit) {
        int flow = 0;
        while (flow < limit) {
            std::vector<std::size_t> via(head_.size(), npos);
            std::vector<char> seen(head_.size(), 0);
            std::queue<std::size_t> q;
            q.push(s);
            seen[s] = 1;
            while (!q.empty() && !seen[t]) {
                const std::size_t x = q.front();
                q.pop();
                for (std::size_t a = head_[x]; a != npos; a = arcs_[a].next) {
                    if (arcs_[a].cap > 0 && !seen[arcs_[a].to]) {
                        seen[arcs_[a].to] = 1;
                        via[arcs_[a].to] = a;
                        q.push(arcs_[a].to);
                    }
                }
            }
            if (!seen[t]) break;
            for (std::size_t x = t; x != s;) {
                const std::size_t a = via[x];
                arcs_[a].cap -= 1;
                arcs_[a ^ 1].cap += 1;
                x = arcs_[a ^ 1].to;
            }
            ++flow;
        }
        return flow;
    }

private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    struct Arc {
        std::size_t to;
        int cap;
        std::size_t next;
    };
    std::vector<std::size_t> head_;
    std::vector<Arc> arcs_;
};

}  // namespace

bool edge_on_infinite_trail(const MetricGraph& g, EdgeId e) {
    // A trail through e = (a, b) between distinct vertices at infinity exists
    // iff two edge-disjoint paths avoiding e lead from a and from b to two
    // different vertices at infinity.
    const std::size_t nv = g.num_vertices();
    const std::size_t source = nv;
    const std::size_t sink = nv + 1;
    FlowNetwork net(nv + 2);
    for (std::size_t i = 0; i < g.num_edges(); ++i) {
        if (i == e.index) continue;
        const Edge& ed = g.edges()[i];
        if (ed.is_loop()) continue;
        net.add_undirected(ed.from.index, ed.to.index);
    }
    for (std::size_t v = 0; v < nv; ++v)
        if (g.vertices()[v].at_infinity) net.add_arc(v, sink, 1);
    const Edge& target = g.edge(e);
    net.add_arc(source, target.from.index, 1);
    net.add_arc(source, target.to.index, 1);
    return net.max_flow(source, sink, 2) == 2;
}

bool check_assumption_h_trails(const MetricGraph& g) {
    if (g.num_edges() == 0) return false;
    for (std::size_t i = 0; i < g.num_edges(); ++i)
        if (!edge_on_infinite_trail(g, EdgeId{i})) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Bubble towers

namespace {

struct ReducedEdge {
    std::size_t a;
    std::size_t b;
    double length;
    bool alive = true;
};

bool nearly_equal(double x, double y, double tol) {
    return std::abs(x - y) <= tol * std::max(std::abs(x), std::abs(y));
}

}  // namespace

std::optional<BubbleTower> match_bubble_tower(const MetricGraph& g, double tol) {
    if (!is_valid(g) || g.num_halflines() != 2) return std::nullopt;

    const std::size_t nv = g.num_vertices();
    std::vector<ReducedEdge> edges;
    for (const Edge& e : g.edges()) edges.push_back({e.from.index, e.to.index, e.length});

    auto incident = [&](std::size_t v) {
        std::vector<std::size_t> ends;
        for (std::size_t i = 0; i < edges.size(); ++i) {
            if (!edges[i].alive) continue;
            if (edges[i].a == v) ends.push_back(i);
            if (edges[i].b == v) ends.push_back(i);
        }
        return ends;
    };

    // Smooth away finite degree-2 vertices joining two distinct edges,
    // except where two half-lines meet (the base of a bare line).
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t v = 0; v < nv; ++v) {
            if (g.vertices()[v].at_infinity) continue;
            const auto ends = incident(v);
            if (ends.size() != 2 || ends[0] == ends[1]) continue;
            ReducedEdge& e1 = edges[ends[0]];
            ReducedEdge& e2 = edges[ends[1]];
            const bool h1 = e1.length == kHalfline;
            const bool h2 = e2.length == kHalfline;
            if (h1 && h2) continue;
            const std::size_t x = e1.a == v ? e1.b : e1.a;
            const std::size_t y = e2.a == v ? e2.b : e2.a;
            ReducedEdge merged{};
            if (h1) merged = {y, x, kHalfline};
            else if (h2) merged = {x, y, kHalfline};
            else merged = {x, y, e1.length + e2.length};
            e1.alive = false;
            e2.alive = false;
            edges.push_back(merged);
            changed = true;
        }
    }

    std::vector<std::size_t> halflines;
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (edges[i].alive && edges[i].length == kHalfline) halflines.push_back(i);
    if (halflines.size() != 2) return std::nullopt;
    const std::size_t base = edges[halflines[0]].a;
    if (edges[halflines[1]].a != base) return std::nullopt;

    BubbleTower tower{VertexId{base}, {}, 0.0};
    std::set<std::size_t> used(halflines.begin(), halflines.end());
    std::size_t current = base;
    for (;;) {
        std::vector<std::size_t> rest;
        for (std::size_t i : incident(current))
            if (!used.count(i)) rest.push_back(i);
        if (rest.empty()) break;
        if (rest.size() == 2 && rest[0] == rest[1]) {
            tower.top_loop = edges[rest[0]].length;
            used.insert(rest[0]);
            break;
        }
        if (rest.size() != 2) return std::nullopt;
        const ReducedEdge& e1 = edges[rest[0]];
        const ReducedEdge& e2 = edges[rest[1]];
        const std::size_t n1 = e1.a == current ? e1.b : e1.a;
        const std::size_t n2 = e2.a == current ? e2.b : e2.a;
        if (n1 != n2 || n1 == current) return std::nullopt;
        if (!nearly_equal(e1.length, e2.length, tol)) return std::nullopt;
        tower.arcs.push_back(0.5 * (e1.length + e2.length));
        used.insert(rest[0]);
        used.insert(rest[1]);
        current = n1;
    }

    for (std::size_t i = 0; i < edges.size(); ++i)
        if (edges[i].alive && !used.count(i)) return std::nullopt;
    return tower;
}

// ---------------------------------------------------------------------------
// Text format

ParseError::ParseError(std::size_t line, const std::string& what)
    : GraphError("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

double parse_length(std::string_view token, std::size_t line) {
    double value = 0.0;
    const auto* first = token.data();
    const auto* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) throw ParseError(line, "bad length '" + std::string(token) + "'");
    return value;
}

std::string format_length(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

}  // namespace

MetricGraph parse_graph(std::string_view text) {
    std::vector<Vertex> vertices;
    std::vector<Edge> edges;
    std::map<std::string, std::size_t> index;

    auto lookup = [&](const std::string& name, std::size_t line) {
        auto it = index.find(name);
        if (it == index.end()) throw ParseError(line, "unknown vertex '" + name + "'");
        return VertexId{it->second};
    };

    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::istringstream fields(raw);
        std::vector<std::string> tok;
        for (std::string t; fields >> t;) tok.push_back(t);
        if (tok.empty()) continue;

        const std::string& kind = tok[0];
        if (kind == "vertex" || kind == "infinity") {
            if (tok.size() != 2) throw ParseError(line_no, "expected '" + kind + " <name>'");
            if (index.count(tok[1])) throw ParseError(line_no, "duplicate vertex '" + tok[1] + "'");
            index[tok[1]] = vertices.size();
            vertices.push_back({tok[1], kind == "infinity"});
        } else if (kind == "edge") {
            if (tok.size() != 4) throw ParseError(line_no, "expected 'edge <name> <name> <length>'");
            const double len = parse_length(tok[3], line_no);
            if (!(len > 0.0) || !std::isfinite(len)) throw ParseError(line_no, "edge length must be positive");
            edges.push_back({lookup(tok[1], line_no), lookup(tok[2], line_no), len});
        } else if (kind == "halfline") {
            if (tok.size() != 3) throw ParseError(line_no, "expected 'halfline <name> <name>'");
            const VertexId a = lookup(tok[1], line_no);
            const VertexId b = lookup(tok[2], line_no);
            if (!vertices[b.index].at_infinity)
                throw ParseError(line_no, "second halfline endpoint must be an infinity vertex");
            edges.push_back({a, b, kHalfline});
        } else {
            throw ParseError(line_no, "unknown record '" + kind + "'");
        }
    }
    return MetricGraph(std::move(vertices), std::move(edges));
}

MetricGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw GraphError("cannot read graph file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_graph(buf.str());
}

std::string serialize_graph(const MetricGraph& g) {
    std::string out;
    for (const Vertex& v : g.vertices()) out += (v.at_infinity ? "infinity " : "vertex ") + v.name + "\n";
    for (const Edge& e : g.edges()) {
        const std::string& a = g.vertex(e.from).name;
        const std::string& b = g.vertex(e.to).name;
        if (e.is_halfline()) out += "halfline " + a + " " + b + "\n";
        else out += "edge " + a + " " + b + " " + format_length(e.length) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace graphs {

MetricGraph halfline() {
    GraphBuilder b;
    b.vertex("o");
    b.infinity("inf");
    b.halfline("o", "inf");
    return b.build();
}

MetricGraph line() { return star(2); }

MetricGraph star(std::size_t n_halflines) {
    GraphBuilder b;
    b.vertex("v");
    for (std::size_t i = 1; i <= n_halflines; ++i) {
        b.infinity("inf" + std::to_string(i));
        b.halfline("v", "inf" + std::to_string(i));
    }
    return b.build();
}

MetricGraph line_with_pendant(double pendant_length) {
    GraphBuilder b;
    b.vertex("v");
    b.vertex("tip");
    b.infinity("inf1");
    b.infinity("inf2");
    b.edge("v", "tip", pendant_length);
    b.halfline("v", "inf1");
    b.halfline("v", "inf2");
    return b.build();
}

MetricGraph g_ell(double pendant_length) {
    GraphBuilder b;
    b.vertex("v");
    b.vertex("tip");
    b.edge("v", "tip", pendant_length);
    for (int i = 1; i <= 3; ++i) {
        b.infinity("inf" + std::to_string(i));
        b.halfline("v", "inf" + std::to_string(i));
    }
    return b.build();
}

MetricGraph bubble_tower(const std::vector<double>& arcs) {
    GraphBuilder b;
    b.vertex("b0");
    b.infinity("inf1");
    b.infinity("inf2");
    b.halfline("b0", "inf1");
    b.halfline("b0", "inf2");
    for (std::size_t i = 0; i < arcs.size(); ++i) {
        const std::string lo = "b" + std::to_string(i);
        const std::string hi = "b" + std::to_string(i + 1);
        b.vertex(hi);
        b.edge(lo, hi, arcs[i]);
        b.edge(lo, hi, arcs[i]);
    }
    return b.build();
}

MetricGraph bubble_tower_with_loop(const std::vector<double>& arcs, double top_loop) {
    GraphBuilder b;
    b.vertex("b0");
    b.infinity("inf1");
    b.infinity("inf2");
    b.halfline("b0", "inf1");
    b.halfline("b0", "inf2");
    for (std::size_t i = 0; i < arcs.size(); ++i) {
        const std::string lo = "b" + std::to_string(i);
        const std::string hi = "b" + std::to_string(i + 1);
        b.vertex(hi);
        b.edge(lo, hi, arcs[i]);
        b.edge(lo, hi, arcs[i]);
    }
    const std::string top = "b" + std::to_string(arcs.size());
    b.edge(top, top, top_loop);
    return b.build();
}

MetricGraph showcase() {
    GraphBuilder b;
    for (const char* v : {"a", "b", "c", "d", "e", "f", "g"}) b.vertex(v);
    for (const char* v : {"inf1", "inf2", "inf3", "inf4", "inf5"}) b.infinity(v);
    b.halfline("a", "inf1");
    b.edge("a", "b", 1.0);
    b.edge("a", "c", 1.0);
    b.edge("b", "c", 1.5);
    b.halfline("c", "inf2");
    b.edge("b", "b", 2.0);
    b.edge("b", "d", 1.0);
    b.edge("d", "e", 1.0);
    b.edge("d", "e", 1.25);
    b.edge("d", "e", 1.5);
    b.edge("d", "f", 1.0);
    b.edge("d", "f", 1.3);
    b.edge("e", "f", 1.4);
    b.edge("f", "g", 1.0);
    b.edge("e", "g", 1.4);
    b.halfline("g", "inf3");
    b.halfline("e", "inf4");
    b.halfline("e", "inf5");
    return b.build();
}

MetricGraph circle(double length) {
    GraphBuilder b;
    b.vertex("v");
    b.edge("v", "v", length);
    return b.build();
}

}  // namespace graphs

}  // namespace qgnls
