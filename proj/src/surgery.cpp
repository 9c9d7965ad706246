#include "qgnls/surgery.hpp"

#include "qgnls/closed_forms.hpp"
#include "qgnls/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qgnls {

namespace {

void require_positive(double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x)) throw std::domain_error(std::string(what) + " must be positive");
}

}  // namespace

double SolitonPieces::head(double x) const {
    if (std::abs(x) > 0.5 * width) throw std::domain_error("point outside the head");
    return soliton(mu, x);
}

double SolitonPieces::tail(double x) const {
    if (x < 0.0) throw std::domain_error("tail coordinate must be non-negative");
    return soliton(mu, 0.5 * width + x);
}

double SolitonPieces::cut_value() const { return soliton(mu, 0.5 * width); }
double SolitonPieces::head_mass() const { return soliton_mass_within(mu, 0.5 * width); }
double SolitonPieces::tail_mass() const { return 0.5 * (mu - head_mass()); }

SolitonPieces cut_soliton(double mu, double width) {
    require_positive(mu, "mass");
    require_positive(width, "cut width");
    return {mu, width};
}

GraphFunction pendant_competitor(double mu, double ell, double h_max, double truncation) {
    const SolitonPieces s = cut_soliton(mu, ell);
    const MeshPtr mesh = build_mesh(graphs::line_with_pendant(ell), h_max, truncation);
    // The rearranged head is phi(s/2) on [0, ell] with s measured from the tip.
    GraphFunction u = sample(mesh, [&](EdgeId e, double x) {
        return e.index == 0 ? soliton(mu, 0.5 * (ell - x)) : s.tail(x);
    });
    normalize_mass(u, mu);
    return u;
}

double pendant_competitor_margin(double mu, double ell) {
    require_positive(mu, "mass");
    require_positive(ell, "pendant length");
    const double t = std::tanh(mu * ell / 8.0);
    return -mu * mu * mu / 128.0 * t * t * t;
}

GraphPoint tower_apex(const Mesh& mesh) {
    const MetricGraph& g = mesh.graph();
    const auto tower = match_bubble_tower(g);
    if (!tower) throw GraphError("graph is not a bubble tower");
    const std::vector<double> d = distance_from(mesh, vertex_point(g, tower->base));
    GraphPoint best = vertex_point(g, tower->base);
    double far = 0.0;
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
        const Edge& ed = g.edges()[e];
        if (ed.is_halfline()) continue;
        const double dx = d[mesh.vertex_node(ed.from)];
        const double dy = d[mesh.vertex_node(ed.to)];
        const double t = std::clamp(0.5 * (dy + ed.length - dx), 0.0, ed.length);
        const double reach = std::min(dx + t, dy + ed.length - t);
        if (reach > far) {
            far = reach;
            best = {EdgeId{e}, t};
        }
    }
    return best;
}

GraphFunction bubble_tower_soliton(const MeshPtr& mesh, double mu) {
    return soliton_bump(mesh, tower_apex(*mesh), mu);
}

GraphFunction bubble_tower_soliton(double mu, const std::vector<double>& arcs, double h_max, double truncation) {
    for (double a : arcs) require_positive(a, "arc length");
    return bubble_tower_soliton(build_mesh(graphs::bubble_tower(arcs), h_max, truncation), mu);
}

double pendant_length(const MetricGraph& g) {
    const bool shape = g.num_edges() == 4 && g.num_halflines() == 3 && !g.edges()[0].is_halfline() &&
                       !g.edges()[0].is_loop() && g.degree(g.edges()[0].from) == 4 &&
                       g.degree(g.edges()[0].to) == 1;
    if (!shape) throw GraphError("expected three half-lines and a pendant (edge 0) at one vertex");
    for (std::size_t e = 1; e < 4; ++e)
        if (g.edges()[e].from != g.edges()[0].from) throw GraphError("half-lines must start at the pendant base");
    return g.edges()[0].length;
}

GraphFunction gl_competitor(const GraphFunction& psi, double ell_new) {
    const Mesh& m = *psi.mesh;
    const double ell = pendant_length(m.graph());
    if (!(ell_new > ell)) throw std::domain_error("the new pendant must be longer");
    const double c = (ell_new - ell) / 3.0;
    if (c >= 0.5 * m.truncation()) throw std::domain_error("pendant growth exceeds the truncated half-lines");

    const double top = psi.max_value();
    const double vertex_value = psi[m.vertex_node(m.graph().edges()[0].from)];
    std::vector<LinearPiece> block;
    std::vector<std::vector<double>> knots(4);
    std::vector<std::vector<double>> vals(4);
    double cut_lo = std::numeric_limits<double>::infinity();
    double cut_hi = -cut_lo;
    for (std::size_t e = 1; e < 4; ++e) {
        const EdgeMesh& em = m.edges()[e];
        const double at_c = psi.at(EdgeId{e}, c);
        cut_lo = std::min(cut_lo, at_c);
        cut_hi = std::max(cut_hi, at_c);
        std::size_t j = 0;
        for (; j + 1 < em.knots.size() && em.knots[j + 1] <= c; ++j) {
            block.push_back({em.knots[j + 1] - em.knots[j], psi[em.nodes[j]], psi[em.nodes[j + 1]]});
        }
        if (em.knots[j] < c) block.push_back({c - em.knots[j], psi[em.nodes[j]], at_c});
        knots[e].push_back(0.0);
        vals[e].push_back(at_c);
        for (std::size_t k = j + 1; k < em.knots.size(); ++k) {
            if (em.knots[k] - c <= 0.0) continue;
            knots[e].push_back(em.knots[k] - c);
            vals[e].push_back(psi[em.nodes[k]]);
        }
    }
    if (cut_hi - cut_lo > 1e-9 * top) throw std::domain_error("psi differs between half-lines at the cut");
    for (const LinearPiece& p : block)
        if (std::max(p.left, p.right) > vertex_value * (1.0 + 1e-12))
            throw std::domain_error("psi must peak on the pendant, not on the half-lines");

    const RearrangedProfile b = monotone_rearrangement(distribution(block));
    const double span = b.positions.back();
    // Pendant from the base: block reversed (bottom at the base), then the old pendant.
    for (std::size_t i = b.positions.size(); i-- > 0;) {
        knots[0].push_back(span - b.positions[i]);
        vals[0].push_back(b.values[i]);
    }
    const EdgeMesh& pend = m.edges()[0];
    for (std::size_t k = 1; k < pend.knots.size(); ++k) {
        knots[0].push_back(span + pend.knots[k]);
        vals[0].push_back(psi[pend.nodes[k]]);
    }
    knots[0].back() = ell_new;

    const double trunc = knots[1].back();
    const MeshPtr mesh = build_mesh_from_knots(graphs::g_ell(ell_new), knots, trunc);
    GraphFunction out(mesh);
    for (std::size_t e = 1; e < 4; ++e)
        for (std::size_t k = 0; k < knots[e].size(); ++k) out[mesh->edges()[e].nodes[k]] = vals[e][k];
    for (std::size_t k = 0; k < knots[0].size(); ++k) out[mesh->edges()[0].nodes[k]] = vals[0][k];
    for (std::size_t i = 0; i < out.size(); ++i)
        if (mesh->is_dirichlet(i)) out[i] = 0.0;
    normalize_mass(out, mass(psi));
    return out;
}

CriticalLengthResult critical_length(double mu, const SolveOptions& opts, double width) {
    const SolveOptions base = opts.resolved(mu);
    if (width <= 0.0) width = 1e-2 / mu;
    CriticalLengthResult r;

    auto probe = [&](double ell) {
        LengthProbe p;
        p.ell = ell;
        ExistenceVerdict v = classify_existence(graphs::g_ell(ell), mu, base);
        if (v.status == ExistenceStatus::inconclusive) {
            SolveOptions fine = base;
            fine.h_max = 0.5 * base.h_max;
            fine.tol_level = opts.tol_level;
            v = classify_existence(graphs::g_ell(ell), mu, fine);
            p.refined = true;
        }
        p.best_energy = v.best_energy;
        p.verdict = v.status;
        r.probes.push_back(p);
        return v.status;
    };

    double lo = 1e-3 / mu;
    double hi = 50.0 / mu;
    const ExistenceStatus at_lo = probe(lo);
    const ExistenceStatus at_hi = probe(hi);
    bool ok = at_lo == ExistenceStatus::likely_nonexistent && at_hi == ExistenceStatus::exists;
    while (ok && hi - lo > width) {
        const double mid = 0.5 * (lo + hi);
        const ExistenceStatus s = probe(mid);
        if (s == ExistenceStatus::exists) {
            hi = mid;
        } else if (s == ExistenceStatus::likely_nonexistent) {
            lo = mid;
        } else {
            ok = false;
        }
    }
    r.ell_low = lo;
    r.ell_high = hi;
    r.ell_star = 0.5 * (lo + hi);
    r.complete = ok && hi - lo <= width;

    std::vector<LengthProbe> sorted = r.probes;
    std::sort(sorted.begin(), sorted.end(), [](const LengthProbe& a, const LengthProbe& b) { return a.ell < b.ell; });
    bool seen_exists = false;
    for (const LengthProbe& p : sorted) {
        if (p.verdict == ExistenceStatus::exists) seen_exists = true;
        if (seen_exists && p.verdict == ExistenceStatus::likely_nonexistent) r.monotone = false;
    }
    return r;
}

std::vector<LimitRow> gl_limit_check(double mu, const std::vector<double>& ells, const SolveOptions& opts) {
    const SolveOptions o = opts.resolved(mu);
    for (std::size_t i = 1; i < ells.size(); ++i)
        if (!(ells[i] > ells[i - 1])) throw std::invalid_argument("pendant lengths must increase");

    std::vector<LimitRow> rows;
    std::optional<GraphFunction> prev;
    for (double ell : ells) {
        MinimizeResult r = minimize(graphs::g_ell(ell), mu, o);
        LimitRow row;
        row.ell = ell;
        row.competitor_energy = std::numeric_limits<double>::quiet_NaN();
        if (prev) {
            try {
                GraphFunction comp = gl_competitor(*prev, ell);
                row.competitor_energy = energy(comp, o.p).total;
                std::vector<NamedStart> starts = default_starts(comp.mesh, mu, o.seed, o.starts);
                const MeshPtr mesh = comp.mesh;
                starts.push_back({"competitor", std::move(comp)});
                MinimizeResult r2 = minimize_from(mesh, mu, std::move(starts), o);
                if (r2.best_report.total < r.best_report.total) r = std::move(r2);
            } catch (const std::domain_error&) {
                // psi without the symmetric pendant-peaked shape: no competitor.
            }
        }
        row.energy = r.best_report.total;
        row.start = r.best_start;
        rows.push_back(row);
        prev = std::move(r.best);
    }
    return rows;
}

}  // namespace qgnls
