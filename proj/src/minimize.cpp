#include "qgnls/minimize.hpp"

#include "qgnls/closed_forms.hpp"
#include "qgnls/kernels.hpp"
#include "qgnls/surgery.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <stdexcept>

namespace qgnls {

namespace {

void require_mass(double mu) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw std::domain_error("mass must be positive");
}

constexpr double kEps = std::numeric_limits<double>::epsilon();

double unit_random(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Preconditioner K + alpha M on the free nodes.
class Preconditioner {
public:
    Preconditioner(const Mesh& m, double alpha) : mesh_(m), n_(m.num_free_nodes()) {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(m.segments().size() * 4);
        for (const Segment& s : m.segments()) {
            const std::uint32_t ia = m.free_index(s.a);
            const std::uint32_t ib = m.free_index(s.b);
            const double k = 1.0 / s.h;
            const double md = alpha * s.h / 3.0;
            const double mo = alpha * s.h / 6.0;
            if (ia != kNoNode) trip.emplace_back(ia, ia, k + md);
            if (ib != kNoNode) trip.emplace_back(ib, ib, k + md);
            if (ia != kNoNode && ib != kNoNode) {
                trip.emplace_back(ia, ib, -k + mo);
                trip.emplace_back(ib, ia, -k + mo);
            }
        }
        Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
        a.setFromTriplets(trip.begin(), trip.end());
        solver_.compute(a);
        if (solver_.info() != Eigen::Success) throw std::runtime_error("preconditioner factorization failed");
    }

    // Solves P x = r restricted to free nodes; Dirichlet entries of x are 0.
    std::vector<double> solve(const std::vector<double>& r) const {
        Eigen::VectorXd b(static_cast<Eigen::Index>(n_));
        for (std::size_t i = 0; i < r.size(); ++i)
            if (const auto f = mesh_.free_index(i); f != kNoNode) b[f] = r[i];
        const Eigen::VectorXd x = solver_.solve(b);
        std::vector<double> out(r.size(), 0.0);
        for (std::size_t i = 0; i < r.size(); ++i)
            if (const auto f = mesh_.free_index(i); f != kNoNode) out[i] = x[f];
        return out;
    }

private:
    const Mesh& mesh_;
    std::size_t n_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

struct Evaluated {
    double energy;
    double grad_sq;
    double mass;
};

Evaluated evaluate(const kernels::MeshView& view, const std::vector<double>& u, double p) {
    const auto in = kernels::omp::integrals(view, u, p);
    return {0.5 * in.grad_sq - in.power / p, in.grad_sq, in.mass};
}

// |u|, zero at Dirichlet nodes, rescaled to mass mu.
void project(const kernels::MeshView& view, std::vector<double>& u, double mu) {
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = view.dirichlet[i] ? 0.0 : std::abs(u[i]);
    const double m = kernels::omp::integrals(view, u, 2.0).mass;
    if (!(m > 0.0)) return;
    const double s = std::sqrt(mu / m);
    for (double& x : u) x *= s;
}

struct StartOutcome {
    StartRecord record;
    std::vector<double> u;
};

StartOutcome descend(const Mesh& mesh, const Preconditioner& pre, double mu, NamedStart start,
                     const SolveOptions& o) {
    const auto view = kernels::MeshView::of(mesh);
    StartOutcome out;
    out.record.name = std::move(start.name);
    std::vector<double> u = std::move(start.u.values);
    project(view, u, mu);

    const double scale = std::pow(mu, 1.5);
    const double gn_slack = 1e-12 * mu * mu * mu;
    std::vector<double> grad(u.size());
    std::vector<double> mu_vec(u.size());
    std::vector<double> trial(u.size());
    Evaluated cur = evaluate(view, u, o.p);
    double step = 1.0;
    StartRecord& rec = out.record;
    constexpr int kWindow = 20;
    std::vector<double> history;

    auto check_iterate = [&](const Evaluated& e) {
        rec.mass_drift = std::max(rec.mass_drift, std::abs(e.mass - mu));
        if (o.check_gn_bound && e.grad_sq > 0.0 &&
            e.energy < gn_lower_bound(e.mass, std::sqrt(e.grad_sq), o.gn_constant, o.p) - gn_slack)
            rec.gn_bound_ok = false;
    };
    check_iterate(cur);

    for (rec.iterations = 0; rec.iterations < o.max_iters; ++rec.iterations) {
        kernels::omp::energy_gradient(view, u, o.p, grad);
        kernels::omp::mass_action(view, u, mu_vec);
        for (std::size_t i = 0; i < u.size(); ++i)
            if (view.dirichlet[i]) mu_vec[i] = 0.0;
        std::vector<double> d = pre.solve(grad);
        const std::vector<double> z = pre.solve(mu_vec);
        const double beta = dot(mu_vec, d) / dot(mu_vec, z);
        for (std::size_t i = 0; i < d.size(); ++i) {
            d[i] -= beta * z[i];
            grad[i] -= beta * mu_vec[i];
        }
        // grad now holds the residual g - beta M u, so the slope is r.P^{-1}r
        // without cancellation.
        const double slope = std::max(0.0, dot(grad, d));
        rec.grad_norm = std::sqrt(slope);
        // The second test stops at the resolution limit of the energy itself.
        if (rec.grad_norm < o.tol_grad * scale || slope < 256.0 * kEps * std::abs(cur.energy)) {
            rec.converged = true;
            break;
        }

        bool accepted = false;
        double s = std::min(2.0 * step, 4.0);
        for (int bt = 0; bt < 60; ++bt, s *= 0.5) {
            for (std::size_t i = 0; i < u.size(); ++i)
                trial[i] = view.dirichlet[i] ? 0.0 : std::abs(u[i] - s * d[i]);
            // Energy after renormalization, from the unscaled integrals.
            const auto in = kernels::omp::integrals(view, trial, o.p);
            if (!(in.mass > 0.0)) continue;
            const double c2 = mu / in.mass;
            const double e = 0.5 * c2 * in.grad_sq - std::pow(c2, 0.5 * o.p) * in.power / o.p;
            if (e <= cur.energy - 1e-4 * s * slope) {
                const double c = std::sqrt(c2);
                for (double& x : trial) x *= c;
                const Evaluated next = evaluate(view, trial, o.p);
                if (next.energy > cur.energy + 4.0 * kEps * std::abs(cur.energy)) rec.monotone = false;
                u.swap(trial);
                cur = next;
                step = s;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // Round-off floor: the energy can no longer resolve the slope.
            rec.converged = rec.grad_norm < 1e2 * o.tol_grad * scale;
            break;
        }
        check_iterate(cur);
        history.push_back(cur.energy);
        // Accepted steps that no longer move the energy beyond round-off.
        if (history.size() > kWindow &&
            history[history.size() - 1 - kWindow] - cur.energy <= 64.0 * kEps * std::abs(cur.energy)) {
            rec.converged = rec.grad_norm < 1e2 * o.tol_grad * scale;
            if (rec.converged) break;
        }
    }
    rec.energy = cur.energy;
    out.u = std::move(u);
    return out;
}

std::vector<double> finite_vertex_distances(const Mesh& mesh) {
    const MetricGraph& g = mesh.graph();
    for (std::size_t v = 0; v < g.num_vertices(); ++v)
        if (!g.vertices()[v].at_infinity) return distance_from(mesh, vertex_point(g, VertexId{v}));
    return std::vector<double>(mesh.num_nodes(), 0.0);
}

}  // namespace

std::string_view to_string(ExistenceStatus s) {
    switch (s) {
        case ExistenceStatus::exists: return "EXISTS";
        case ExistenceStatus::likely_nonexistent: return "LIKELY_NONEXISTENT";
        case ExistenceStatus::inconclusive: return "INCONCLUSIVE";
    }
    return "UNKNOWN";
}

SolveOptions SolveOptions::resolved(double mu) const {
    require_mass(mu);
    require_subcritical(p);
    SolveOptions o = *this;
    if (o.h_max <= 0.0) o.h_max = 0.05 / mu;
    if (o.truncation <= 0.0) o.truncation = 80.0 / mu;
    if (!(o.tol_grad > 0.0)) throw std::invalid_argument("tol_grad must be positive");
    if (o.max_iters < 0) throw std::invalid_argument("max_iters must be non-negative");
    if (o.starts.empty()) throw std::invalid_argument("at least one start is required");
    if (o.tol_level <= 0.0) o.tol_level = 10.0 * soliton_level_error(mu, o.p, o.h_max, o.truncation);
    if (o.gn_constant <= 0.0) o.gn_constant = calibrated_gn_constant(o.p);
    return o;
}

GraphFunction soliton_bump(const MeshPtr& mesh, GraphPoint center, double mu) {
    require_mass(mu);
    const std::vector<double> d = distance_from(*mesh, center);
    GraphFunction u(mesh);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = mesh->is_dirichlet(i) ? 0.0 : soliton(mu, d[i]);
    normalize_mass(u, mu);
    return u;
}

std::vector<NamedStart> default_starts(const MeshPtr& mesh, double mu, std::uint64_t seed,
                                       const std::vector<StartKind>& kinds) {
    require_mass(mu);
    const MetricGraph& g = mesh->graph();
    std::vector<NamedStart> out;
    auto has = [&](StartKind k) { return std::find(kinds.begin(), kinds.end(), k) != kinds.end(); };

    if (has(StartKind::edge_bumps)) {
        for (std::size_t e = 0; e < g.num_edges(); ++e) {
            const GraphPoint c{EdgeId{e}, 0.5 * mesh->edge(EdgeId{e}).length()};
            out.push_back({"edge:" + std::to_string(e), soliton_bump(mesh, c, mu)});
        }
    }
    if (has(StartKind::vertex_bumps)) {
        for (std::size_t v = 0; v < g.num_vertices(); ++v) {
            if (g.vertices()[v].at_infinity) continue;
            // N half-solitons of mass mu/N, the stationary profile of a star
            // with as many branches as the vertex has edge ends.
            const double branches = static_cast<double>(g.degree(VertexId{v}));
            const std::vector<double> d = distance_from(*mesh, vertex_point(g, VertexId{v}));
            GraphFunction u(mesh);
            for (std::size_t i = 0; i < u.size(); ++i)
                u[i] = mesh->is_dirichlet(i) ? 0.0 : soliton(2.0 * mu / branches, d[i]);
            normalize_mass(u, mu);
            out.push_back({"vertex:" + g.vertices()[v].name, std::move(u)});
        }
    }
    if (has(StartKind::constant)) {
        GraphFunction u(mesh);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = mesh->is_dirichlet(i) ? 0.0 : 1.0;
        normalize_mass(u, mu);
        out.push_back({"constant", std::move(u)});
    }
    if (has(StartKind::random)) {
        std::mt19937_64 rng(seed);
        const std::vector<double> d = finite_vertex_distances(*mesh);
        GraphFunction u(mesh);
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double r = 0.5 + unit_random(rng);
            u[i] = mesh->is_dirichlet(i) ? 0.0 : r * std::exp(-0.125 * mu * d[i]);
        }
        normalize_mass(u, mu);
        out.push_back({"random", std::move(u)});
    }
    return out;
}

MinimizeResult minimize(const MetricGraph& g, double mu, const SolveOptions& opts) {
    const SolveOptions o = opts.resolved(mu);
    const MeshPtr mesh = build_mesh(g, o.h_max, o.truncation);
    return minimize_from(mesh, mu, default_starts(mesh, mu, o.seed, o.starts), o);
}

MinimizeResult minimize_from(const MeshPtr& mesh, double mu, std::vector<NamedStart> starts,
                             const SolveOptions& opts) {
    const SolveOptions o = opts.resolved(mu);
    if (starts.empty()) throw std::invalid_argument("at least one start is required");
    for (const NamedStart& s : starts)
        if (s.u.mesh != mesh) throw std::invalid_argument("start '" + s.name + "' lives on another mesh");

    const Preconditioner pre(*mesh, mu * mu / 64.0);
    std::vector<StartOutcome> outcomes(starts.size());
    const auto n = static_cast<std::ptrdiff_t>(starts.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) outcomes[i] = descend(*mesh, pre, mu, std::move(starts[i]), o);

    MinimizeResult r;
    r.options = o;
    r.gn_constant = o.gn_constant;
    for (const StartOutcome& oc : outcomes) {
        r.starts.push_back(oc.record);
        r.any_converged = r.any_converged || oc.record.converged;
    }
    auto better = [](const StartRecord& a, const StartRecord& b) {
        return a.energy < b.energy || (a.energy == b.energy && a.name < b.name);
    };
    std::size_t best = outcomes.size();
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (best == outcomes.size() || better(outcomes[i].record, outcomes[best].record)) best = i;
    }
    r.best = GraphFunction(mesh, outcomes[best].u);
    r.best_start = outcomes[best].record.name;
    r.best_report = energy(r.best, o.p);
    r.boundary_mass_fraction = boundary_mass_fraction(r.best);
    return r;
}

double boundary_mass_fraction(const GraphFunction& u) {
    const Mesh& m = *u.mesh;
    const double cut = 0.25 * m.truncation();
    double outer = 0.0;
    for (std::size_t e = 0; e < m.edges().size(); ++e) {
        if (!m.graph().edge(EdgeId{e}).is_halfline()) continue;
        const EdgeMesh& em = m.edges()[e];
        for (std::size_t j = 0; j + 1 < em.nodes.size(); ++j) {
            if (em.knots[j] < cut) continue;
            const double a = u[em.nodes[j]];
            const double b = u[em.nodes[j + 1]];
            outer += (em.knots[j + 1] - em.knots[j]) * (a * a + a * b + b * b) / 3.0;
        }
    }
    const double total = mass(u);
    return total > 0.0 ? outer / total : 0.0;
}

double soliton_level_error(double mu, double p, double h_max, double truncation) {
    require_mass(mu);
    require_subcritical(p);
    const MeshPtr mesh = build_mesh(graphs::line(), h_max, truncation);
    const double floor = 1e-12 * std::abs(line_level(mu, p));
    if (p == 4.0) {
        const GraphFunction u = soliton_bump(mesh, vertex_point(mesh->graph(), VertexId{0}), mu);
        return std::max(floor, energy(u, p).total - line_level(mu, p));
    }
    SolveOptions o;
    o.p = p;
    o.h_max = h_max;
    o.truncation = truncation;
    o.tol_level = 1.0;
    o.gn_constant = 1.0;
    o.check_gn_bound = false;
    o.starts = {StartKind::vertex_bumps};
    const MinimizeResult r = minimize(graphs::line(), mu, o);
    return std::max(floor, std::abs(r.best_report.total - line_level(mu, p)));
}

double calibrated_gn_constant(double p) {
    require_subcritical(p);
    static std::mutex guard;
    static std::map<double, double> cache;
    {
        std::lock_guard lock(guard);
        if (auto it = cache.find(p); it != cache.end()) return it->second;
    }
    double worst = 0.0;
    std::mt19937_64 rng(20240611);
    const MeshPtr half = build_mesh(graphs::halfline(), 0.01, 40.0);
    const MeshPtr line = build_mesh(graphs::line(), 0.01, 40.0);
    for (const MeshPtr& m : {half, line}) {
        worst = std::max(worst, gn_ratio(soliton_bump(m, vertex_point(m->graph(), VertexId{0}), 1.0), p));
        for (int k = 0; k < 24; ++k) {
            const double width = 0.2 + 8.0 * unit_random(rng);
            const double shift = 3.0 * unit_random(rng);
            const double wiggle = unit_random(rng);
            GraphFunction u = sample(m, [&](EdgeId, double x) {
                const double y = (x - shift) / width;
                return std::exp(-y * y) * (1.0 + 0.3 * wiggle * std::cos(5.0 * x));
            });
            if (mass(u) <= 0.0) continue;
            worst = std::max(worst, gn_ratio(u, p));
        }
    }
    const double c = 1.01 * worst;
    std::lock_guard lock(guard);
    cache.emplace(p, c);
    return c;
}

ExistenceVerdict classify_existence(const MetricGraph& g, double mu, const SolveOptions& opts) {
    const SolveOptions o = opts.resolved(mu);
    ExistenceVerdict v;
    v.level = line_level(mu, o.p);
    v.delta = o.tol_level;

    if (o.p == 4.0 && is_bubble_tower(g)) {
        const MeshPtr mesh = build_mesh(g, o.h_max, o.truncation);
        GraphFunction cert = bubble_tower_soliton(mesh, mu);
        v.best_energy = energy(cert, o.p).total;
        v.gap = v.best_energy - v.level;
        v.boundary_mass_fraction = boundary_mass_fraction(cert);
        v.structural_override = true;
        v.status = ExistenceStatus::exists;
        v.certificate = std::move(cert);
        return v;
    }

    const MinimizeResult r = minimize(g, mu, o);
    v.best_energy = r.best_report.total;
    v.gap = v.best_energy - v.level;
    v.boundary_mass_fraction = r.boundary_mass_fraction;
    if (v.gap <= -v.delta) {
        v.status = ExistenceStatus::exists;
        v.certificate = r.best;
        return v;
    }

    // Rerun with twice the truncation, warm-started from the current best
    // extended by zero, so the doubled energy cannot exceed the first one.
    SolveOptions o2 = o;
    o2.truncation = 2.0 * o.truncation;
    const MeshPtr mesh2 = build_mesh(g, o2.h_max, o2.truncation);
    std::vector<NamedStart> starts = default_starts(mesh2, mu, o2.seed, o2.starts);
    const GraphFunction& prev = r.best;
    GraphFunction warm = sample(mesh2, [&](EdgeId e, double x) {
        return x <= prev.mesh->edge(e).length() ? prev.at(e, x) : 0.0;
    });
    normalize_mass(warm, mu);
    starts.push_back({"warm", std::move(warm)});
    const MinimizeResult r2 = minimize_from(mesh2, mu, std::move(starts), o2);
    v.energy_doubled = r2.best_report.total;
    v.boundary_mass_fraction = std::max(v.boundary_mass_fraction, r2.boundary_mass_fraction);

    const bool near_level = std::abs(v.gap) <= v.delta;
    const bool stable = v.best_energy - v.energy_doubled < v.delta;
    const bool escaping = r.boundary_mass_fraction > o.runaway_threshold;
    const bool settled = r.any_converged && r2.any_converged;
    v.status = near_level && stable && escaping && settled ? ExistenceStatus::likely_nonexistent
                                                           : ExistenceStatus::inconclusive;
    return v;
}

StationarityReport certify_stationary(const GraphFunction& u, double p, double tol) {
    const EnergyReport e = energy(u, p);
    StationarityReport r;
    r.omega = e.omega;
    r.residual = stationary_residual(u, p, e.omega);
    r.kirchhoff = e.kirchhoff_residual;
    r.stationary = r.residual < tol && r.kirchhoff < tol;
    return r;
}

}  // namespace qgnls
