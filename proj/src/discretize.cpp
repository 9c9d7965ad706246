#include "qgnls/discretize.hpp"

#include "qgnls/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qgnls {

void require_subcritical(double p) {
    if (!(p > 2.0 && p < 6.0)) throw std::domain_error("nonlinearity power must satisfy 2 < p < 6");
}

double mass(const GraphFunction& u) {
    return kernels::omp::integrals(kernels::MeshView::of(*u.mesh), u.values, 2.0).mass;
}

EnergyReport energy(const GraphFunction& u, double p) {
    require_subcritical(p);
    const auto in = kernels::omp::integrals(kernels::MeshView::of(*u.mesh), u.values, p);
    EnergyReport r;
    r.mass = in.mass;
    r.kinetic = 0.5 * in.grad_sq;
    r.potential = in.power / p;
    r.total = r.kinetic - r.potential;
    r.omega = in.mass > 0.0 ? (in.power - in.grad_sq) / in.mass : 0.0;
    r.kirchhoff_residual = kirchhoff_residual(u);
    return r;
}

GraphFunction energy_gradient(const GraphFunction& u, double p) {
    require_subcritical(p);
    GraphFunction g(u.mesh);
    kernels::omp::energy_gradient(kernels::MeshView::of(*u.mesh), u.values, p, g.values);
    return g;
}

std::vector<double> mass_action(const GraphFunction& u) {
    std::vector<double> out(u.size());
    kernels::omp::mass_action(kernels::MeshView::of(*u.mesh), u.values, out);
    return out;
}

double one_sided_derivative(double f0, double f1, double f2, double h1, double h2) {
    const double h12 = h1 + h2;
    return -(2.0 * h1 + h2) / (h1 * h12) * f0 + h12 / (h1 * h2) * f1 - h1 / (h2 * h12) * f2;
}

double kirchhoff_sum(const GraphFunction& u, VertexId v) {
    const Mesh& m = *u.mesh;
    double sum = 0.0;
    for (const EdgeEnd& end : m.graph().incident(v)) {
        const EdgeMesh& em = m.edge(end.edge);
        const std::size_t n = em.knots.size();
        if (end.at_from) {
            sum += one_sided_derivative(u[em.nodes[0]], u[em.nodes[1]], u[em.nodes[2]], em.knots[1] - em.knots[0],
                                        em.knots[2] - em.knots[1]);
        } else {
            sum += one_sided_derivative(u[em.nodes[n - 1]], u[em.nodes[n - 2]], u[em.nodes[n - 3]],
                                        em.knots[n - 1] - em.knots[n - 2], em.knots[n - 2] - em.knots[n - 3]);
        }
    }
    return sum;
}

double kirchhoff_residual(const GraphFunction& u) {
    const MetricGraph& g = u.mesh->graph();
    double worst = 0.0;
    for (std::size_t v = 0; v < g.num_vertices(); ++v) {
        if (g.vertices()[v].at_infinity) continue;
        worst = std::max(worst, std::abs(kirchhoff_sum(u, VertexId{v})));
    }
    return worst;
}

double stationary_residual(const GraphFunction& u, double p, double omega) {
    const Mesh& m = *u.mesh;
    double acc = 0.0;
    for (const EdgeMesh& em : m.edges()) {
        for (std::size_t j = 1; j + 1 < em.nodes.size(); ++j) {
            const double h1 = em.knots[j] - em.knots[j - 1];
            const double h2 = em.knots[j + 1] - em.knots[j];
            const double ul = u[em.nodes[j - 1]];
            const double uc = u[em.nodes[j]];
            const double ur = u[em.nodes[j + 1]];
            const double lap = 2.0 * ((ur - uc) / h2 - (uc - ul) / h1) / (h1 + h2);
            const double r = lap + kernels::signed_pow(uc, p) - omega * uc;
            acc += r * r * 0.5 * (h1 + h2);
        }
    }
    return std::sqrt(acc);
}

double gn_lower_bound(double mass, double grad_norm, double C, double p) {
    if (mass < 0.0 || !(grad_norm > 0.0) || C < 0.0) throw std::invalid_argument("gn_lower_bound: bad arguments");
    const double g2 = grad_norm * grad_norm;
    return 0.5 * g2 * (1.0 - C * std::pow(mass, (p + 2.0) / 4.0) * std::pow(grad_norm, (p - 6.0) / 2.0));
}

double gn_ratio(const GraphFunction& u, double p) {
    require_subcritical(p);
    const auto in = kernels::omp::integrals(kernels::MeshView::of(*u.mesh), u.values, p);
    if (in.mass <= 0.0 || in.grad_sq <= 0.0) return 0.0;
    const double g = std::sqrt(in.grad_sq);
    return (2.0 / p) * in.power / (std::pow(in.mass, (p + 2.0) / 4.0) * std::pow(g, (p - 2.0) / 2.0));
}

double normalize_mass(GraphFunction& u, double target) {
    const double m = mass(u);
    if (!(m > 0.0)) throw std::domain_error("cannot normalize a function with zero mass");
    const double s = std::sqrt(target / m);
    for (double& x : u.values) x *= s;
    return s;
}

}  // namespace qgnls
