#include "qgnls/closed_forms.hpp"
#include "qgnls/discretize.hpp"
#include "qgnls/kernels.hpp"
#include "qgnls/mesh.hpp"

#include <doctest.h>
#include <omp.h>

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

using namespace qgnls;

namespace {

GraphFunction random_function(const MeshPtr& mesh, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    GraphFunction u(mesh);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = mesh->is_dirichlet(i) ? 0.0 : unif(rng);
    return u;
}

}  // namespace

TEST_CASE("mesh layout") {
    const MeshPtr m = build_mesh(graphs::line_with_pendant(0.3), 0.1, 2.0);
    CHECK(m->edges().size() == 3);
    CHECK(m->edges()[0].knots.size() == 4);  // 0.3 / 0.1 intervals
    CHECK(m->edges()[1].knots.back() == doctest::Approx(2.0));
    CHECK(m->is_dirichlet(m->edges()[1].nodes.back()));
    CHECK(m->num_free_nodes() == m->num_nodes() - 2);
    // Short edges still get two intervals.
    const MeshPtr tiny = build_mesh(graphs::line_with_pendant(1e-3), 0.1, 2.0);
    CHECK(tiny->edges()[0].knots.size() == 3);
    CHECK_THROWS_AS((void)build_mesh(graphs::line(), 0.0, 2.0), MeshError);
}

TEST_CASE("exact integrals of low-degree functions") {
    const double L = 3.0;
    const MeshPtr m = build_mesh(graphs::line_with_pendant(L), 0.37, 1.0);
    // u = x on the pendant (vertex at 0), 0 on the half-lines.
    GraphFunction u = sample(m, [](EdgeId e, double x) { return e.index == 0 ? x : 0.0; });
    u[m->vertex_node(VertexId{0})] = 0.0;
    const EnergyReport r = energy(u, 4.0);
    CHECK(r.mass == doctest::Approx(L * L * L / 3.0).epsilon(1e-13));
    CHECK(r.kinetic == doctest::Approx(0.5 * L).epsilon(1e-13));
    CHECK(r.potential == doctest::Approx(std::pow(L, 5) / 20.0).epsilon(1e-13));
    CHECK(r.total == doctest::Approx(r.kinetic - r.potential));
}

TEST_CASE("energy gradient matches central differences") {
    for (double p : {3.0, 4.0, 5.5}) {
        CAPTURE(p);
        const MeshPtr m = build_mesh(graphs::showcase(), 0.3, 3.0);
        const GraphFunction u = random_function(m, 11);
        const GraphFunction g = energy_gradient(u, p);
        std::mt19937_64 rng(3);
        for (int k = 0; k < 40; ++k) {
            const std::size_t i = rng() % u.size();
            if (m->is_dirichlet(i)) {
                CHECK(g[i] == 0.0);
                continue;
            }
            const double eps = 1e-6;
            GraphFunction a = u;
            GraphFunction b = u;
            a[i] += eps;
            b[i] -= eps;
            const double fd = (energy(a, p).total - energy(b, p).total) / (2.0 * eps);
            CHECK(g[i] == doctest::Approx(fd).epsilon(1e-5).scale(1e-9));
        }
    }
}

TEST_CASE("mass action is the mass matrix") {
    const MeshPtr m = build_mesh(graphs::star(3), 0.2, 2.0);
    const GraphFunction u = random_function(m, 5);
    const std::vector<double> Mu = mass_action(u);
    double quad = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) quad += u[i] * Mu[i];
    CHECK(quad == doctest::Approx(mass(u)).epsilon(1e-13));
}

TEST_CASE("serial and OpenMP kernels agree, independent of thread count") {
    const MeshPtr m = build_mesh(graphs::star(3), 1e-3, 20.0);
    const GraphFunction u = random_function(m, 9);
    const auto view = kernels::MeshView::of(*m);
    const auto s = kernels::serial::integrals(view, u.values, 4.0);
    const auto o = kernels::omp::integrals(view, u.values, 4.0);
    CHECK(o.mass == doctest::Approx(s.mass).epsilon(1e-12));
    CHECK(o.grad_sq == doctest::Approx(s.grad_sq).epsilon(1e-12));
    CHECK(o.power == doctest::Approx(s.power).epsilon(1e-12));

    std::vector<double> gs(u.size());
    std::vector<double> go(u.size());
    kernels::serial::energy_gradient(view, u.values, 4.0, gs);
    kernels::omp::energy_gradient(view, u.values, 4.0, go);
    for (std::size_t i = 0; i < u.size(); ++i) REQUIRE(gs[i] == doctest::Approx(go[i]).epsilon(1e-12));

    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto one = kernels::omp::integrals(view, u.values, 4.0);
    omp_set_num_threads(4);
    const auto four = kernels::omp::integrals(view, u.values, 4.0);
    omp_set_num_threads(saved);
    CHECK(one.mass == four.mass);
    CHECK(one.grad_sq == four.grad_sq);
    CHECK(one.power == four.power);
}

TEST_CASE("soliton level on the truncated line") {
    const auto t0 = std::chrono::steady_clock::now();
    const MeshPtr m = build_mesh(graphs::line(), 1e-3, 100.0);
    GraphFunction u = sample(m, [](EdgeId, double x) { return soliton(1.0, x); });
    normalize_mass(u, 1.0);
    const double e = energy(u).total;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(std::abs(e + 1.0 / 96.0) < 1e-6);
    CHECK(secs < 5.0);
    CHECK(kirchhoff_residual(u) < 1e-9);
}

TEST_CASE("Kirchhoff residual detects a kink") {
    const MeshPtr m = build_mesh(graphs::star(3), 0.01, 30.0);
    const GraphFunction star = sample(m, [](EdgeId, double x) { return star_stationary(1.0, 3, x); });
    CHECK(kirchhoff_residual(star) < 1e-4);
    const GraphFunction half =
        sample(m, [](EdgeId e, double x) { return e.index == 0 ? soliton(1.0, x) : soliton(1.0, 5.0 + x); });
    CHECK(kirchhoff_residual(half) > 1e-2);
    // Second-order one-sided derivative is exact on quadratics.
    auto f = [](double x) { return 1.0 + 2.0 * x - 3.0 * x * x; };
    CHECK(one_sided_derivative(f(0.0), f(0.1), f(0.3), 0.1, 0.2) == doctest::Approx(2.0));
}

TEST_CASE("stationary residual vanishes on the star state") {
    const MeshPtr m = build_mesh(graphs::star(3), 0.01, 160.0);
    const GraphFunction u = sample(m, [](EdgeId, double x) { return star_stationary(1.0, 3, x); });
    const double omega = std::pow(2.0 / 3.0, 2) / 16.0;
    CHECK(stationary_residual(u, 4.0, omega) < 1e-4);
    CHECK(stationary_residual(u, 4.0, 2.0 * omega) > 1e-3);
}

TEST_CASE("Gagliardo-Nirenberg bound and mass normalization") {
    const MeshPtr m = build_mesh(graphs::line(), 0.05, 40.0);
    GraphFunction u = random_function(m, 2);
    const double c = normalize_mass(u, 2.0);
    CHECK(c > 0.0);
    CHECK(mass(u) == doctest::Approx(2.0).epsilon(1e-14));
    const EnergyReport r = energy(u);
    const double g = std::sqrt(2.0 * r.kinetic);
    CHECK(gn_lower_bound(2.0, g, gn_ratio(u), 4.0) == doctest::Approx(r.total).epsilon(1e-10));
    CHECK(gn_lower_bound(2.0, g, 1.0, 4.0) <= r.total);
    CHECK_THROWS_AS(require_subcritical(6.0), std::domain_error);
    CHECK_THROWS_AS(require_subcritical(2.0), std::domain_error);
}

TEST_CASE("profile CSV ordering") {
    const MeshPtr m = build_mesh(graphs::line_with_pendant(0.2), 0.1, 0.2);
    const GraphFunction u = sample(m, [](EdgeId e, double x) { return static_cast<double>(e.index) + x; });
    std::ostringstream os;
    write_profile_csv(os, u);
    const std::string expected =
        "edge_id,arclength,value\n0,0,0\n0,0.1,0.1\n0,0.2,0.2\n1,0,0\n1,0.1,1.1\n1,0.2,0\n2,0,0\n2,0.1,2.1\n2,0.2,0\n";
    CHECK(os.str() == expected);
}
