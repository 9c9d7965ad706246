#include "qgnls/surgery.hpp"

#include "qgnls/closed_forms.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

#include <cmath>

using namespace qgnls;

namespace {

using Real = long double;

Real phi(Real mu, Real x) { return mu / (2 * std::sqrt(Real(2))) / std::cosh(mu * x / 4); }
Real dphi(Real mu, Real x) { return -mu * mu / (8 * std::sqrt(Real(2))) * std::tanh(mu * x / 4) / std::cosh(mu * x / 4); }

/// E(pendant competitor) - E(soliton) by quadrature of the explicit pieces:
/// the pendant carries phi((ell - y)/2) for y in [0, ell], the two
/// half-lines carry the tails phi(ell/2 + x).
Real pendant_margin_oracle(Real mu, Real ell) {
    using boost::math::quadrature::gauss_kronrod;
    auto density = [&](Real u, Real du) { return du * du / 2 - u * u * u * u / 4; };
    const Real pend = gauss_kronrod<Real, 61>::integrate(
        [&](Real y) { return density(phi(mu, (ell - y) / 2), dphi(mu, (ell - y) / 2) / 2); }, Real(0), ell);
    const Real head = gauss_kronrod<Real, 61>::integrate(
        [&](Real x) { return density(phi(mu, x), dphi(mu, x)); }, -ell / 2, ell / 2);
    // The tails are shared, so only the head and the pendant differ.
    return pend - head;
}

}  // namespace

TEST_CASE("cut soliton pieces") {
    const SolitonPieces s = cut_soliton(1.5, 2.0);
    CHECK(s.head_mass() + 2.0 * s.tail_mass() == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(s.tail(0.0) == doctest::Approx(s.cut_value()));
    CHECK(s.head(1.0) == doctest::Approx(s.cut_value()));
    CHECK(s.head(0.0) == doctest::Approx(soliton(1.5, 0.0)));
    CHECK_THROWS_AS((void)s.head(1.01), std::domain_error);
    CHECK_THROWS_AS((void)s.tail(-0.1), std::domain_error);
    CHECK_THROWS_AS((void)cut_soliton(1.0, 0.0), std::domain_error);
}

TEST_CASE("pendant margin matches the quadrature oracle and is negative") {
    for (double mu : {0.5, 1.0, 2.0}) {
        for (double ell : {0.01, 0.1, 1.0, 10.0}) {
            CAPTURE(mu);
            CAPTURE(ell);
            const double closed = pendant_competitor_margin(mu, ell);
            const double oracle = static_cast<double>(pendant_margin_oracle(mu, ell));
            CHECK(closed < 0.0);
            CHECK(oracle < 0.0);
            CHECK(closed == doctest::Approx(oracle).epsilon(1e-8));
        }
    }
    CHECK_THROWS_AS((void)pendant_competitor_margin(1.0, 0.0), std::domain_error);
}

TEST_CASE("discrete pendant competitor") {
    const GraphFunction u = pendant_competitor(1.0, 1.0, 0.01, 80.0);
    CHECK(mass(u) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(u.max_value() == doctest::Approx(soliton(1.0, 0.0)).epsilon(1e-6));
    const double margin = energy(u).total + 1.0 / 96.0;
    CHECK(margin == doctest::Approx(pendant_competitor_margin(1.0, 1.0)).epsilon(1e-2));
    // Peak at the tip, continuous at the vertex.
    const MeshPtr& m = u.mesh;
    CHECK(u[m->edges()[0].nodes.back()] == u.max_value());
    CHECK(u.at(EdgeId{1}, 0.0) == doctest::Approx(cut_soliton(1.0, 1.0).cut_value()).epsilon(1e-6));
}

TEST_CASE("bubble tower solitons sit at the soliton level") {
    for (double mu : {0.5, 1.0, 2.0}) {
        for (const std::vector<double>& arcs : {std::vector<double>{2.0}, {2.0, 1.0}, {1.5, 1.0, 0.5}}) {
            CAPTURE(mu);
            CAPTURE(arcs.size());
            const GraphFunction u = bubble_tower_soliton(mu, arcs, 0.05 / mu, 80.0 / mu);
            CHECK(std::abs(energy(u).total + mu * mu * mu / 96.0) < 1e-5);
            CHECK(mass(u) == doctest::Approx(mu).epsilon(1e-12));
        }
    }
    const MeshPtr m = build_mesh(graphs::bubble_tower({2.0, 1.0}), 0.05, 10.0);
    const GraphPoint apex = tower_apex(*m);
    CHECK(distance_from(*m, apex)[m->vertex_node(VertexId{0})] == doctest::Approx(3.0));
    CHECK_THROWS_AS((void)tower_apex(*build_mesh(graphs::star(3), 0.1, 5.0)), GraphError);
}

TEST_CASE("growing the pendant of G_ell lowers the energy") {
    SolveOptions o;
    o.h_max = 0.05;
    o.truncation = 60.0;
    const MinimizeResult r = minimize(graphs::g_ell(3.0), 1.0, o);
    const GraphFunction c = gl_competitor(r.best, 4.0);
    CHECK(pendant_length(c.mesh->graph()) == 4.0);
    CHECK(mass(c) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(energy(c).potential == doctest::Approx(r.best_report.potential).epsilon(1e-9));
    CHECK(energy(c).total <= r.best_report.total + 1e-12);
    CHECK_THROWS_AS((void)gl_competitor(r.best, 2.0), std::domain_error);

    // A state escaping along one half-line has no symmetric cut.
    const MeshPtr m = build_mesh(graphs::g_ell(1.0), 0.05, 60.0);
    const GraphFunction escaped = soliton_bump(m, {EdgeId{1}, 30.0}, 1.0);
    CHECK_THROWS_AS((void)gl_competitor(escaped, 2.0), std::domain_error);
    CHECK_THROWS_AS((void)pendant_length(graphs::star(3)), GraphError);
}

TEST_CASE("coarse critical length bracket") {
    const CriticalLengthResult c = critical_length(1.0, SolveOptions{}, 0.5);
    CHECK(c.complete);
    CHECK(c.monotone);
    CHECK(c.ell_high - c.ell_low <= 0.5);
    CHECK(c.ell_low < 2.7);
    CHECK(c.ell_high > 2.6);
}

TEST_CASE("limit table rejects unsorted lengths") {
    CHECK_THROWS_AS((void)gl_limit_check(1.0, {2.0, 1.0}), std::invalid_argument);
}
