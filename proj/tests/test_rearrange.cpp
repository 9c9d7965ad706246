#include "qgnls/rearrange.hpp"

#include "corpus.hpp"
#include "qgnls/discretize.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace qgnls;
using qgnls::testing::piece_power;

namespace {

double power_integral(const GraphFunction& u, double q) {
    double acc = 0.0;
    for (const Segment& s : u.mesh->segments()) acc += piece_power(u[s.a], u[s.b], s.h, q);
    return acc;
}

double power_integral(const RearrangedProfile& r, double q) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < r.positions.size(); ++i)
        acc += piece_power(r.values[i], r.values[i + 1], r.positions[i + 1] - r.positions[i], q);
    return acc;
}

/// |{u > t}| piece by piece.
double rho_oracle(const GraphFunction& u, double t) {
    double acc = 0.0;
    for (const Segment& s : u.mesh->segments()) {
        const double a = u[s.a];
        const double b = u[s.b];
        if (a > t && b > t) acc += s.h;
        else if (a > t || b > t) acc += s.h * (std::max(a, b) - t) / std::abs(b - a);
    }
    return acc;
}

double grad_sq(const GraphFunction& u) { return 2.0 * energy(u).kinetic; }

}  // namespace

TEST_CASE("distribution function matches the piecewise oracle") {
    const auto corpus = qgnls::testing::random_p1_corpus(40, 17);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (const GraphFunction& u : corpus) {
        const DistributionFunction rho = distribution(u);
        const double top = u.max_value();
        for (int k = 0; k < 25; ++k) {
            const double t = -0.1 * top + 1.2 * top * unif(rng);
            CHECK(rho(t) == doctest::Approx(rho_oracle(u, t)).epsilon(1e-10).scale(1e-12));
        }
        // Plateau levels: rho(t) is the measure strictly above t.
        for (double t : rho.levels) CHECK(rho(t) == doctest::Approx(rho_oracle(u, t)).scale(1e-10));
    }
}

TEST_CASE("rearrangements are equimeasurable and decrease the Dirichlet energy") {
    const auto corpus = qgnls::testing::random_p1_corpus(100, 2024);
    int multi = 0;
    for (const GraphFunction& u : corpus) {
        const RearrangedProfile star = monotone_rearrangement(u);
        const RearrangedProfile hat = symmetric_rearrangement(u);
        for (std::size_t i = 1; i < star.positions.size(); ++i) {
            REQUIRE(star.positions[i] > star.positions[i - 1]);
            REQUIRE(star.values[i] <= star.values[i - 1]);
        }
        CHECK(star.positions.back() == doctest::Approx(distribution(u).total_length));
        for (double q : {2.0, 3.0, 4.0, 5.0}) {
            const double ref = power_integral(u, q);
            CHECK(std::abs(power_integral(star, q) - ref) <= 1e-8 * ref);
            CHECK(std::abs(power_integral(hat, q) - ref) <= 1e-8 * ref);
        }
        CHECK(star.mass() == doctest::Approx(mass(u)).epsilon(1e-10));
        const double g = grad_sq(u);
        CHECK(star.grad_norm() * star.grad_norm() <= g * (1.0 + 1e-12));
        if (min_preimage_count(u) >= 2) {
            ++multi;
            CHECK(hat.grad_norm() * hat.grad_norm() <= g * (1.0 + 1e-12));
        }
        for (std::size_t i = 0; i < hat.positions.size(); ++i) {
            const double x = hat.positions[i];
            CHECK(hat.values[i] == star(2.0 * std::abs(x)));
            CHECK(hat(x) == hat(-x));
        }
    }
    MESSAGE("functions with at least two preimages per level: " << multi);
    CHECK(multi >= 20);
    CHECK(multi < 100);
}

TEST_CASE("symmetric rearrangement of an even decreasing profile is itself") {
    const MeshPtr m = build_mesh(graphs::line(), 0.01, 20.0);
    const GraphFunction u = sample(m, [](EdgeId, double x) { return 1.0 / std::cosh(x); });
    const RearrangedProfile hat = symmetric_rearrangement(u);
    for (double x : {-3.0, -1.0, 0.0, 0.5, 2.0}) CHECK(hat(x) == doctest::Approx(1.0 / std::cosh(x)).epsilon(1e-4));
    CHECK(hat.grad_norm() == doctest::Approx(std::sqrt(grad_sq(u))).epsilon(1e-10));
}

TEST_CASE("preimage counts") {
    const MeshPtr line = build_mesh(graphs::line(), 0.1, 5.0);
    const GraphFunction bump = sample(line, [](EdgeId, double x) { return std::exp(-x); });
    CHECK(min_preimage_count(bump) == 2);
    CHECK(preimage_count(bump, 0.55) == 2);
    const MeshPtr star = build_mesh(graphs::star(3), 0.1, 5.0);
    CHECK(min_preimage_count(sample(star, [](EdgeId, double x) { return std::exp(-x); })) == 3);
    const MeshPtr half = build_mesh(graphs::halfline(), 0.1, 5.0);
    CHECK(min_preimage_count(sample(half, [](EdgeId, double x) { return std::exp(-x); })) == 1);
    CHECK_THROWS_AS((void)preimage_count(bump, 2.0), std::domain_error);
}

TEST_CASE("profile export and resampling") {
    const MeshPtr m = build_mesh(graphs::halfline(), 0.5, 1.0);
    GraphFunction u(m);
    u[m->edges()[0].nodes[0]] = 1.0;
    u[m->edges()[0].nodes[1]] = 0.5;
    std::ostringstream os;
    write_profile_csv(os, monotone_rearrangement(u));
    CHECK(os.str() == "edge_id,arclength,value\nrplus,0,1\nrplus,0.5,0.5\nrplus,1,0\n");
    std::ostringstream sym;
    write_profile_csv(sym, symmetric_rearrangement(u));
    CHECK(sym.str().rfind("edge_id,arclength,value\nrline,-0.5,0\n", 0) == 0);
    const RearrangedProfile fine = resample(monotone_rearrangement(u), 0.1);
    CHECK(fine.positions.size() == 11);
    CHECK(fine(0.25) == doctest::Approx(0.75));
}
