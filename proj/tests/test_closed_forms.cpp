#include "qgnls/closed_forms.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <doctest.h>

#include <cmath>

using namespace qgnls;

namespace {

template <class F>
double half_line_integral(F f) {
    boost::math::quadrature::exp_sinh<double> q;
    return q.integrate(f, 0.0, std::numeric_limits<double>::infinity());
}

/// Line energy of f with derivative df, both even.
template <class F, class D>
double line_energy(F f, D df, double p) {
    const double kin = 2.0 * half_line_integral([&](double x) { return df(x) * df(x); });
    const double pot = 2.0 * half_line_integral([&](double x) { return std::pow(f(x), p); });
    return 0.5 * kin - pot / p;
}

/// Ground state of u'' + u^{p-1} = omega u on the line with unit mass:
/// A sech^{2/(p-2)}(k x), A^{p-2} = p omega / 2, k = (p-2) sqrt(omega) / 2.
double general_line_level(double p) {
    auto profile = [p](double omega) {
        const double A = std::pow(0.5 * p * omega, 1.0 / (p - 2.0));
        const double k = 0.5 * (p - 2.0) * std::sqrt(omega);
        const double a = 2.0 / (p - 2.0);
        return std::make_tuple(A, k, a);
    };
    auto mass_of = [&](double omega) {
        const auto [A, k, a] = profile(omega);
        return 2.0 * half_line_integral([&](double x) { return A * A * std::pow(1.0 / std::cosh(k * x), 2.0 * a); });
    };
    std::uintmax_t iters = 100;
    const auto root = boost::math::tools::toms748_solve([&](double t) { return std::log(mass_of(std::exp(t))); }, -40.0, 4.0,
                                                        boost::math::tools::eps_tolerance<double>(50), iters);
    const double omega = std::exp(0.5 * (root.first + root.second));
    const auto [A, k, a] = profile(omega);
    auto f = [&](double x) { return A * std::pow(1.0 / std::cosh(k * x), a); };
    auto df = [&](double x) { return -a * k * std::tanh(k * x) * f(x); };
    return line_energy(f, df, p);
}

}  // namespace

TEST_CASE("soliton mass, energy and derivative by quadrature") {
    for (double mu : {0.5, 1.0, 2.0, 3.7}) {
        CAPTURE(mu);
        auto f = [mu](double x) { return soliton(mu, x); };
        auto df = [mu](double x) { return soliton_derivative(mu, x); };
        CHECK(2.0 * half_line_integral([&](double x) { return f(x) * f(x); }) == doctest::Approx(mu).epsilon(1e-12));
        CHECK(line_energy(f, df, 4.0) == doctest::Approx(-mu * mu * mu / 96.0).epsilon(1e-12));
        for (double x : {0.0, 0.3, 2.0, 11.0}) {
            const double h = 1e-5;
            CHECK(df(x) == doctest::Approx((f(x + h) - f(x - h)) / (2 * h)).epsilon(1e-7).scale(1e-12));
        }
        for (double a : {0.01, 1.0, 7.5}) {
            const double q = 2.0 * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                                       [&](double x) { return f(x) * f(x); }, 0.0, a);
            CHECK(soliton_mass_within(mu, a) == doctest::Approx(q).epsilon(1e-12));
        }
    }
}

TEST_CASE("soliton inverse") {
    for (double mu : {0.5, 1.0, 2.0})
        for (double x : {0.0, 0.1, 1.0, 10.0, 40.0}) CHECK(soliton_inverse(mu, soliton(mu, x)) == doctest::Approx(x).scale(1e-7));
    CHECK_THROWS_AS((void)soliton_inverse(1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS((void)soliton_inverse(1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS((void)soliton(-1.0, 0.0), std::domain_error);
}

TEST_CASE("reference levels") {
    CHECK(level(LevelKind::line, 1.0).value == doctest::Approx(-1.0 / 96.0).epsilon(1e-15));
    CHECK(level(LevelKind::halfline, 1.0).value == doctest::Approx(-1.0 / 24.0).epsilon(1e-15));
    CHECK(level(LevelKind::star3_stationary, 1.0).value == doctest::Approx(-1.0 / 216.0).epsilon(1e-15));
    CHECK(level(LevelKind::star3_stationary, 1.0).value > level(LevelKind::line, 1.0).value);
    for (double mu : {0.5, 2.0}) {
        CHECK(level(LevelKind::line, mu).value == doctest::Approx(mu * mu * mu * level(LevelKind::line, 1.0).value));
        CHECK(level(LevelKind::halfline, mu).value == doctest::Approx(4.0 * level(LevelKind::line, mu).value));
    }
}

TEST_CASE("half-soliton and star states by quadrature") {
    const double mu = 1.3;
    // Half-soliton: phi_{2 mu} on [0, inf) has mass mu.
    auto h = [mu](double x) { return soliton(2.0 * mu, x); };
    auto dh = [mu](double x) { return soliton_derivative(2.0 * mu, x); };
    CHECK(half_line_integral([&](double x) { return h(x) * h(x); }) == doctest::Approx(mu).epsilon(1e-12));
    CHECK(0.5 * line_energy(h, dh, 4.0) == doctest::Approx(level(LevelKind::halfline, mu).value).epsilon(1e-12));

    for (std::size_t n : {3u, 4u, 5u}) {
        CAPTURE(n);
        auto s = [&](double x) { return star_stationary(mu, n, x); };
        const double m = static_cast<double>(n) * half_line_integral([&](double x) { return s(x) * s(x); });
        CHECK(m == doctest::Approx(mu).epsilon(1e-12));
        const double dm = 2.0 * mu / static_cast<double>(n);
        const double e = static_cast<double>(n) * 0.5 *
                         line_energy(s, [&](double x) { return soliton_derivative(dm, x); }, 4.0);
        CHECK(e == doctest::Approx(star_stationary_level(mu, n)).epsilon(1e-12));
    }
}

TEST_CASE("comparison test") {
    CHECK(comparison_test(-0.011, 1.0));
    CHECK_FALSE(comparison_test(-0.0104, 1.0));
    CHECK(comparison_test(-0.0104, 1.0, 1e-4));
}

TEST_CASE("levels for other powers follow the ground-state oracle and scaling") {
    for (double p : {2.5, 3.0, 5.0, 5.5}) {
        CAPTURE(p);
        const double oracle = general_line_level(p);
        CHECK(line_level(1.0, p) == doctest::Approx(oracle).epsilon(1e-5));
        const double expo = (p + 2.0) / (6.0 - p);
        CHECK(line_level(2.0, p) == doctest::Approx(std::pow(2.0, expo) * line_level(1.0, p)).epsilon(1e-12));
    }
    CHECK(general_line_level(4.0) == doctest::Approx(-1.0 / 96.0).epsilon(1e-10));
}
