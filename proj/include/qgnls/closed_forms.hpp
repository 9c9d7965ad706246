/**
 * @file closed_forms.hpp
 * @brief Soliton, half-soliton and star stationary states of the cubic NLS,
 *        and the reference energy levels used by the comparison test.
 */
#pragma once

#include <cstddef>
#include <string_view>

namespace qgnls {

enum class LevelKind { line, halfline, star3_stationary };

[[nodiscard]] std::string_view to_string(LevelKind k);

struct ReferenceLevel {
    LevelKind kind;
    double mass;
    double value;
};

/// phi_mu(x) = mu / (2 sqrt 2) sech(mu x / 4); its mass is mu.
[[nodiscard]] double soliton(double mu, double x);
/// phi_mu'(x)
[[nodiscard]] double soliton_derivative(double mu, double x);
/// Solves phi_mu(x) = t for x >= 0, 0 < t <= phi_mu(0).
[[nodiscard]] double soliton_inverse(double mu, double t);
/// \int_{-a}^{a} phi_mu^2 = mu tanh(mu a / 4)
[[nodiscard]] double soliton_mass_within(double mu, double a);

/// Exact level for p = 4; other powers go through the derived cache.
[[nodiscard]] ReferenceLevel level(LevelKind kind, double mu, double p = 4.0);

/// Energy of N half-solitons of mass mu/N joined at their maxima (p = 4):
/// -mu^3 / (24 N^2).
[[nodiscard]] double star_stationary_level(double mu, std::size_t n);

/// Value of the N-half-soliton state at distance x >= 0 from the vertex.
[[nodiscard]] double star_stationary(double mu, std::size_t n, double x);

/// Line ground-state level for general 2 < p < 6, obtained once per p by
/// minimizing on a fine line mesh and scaled as mu^{(p+2)/(6-p)}.
[[nodiscard]] double line_level(double mu, double p);

/// Comparison principle: a ground state exists iff some state reaches the
/// soliton level. True iff e_candidate <= -mu^3/96 + slack.
[[nodiscard]] bool comparison_test(double e_candidate, double mu, double slack = 0.0, double p = 4.0);

}  // namespace qgnls
