/**
 * @file discretize.hpp
 * @brief Mass, NLS energy, its gradient and stationarity residuals for P1
 *        functions on truncated metric graphs.
 *
 * Mass convention: "mass" is the squared L2 norm, \int u^2. With it the
 * soliton levels -mu^3/96 (line), -mu^3/24 (half-line) and -mu^3/216 (three
 * half-solitons) come out exactly.
 *
 * The discrete space is a subspace of H^1 of the untruncated graph (functions
 * vanish at the cut and are extended by zero) and every integral is exact for
 * p = 4, so a discrete energy at mass mu is never below the true infimum.
 */
#pragma once

#include "qgnls/mesh.hpp"

#include <vector>

namespace qgnls {

inline constexpr double kDefaultPower = 4.0;

/// Throws std::domain_error unless 2 < p < 6.
void require_subcritical(double p);

struct EnergyReport {
    double mass = 0.0;
    double kinetic = 0.0;    ///< 1/2 \int |u'|^2
    double potential = 0.0;  ///< 1/p \int |u|^p
    double total = 0.0;      ///< kinetic - potential
    double omega = 0.0;      ///< (\int|u|^p - \int|u'|^2) / mass, from testing the stationary equation with u
    double kirchhoff_residual = 0.0;
};

[[nodiscard]] double mass(const GraphFunction& u);
[[nodiscard]] EnergyReport energy(const GraphFunction& u, double p = kDefaultPower);
[[nodiscard]] GraphFunction energy_gradient(const GraphFunction& u, double p = kDefaultPower);
/// Consistent mass matrix applied to u.
[[nodiscard]] std::vector<double> mass_action(const GraphFunction& u);

/// Sum of outgoing one-sided derivatives at one vertex node.
[[nodiscard]] double kirchhoff_sum(const GraphFunction& u, VertexId v);
/// max over finite vertices of |kirchhoff_sum|.
[[nodiscard]] double kirchhoff_residual(const GraphFunction& u);

/// Second-order one-sided derivative at 0 from samples at 0, h1, h1+h2.
[[nodiscard]] double one_sided_derivative(double f0, double f1, double f2, double h1, double h2);

/// Strong-form residual of u'' + |u|^{p-2}u - omega u at interior edge nodes
/// (vertex and Dirichlet nodes are excluded), in the discrete L2 norm.
[[nodiscard]] double stationary_residual(const GraphFunction& u, double p, double omega);

/// Right side of the Gagliardo-Nirenberg energy bound:
/// 1/2 g^2 (1 - C mu^{(p+2)/4} g^{(p-6)/2}), g = ||u'||_2.
[[nodiscard]] double gn_lower_bound(double mass, double grad_norm, double C, double p = kDefaultPower);

/// Smallest C for which gn_lower_bound(mass(u), ||u'||, C, p) <= E(u).
[[nodiscard]] double gn_ratio(const GraphFunction& u, double p = kDefaultPower);

/// Rescales u in place to the given mass. Returns the factor applied.
double normalize_mass(GraphFunction& u, double target);

}  // namespace qgnls
