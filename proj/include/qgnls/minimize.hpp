/**
 * @file minimize.hpp
 * @brief Mass-constrained minimization of the NLS energy on a truncated
 *        metric graph and the existence classification built on it.
 */
#pragma once

#include "qgnls/discretize.hpp"
#include "qgnls/metric_graph.hpp"
#include "qgnls/mesh.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qgnls {

enum class StartKind { edge_bumps, vertex_bumps, constant, random };

/// Zero-valued fields are resolved against the mass at solve time:
/// h_max = 0.05/mu, truncation = 80/mu, tol_level = 10x the soliton-level
/// error on the same mesh parameters.
struct SolveOptions {
    double p = kDefaultPower;
    double h_max = 0.0;
    double truncation = 0.0;
    /// Stop when the constraint-projected gradient, measured in the dual of
    /// the preconditioner norm, drops below tol_grad * mu^{3/2}.
    double tol_grad = 1e-8;
    double tol_level = 0.0;
    int max_iters = 2000;
    std::vector<StartKind> starts{StartKind::edge_bumps, StartKind::vertex_bumps, StartKind::constant,
                                  StartKind::random};
    std::uint64_t seed = 1;
    /// Runaway diagnostic: fraction of mass beyond a quarter of each
    /// truncated half-line above which a state counts as escaping.
    double runaway_threshold = 0.5;
    /// Check every iterate against the Gagliardo-Nirenberg lower bound.
    bool check_gn_bound = true;
    /// Gagliardo-Nirenberg constant for that check; 0 means calibrated.
    double gn_constant = 0.0;

    [[nodiscard]] SolveOptions resolved(double mu) const;
};

struct NamedStart {
    std::string name;
    GraphFunction u;
};

struct StartRecord {
    std::string name;
    double energy = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    /// Every accepted step lowered (or kept) the energy.
    bool monotone = true;
    /// Largest deviation of the mass from mu after renormalization.
    double mass_drift = 0.0;
    /// Every iterate satisfied the Gagliardo-Nirenberg bound.
    bool gn_bound_ok = true;
};

struct MinimizeResult {
    GraphFunction best;
    EnergyReport best_report;
    std::string best_start;
    std::vector<StartRecord> starts;
    bool any_converged = false;
    double boundary_mass_fraction = 0.0;
    double gn_constant = 0.0;
    SolveOptions options;  ///< resolved
};

enum class ExistenceStatus { exists, likely_nonexistent, inconclusive };

[[nodiscard]] std::string_view to_string(ExistenceStatus s);

struct ExistenceVerdict {
    ExistenceStatus status = ExistenceStatus::inconclusive;
    double level = 0.0;       ///< soliton level the energy is compared with
    double best_energy = 0.0;
    double gap = 0.0;         ///< best_energy - level
    double delta = 0.0;       ///< comparison slack used
    double energy_doubled = 0.0;  ///< best energy with doubled truncation (when computed)
    double boundary_mass_fraction = 0.0;
    bool structural_override = false;  ///< bubble-tower exception applied
    std::optional<GraphFunction> certificate;
};

/// Soliton bump phi_mu(dist(x, center)) rescaled to mass mu.
[[nodiscard]] GraphFunction soliton_bump(const MeshPtr& mesh, GraphPoint center, double mu);

/// Soliton bumps at edge midpoints (half-lines: middle of the truncated
/// piece), star-shaped bumps phi_{2mu/deg}(dist) at finite vertices, the
/// constant, and a seeded random positive function; all vanish at Dirichlet
/// nodes and carry mass mu.
[[nodiscard]] std::vector<NamedStart> default_starts(const MeshPtr& mesh, double mu, std::uint64_t seed,
                                                     const std::vector<StartKind>& kinds);

[[nodiscard]] MinimizeResult minimize(const MetricGraph& g, double mu, const SolveOptions& opts = {});
[[nodiscard]] MinimizeResult minimize_from(const MeshPtr& mesh, double mu, std::vector<NamedStart> starts,
                                           const SolveOptions& opts);

/// Fraction of the mass lying on half-lines farther than a quarter of the
/// truncation length from their finite endpoint.
[[nodiscard]] double boundary_mass_fraction(const GraphFunction& u);

/// Energy error of the mass-normalized soliton sampled on a line mesh with
/// the given parameters (p = 4), or of the discrete line minimizer against
/// the fine reference (other p).
[[nodiscard]] double soliton_level_error(double mu, double p, double h_max, double truncation);

/// Gagliardo-Nirenberg constant calibrated on a seeded corpus of random
/// functions, solitons and half-solitons, with a 1% margin. Cached per p.
[[nodiscard]] double calibrated_gn_constant(double p);

[[nodiscard]] ExistenceVerdict classify_existence(const MetricGraph& g, double mu, const SolveOptions& opts = {});

struct StationarityReport {
    bool stationary = false;
    double omega = 0.0;
    double residual = 0.0;
    double kirchhoff = 0.0;
};

[[nodiscard]] StationarityReport certify_stationary(const GraphFunction& u, double p, double tol);

}  // namespace qgnls
