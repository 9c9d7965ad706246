/**
 * @file surgery.hpp
 * @brief Cut-and-paste competitors built from the soliton, and the critical
 *        pendant length of the three-half-line graph with a pendant (G_ell).
 */
#pragma once

#include "qgnls/mesh.hpp"
#include "qgnls/minimize.hpp"

#include <vector>

namespace qgnls {

/// The soliton phi_mu cut at x = +-width/2: a head on [-width/2, width/2]
/// and two equal tails beyond.
struct SolitonPieces {
    double mu = 0.0;
    double width = 0.0;

    /// Head value at x in [-width/2, width/2].
    [[nodiscard]] double head(double x) const;
    /// Tail value at distance x >= 0 beyond the cut.
    [[nodiscard]] double tail(double x) const;
    [[nodiscard]] double cut_value() const;
    [[nodiscard]] double head_mass() const;
    [[nodiscard]] double tail_mass() const;  ///< one tail
};

[[nodiscard]] SolitonPieces cut_soliton(double mu, double width);

/// Line with a pendant of length ell: the tails are joined at the vertex and
/// the head, monotonically rearranged, hangs on the pendant with its maximum
/// at the tip. Sampled on a uniform mesh and renormalized to mass mu.
[[nodiscard]] GraphFunction pendant_competitor(double mu, double ell, double h_max, double truncation);

/// Exact energy change of the pendant competitor relative to the soliton:
/// -(mu^3/128) tanh^3(mu ell / 8). Negative for every ell > 0.
[[nodiscard]] double pendant_competitor_margin(double mu, double ell);

/// The point of a bubble tower farthest from its base.
[[nodiscard]] GraphPoint tower_apex(const Mesh& mesh);

/// phi_mu of the distance from the tower apex, renormalized to mass mu. The
/// mesh must live on a bubble tower.
[[nodiscard]] GraphFunction bubble_tower_soliton(const MeshPtr& mesh, double mu);
[[nodiscard]] GraphFunction bubble_tower_soliton(double mu, const std::vector<double>& arcs, double h_max,
                                                 double truncation);

/// Competitor on G_{ell'} from psi on G_ell: the first (ell'-ell)/3 of each
/// half-line is cut, the three pieces are rearranged together into one
/// monotone block, and the block is inserted at the base of the pendant.
/// psi must take the same value on all half-lines at the cut point.
[[nodiscard]] GraphFunction gl_competitor(const GraphFunction& psi, double ell_new);

/// Pendant length of a G_ell graph (edge 0) or throws.
[[nodiscard]] double pendant_length(const MetricGraph& g);

struct LengthProbe {
    double ell = 0.0;
    double best_energy = 0.0;
    ExistenceStatus verdict = ExistenceStatus::inconclusive;
    bool refined = false;  ///< settled only after the mesh refinement retry
};

struct CriticalLengthResult {
    double ell_low = 0.0;   ///< largest probe with LIKELY_NONEXISTENT
    double ell_high = 0.0;  ///< smallest probe with EXISTS
    double ell_star = 0.0;
    bool complete = false;  ///< bracket reached the requested width
    bool monotone = true;   ///< no EXISTS probe below a LIKELY_NONEXISTENT one
    std::vector<LengthProbe> probes;
};

/// Bisection on ell over [1e-3/mu, 50/mu] with classify_existence as oracle
/// until the bracket is narrower than width (default 1e-2/mu).
[[nodiscard]] CriticalLengthResult critical_length(double mu, const SolveOptions& opts = {}, double width = 0.0);

struct LimitRow {
    double ell = 0.0;
    double energy = 0.0;
    double competitor_energy = 0.0;  ///< energy of the carried-over competitor (nan for the first row)
    std::string start;
};

/// Minimized energies on G_ell for increasing ell. From the second row on,
/// the solve is also warm-started from gl_competitor of the previous
/// minimizer, whenever that minimizer is symmetric in the half-lines.
[[nodiscard]] std::vector<LimitRow> gl_limit_check(double mu, const std::vector<double>& ells,
                                                   const SolveOptions& opts = {});

}  // namespace qgnls
