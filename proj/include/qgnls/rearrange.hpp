/**
 * @file rearrange.hpp
 * @brief Distribution functions, monotone and symmetric rearrangements of
 *        non-negative P1 functions, and level-set preimage counts.
 *
 * Everything is exact for the piecewise-linear interpolant: the distribution
 * function of a P1 function is piecewise linear in the level between
 * consecutive nodal values, so the rearrangement is again P1 on the knots
 * s = rho(t_k) and needs no resampling.
 */
#pragma once

#include "qgnls/mesh.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace qgnls {

/// Linear function on an interval of the given length, from `left` to `right`.
struct LinearPiece {
    double length;
    double left;
    double right;
};

/// Element pieces of u, one per mesh segment.
[[nodiscard]] std::vector<LinearPiece> pieces_of(const GraphFunction& u);

/// rho(t) = |{u > t}| for the P1 function. Levels are the distinct nodal
/// values in decreasing order; `above[k]` = rho(levels[k]) and `below[k]` is
/// the left limit rho(levels[k]^-), larger by the length of plateaus at that
/// level. rho is linear in t between consecutive levels.
struct DistributionFunction {
    std::vector<double> levels;
    std::vector<double> above;
    std::vector<double> below;
    double total_length = 0.0;

    [[nodiscard]] double operator()(double t) const;
};

[[nodiscard]] DistributionFunction distribution(std::span<const LinearPiece> pieces);
[[nodiscard]] DistributionFunction distribution(const GraphFunction& u);

enum class ProfileKind { monotone, symmetric };

/// A P1 profile given by its knots: on [0, S] for monotone profiles, on
/// [-S/2, S/2] for symmetric ones.
struct RearrangedProfile {
    ProfileKind kind = ProfileKind::monotone;
    std::vector<double> positions;
    std::vector<double> values;

    [[nodiscard]] double operator()(double x) const;
    [[nodiscard]] double mass() const;
    [[nodiscard]] double lq_norm(double q) const;
    [[nodiscard]] double grad_norm() const;
    /// Energy on R+ (monotone) or R (symmetric), with the same quadrature as
    /// the graph energy.
    [[nodiscard]] double energy(double p = 4.0) const;
};

/// u*(s) = inf{t : rho(t) <= s}.
[[nodiscard]] RearrangedProfile monotone_rearrangement(const DistributionFunction& rho);
[[nodiscard]] RearrangedProfile monotone_rearrangement(const GraphFunction& u);
/// u^(x) = u*(2|x|).
[[nodiscard]] RearrangedProfile symmetric_rearrangement(const GraphFunction& u);
[[nodiscard]] RearrangedProfile symmetrize(const RearrangedProfile& monotone);

/// Same profile sampled on a uniform grid of spacing at most h.
[[nodiscard]] RearrangedProfile resample(const RearrangedProfile& profile, double h);

/// Number of strict level-t crossings. t must lie in (0, max u) and differ
/// from every nodal value.
[[nodiscard]] int preimage_count(const GraphFunction& u, double t);
/// Minimum of preimage_count over the midpoints between consecutive distinct
/// nodal values.
[[nodiscard]] int min_preimage_count(const GraphFunction& u);

/// CSV with the profile schema: edge_id ("rplus" or "rline"), arclength, value.
void write_profile_csv(std::ostream& os, const RearrangedProfile& profile);

}  // namespace qgnls
