/**
 * @file kernels.hpp
 * @brief Element loops for the P1 energy: integrals, gradient and mass action.
 *
 * Each kernel exists twice. `serial::` is the plain reference loop kept for
 * testing; `omp::` is the OpenMP version used by the library. The OpenMP
 * reductions sum fixed-size blocks in index order, so their results do not
 * depend on the thread count.
 *
 * Quadrature: the stiffness and mass terms are integrated exactly for P1
 * functions; the power term uses 3-point Gauss-Legendre per element, which is
 * exact for |u|^p with u >= 0 and integer p <= 5.
 */
#pragma once

#include "qgnls/mesh.hpp"

#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace qgnls::kernels {

struct MeshView {
    std::span<const Segment> segments;
    std::span<const std::uint32_t> offsets;
    std::span<const std::uint32_t> incidence;
    std::span<const char> dirichlet;

    static MeshView of(const Mesh& m) {
        return {m.segments(), m.incidence_offsets(), m.incidence(), m.dirichlet_flags()};
    }
    [[nodiscard]] std::size_t num_nodes() const { return dirichlet.size(); }
};

/// Raw integrals of a P1 function.
struct Integrals {
    double grad_sq = 0.0;  ///< \int |u'|^2
    double mass = 0.0;     ///< \int u^2
    double power = 0.0;    ///< \int |u|^p
};

inline constexpr std::array<double, 3> kGaussT{0.5 - 0.3872983346207416885, 0.5, 0.5 + 0.3872983346207416885};
inline constexpr std::array<double, 3> kGaussW{5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

inline double abs_pow(double x, double p) {
    const double a = std::abs(x);
    if (p == 4.0) {
        const double a2 = a * a;
        return a2 * a2;
    }
    if (p == 3.0) return a * a * a;
    return std::pow(a, p);
}

/// |x|^{p-2} x
inline double signed_pow(double x, double p) {
    if (p == 4.0) return x * x * x;
    if (p == 3.0) return std::abs(x) * x;
    return x == 0.0 ? 0.0 : std::pow(std::abs(x), p - 2.0) * x;
}

/// Per-element contributions; shared by both variants so they differ only in
/// loop structure and summation order.
struct ElementTerms {
    static double grad_sq(const Segment& s, double ua, double ub) {
        const double d = ub - ua;
        return d * d / s.h;
    }
    static double mass(const Segment& s, double ua, double ub) {
        return s.h * (ua * ua + ua * ub + ub * ub) / 3.0;
    }
    static double power(const Segment& s, double ua, double ub, double p) {
        double acc = 0.0;
        for (int k = 0; k < 3; ++k) acc += kGaussW[k] * abs_pow(ua + (ub - ua) * kGaussT[k], p);
        return s.h * acc;
    }
    /// d/du_a and d/du_b of \int |u|^p over the element.
    static void power_grad(const Segment& s, double ua, double ub, double p, double& ga, double& gb) {
        ga = 0.0;
        gb = 0.0;
        for (int k = 0; k < 3; ++k) {
            const double w = kGaussW[k] * p * signed_pow(ua + (ub - ua) * kGaussT[k], p);
            ga += w * (1.0 - kGaussT[k]);
            gb += w * kGaussT[k];
        }
        ga *= s.h;
        gb *= s.h;
    }
};

namespace serial {
[[nodiscard]] Integrals integrals(const MeshView& m, std::span<const double> u, double p);
/// Gradient of 1/2 \int|u'|^2 - 1/p \int|u|^p; Dirichlet entries set to 0.
void energy_gradient(const MeshView& m, std::span<const double> u, double p, std::span<double> out);
/// Consistent mass matrix times u.
void mass_action(const MeshView& m, std::span<const double> u, std::span<double> out);
}  // namespace serial

namespace omp {
inline constexpr std::size_t kBlock = 2048;
[[nodiscard]] Integrals integrals(const MeshView& m, std::span<const double> u, double p);
void energy_gradient(const MeshView& m, std::span<const double> u, double p, std::span<double> out);
void mass_action(const MeshView& m, std::span<const double> u, std::span<double> out);
}  // namespace omp

}  // namespace qgnls::kernels
