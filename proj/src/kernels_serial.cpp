#include "qgnls/kernels.hpp"

#include <algorithm>

namespace qgnls::kernels::serial {

Integrals integrals(const MeshView& m, std::span<const double> u, double p) {
    Integrals r;
    for (const Segment& s : m.segments) {
        const double ua = u[s.a];
        const double ub = u[s.b];
        r.grad_sq += ElementTerms::grad_sq(s, ua, ub);
        r.mass += ElementTerms::mass(s, ua, ub);
        r.power += ElementTerms::power(s, ua, ub, p);
    }
    return r;
}

void energy_gradient(const MeshView& m, std::span<const double> u, double p, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    const double inv_p = 1.0 / p;
    for (const Segment& s : m.segments) {
        const double ua = u[s.a];
        const double ub = u[s.b];
        const double k = (ua - ub) / s.h;
        double ga = 0.0;
        double gb = 0.0;
        ElementTerms::power_grad(s, ua, ub, p, ga, gb);
        out[s.a] += k - inv_p * ga;
        out[s.b] += -k - inv_p * gb;
    }
    for (std::size_t i = 0; i < out.size(); ++i)
        if (m.dirichlet[i]) out[i] = 0.0;
}

void mass_action(const MeshView& m, std::span<const double> u, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (const Segment& s : m.segments) {
        const double c = s.h / 6.0;
        out[s.a] += c * (2.0 * u[s.a] + u[s.b]);
        out[s.b] += c * (u[s.a] + 2.0 * u[s.b]);
    }
}

}  // namespace qgnls::kernels::serial
