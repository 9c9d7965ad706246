#include "qgnls/kernels.hpp"

#include <omp.h>

#include <vector>

namespace qgnls::kernels::omp {

namespace {

std::ptrdiff_t ssize(std::size_t n) { return static_cast<std::ptrdiff_t>(n); }

/// Gathers per-element endpoint contributions into nodes using the CSR
/// incidence; each node is written by exactly one iteration.
void gather(const MeshView& m, const std::vector<double>& side_a, const std::vector<double>& side_b,
            std::span<double> out) {
    const std::ptrdiff_t nn = ssize(m.num_nodes());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < nn; ++i) {
        double acc = 0.0;
        for (std::uint32_t k = m.offsets[i]; k < m.offsets[i + 1]; ++k) {
            const std::uint32_t code = m.incidence[k];
            acc += (code & 1u) ? side_b[code >> 1] : side_a[code >> 1];
        }
        out[i] = acc;
    }
}

}  // namespace

Integrals integrals(const MeshView& m, std::span<const double> u, double p) {
    const std::size_t ns = m.segments.size();
    const std::size_t nblocks = (ns + kBlock - 1) / kBlock;
    std::vector<Integrals> partial(nblocks);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < ssize(nblocks); ++b) {
        Integrals r;
        const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
        const std::size_t hi = std::min(ns, lo + kBlock);
        for (std::size_t i = lo; i < hi; ++i) {
            const Segment& s = m.segments[i];
            const double ua = u[s.a];
            const double ub = u[s.b];
            r.grad_sq += ElementTerms::grad_sq(s, ua, ub);
            r.mass += ElementTerms::mass(s, ua, ub);
            r.power += ElementTerms::power(s, ua, ub, p);
        }
        partial[static_cast<std::size_t>(b)] = r;
    }
    Integrals total;
    for (const Integrals& r : partial) {
        total.grad_sq += r.grad_sq;
        total.mass += r.mass;
        total.power += r.power;
    }
    return total;
}

void energy_gradient(const MeshView& m, std::span<const double> u, double p, std::span<double> out) {
    const std::size_t ns = m.segments.size();
    std::vector<double> side_a(ns);
    std::vector<double> side_b(ns);
    const double inv_p = 1.0 / p;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < ssize(ns); ++i) {
        const Segment& s = m.segments[i];
        const double ua = u[s.a];
        const double ub = u[s.b];
        const double k = (ua - ub) / s.h;
        double ga = 0.0;
        double gb = 0.0;
        ElementTerms::power_grad(s, ua, ub, p, ga, gb);
        side_a[i] = k - inv_p * ga;
        side_b[i] = -k - inv_p * gb;
    }
    gather(m, side_a, side_b, out);
    const std::ptrdiff_t nn = ssize(m.num_nodes());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < nn; ++i)
        if (m.dirichlet[i]) out[i] = 0.0;
}

void mass_action(const MeshView& m, std::span<const double> u, std::span<double> out) {
    const std::size_t ns = m.segments.size();
    std::vector<double> side_a(ns);
    std::vector<double> side_b(ns);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < ssize(ns); ++i) {
        const Segment& s = m.segments[i];
        const double c = s.h / 6.0;
        side_a[i] = c * (2.0 * u[s.a] + u[s.b]);
        side_b[i] = c * (u[s.a] + 2.0 * u[s.b]);
    }
    gather(m, side_a, side_b, out);
}

}  // namespace qgnls::kernels::omp
