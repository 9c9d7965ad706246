#include "qgnls/rearrange.hpp"

#include "qgnls/format.hpp"
#include "qgnls/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <stdexcept>

namespace qgnls {

namespace {

std::size_t level_index(const std::vector<double>& desc, double t) {
    const auto it = std::lower_bound(desc.begin(), desc.end(), t, std::greater<>());
    return static_cast<std::size_t>(it - desc.begin());
}

double interval_power(double a, double b, double dx, double q) {
    double acc = 0.0;
    for (int k = 0; k < 3; ++k) acc += kernels::kGaussW[k] * kernels::abs_pow(a + (b - a) * kernels::kGaussT[k], q);
    return dx * acc;
}

}  // namespace

std::vector<LinearPiece> pieces_of(const GraphFunction& u) {
    std::vector<LinearPiece> out;
    out.reserve(u.mesh->segments().size());
    for (const Segment& s : u.mesh->segments()) out.push_back({s.h, u[s.a], u[s.b]});
    return out;
}

double DistributionFunction::operator()(double t) const {
    if (levels.empty() || t >= levels.front()) return 0.0;
    if (t < levels.back()) return total_length;
    const std::size_t k = level_index(levels, t);
    if (levels[k] == t) return above[k];
    // levels[k] < t < levels[k-1]
    const std::size_t j = k - 1;
    const double w = (levels[j] - t) / (levels[j] - levels[k]);
    return below[j] + w * (above[k] - below[j]);
}

DistributionFunction distribution(std::span<const LinearPiece> pieces) {
    DistributionFunction d;
    for (const LinearPiece& p : pieces) {
        if (p.left < 0.0 || p.right < 0.0) throw std::domain_error("distribution needs a non-negative function");
        if (!(p.length >= 0.0)) throw std::invalid_argument("negative piece length");
        d.levels.push_back(p.left);
        d.levels.push_back(p.right);
        d.total_length += p.length;
    }
    std::sort(d.levels.begin(), d.levels.end(), std::greater<>());
    d.levels.erase(std::unique(d.levels.begin(), d.levels.end()), d.levels.end());
    const std::size_t m = d.levels.size();
    if (m == 0) return d;

    std::vector<double> plateau(m, 0.0);
    std::vector<double> gain(m, 0.0);  // measure gained across (levels[k+1], levels[k])
    for (const LinearPiece& p : pieces) {
        if (p.length == 0.0) continue;
        const double lo = std::min(p.left, p.right);
        const double hi = std::max(p.left, p.right);
        const std::size_t khi = level_index(d.levels, hi);
        if (lo == hi) {
            plateau[khi] += p.length;
            continue;
        }
        const std::size_t klo = level_index(d.levels, lo);
        const double rate = p.length / (hi - lo);
        for (std::size_t k = khi; k < klo; ++k) gain[k] += rate * (d.levels[k] - d.levels[k + 1]);
    }
    d.above.assign(m, 0.0);
    d.below.assign(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        if (k > 0) d.above[k] = d.below[k - 1] + gain[k - 1];
        d.below[k] = d.above[k] + plateau[k];
    }
    return d;
}

DistributionFunction distribution(const GraphFunction& u) {
    const auto pieces = pieces_of(u);
    return distribution(pieces);
}

double RearrangedProfile::operator()(double x) const {
    if (positions.empty() || x < positions.front() || x > positions.back()) return 0.0;
    const auto it = std::upper_bound(positions.begin(), positions.end(), x);
    if (it == positions.end()) return values.back();
    const std::size_t i = static_cast<std::size_t>(it - positions.begin());
    const double x0 = positions[i - 1];
    const double x1 = positions[i];
    if (x == x0) return values[i - 1];
    return values[i - 1] + (values[i] - values[i - 1]) * (x - x0) / (x1 - x0);
}

double RearrangedProfile::mass() const {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < positions.size(); ++i) {
        const double a = values[i];
        const double b = values[i + 1];
        acc += (positions[i + 1] - positions[i]) * (a * a + a * b + b * b) / 3.0;
    }
    return acc;
}

double RearrangedProfile::lq_norm(double q) const {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < positions.size(); ++i)
        acc += interval_power(values[i], values[i + 1], positions[i + 1] - positions[i], q);
    return std::pow(acc, 1.0 / q);
}

double RearrangedProfile::grad_norm() const {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < positions.size(); ++i) {
        const double d = values[i + 1] - values[i];
        acc += d * d / (positions[i + 1] - positions[i]);
    }
    return std::sqrt(acc);
}

double RearrangedProfile::energy(double p) const {
    const double g = grad_norm();
    return 0.5 * g * g - std::pow(lq_norm(p), p) / p;
}

RearrangedProfile monotone_rearrangement(const DistributionFunction& rho) {
    RearrangedProfile r;
    r.kind = ProfileKind::monotone;
    auto push = [&](double s, double t) {
        if (!r.positions.empty() && s <= r.positions.back()) return;
        r.positions.push_back(s);
        r.values.push_back(t);
    };
    for (std::size_t k = 0; k < rho.levels.size(); ++k) {
        if (k == 0) {
            r.positions.push_back(0.0);
            r.values.push_back(rho.levels[0]);
        } else {
            push(rho.above[k], rho.levels[k]);
        }
        push(rho.below[k], rho.levels[k]);
    }
    return r;
}

RearrangedProfile monotone_rearrangement(const GraphFunction& u) { return monotone_rearrangement(distribution(u)); }

RearrangedProfile symmetrize(const RearrangedProfile& monotone) {
    if (monotone.kind != ProfileKind::monotone) throw std::invalid_argument("symmetrize expects a monotone profile");
    RearrangedProfile r;
    r.kind = ProfileKind::symmetric;
    const std::size_t n = monotone.positions.size();
    for (std::size_t i = n; i-- > 1;) {
        r.positions.push_back(-0.5 * monotone.positions[i]);
        r.values.push_back(monotone.values[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        r.positions.push_back(0.5 * monotone.positions[i]);
        r.values.push_back(monotone.values[i]);
    }
    return r;
}

RearrangedProfile symmetric_rearrangement(const GraphFunction& u) { return symmetrize(monotone_rearrangement(u)); }

RearrangedProfile resample(const RearrangedProfile& profile, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("resample needs a positive spacing");
    RearrangedProfile r;
    r.kind = profile.kind;
    if (profile.positions.empty()) return r;
    const double a = profile.positions.front();
    const double b = profile.positions.back();
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / h - 1e-12)));
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = i == n ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
        r.positions.push_back(x);
        r.values.push_back(profile(x));
    }
    return r;
}

int preimage_count(const GraphFunction& u, double t) {
    if (!(t > 0.0 && t < u.max_value())) throw std::domain_error("level outside (0, max u)");
    int count = 0;
    for (double x : u.values)
        if (x == t) throw std::domain_error("level equals a nodal value");
    for (const Segment& s : u.mesh->segments())
        if ((u[s.a] - t) * (u[s.b] - t) < 0.0) ++count;
    return count;
}

int min_preimage_count(const GraphFunction& u) {
    std::vector<double> v = u.values;
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    if (v.size() < 2) throw std::domain_error("constant function has no regular levels");
    // diff[j] counts crossings of the midlevel between v[j] and v[j+1].
    std::vector<int> diff(v.size(), 0);
    auto idx = [&](double x) { return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), x) - v.begin()); };
    for (const Segment& s : u.mesh->segments()) {
        const double lo = std::min(u[s.a], u[s.b]);
        const double hi = std::max(u[s.a], u[s.b]);
        if (lo == hi) continue;
        ++diff[idx(lo)];
        --diff[idx(hi)];
    }
    int best = 0;
    int running = 0;
    for (std::size_t j = 0; j + 1 < v.size(); ++j) {
        running += diff[j];
        if (j == 0 || running < best) best = running;
    }
    return best;
}

void write_profile_csv(std::ostream& os, const RearrangedProfile& profile) {
    const char* id = profile.kind == ProfileKind::monotone ? "rplus" : "rline";
    os << "edge_id,arclength,value\n";
    for (std::size_t i = 0; i < profile.positions.size(); ++i)
        os << id << ',' << fmt_num(profile.positions[i]) << ',' << fmt_num(profile.values[i]) << '\n';
}

}  // namespace qgnls
