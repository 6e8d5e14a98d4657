#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "cycdde/error.hpp"
#include "cycdde/state.hpp"
#include "cycdde/system.hpp"

namespace cycdde {

/// Closed intervals I_1, ..., I_N; I_1 encloses the delayed component.
struct IntervalBox {
    std::vector<std::pair<double, double>> intervals;

    std::size_t size() const { return intervals.size(); }

    bool contains(std::size_t j, double v, double slack = 0.0) const {
        return v >= intervals[j].first - slack && v <= intervals[j].second + slack;
    }

    bool contains(const SystemState& s, double slack = 0.0) const {
        if (s.tail_size() + 1 != intervals.size()) throw ArgumentError("box: state dimension mismatch");
        for (double v : s.history_values())
            if (!contains(0, v, slack)) return false;
        for (std::size_t j = 0; j < s.tail_size(); ++j)
            if (!contains(j + 1, s.tail()[j], slack)) return false;
        return true;
    }

    bool contains_point(const std::vector<double>& x, double slack = 0.0) const {
        for (std::size_t j = 0; j < x.size(); ++j)
            if (!contains(j, x[j], slack)) return false;
        return true;
    }

    double radius() const {
        double r = 0.0;
        for (const auto& [lo, hi] : intervals) r = std::max({r, std::abs(lo), std::abs(hi)});
        return r;
    }
};

struct EquilibriumCertificate {
    std::vector<double> point;
    double residual = 0.0;
};

/// Zero is the only equilibrium of a zero-centered loop; returns it with its residual.
inline EquilibriumCertificate equilibrium_unidirectional(const UnidirectionalSystem& sys, double tol = 1e-14) {
    EquilibriumCertificate out;
    out.point.assign(sys.size(), 0.0);
    for (const auto& g : sys.g()) out.residual = std::max(out.residual, std::abs(g.value(0.0)));
    if (out.residual > tol) throw DomainError("system is not zero-centered: right-hand side at zero is nonzero");
    return out;
}

struct GeneEquilibrium {
    std::vector<double> r;
    std::vector<double> p;
    double residual = 0.0;
};

namespace detail {

inline double gene_hill(const GeneNetwork& net, std::size_t i, double x) {
    const double up = hill_up(x, net.nu[i]);
    return net.f_kind[i] == HillKind::increasing ? up : 1.0 - up;
}

}  // namespace detail

/// Solves r_n = F_n o ... o F_1 (r_n), F_i(x) = (beta_i / a_i) f_i((c_{i-1} / b_{i-1}) x), by bisection.
inline GeneEquilibrium equilibrium_gene(const GeneNetwork& net) {
    net.validate();
    const std::size_t n = net.size();
    auto compose = [&](double rn, std::vector<double>* r, std::vector<double>* p) {
        double prev_r = rn;
        double prev_p = net.c[n - 1] / net.b[n - 1] * rn;
        for (std::size_t i = 0; i < n; ++i) {
            const double ri = net.beta[i] / net.a[i] * detail::gene_hill(net, i, prev_p);
            const double pi = net.c[i] / net.b[i] * ri;
            if (r) (*r)[i] = ri;
            if (p) (*p)[i] = pi;
            prev_r = ri;
            prev_p = pi;
        }
        return prev_r;
    };
    double lo = 0.0, hi = compose(0.0, nullptr, nullptr);
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (compose(mid, nullptr, nullptr) - mid > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    GeneEquilibrium eq;
    eq.r.assign(n, 0.0);
    eq.p.assign(n, 0.0);
    const double rn = 0.5 * (lo + hi);
    compose(rn, &eq.r, &eq.p);
    for (std::size_t i = 0; i < n; ++i) {
        const double pprev = eq.p[(i + n - 1) % n];
        eq.residual = std::max(eq.residual, std::abs(-net.a[i] * eq.r[i] + net.beta[i] * detail::gene_hill(net, i, pprev)));
        eq.residual = std::max(eq.residual, std::abs(-net.b[i] * eq.p[i] + net.c[i] * eq.r[i]));
    }
    return eq;
}

namespace detail {

/// Image of [lo, hi] under x -> f(x) / mu for monotone f; infinite endpoints use the limits.
inline std::pair<double, double> scaled_image(const Nonlinearity& f, double mu, std::pair<double, double> in) {
    auto at = [&](double x) {
        if (std::isinf(x)) {
            const auto [lm, lp] = f.limits();
            return (x < 0 ? lm : lp) / mu;
        }
        return f.value(x) / mu;
    };
    double a = at(in.first), b = at(in.second);
    if (a > b) std::swap(a, b);
    return {a, b};
}

}  // namespace detail

/// Invariant attracting box: I_1 = closure of G(R), G = G_1 o ... o G_N with G_j = g_j / mu_j,
/// I_N = G_N(I_1), I_j = G_j(I_{j+1}) for j = N-1 .. 2.
inline IntervalBox attractor_box(const UnidirectionalSystem& sys) {
    const std::size_t N = sys.size();
    for (double m : sys.mu())
        if (!(m > 0.0)) throw ArgumentError("attractor_box: all decay rates must be positive");
    if (!sys.g().back().bounded()) throw ArgumentError("attractor_box: g_N must be bounded (linear g_N unsupported)");
    constexpr double inf = std::numeric_limits<double>::infinity();
    const auto& g = sys.g();
    const auto& mu = sys.mu();
    std::pair<double, double> range = detail::scaled_image(g[N - 1], mu[N - 1], {-inf, inf});
    for (std::size_t j = N - 1; j-- > 0;) range = detail::scaled_image(g[j], mu[j], range);
    IntervalBox box;
    box.intervals.assign(N, range);
    if (N >= 2) {
        box.intervals[N - 1] = detail::scaled_image(g[N - 1], mu[N - 1], box.intervals[0]);
        for (std::size_t j = N - 1; j-- > 1;) box.intervals[j] = detail::scaled_image(g[j], mu[j], box.intervals[j + 1]);
    }
    return box;
}

}  // namespace cycdde
