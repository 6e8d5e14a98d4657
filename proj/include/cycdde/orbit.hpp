#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "cycdde/error.hpp"
#include "cycdde/integrator.hpp"
#include "cycdde/lyapunov.hpp"
#include "cycdde/spectral.hpp"
#include "cycdde/state.hpp"
#include "cycdde/steady.hpp"
#include "cycdde/system.hpp"

namespace cycdde {

/// Maps trajectory states to a complex plane coordinate: the spectral coefficient c of the
/// leading pair, or the delay embedding x_0(t) + i x_0(t - tau/2) as a fallback.
class PlaneProjector {
public:
    static PlaneProjector spectral(SpectralProjection p) {
        PlaneProjector out;
        out.proj_ = std::move(p);
        return out;
    }
    static PlaneProjector delay_embedding() { return PlaneProjector(); }

    bool is_spectral() const { return proj_.has_value(); }
    const char* name() const { return is_spectral() ? "spectral" : "delay_embedding"; }

    cplx at(const Trajectory& traj, double t) const {
        if (!proj_) return {traj.value(0, t), traj.value(0, t - 0.5 * traj.tau())};
        const auto st = traj.state_at(t);
        return proj_->coefficient(st);
    }

    /// Coordinates at the nodes first_node, first_node + 1, ... of a trajectory.
    std::vector<cplx> at_nodes(const Trajectory& traj, std::size_t first_node) const {
        const auto& rec = traj.record();
        const std::size_t m = traj.steps_per_delay();
        const std::size_t n = traj.dimension();
        std::vector<cplx> out;
        if (first_node < m) first_node = m;
        out.reserve(rec.size() - first_node);
        if (!proj_) {
            for (std::size_t k = first_node; k < rec.size(); ++k) out.emplace_back(rec.value(k, 0), rec.value(k - m / 2, 0));
            if (m % 2 == 1)
                for (std::size_t k = first_node, i = 0; k < rec.size(); ++k, ++i)
                    out[i] = at(traj, traj.node_time(k));
            return out;
        }
        const auto w = proj_->history_weights(m);
        std::vector<double> hist(m + 1), cur(n);
        for (std::size_t k = first_node; k < rec.size(); ++k) {
            for (std::size_t j = 0; j <= m; ++j) hist[j] = rec.value(k - m + j, 0);
            for (std::size_t i = 0; i < n; ++i) cur[i] = rec.value(k, i);
            out.push_back(proj_->coefficient(hist, cur, w));
        }
        return out;
    }

    /// Real plane point: (2 Re c, -2 Im c) for the spectral projection.
    std::array<double, 2> plane(cplx c) const {
        if (proj_) return {2.0 * c.real(), -2.0 * c.imag()};
        return {c.real(), c.imag()};
    }

    const std::optional<SpectralProjection>& projection() const { return proj_; }

private:
    std::optional<SpectralProjection> proj_;
};

struct Crossing {
    double t = 0.0;
    double s = 0.0;
};

struct OrbitOptions {
    std::size_t m = 128;
    double horizon = 400.0;      // delay intervals
    double max_horizon = 3200.0; // delay intervals
    double transient = 5.0;      // delay intervals
    double tol_rel = 1e-5;
    double tol_T = 1e-4;
    std::size_t window = 3;
    std::size_t phases = 64;
    std::size_t curve_points = 512;
    std::size_t v_resolution = 512;
    double box_slack = 1e-6;
};

struct OrbitVerification {
    bool v_equals_one = false;
    std::optional<bool> in_box;
    double periodicity_residual = std::numeric_limits<double>::infinity();
    double simple_curve_gap = 0.0;
    bool simple_curve = false;
};

struct OrbitReport {
    bool converged = false;
    double period = 0.0;
    std::vector<Crossing> crossings;
    std::size_t converged_at = 0;
    double horizon = 0.0;
    std::string projection;
    std::string trend;  // growing, decaying, settled, undecided
    std::string diagnostics;
    std::vector<double> sample_times;
    std::vector<SystemState> samples;
    std::vector<double> curve_times;
    std::vector<std::vector<double>> curve;  // (x_0, ..., x_N) along one period
    std::vector<std::array<double, 2>> plane;
    double amplitude = 0.0;
    OrbitVerification verification;
};

/// Small multiple of the real part of the leading eigenfunction.
inline SystemState seed_on_eigenspace(const CyclicSystem& sys, const A1Report& a1, double eps, std::size_t m) {
    if (!a1.holds) throw DomainError("seed_on_eigenspace: no unstable leading complex pair (" + a1.reason + ")");
    if (!(eps > 0.0) || !std::isfinite(eps)) throw ArgumentError("seed_on_eigenspace: eps must be positive");
    SpectralProjection proj(sys.linearization(), a1.lambda);
    return proj.eigenfunction(m, false, eps);
}

inline SystemState seed_on_eigenspace(const UnidirectionalSystem& sys, const A1Report& a1, double eps, std::size_t m) {
    return seed_on_eigenspace(sys.to_cyclic(), a1, eps, m);
}

/// Crossings of the half-line at the angle reached after the transient, in the direction
/// the projected angle advances.
inline std::vector<Crossing> poincare_crossings(const Trajectory& traj, const PlaneProjector& proj,
                                                double transient_time) {
    const double t_anchor = traj.t_start() + transient_time;
    if (t_anchor >= traj.t_end()) throw ArgumentError("poincare_crossings: transient exceeds the trajectory");
    std::size_t first = traj.start_node();
    while (first < traj.node_count() && traj.node_time(first) < t_anchor) ++first;
    const auto cs = proj.at_nodes(traj, first);
    if (cs.size() < 3) throw NumericalError("poincare_crossings: insufficient data");
    std::vector<double> phi(cs.size());
    phi[0] = 0.0;
    for (std::size_t k = 1; k < cs.size(); ++k) phi[k] = phi[k - 1] + std::arg(cs[k] / cs[k - 1]);
    const double orient = phi.back() >= 0.0 ? 1.0 : -1.0;
    std::vector<Crossing> out;
    double level = 2.0 * std::numbers::pi;
    for (std::size_t k = 0; k + 1 < cs.size(); ++k) {
        const double a = orient * phi[k], b = orient * phi[k + 1];
        if (!(a < level && b >= level)) continue;
        double lo = traj.node_time(first + k), hi = traj.node_time(first + k + 1);
        const cplx base = cs[k];
        auto g = [&](double t) { return a + orient * std::arg(proj.at(traj, t) / base) - level; };
        for (int it = 0; it < 60 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
            const double mid = 0.5 * (lo + hi);
            if (g(mid) < 0.0)
                lo = mid;
            else
                hi = mid;
        }
        const double tc = 0.5 * (lo + hi);
        const auto pt = proj.plane(proj.at(traj, tc));
        out.push_back({tc, std::hypot(pt[0], pt[1])});
        level += 2.0 * std::numbers::pi;
    }
    if (out.size() < 3) throw NumericalError("poincare_crossings: fewer than 3 crossings (insufficient data)");
    return out;
}

namespace detail {

inline double segment_distance(std::array<double, 2> p, std::array<double, 2> q, std::array<double, 2> r,
                               std::array<double, 2> s) {
    auto point_seg = [](std::array<double, 2> x, std::array<double, 2> a, std::array<double, 2> b) {
        const double dx = b[0] - a[0], dy = b[1] - a[1];
        const double len2 = dx * dx + dy * dy;
        double u = len2 > 0.0 ? ((x[0] - a[0]) * dx + (x[1] - a[1]) * dy) / len2 : 0.0;
        u = std::clamp(u, 0.0, 1.0);
        return std::hypot(x[0] - a[0] - u * dx, x[1] - a[1] - u * dy);
    };
    auto cross = [](std::array<double, 2> o, std::array<double, 2> a, std::array<double, 2> b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    const double d1 = cross(r, s, p), d2 = cross(r, s, q), d3 = cross(p, q, r), d4 = cross(p, q, s);
    if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0) return 0.0;
    return std::min({point_seg(p, r, s), point_seg(q, r, s), point_seg(r, p, q), point_seg(s, p, q)});
}

inline double point_polyline_distance(const std::vector<double>& x, const std::vector<std::vector<double>>& poly) {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = poly.size();
    for (std::size_t k = 0; k < n; ++k) {
        const auto& a = poly[k];
        const auto& b = poly[(k + 1) % n];
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            num += (x[i] - a[i]) * (b[i] - a[i]);
            den += (b[i] - a[i]) * (b[i] - a[i]);
        }
        const double u = den > 0.0 ? std::clamp(num / den, 0.0, 1.0) : 0.0;
        double d2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = x[i] - a[i] - u * (b[i] - a[i]);
            d2 += d * d;
        }
        best = std::min(best, std::sqrt(d2));
    }
    return best;
}

}  // namespace detail

/// Minimum distance between non-adjacent edges of a closed polygon (0 if it self-intersects).
inline double simple_curve_gap(const std::vector<std::array<double, 2>>& poly) {
    const std::size_t n = poly.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;
            best = std::min(best, detail::segment_distance(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]));
        }
    return best;
}

/// Symmetric Hausdorff distance of two closed curves (point-to-polyline), relative to the
/// larger curve amplitude.
inline double orbit_hausdorff(const OrbitReport& a, const OrbitReport& b) {
    if (a.curve.empty() || b.curve.empty()) throw ArgumentError("orbit_hausdorff: empty orbit");
    double d = 0.0;
    for (const auto& x : a.curve) d = std::max(d, detail::point_polyline_distance(x, b.curve));
    for (const auto& x : b.curve) d = std::max(d, detail::point_polyline_distance(x, a.curve));
    double amp = 0.0;
    for (const auto* c : {&a.curve, &b.curve})
        for (const auto& x : *c) {
            double s = 0.0;
            for (double v : x) s += v * v;
            amp = std::max(amp, std::sqrt(s));
        }
    return d / amp;
}

namespace detail {

inline std::string radius_trend(const std::vector<Crossing>& cr) {
    if (cr.size() < 3) return "undecided";
    const std::size_t n = cr.size();
    double peak = 0.0;
    for (const auto& c : cr) peak = std::max(peak, c.s);
    const bool down = cr[n - 1].s < cr[n - 2].s && cr[n - 2].s < cr[n - 3].s;
    const bool up = cr[n - 1].s > cr[n - 2].s && cr[n - 2].s > cr[n - 3].s;
    if (down && cr[n - 1].s < 0.5 * peak) return "decaying";
    if (up) return "growing";
    return "undecided";
}

inline std::optional<std::size_t> convergence_index(const std::vector<Crossing>& cr, const OrbitOptions& o) {
    const std::size_t w = std::max<std::size_t>(o.window, 2);
    for (std::size_t k = w - 1; k < cr.size(); ++k) {
        double smin = cr[k].s, smax = cr[k].s;
        double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0, rsum = 0.0;
        for (std::size_t i = k + 1 - w; i <= k; ++i) {
            smin = std::min(smin, cr[i].s);
            smax = std::max(smax, cr[i].s);
            if (i > k + 1 - w) {
                const double r = cr[i].t - cr[i - 1].t;
                rmin = std::min(rmin, r);
                rmax = std::max(rmax, r);
                rsum += r;
            }
        }
        const double That = rsum / static_cast<double>(w - 1);
        if (smax - smin <= o.tol_rel * smax && rmax - rmin <= o.tol_T * That && smax > 0.0) return k;
    }
    return std::nullopt;
}

}  // namespace detail

/// Integrates from the seed, watches the Poincare return map and, on convergence, samples one
/// period of the orbit and verifies it.
inline OrbitReport detect_cycle(const CyclicSystem& sys, const SystemState& seed, const PlaneProjector& proj,
                                const OrbitOptions& opts = {}, const std::optional<IntervalBox>& box = std::nullopt) {
    const double tau = sys.tau();
    OrbitReport rep;
    rep.projection = proj.name();
    double horizon = opts.horizon;
    for (;;) {
        const Trajectory traj = integrate(sys, seed, horizon * tau, opts.m);
        rep.horizon = traj.t_end();
        std::vector<Crossing> cr;
        try {
            cr = poincare_crossings(traj, proj, opts.transient * tau);
        } catch (const NumericalError& e) {
            rep.diagnostics = e.what();
        }
        rep.crossings = cr;
        rep.trend = detail::radius_trend(cr);
        const auto k = detail::convergence_index(cr, opts);
        if (k) {
            const std::size_t first = *k + 1 - std::max<std::size_t>(opts.window, 2);
            rep.converged_at = first;
            rep.period = (cr.back().t - cr[first].t) / static_cast<double>(cr.size() - 1 - first);
            const double T = rep.period;
            double tstar = cr.back().t - 2.0 * T;
            if (tstar < traj.t_start() + opts.transient * tau) {
                rep.diagnostics = "converged too close to the end of the horizon";
            } else {
                rep.converged = true;
                rep.trend = "settled";
                OrbitVerification ver;
                ver.v_equals_one = true;
                double resid = 0.0;
                for (std::size_t p = 0; p < opts.phases; ++p) {
                    const double t = tstar + T * static_cast<double>(p) / static_cast<double>(opts.phases);
                    rep.sample_times.push_back(t);
                    rep.samples.push_back(traj.state_at(t));
                    rep.amplitude = std::max(rep.amplitude, rep.samples.back().max_norm());
                    const auto fine = traj.state_at(t, opts.v_resolution);
                    if (lyapunov_value(fine).v != 1) ver.v_equals_one = false;
                    if (box) {
                        const bool inside = box->contains(fine, opts.box_slack);
                        ver.in_box = ver.in_box.value_or(true) && inside;
                    }
                    resid = std::max(resid, (traj.state_at(t + T) - rep.samples.back()).max_norm());
                }
                ver.periodicity_residual = resid / rep.amplitude;
                for (std::size_t p = 0; p < opts.curve_points; ++p) {
                    const double t = tstar + T * static_cast<double>(p) / static_cast<double>(opts.curve_points);
                    rep.curve_times.push_back(t);
                    rep.curve.push_back(traj.current(t));
                    rep.plane.push_back(proj.plane(proj.at(traj, t)));
                }
                double prad = 0.0;
                for (const auto& q : rep.plane) prad = std::max(prad, std::hypot(q[0], q[1]));
                ver.simple_curve_gap = simple_curve_gap(rep.plane) / prad;
                ver.simple_curve = ver.simple_curve_gap > 1e-12;
                rep.verification = ver;
                return rep;
            }
        }
        if (rep.trend == "decaying" && !cr.empty()) {
            double peak = 0.0;
            for (const auto& c : cr) peak = std::max(peak, c.s);
            if (cr.back().s < 1e-3 * peak) {
                rep.diagnostics = "projected radius decays towards zero";
                return rep;
            }
        }
        if (horizon * 2.0 > opts.max_horizon * (1.0 + 1e-12)) {
            if (rep.diagnostics.empty()) rep.diagnostics = "horizon exhausted without convergence (trend: " + rep.trend + ")";
            return rep;
        }
        horizon *= 2.0;
    }
}

inline OrbitReport detect_cycle(const UnidirectionalSystem& sys, const SystemState& seed, const PlaneProjector& proj,
                                const OrbitOptions& opts = {}, const std::optional<IntervalBox>& box = std::nullopt) {
    return detect_cycle(sys.to_cyclic(), seed, proj, opts, box);
}

struct OrbitAnalysis {
    A1Report a1;
    std::optional<IntervalBox> box;
    double eps = 0.0;
    OrbitReport orbit;
};

/// Spectrum, box, eigenspace seed of size eps_rel * box radius and cycle detection.
inline OrbitAnalysis find_orbit(const UnidirectionalSystem& sys, const OrbitOptions& opts = {}, double eps_rel = 1e-3) {
    OrbitAnalysis out;
    out.a1 = verify_a1(CharFunction::of(sys));
    if (sys.g().back().bounded() &&
        std::all_of(sys.mu().begin(), sys.mu().end(), [](double m) { return m > 0.0; }))
        out.box = attractor_box(sys);
    out.eps = eps_rel * (out.box ? out.box->radius() : 1.0);
    const auto cyc = sys.to_cyclic();
    const SystemState seed = seed_on_eigenspace(cyc, out.a1, out.eps, opts.m);
    const auto proj = PlaneProjector::spectral(SpectralProjection(cyc.linearization(), out.a1.lambda));
    out.orbit = detect_cycle(cyc, seed, proj, opts, out.box);
    return out;
}

enum class OscillationVerdict { oscillating, decaying, undecided };

inline const char* to_string(OscillationVerdict v) {
    switch (v) {
        case OscillationVerdict::oscillating: return "oscillating";
        case OscillationVerdict::decaying: return "decaying";
        case OscillationVerdict::undecided: return "undecided";
    }
    return "undecided";
}

struct OscillationResult {
    OscillationVerdict verdict = OscillationVerdict::undecided;
    A1Report a1;
    OrbitReport orbit;
};

/// Seeds on the leading complex eigenfunction whether or not it is unstable and reports
/// whether the projected motion settles on a cycle or collapses to zero.
inline OscillationResult classify_oscillation(const UnidirectionalSystem& sys, const OrbitOptions& opts = {},
                                              double eps_rel = 1e-3) {
    OscillationResult out;
    out.a1 = verify_a1(CharFunction::of(sys));
    const auto& roots = out.a1.spectrum.roots;
    auto it = std::find_if(roots.begin(), roots.end(), [](const Root& r) { return r.value.imag() > 0.0; });
    if (it == roots.end()) throw NumericalError("classify_oscillation: no complex root near the imaginary axis");
    const auto cyc = sys.to_cyclic();
    SpectralProjection sp(cyc.linearization(), it->value);
    double radius = 1.0;
    if (sys.g().back().bounded() && std::all_of(sys.mu().begin(), sys.mu().end(), [](double m) { return m > 0.0; }))
        radius = attractor_box(sys).radius();
    const SystemState seed = sp.eigenfunction(opts.m, false, eps_rel * radius);
    out.orbit = detect_cycle(cyc, seed, PlaneProjector::spectral(sp), opts);
    if (out.orbit.converged && out.orbit.amplitude > 10.0 * eps_rel * radius)
        out.verdict = OscillationVerdict::oscillating;
    else if (!out.orbit.converged && out.orbit.trend == "decaying")
        out.verdict = OscillationVerdict::decaying;
    return out;
}

struct InjectivityProbe {
    double min_ratio = std::numeric_limits<double>::infinity();
    double fraction_v_one = 0.0;
    std::size_t pairs = 0;
    std::size_t skipped = 0;
};

/// Compares plane-coordinate differences with full state differences x_t - y_t at sampled
/// times and counts how often V(x_t - y_t) = 1. Pairs closer than delta are skipped.
inline InjectivityProbe projected_injectivity_probe(const Trajectory& x, const Trajectory& y,
                                                    const SpectralProjection& proj, double t_from, double sample_dt,
                                                    double delta = 1e-8, std::size_t resolution = 512) {
    if (!(sample_dt > 0.0)) throw ArgumentError("projected_injectivity_probe: sample_dt must be positive");
    InjectivityProbe out;
    const double t_to = std::min(x.t_end(), y.t_end());
    std::size_t ones = 0;
    for (std::size_t k = 0;; ++k) {
        const double t = t_from + sample_dt * static_cast<double>(k);
        if (t > t_to + 1e-12) break;
        const SystemState d = x.state_at(std::min(t, x.t_end()), resolution) - y.state_at(std::min(t, y.t_end()), resolution);
        const double dn = d.max_norm();
        if (dn < delta) {
            ++out.skipped;
            continue;
        }
        ++out.pairs;
        const auto c = proj.coordinates(d);
        out.min_ratio = std::min(out.min_ratio, std::hypot(c[0], c[1]) / dn);
        if (lyapunov_value(d).v == 1) ++ones;
    }
    out.fraction_v_one = out.pairs ? static_cast<double>(ones) / static_cast<double>(out.pairs) : 0.0;
    return out;
}

}  // namespace cycdde
