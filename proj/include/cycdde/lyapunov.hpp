#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <ostream>
#include <vector>

#include "cycdde/error.hpp"
#include "cycdde/integrator.hpp"
#include "cycdde/state.hpp"

namespace cycdde {

inline constexpr double kDefaultZeroTol = 1e-9;

struct VValue {
    std::size_t sc = 0;
    std::size_t v = 1;
    bool saturated = false;
};

/// Sign alternations of the sampled history followed by the tail coordinates. Entries
/// with |value| <= zero_tol * max-norm are skipped.
inline std::size_t sign_changes(const SystemState& state, double zero_tol = kDefaultZeroTol) {
    const double norm = state.max_norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) throw DomainError("V is undefined at the zero state");
    const double cut = zero_tol * norm;
    std::size_t count = 0;
    int last = 0;
    auto visit = [&](double v) {
        if (std::abs(v) <= cut) return;
        const int s = v > 0.0 ? 1 : -1;
        if (last != 0 && s != last) ++count;
        last = s;
    };
    for (double v : state.history_values()) visit(v);
    for (double v : state.tail()) visit(v);
    return count;
}

inline VValue lyapunov_value(const SystemState& state, double zero_tol = kDefaultZeroTol) {
    VValue out;
    out.sc = sign_changes(state, zero_tol);
    out.v = (out.sc % 2 == 1) ? out.sc : out.sc + 1;
    out.saturated = out.sc == state.resolution() + state.tail_size();
    return out;
}

inline VValue V(const SystemState& state, double zero_tol = kDefaultZeroTol) { return lyapunov_value(state, zero_tol); }

inline bool is_in_sigma(const SystemState& state, double zero_tol = kDefaultZeroTol) {
    return lyapunov_value(state, zero_tol).v == 1;
}

struct VSample {
    double t = 0.0;
    VValue value;
};

struct VSeries {
    std::vector<VSample> samples;
    bool truncated = false;
    double truncated_at = 0.0;
    bool nonincreasing = true;
    std::size_t violations = 0;
};

/// V along a trajectory at t_start + tau, t_start + tau + dt, ... Histories are resampled to
/// `resolution` intervals (default max(512, m)). The series stops when the state norm falls
/// below zero_tol times the first sampled norm.
inline VSeries v_series(const Trajectory& traj, double sample_dt, std::size_t resolution = 0,
                        double zero_tol = kDefaultZeroTol) {
    if (!(sample_dt > 0.0)) throw ArgumentError("v_series: sample_dt must be positive");
    if (traj.t_end() - traj.t_start() < traj.tau() * (1.0 - 1e-12))
        throw ArgumentError("v_series: trajectory shorter than one delay");
    const std::size_t res = resolution == 0 ? std::max<std::size_t>(512, traj.steps_per_delay()) : resolution;
    VSeries out;
    double first_norm = -1.0;
    const double t0 = traj.t_start() + traj.tau();
    const double slack = 1e-9 * traj.step();
    for (std::size_t k = 0;; ++k) {
        const double t = t0 + sample_dt * static_cast<double>(k);
        if (t > traj.t_end() + slack) break;
        const auto st = traj.state_at(std::min(t, traj.t_end()), res);
        const double norm = st.max_norm();
        if (first_norm < 0.0) first_norm = norm;
        if (!(norm > zero_tol * first_norm) || !(norm > 0.0)) {
            out.truncated = true;
            out.truncated_at = t;
            break;
        }
        const VValue v = lyapunov_value(st, zero_tol);
        if (!out.samples.empty() && v.v > out.samples.back().value.v) {
            ++out.violations;
            out.nonincreasing = false;
        }
        out.samples.push_back({t, v});
    }
    return out;
}

inline void write_v_series_csv(std::ostream& os, const VSeries& series) {
    os << "t,sc,v,saturated\n";
    char buf[64];
    for (const auto& s : series.samples) {
        std::snprintf(buf, sizeof buf, "%.17g", s.t);
        os << buf << ',' << s.value.sc << ',' << s.value.v << ',' << (s.value.saturated ? 1 : 0) << '\n';
    }
}

}  // namespace cycdde
