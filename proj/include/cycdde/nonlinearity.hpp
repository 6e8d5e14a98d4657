#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <utility>

#include "cycdde/error.hpp"

namespace cycdde {

enum class NonlinearityKind { linear_gain, tanh_sigmoid, hill_increasing, hill_decreasing, shifted_hill };

inline std::string_view to_string(NonlinearityKind kind) {
    switch (kind) {
        case NonlinearityKind::linear_gain: return "linear_gain";
        case NonlinearityKind::tanh_sigmoid: return "tanh_sigmoid";
        case NonlinearityKind::hill_increasing: return "hill_increasing";
        case NonlinearityKind::hill_decreasing: return "hill_decreasing";
        case NonlinearityKind::shifted_hill: return "shifted_hill";
    }
    return "unknown";
}

inline NonlinearityKind nonlinearity_kind_from_string(std::string_view name) {
    if (name == "linear_gain") return NonlinearityKind::linear_gain;
    if (name == "tanh_sigmoid") return NonlinearityKind::tanh_sigmoid;
    if (name == "hill_increasing") return NonlinearityKind::hill_increasing;
    if (name == "hill_decreasing") return NonlinearityKind::hill_decreasing;
    if (name == "shifted_hill") return NonlinearityKind::shifted_hill;
    throw ArgumentError("unknown nonlinearity kind '" + std::string(name) + "'");
}

namespace detail {

// Increasing Hill function u^nu / (1 + u^nu) on u >= 0, continued to u < 0 as an
// odd function so that it is strictly monotone on all of R (range (-1, 1)).
inline double hill_up(double u, double nu) {
    const double a = std::abs(u);
    double v;
    if (a <= 1.0) {
        const double p = std::pow(a, nu);
        v = p / (1.0 + p);
    } else {
        v = 1.0 / (1.0 + std::pow(a, -nu));
    }
    return u < 0.0 ? -v : v;
}

inline double hill_up_derivative(double u, double nu) {
    const double a = std::abs(u);
    if (a == 0.0) return nu == 1.0 ? 1.0 : 0.0;
    if (a <= 1.0) {
        const double p = std::pow(a, nu);
        return nu * p / a / ((1.0 + p) * (1.0 + p));
    }
    // nu a^{nu-1} / (1+a^nu)^2 = nu a^{-nu-1} / (1+a^{-nu})^2
    const double q = std::pow(a, -nu);
    return nu * q / a / ((1.0 + q) * (1.0 + q));
}

}  // namespace detail

/// Monotone scalar coupling function from a closed family with analytic derivatives.
///
///   linear_gain      gain * x
///   tanh_sigmoid     gain * tanh(slope * x)
///   hill_increasing  gain * H(slope * x + shift),       H(u) = u^nu / (1 + u^nu)
///   hill_decreasing  gain * (1 - H(slope * x + shift))
///   shifted_hill     gain * (H(slope * x + shift) - H(shift))
///
/// H is continued to negative arguments as an odd function, which keeps every kind
/// strictly monotone on R (up to the isolated critical point of H at 0 when nu > 1).
struct Nonlinearity {
    NonlinearityKind kind = NonlinearityKind::linear_gain;
    double gain = 1.0;
    double slope = 1.0;
    double nu = 1.0;
    double shift = 0.0;

    static Nonlinearity linear(double gain) { return {NonlinearityKind::linear_gain, gain, 1.0, 1.0, 0.0}; }
    static Nonlinearity tanh(double gain, double slope = 1.0) {
        return {NonlinearityKind::tanh_sigmoid, gain, slope, 1.0, 0.0};
    }
    static Nonlinearity hill_increasing(double gain, double nu, double slope = 1.0, double shift = 0.0) {
        return {NonlinearityKind::hill_increasing, gain, slope, nu, shift};
    }
    static Nonlinearity hill_decreasing(double gain, double nu, double slope = 1.0, double shift = 0.0) {
        return {NonlinearityKind::hill_decreasing, gain, slope, nu, shift};
    }
    static Nonlinearity shifted_hill(double gain, double nu, double slope, double shift) {
        return {NonlinearityKind::shifted_hill, gain, slope, nu, shift};
    }

    void validate() const {
        if (!std::isfinite(gain) || !std::isfinite(slope) || !std::isfinite(nu) || !std::isfinite(shift))
            throw ArgumentError("nonlinearity parameters must be finite");
        if (gain == 0.0) throw ArgumentError("nonlinearity gain must be nonzero");
        if (kind != NonlinearityKind::linear_gain && slope == 0.0)
            throw ArgumentError("nonlinearity slope must be nonzero");
        if (is_hill() && nu < 1.0) throw ArgumentError("Hill exponent must satisfy nu >= 1");
    }

    bool is_hill() const {
        return kind == NonlinearityKind::hill_increasing || kind == NonlinearityKind::hill_decreasing ||
               kind == NonlinearityKind::shifted_hill;
    }

    double value(double x) const {
        switch (kind) {
            case NonlinearityKind::linear_gain: return gain * x;
            case NonlinearityKind::tanh_sigmoid: return gain * std::tanh(slope * x);
            case NonlinearityKind::hill_increasing: return gain * detail::hill_up(slope * x + shift, nu);
            case NonlinearityKind::hill_decreasing: return gain * (1.0 - detail::hill_up(slope * x + shift, nu));
            case NonlinearityKind::shifted_hill:
                return gain * (detail::hill_up(slope * x + shift, nu) - detail::hill_up(shift, nu));
        }
        return std::numeric_limits<double>::quiet_NaN();
    }

    double derivative(double x) const {
        switch (kind) {
            case NonlinearityKind::linear_gain: return gain;
            case NonlinearityKind::tanh_sigmoid: {
                // sech^2 u = 4 e^{-2|u|} / (1 + e^{-2|u|})^2, accurate in the tails
                const double e = std::exp(-2.0 * std::abs(slope * x));
                return gain * slope * 4.0 * e / ((1.0 + e) * (1.0 + e));
            }
            case NonlinearityKind::hill_increasing:
            case NonlinearityKind::shifted_hill:
                return gain * slope * detail::hill_up_derivative(slope * x + shift, nu);
            case NonlinearityKind::hill_decreasing:
                return -gain * slope * detail::hill_up_derivative(slope * x + shift, nu);
        }
        return std::numeric_limits<double>::quiet_NaN();
    }

    /// True where the exact derivative is too small to be represented as a double, so a
    /// computed value of zero carries no sign information.
    bool derivative_underflows(double x) const {
        const double u = std::abs(slope * x + (is_hill() ? shift : 0.0));
        switch (kind) {
            case NonlinearityKind::linear_gain: return false;
            case NonlinearityKind::tanh_sigmoid: return u > 350.0;
            default: return u > 1.0 && std::log(nu) - (nu + 1.0) * std::log(u) < -700.0;
        }
    }

    /// +1 for increasing, -1 for decreasing.
    int monotonicity() const {
        double s = (kind == NonlinearityKind::linear_gain) ? gain : gain * slope;
        if (kind == NonlinearityKind::hill_decreasing) s = -s;
        return s > 0.0 ? 1 : -1;
    }

    bool bounded() const { return kind != NonlinearityKind::linear_gain; }

    /// Limits of value(x) as x -> -inf and x -> +inf (infinite for linear_gain).
    std::pair<double, double> limits() const {
        constexpr double inf = std::numeric_limits<double>::infinity();
        const double dir = (kind == NonlinearityKind::linear_gain) ? 1.0 : (slope > 0.0 ? 1.0 : -1.0);
        // u = slope*x + shift runs from -dir*inf to +dir*inf
        const double h_lo = -dir, h_hi = dir;  // limits of the odd Hill continuation
        switch (kind) {
            case NonlinearityKind::linear_gain: return gain > 0.0 ? std::pair{-inf, inf} : std::pair{inf, -inf};
            case NonlinearityKind::tanh_sigmoid: return {gain * h_lo, gain * h_hi};
            case NonlinearityKind::hill_increasing: return {gain * h_lo, gain * h_hi};
            case NonlinearityKind::hill_decreasing: return {gain * (1.0 - h_lo), gain * (1.0 - h_hi)};
            case NonlinearityKind::shifted_hill: {
                const double h0 = detail::hill_up(shift, nu);
                return {gain * (h_lo - h0), gain * (h_hi - h0)};
            }
        }
        return {inf, inf};
    }
};

}  // namespace cycdde
