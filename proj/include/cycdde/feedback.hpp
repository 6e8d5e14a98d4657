#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "cycdde/error.hpp"
#include "cycdde/integrator.hpp"
#include "cycdde/quadrature.hpp"
#include "cycdde/system.hpp"

namespace cycdde {

enum class SignRequirement { positive, nonnegative, negative, unconstrained };

inline const char* to_string(SignRequirement r) {
    switch (r) {
        case SignRequirement::positive: return "positive";
        case SignRequirement::nonnegative: return "nonnegative";
        case SignRequirement::negative: return "negative";
        case SignRequirement::unconstrained: return "any";
    }
    return "any";
}

inline bool satisfies(SignRequirement r, double v) {
    switch (r) {
        case SignRequirement::positive: return v > 0.0;
        case SignRequirement::nonnegative: return v >= 0.0;
        case SignRequirement::negative: return v < 0.0;
        case SignRequirement::unconstrained: return true;
    }
    return false;
}

/// Sample points for the sign check: a uniform grid on [lo, hi] plus +-10^k decades.
struct SampleGrid {
    double lo = -10.0;
    double hi = 10.0;
    std::size_t points = 401;
    bool decades = true;

    std::vector<double> values() const {
        std::vector<double> xs;
        for (std::size_t k = 0; k < points; ++k)
            xs.push_back(points == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1));
        if (decades)
            for (int e = -6; e <= 6; ++e) {
                xs.push_back(std::pow(10.0, e));
                xs.push_back(-std::pow(10.0, e));
            }
        return xs;
    }
};

struct PartialSign {
    std::size_t component = 0;
    std::string partial;  // "prev" or "next"
    double min = 0.0;
    double max = 0.0;
    SignRequirement required = SignRequirement::unconstrained;
    bool pass = true;
    std::size_t saturated = 0;  // grid points where the derivative underflows to zero
};

struct FeedbackReport {
    std::vector<PartialSign> partials;
    std::vector<std::string> diagnostics;
    bool pass = true;
};

/// Sign requirement on d f^i / d(next argument) for a system with last index N.
inline SignRequirement next_requirement(std::size_t i, std::size_t last) {
    return i == last ? SignRequirement::negative : SignRequirement::positive;
}

/// Sign requirement on d f^i / d(prev argument).
inline SignRequirement prev_requirement(std::size_t i, std::size_t last) {
    return (i >= 1 && i < last) ? SignRequirement::nonnegative : SignRequirement::unconstrained;
}

inline FeedbackReport validate_feedback(const CyclicSystem& sys, const SampleGrid& grid = {}) {
    FeedbackReport rep;
    const auto xs = grid.values();
    auto check = [&](std::size_t i, const Nonlinearity& f, const char* name, SignRequirement req) {
        PartialSign ps{i, name, std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), req,
                       true, 0};
        for (double x : xs) {
            const double d = f.derivative(x);
            if (!std::isfinite(d) || !std::isfinite(f.value(x))) {
                std::ostringstream os;
                os << "component " << i << " " << name << ": non-finite evaluation at x = " << x;
                rep.diagnostics.push_back(os.str());
                ps.pass = false;
                continue;
            }
            if (d == 0.0 && f.derivative_underflows(x)) {
                ++ps.saturated;
                continue;
            }
            ps.min = std::min(ps.min, d);
            ps.max = std::max(ps.max, d);
            if (!satisfies(req, d)) ps.pass = false;
        }
        if (!ps.pass && rep.diagnostics.empty()) {
            std::ostringstream os;
            os << "component " << i << " " << name << ": derivative must be " << to_string(req) << ", observed range ["
               << ps.min << ", " << ps.max << "]";
            rep.diagnostics.push_back(os.str());
        }
        rep.pass = rep.pass && ps.pass;
        rep.partials.push_back(ps);
    };
    for (std::size_t i = 0; i < sys.dimension(); ++i) {
        const auto& c = sys.component(i);
        if (c.prev) check(i, *c.prev, "prev", prev_requirement(i, sys.last()));
        check(i, c.next, "next", next_requirement(i, sys.last()));
    }
    return rep;
}

inline FeedbackReport validate_feedback(const UnidirectionalSystem& sys, const SampleGrid& grid = {}) {
    return validate_feedback(sys.to_cyclic(), grid);
}

/// Coefficients of component i in  D_i' = a_i D_{i-1} + c_i D_i + b_i D_{i+1}.
struct CoefficientTriple {
    double a = 0.0;
    double c = 0.0;
    double b = 0.0;
};

namespace detail {

inline double averaged_slope(const Nonlinearity& f, double from, double to) {
    const auto& gl = GaussLegendre<16>::instance();
    return gl.integrate01([&](double s) { return f.derivative(from + s * (to - from)); });
}

}  // namespace detail

/// Integral-averaged coefficients of the linear system solved by y - x at time t.
inline std::vector<CoefficientTriple> difference_coefficients(const Trajectory& x, const Trajectory& y,
                                                              const CyclicSystem& sys, double t) {
    if (x.dimension() != sys.dimension() || y.dimension() != sys.dimension())
        throw ArgumentError("difference_coefficients: trajectory dimension does not match the system");
    for (const Trajectory* tr : {&x, &y})
        if (t < tr->t_start() - 1e-12 || t > tr->t_end() + 1e-12)
            throw DomainError("difference_coefficients: trajectories do not cover [t - tau, t]");
    const std::size_t n = sys.dimension();
    const auto xv = x.current(t), yv = y.current(t);
    const double xd = x.value(0, t - sys.tau()), yd = y.value(0, t - sys.tau());
    std::vector<CoefficientTriple> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& c = sys.component(i);
        out[i].c = -c.decay;
        if (c.prev) out[i].a = detail::averaged_slope(*c.prev, xv[i - 1], yv[i - 1]);
        const double xn = (i + 1 == n) ? xd : xv[i + 1];
        const double yn = (i + 1 == n) ? yd : yv[i + 1];
        out[i].b = detail::averaged_slope(c.next, xn, yn);
    }
    return out;
}

inline std::vector<CoefficientTriple> difference_coefficients(const Trajectory& x, const Trajectory& y, double t) {
    return difference_coefficients(x, y, x.system(), t);
}

/// Partial derivatives along a single solution.
inline std::vector<CoefficientTriple> variational_coefficients(const Trajectory& x, double t) {
    const auto& sys = x.system();
    const auto lin = sys.linearization_at(x.current(t), x.value(0, t - sys.tau()));
    std::vector<CoefficientTriple> out(sys.dimension());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].c = lin.a(i, i);
        if (i > 0) out[i].a = lin.a(i, i - 1);
        out[i].b = (i == sys.last()) ? lin.b(i, 0) : lin.a(i, i + 1);
    }
    return out;
}

/// b_0 > 0, a_i >= 0 and b_i > 0 for 1 <= i < N, b_N < 0.
inline bool has_feedback_sign_pattern(const std::vector<CoefficientTriple>& coeffs) {
    const std::size_t last = coeffs.size() - 1;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (!satisfies(next_requirement(i, last), coeffs[i].b)) return false;
        if (!satisfies(prev_requirement(i, last), coeffs[i].a)) return false;
    }
    return true;
}

}  // namespace cycdde
