#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "cycdde/error.hpp"

namespace cycdde {

/// Gauss-Legendre nodes/weights on [0, 1], computed once by Newton iteration on P_n.
template <std::size_t N>
struct GaussLegendre {
    std::array<double, N> nodes{};
    std::array<double, N> weights{};

    GaussLegendre() {
        for (std::size_t i = 0; i < N; ++i) {
            double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(N) + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (std::size_t k = 2; k <= N; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                    p0 = p1;
                    p1 = p2;
                }
                dp = static_cast<double>(N) * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            nodes[i] = 0.5 * (1.0 - x);
            weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);  // 2/((1-x^2)p'^2) scaled by 1/2
        }
    }

    template <class F>
    auto integrate01(F&& f) const {
        auto sum = weights[0] * f(nodes[0]);
        for (std::size_t i = 1; i < N; ++i) sum += weights[i] * f(nodes[i]);
        return sum;
    }

    static const GaussLegendre& instance() {
        static const GaussLegendre rule;
        return rule;
    }
};

/// Weights of the same composite rule for n intervals of width h.
inline std::vector<double> simpson_weights(std::size_t n, double h) {
    if (n < 1) throw ArgumentError("simpson_weights: need at least one interval");
    std::vector<double> w(n + 1, 0.0);
    if (n == 1) {
        w[0] = w[1] = 0.5 * h;
        return w;
    }
    const std::size_t even_end = (n % 2 == 0) ? n : n - 3;
    for (std::size_t i = 0; even_end > 0 && i <= even_end; ++i)
        w[i] += h / 3.0 * ((i == 0 || i == even_end) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0));
    if (even_end != n) {
        const double c[4] = {1.0, 3.0, 3.0, 1.0};
        for (std::size_t k = 0; k < 4; ++k) w[even_end + k] += 3.0 * h / 8.0 * c[k];
    }
    return w;
}

/// Composite Simpson rule on a uniform grid of samples with spacing h. An odd number
/// of intervals finishes with a 3/8 panel on the last three intervals.
template <class T>
T simpson(std::span<const T> y, double h) {
    if (y.size() < 2) throw ArgumentError("simpson: need at least two samples");
    const auto w = simpson_weights(y.size() - 1, h);
    T sum = T(w[0]) * y[0];
    for (std::size_t i = 1; i < y.size(); ++i) sum += T(w[i]) * y[i];
    return sum;
}

}  // namespace cycdde
