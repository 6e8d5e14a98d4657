#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "cycdde/error.hpp"
#include "cycdde/hermite.hpp"

namespace cycdde {

/// Element of C([-tau, 0]) x R^N: the delayed component's history on a uniform grid
/// of m+1 nodes (value and derivative, for cubic Hermite interpolation) together with
/// the N instantaneous tail coordinates.
class SystemState {
public:
    SystemState() = default;

    SystemState(double tau, std::vector<double> values, std::vector<double> derivatives, std::vector<double> tail)
        : tau_(tau), values_(std::move(values)), derivatives_(std::move(derivatives)), tail_(std::move(tail)) {
        if (!(tau_ > 0.0) || !std::isfinite(tau_)) throw ArgumentError("state: tau must be positive");
        if (values_.size() < 2) throw ArgumentError("state: history needs at least two nodes");
        if (derivatives_.size() != values_.size())
            throw ArgumentError("state: history values and derivatives differ in length");
    }

    /// Samples value/derivative callables on the grid theta_k = -tau + k tau / m.
    static SystemState from_function(double tau, std::size_t m, const std::function<double(double)>& value,
                                     const std::function<double(double)>& derivative, std::vector<double> tail) {
        if (m < 1) throw ArgumentError("state: grid resolution must be >= 1");
        std::vector<double> v(m + 1), d(m + 1);
        for (std::size_t k = 0; k <= m; ++k) {
            const double theta = node_theta(tau, m, k);
            v[k] = value(theta);
            d[k] = derivative(theta);
        }
        return SystemState(tau, std::move(v), std::move(d), std::move(tail));
    }

    static SystemState constant(double tau, std::size_t m, double history_value, std::vector<double> tail) {
        return SystemState(tau, std::vector<double>(m + 1, history_value), std::vector<double>(m + 1, 0.0),
                           std::move(tail));
    }

    /// History from plain samples; derivatives estimated with second-order finite differences.
    static SystemState from_samples(double tau, std::vector<double> values, std::vector<double> tail) {
        const std::size_t n = values.size();
        if (n < 2) throw ArgumentError("state: history needs at least two nodes");
        const double h = tau / static_cast<double>(n - 1);
        std::vector<double> d(n);
        if (n == 2) {
            d[0] = d[1] = (values[1] - values[0]) / h;
        } else {
            d[0] = (-3 * values[0] + 4 * values[1] - values[2]) / (2 * h);
            d[n - 1] = (3 * values[n - 1] - 4 * values[n - 2] + values[n - 3]) / (2 * h);
            for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (values[k + 1] - values[k - 1]) / (2 * h);
        }
        return SystemState(tau, std::move(values), std::move(d), std::move(tail));
    }

    static double node_theta(double tau, std::size_t m, std::size_t k) {
        return k == m ? 0.0 : -tau + tau * static_cast<double>(k) / static_cast<double>(m);
    }

    double tau() const { return tau_; }
    std::size_t resolution() const { return values_.size() - 1; }
    double step() const { return tau_ / static_cast<double>(resolution()); }
    std::size_t tail_size() const { return tail_.size(); }

    const std::vector<double>& history_values() const { return values_; }
    const std::vector<double>& history_derivatives() const { return derivatives_; }
    const std::vector<double>& tail() const { return tail_; }

    double theta(std::size_t k) const { return node_theta(tau_, resolution(), k); }

    /// Delayed component at theta in [-tau, 0] (cubic Hermite between nodes).
    double history(double theta) const { return eval(theta, false); }
    double history_derivative(double theta) const { return eval(theta, true); }

    /// Value of the delayed component at theta = 0 followed by the tail.
    std::vector<double> current() const {
        std::vector<double> out;
        out.reserve(tail_.size() + 1);
        out.push_back(values_.back());
        out.insert(out.end(), tail_.begin(), tail_.end());
        return out;
    }

    double max_norm() const {
        double n = 0.0;
        for (double v : values_) n = std::max(n, std::abs(v));
        for (double v : tail_) n = std::max(n, std::abs(v));
        return n;
    }

    bool is_finite() const {
        auto fin = [](double v) { return std::isfinite(v); };
        return std::all_of(values_.begin(), values_.end(), fin) && std::all_of(tail_.begin(), tail_.end(), fin);
    }

    /// Same history on a different uniform grid.
    SystemState resampled(std::size_t m) const {
        if (m == resolution()) return *this;
        std::vector<double> v(m + 1), d(m + 1);
        for (std::size_t k = 0; k <= m; ++k) {
            const double th = node_theta(tau_, m, k);
            v[k] = history(th);
            d[k] = history_derivative(th);
        }
        return SystemState(tau_, std::move(v), std::move(d), tail_);
    }

    friend SystemState operator*(double a, const SystemState& s) {
        SystemState r = s;
        for (auto& v : r.values_) v *= a;
        for (auto& v : r.derivatives_) v *= a;
        for (auto& v : r.tail_) v *= a;
        return r;
    }

    friend SystemState operator+(const SystemState& a, const SystemState& b) { return combine(a, b, 1.0); }
    friend SystemState operator-(const SystemState& a, const SystemState& b) { return combine(a, b, -1.0); }

private:
    static SystemState combine(const SystemState& a, const SystemState& b, double sign) {
        if (a.values_.size() != b.values_.size() || a.tail_.size() != b.tail_.size() || a.tau_ != b.tau_)
            throw ArgumentError("state: operands live on different grids");
        SystemState r = a;
        for (std::size_t k = 0; k < r.values_.size(); ++k) {
            r.values_[k] += sign * b.values_[k];
            r.derivatives_[k] += sign * b.derivatives_[k];
        }
        for (std::size_t k = 0; k < r.tail_.size(); ++k) r.tail_[k] += sign * b.tail_[k];
        return r;
    }

    double eval(double theta, bool derivative) const {
        const std::size_t m = resolution();
        const double h = step();
        if (theta < -tau_ - 1e-12 * tau_ || theta > 1e-12 * tau_)
            throw DomainError("state: theta outside [-tau, 0]");
        double pos = (theta + tau_) / h;
        pos = std::clamp(pos, 0.0, static_cast<double>(m));
        std::size_t k = static_cast<std::size_t>(pos);
        if (k >= m) k = m - 1;
        const double s = pos - static_cast<double>(k);
        if (!derivative) {
            if (s == 0.0) return values_[k];
            if (s == 1.0) return values_[k + 1];
            return hermite(values_[k], derivatives_[k], values_[k + 1], derivatives_[k + 1], h, s);
        }
        return hermite_derivative(values_[k], derivatives_[k], values_[k + 1], derivatives_[k + 1], h, s);
    }

    double tau_ = 1.0;
    std::vector<double> values_{0.0, 0.0};
    std::vector<double> derivatives_{0.0, 0.0};
    std::vector<double> tail_;
};

}  // namespace cycdde
