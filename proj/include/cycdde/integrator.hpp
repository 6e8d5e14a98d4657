#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "cycdde/error.hpp"
#include "cycdde/hermite.hpp"
#include "cycdde/state.hpp"
#include "cycdde/system.hpp"

namespace cycdde {

inline constexpr double kDivergenceThreshold = 1e150;

/// Uniform-step node record (value and derivative per variable) with cubic Hermite
/// dense output. A node time queried exactly is served from the cell on its left.
class DenseRecord {
public:
    DenseRecord() = default;
    DenseRecord(double t_first, double h, std::size_t vars) : t_first_(t_first), h_(h), vars_(vars) {}

    std::size_t vars() const { return vars_; }
    double step() const { return h_; }
    double t_first() const { return t_first_; }
    std::size_t size() const { return vars_ == 0 ? 0 : values_.size() / vars_; }
    double time(std::size_t k) const { return t_first_ + h_ * static_cast<double>(k); }
    double t_last() const { return time(size() - 1); }

    void reserve(std::size_t nodes) {
        values_.reserve(nodes * vars_);
        derivs_.reserve(nodes * vars_);
    }
    void push(std::span<const double> v, std::span<const double> d) {
        values_.insert(values_.end(), v.begin(), v.end());
        derivs_.insert(derivs_.end(), d.begin(), d.end());
    }

    double value(std::size_t k, std::size_t i) const { return values_[k * vars_ + i]; }
    double derivative(std::size_t k, std::size_t i) const { return derivs_[k * vars_ + i]; }
    double& value_ref(std::size_t k, std::size_t i) { return values_[k * vars_ + i]; }
    double& derivative_ref(std::size_t k, std::size_t i) { return derivs_[k * vars_ + i]; }

    /// Cell index and local coordinate of time t (left-cell convention at nodes).
    std::pair<std::size_t, double> locate(double t) const {
        const std::size_t n = size();
        const double tol = 1e-9 * h_;
        if (n < 2 || t < t_first_ - tol || t > t_last() + tol)
            throw DomainError("time " + std::to_string(t) + " outside recorded window");
        double pos = (t - t_first_) / h_;
        double kf = std::ceil(pos) - 1.0;
        if (std::abs(pos - std::round(pos)) < 1e-12 * std::max(1.0, std::abs(pos))) {
            pos = std::round(pos);
            kf = pos - 1.0;
        }
        kf = std::clamp(kf, 0.0, static_cast<double>(n - 2));
        const std::size_t k = static_cast<std::size_t>(kf);
        return {k, std::clamp(pos - kf, 0.0, 1.0)};
    }

    double interpolate(std::size_t i, double t, double left_override_derivative = std::numeric_limits<double>::quiet_NaN(),
                       std::size_t override_node = std::numeric_limits<std::size_t>::max()) const {
        auto [k, s] = locate(t);
        if (s == 0.0) return value(k, i);
        if (s == 1.0) return value(k + 1, i);
        const double d1 = (i == 0 && k + 1 == override_node && !std::isnan(left_override_derivative)) ? left_override_derivative
                                                                                            : derivative(k + 1, i);
        return hermite(value(k, i), derivative(k, i), value(k + 1, i), d1, h_, s);
    }

    double interpolate_derivative(std::size_t i, double t,
                                  double left_override_derivative = std::numeric_limits<double>::quiet_NaN(),
                                  std::size_t override_node = std::numeric_limits<std::size_t>::max()) const {
        auto [k, s] = locate(t);
        const double d1 = (i == 0 && k + 1 == override_node && !std::isnan(left_override_derivative)) ? left_override_derivative
                                                                                            : derivative(k + 1, i);
        if (s == 1.0) return d1;
        if (s == 0.0) return derivative(k, i);
        return hermite_derivative(value(k, i), derivative(k, i), value(k + 1, i), d1, h_, s);
    }

private:
    double t_first_ = 0.0;
    double h_ = 1.0;
    std::size_t vars_ = 0;
    std::vector<double> values_;
    std::vector<double> derivs_;
};

/// Solution of a cyclic system on [t_start - tau, t_end] with step h = tau / m.
/// Components 1..N are only defined from t_start on.
class Trajectory {
public:
    Trajectory() = default;
    Trajectory(CyclicSystem system, double t_start, std::size_t m, DenseRecord record, double history_end_derivative)
        : system_(std::move(system)), t_start_(t_start), m_(m), record_(std::move(record)),
          history_end_derivative_(history_end_derivative) {}

    const CyclicSystem& system() const { return system_; }
    double tau() const { return system_.tau(); }
    double step() const { return record_.step(); }
    std::size_t steps_per_delay() const { return m_; }
    std::size_t dimension() const { return system_.dimension(); }
    double t_start() const { return t_start_; }
    double t_end() const { return record_.t_last(); }
    const DenseRecord& record() const { return record_; }

    /// First node index at or after t_start.
    std::size_t start_node() const { return m_; }
    std::size_t node_count() const { return record_.size(); }
    double node_time(std::size_t k) const { return k == m_ ? t_start_ : record_.time(k); }

    double value(std::size_t i, double t) const {
        check_component_time(i, t);
        return record_.interpolate(i, t, history_end_derivative_, m_);
    }

    double derivative(std::size_t i, double t) const {
        check_component_time(i, t);
        return record_.interpolate_derivative(i, t, history_end_derivative_, m_);
    }

    /// (x_0(t), ..., x_N(t)) for t >= t_start.
    std::vector<double> current(double t) const {
        std::vector<double> out(dimension());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = value(i, t);
        return out;
    }

    /// The state x_t: x_0 on [t - tau, t] resampled to `resolution` intervals (default m),
    /// plus x_1(t), ..., x_N(t).
    SystemState state_at(double t, std::size_t resolution = 0) const {
        const std::size_t r = resolution == 0 ? m_ : resolution;
        if (t < t_start_ - 1e-9 * step() || t > t_end() + 1e-9 * step())
            throw DomainError("state_at: t outside [t_start, t_end]");
        std::vector<double> v(r + 1), d(r + 1);
        for (std::size_t k = 0; k <= r; ++k) {
            const double s = t + SystemState::node_theta(tau(), r, k);
            v[k] = record_.interpolate(0, s, history_end_derivative_, m_);
            d[k] = record_.interpolate_derivative(0, s, history_end_derivative_, m_);
        }
        std::vector<double> tail(dimension() - 1);
        for (std::size_t i = 1; i < dimension(); ++i) tail[i - 1] = value(i, t);
        return SystemState(tau(), std::move(v), std::move(d), std::move(tail));
    }

private:
    void check_component_time(std::size_t i, double t) const {
        if (i >= dimension()) throw ArgumentError("trajectory: component index out of range");
        if (i > 0 && t < t_start_ - 1e-9 * step())
            throw DomainError("trajectory: tail components undefined before t_start");
    }

    CyclicSystem system_;
    double t_start_ = 0.0;
    std::size_t m_ = 0;
    DenseRecord record_;
    double history_end_derivative_ = 0.0;
};

/// Classical RK4 method of steps with h = tau / m; delayed values at internal stages by
/// cubic Hermite interpolation of the already computed solution.
inline Trajectory integrate(const CyclicSystem& system, const SystemState& initial, double t_end, std::size_t m,
                            double t_start = 0.0) {
    if (m < 8) throw ArgumentError("integrate: steps per delay must be >= 8");
    if (!(t_end > t_start)) throw ArgumentError("integrate: t_end must exceed the start time");
    if (initial.tail_size() != system.last()) throw ArgumentError("integrate: state tail size does not match system");
    if (std::abs(initial.tau() - system.tau()) > 1e-12 * system.tau())
        throw ArgumentError("integrate: state tau does not match system tau");
    if (!initial.is_finite()) throw ArgumentError("integrate: initial state is not finite");

    const double tau = system.tau();
    const double h = tau / static_cast<double>(m);
    const std::size_t n = system.dimension();
    const std::size_t steps = static_cast<std::size_t>(std::ceil((t_end - t_start) / h - 1e-9));

    DenseRecord rec(t_start - tau, h, n);
    rec.reserve(m + 1 + steps);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> v(n, nan), d(n, nan);
    for (std::size_t k = 0; k < m; ++k) {
        const double theta = SystemState::node_theta(tau, m, k);
        v[0] = initial.history(theta);
        d[0] = initial.history_derivative(theta);
        rec.push(v, d);
    }
    std::vector<double> x = initial.current();
    std::vector<double> f(n);
    system.rhs(x, rec.value(0, 0), f);
    rec.push(x, f);
    const double history_end_derivative = initial.history_derivative(0.0);

    auto delayed_at = [&](double t) { return rec.interpolate(0, t - tau, history_end_derivative, m); };

    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    for (std::size_t s = 0; s < steps; ++s) {
        const std::size_t node = m + s;
        const double t = t_start + h * static_cast<double>(s);
        for (std::size_t i = 0; i < n; ++i) k1[i] = rec.derivative(node, i);
        const double dmid = delayed_at(t + 0.5 * h);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
        system.rhs(tmp, dmid, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
        system.rhs(tmp, dmid, k3);
        const double dend = rec.value(s + 1, 0);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
        system.rhs(tmp, dend, k4);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (!(std::abs(x[i]) <= kDivergenceThreshold))
                throw DivergenceError("integration diverged at t = " + std::to_string(t + h), t + h);
        }
        system.rhs(x, rec.value(s + 1, 0), f);
        rec.push(x, f);
    }
    return Trajectory(system, t_start, m, std::move(rec), history_end_derivative);
}

inline Trajectory integrate(const UnidirectionalSystem& system, const SystemState& initial, double t_end,
                            std::size_t m, double t_start = 0.0) {
    return integrate(system.to_cyclic(), initial, t_end, m, t_start);
}

/// Linear system with the explicit solutions x_j(t) = cos(omega t + j phi), tau = 1,
/// phi = pi / (2(N+1)), omega = pi (J - 1/2), J odd.
struct ModelSystem {
    CyclicSystem system;
    std::size_t N = 0;
    int J = 1;
    double omega = 0.0;
    double phi = 0.0;

    double exact(std::size_t j, double t) const { return std::cos(omega * t + static_cast<double>(j) * phi); }
    double exact_derivative(std::size_t j, double t) const {
        return -omega * std::sin(omega * t + static_cast<double>(j) * phi);
    }

    SystemState exact_state(double t, std::size_t m) const {
        std::vector<double> tail(N);
        for (std::size_t j = 1; j <= N; ++j) tail[j - 1] = exact(j, t);
        return SystemState::from_function(
            1.0, m, [&](double th) { return exact(0, t + th); }, [&](double th) { return exact_derivative(0, t + th); },
            std::move(tail));
    }
};

inline ModelSystem model_system(std::size_t N, int J) {
    if (J < 1 || J % 2 == 0) throw ArgumentError("model_system: J must be an odd positive integer");
    ModelSystem ms;
    ms.N = N;
    ms.J = J;
    ms.phi = std::numbers::pi / (2.0 * static_cast<double>(N + 1));
    ms.omega = std::numbers::pi * (J - 0.5);
    const double c = std::sin(std::numbers::pi / 2.0 - ms.phi), s = std::sin(ms.phi);
    std::vector<CyclicComponent> comps;
    for (std::size_t j = 0; j <= N; ++j) {
        const double coupling = (j == N ? -1.0 : 1.0) * ms.omega / s;
        comps.push_back({ms.omega * c / s, std::nullopt, Nonlinearity::linear(coupling)});
    }
    ms.system = CyclicSystem(std::move(comps), 1.0);
    return ms;
}

/// Initial data of a gene network on [-T_max, 0], variable order r1, p1, ..., rn, pn.
struct GeneInitial {
    std::function<double(std::size_t, double)> value;
    std::function<double(std::size_t, double)> derivative;

    static GeneInitial constant(std::vector<double> values) {
        return {[values](std::size_t i, double) { return values.at(i); }, [](std::size_t, double) { return 0.0; }};
    }
};

/// Gene network solution; variables ordered r1, p1, ..., rn, pn.
class GeneTrajectory {
public:
    GeneTrajectory() = default;
    GeneTrajectory(GeneNetwork network, DenseRecord record, std::size_t first_forward_node)
        : network_(std::move(network)), record_(std::move(record)), start_node_(first_forward_node) {}

    const GeneNetwork& network() const { return network_; }
    const DenseRecord& record() const { return record_; }
    std::size_t start_node() const { return start_node_; }
    double t_end() const { return record_.t_last(); }
    double step() const { return record_.step(); }

    double value(std::size_t var, double t) const { return record_.interpolate(var, t); }
    double r(std::size_t i, double t) const { return value(2 * (i - 1), t); }
    double p(std::size_t i, double t) const { return value(2 * (i - 1) + 1, t); }

private:
    GeneNetwork network_;
    DenseRecord record_;
    std::size_t start_node_ = 0;
};

/// Method of steps for the gene network with each variable's own delay. The step is
/// h = (smallest positive delay) / m, so every delayed argument lies in the computed past.
inline GeneTrajectory integrate_gene(const GeneNetwork& net, const GeneInitial& initial, double t_end, std::size_t m) {
    net.validate();
    if (m < 1) throw ArgumentError("integrate_gene: m must be >= 1");
    if (!(t_end > 0.0)) throw ArgumentError("integrate_gene: t_end must be positive");
    const std::size_t n = net.size();
    const std::size_t vars = 2 * n;
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (net.tau_p[i] > 0.0) dmin = std::min(dmin, net.tau_p[i]);
        if (net.tau_r[i] > 0.0) dmin = std::min(dmin, net.tau_r[i]);
    }
    const double h = dmin / static_cast<double>(m);
    const std::size_t back = static_cast<std::size_t>(std::ceil(net.max_delay() / h - 1e-9));
    const std::size_t steps = static_cast<std::size_t>(std::ceil(t_end / h - 1e-9));

    DenseRecord rec(-h * static_cast<double>(back), h, vars);
    rec.reserve(back + steps + 1);
    std::vector<double> v(vars), d(vars);
    for (std::size_t k = 0; k <= back; ++k) {
        const double t = -h * static_cast<double>(back - k);
        for (std::size_t i = 0; i < vars; ++i) {
            v[i] = initial.value(i, t);
            d[i] = initial.derivative ? initial.derivative(i, t) : 0.0;
            if (!(v[i] >= 0.0)) throw ArgumentError("integrate_gene: initial data must be nonnegative");
        }
        rec.push(v, d);
    }

    auto hill = [&](std::size_t i, double x) {
        const double u = std::max(x, 0.0);
        const double up = detail::hill_up(u, net.nu[i]);
        return net.f_kind[i] == HillKind::increasing ? up : 1.0 - up;
    };
    // stage evaluation: y is the stage vector at time t; delays 0 use y itself
    auto rhs = [&](double t, const std::vector<double>& y, std::vector<double>& out) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t ri = 2 * i, pi = 2 * i + 1;
            const std::size_t prev_p = 2 * ((i + n - 1) % n) + 1;
            const double pd = net.tau_p[i] == 0.0 ? y[prev_p] : rec.interpolate(prev_p, t - net.tau_p[i]);
            const double rd = net.tau_r[i] == 0.0 ? y[ri] : rec.interpolate(ri, t - net.tau_r[i]);
            out[ri] = -net.a[i] * y[ri] + net.beta[i] * hill(i, pd);
            out[pi] = -net.b[i] * y[pi] + net.c[i] * rd;
        }
    };

    std::vector<double> x = v, k1(vars), k2(vars), k3(vars), k4(vars), tmp(vars);
    rhs(0.0, x, k1);
    for (std::size_t i = 0; i < vars; ++i) rec.derivative_ref(back, i) = k1[i];
    for (std::size_t s = 0; s < steps; ++s) {
        const double t = h * static_cast<double>(s);
        for (std::size_t i = 0; i < vars; ++i) k1[i] = rec.derivative(back + s, i);
        for (std::size_t i = 0; i < vars; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
        rhs(t + 0.5 * h, tmp, k2);
        for (std::size_t i = 0; i < vars; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
        rhs(t + 0.5 * h, tmp, k3);
        for (std::size_t i = 0; i < vars; ++i) tmp[i] = x[i] + h * k3[i];
        rhs(t + h, tmp, k4);
        for (std::size_t i = 0; i < vars; ++i) {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (!(std::abs(x[i]) <= kDivergenceThreshold))
                throw DivergenceError("gene integration diverged", t + h);
        }
        // derivative at the new node needs the new node itself for zero delays only
        rec.push(x, k4);
        rhs(t + h, x, tmp);
        for (std::size_t i = 0; i < vars; ++i) rec.derivative_ref(back + s + 1, i) = tmp[i];
    }
    return GeneTrajectory(net, std::move(rec), back);
}

}  // namespace cycdde
