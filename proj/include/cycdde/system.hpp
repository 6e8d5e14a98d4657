#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cycdde/error.hpp"
#include "cycdde/nonlinearity.hpp"

namespace cycdde {

/// One equation of the standard cyclic feedback form in additive shape:
///   x_i' = prev(x_{i-1}) - decay * x_i + next(x_{i+1}),
/// where x_{N+1} means the delayed x_0(t - tau). Component 0 has no prev term.
struct CyclicComponent {
    double decay = 0.0;
    std::optional<Nonlinearity> prev;
    Nonlinearity next;
};

/// Dense row-major constant-coefficient linearization x' = A x(t) + B x(t - tau).
struct Linearization {
    std::size_t dim = 0;
    std::vector<double> A;  // dim * dim
    std::vector<double> B;  // dim * dim, single nonzero entry at (dim-1, 0)
    double tau = 1.0;

    double a(std::size_t i, std::size_t j) const { return A[i * dim + j]; }
    double b(std::size_t i, std::size_t j) const { return B[i * dim + j]; }
    double delayed_gain() const { return B[(dim - 1) * dim]; }
};

/// Cyclic monotone feedback system with N+1 components x_0..x_N and one delay tau in
/// the coupling of x_N to x_0.
class CyclicSystem {
public:
    CyclicSystem() = default;

    CyclicSystem(std::vector<CyclicComponent> components, double tau)
        : components_(std::move(components)), tau_(tau) {
        if (components_.empty()) throw ArgumentError("cyclic system needs at least one component");
        if (!(tau_ > 0.0) || !std::isfinite(tau_)) throw ArgumentError("cyclic system: tau must be positive and finite");
        if (components_.front().prev) throw ArgumentError("cyclic system: component 0 has no prev coupling");
        for (const auto& c : components_) {
            if (!std::isfinite(c.decay)) throw ArgumentError("cyclic system: decay rates must be finite");
            c.next.validate();
            if (c.prev) c.prev->validate();
        }
    }

    std::size_t dimension() const { return components_.size(); }
    /// Index N of the last component.
    std::size_t last() const { return components_.size() - 1; }
    double tau() const { return tau_; }
    const CyclicComponent& component(std::size_t i) const { return components_.at(i); }
    const std::vector<CyclicComponent>& components() const { return components_; }

    /// Right-hand side of component i given the current vector and x_0(t - tau).
    double rhs_component(std::size_t i, std::span<const double> x, double delayed) const {
        const auto& c = components_[i];
        const double coupled = (i == last()) ? delayed : x[i + 1];
        double f = -c.decay * x[i] + c.next.value(coupled);
        if (c.prev) f += c.prev->value(x[i - 1]);
        return f;
    }

    void rhs(std::span<const double> x, double delayed, std::span<double> out) const {
        for (std::size_t i = 0; i < components_.size(); ++i) out[i] = rhs_component(i, x, delayed);
    }

    /// Jacobian blocks at a constant state (x, delayed); at zero this is the linearization.
    Linearization linearization_at(std::span<const double> x, double delayed) const {
        const std::size_t n = dimension();
        Linearization lin;
        lin.dim = n;
        lin.tau = tau_;
        lin.A.assign(n * n, 0.0);
        lin.B.assign(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& c = components_[i];
            lin.A[i * n + i] = -c.decay;
            if (c.prev) lin.A[i * n + i - 1] += c.prev->derivative(x[i - 1]);
            if (i == last())
                lin.B[i * n] = c.next.derivative(delayed);
            else
                lin.A[i * n + i + 1] += c.next.derivative(x[i + 1]);
        }
        return lin;
    }

    Linearization linearization() const {
        std::vector<double> zero(dimension(), 0.0);
        return linearization_at(zero, 0.0);
    }

    /// True when every component's right-hand side vanishes at the origin.
    bool zero_is_equilibrium() const {
        std::vector<double> zero(dimension(), 0.0), out(dimension());
        rhs(zero, 0.0, out);
        return std::all_of(out.begin(), out.end(), [](double v) { return v == 0.0; });
    }

private:
    std::vector<CyclicComponent> components_;
    double tau_ = 1.0;
};

/// Unidirectional negative feedback loop
///   x_j' = -mu_j x_j + g_j(x_{j+1}),  j = 1..N-1;   x_N' = -mu_N x_N + g_N(x_1(t - tau)).
/// Components are numbered 1..N in the accessors; x_1 is the delayed component.
class UnidirectionalSystem {
public:
    UnidirectionalSystem() = default;

    UnidirectionalSystem(std::vector<double> mu, std::vector<Nonlinearity> g, double tau)
        : mu_(std::move(mu)), g_(std::move(g)), tau_(tau) {
        if (mu_.empty()) throw ArgumentError("unidirectional system needs N >= 1");
        if (mu_.size() != g_.size()) throw ArgumentError("unidirectional system: mu and g differ in length");
        if (!(tau_ > 0.0) || !std::isfinite(tau_)) throw ArgumentError("unidirectional system: tau must be positive");
        for (double m : mu_)
            if (!(m >= 0.0) || !std::isfinite(m)) throw ArgumentError("unidirectional system: decay rates must be >= 0");
        for (const auto& g : g_) g.validate();
    }

    std::size_t size() const { return mu_.size(); }
    double tau() const { return tau_; }
    const std::vector<double>& mu() const { return mu_; }
    const std::vector<Nonlinearity>& g() const { return g_; }

    /// All g_j(0) = 0.
    bool zero_centered() const {
        return std::all_of(g_.begin(), g_.end(), [](const Nonlinearity& f) { return f.value(0.0) == 0.0; });
    }

    /// Total feedback strength K = |prod g_j'(0)|.
    double loop_gain() const {
        double k = 1.0;
        for (const auto& f : g_) k *= f.derivative(0.0);
        return std::abs(k);
    }

    /// The same system with g_N's gain rescaled so that loop_gain() == K.
    UnidirectionalSystem with_loop_gain(double K) const {
        const double k0 = loop_gain();
        if (!(k0 > 0.0)) throw ArgumentError("with_loop_gain: current loop gain is zero");
        auto g = g_;
        g.back().gain *= K / k0;
        return UnidirectionalSystem(mu_, std::move(g), tau_);
    }

    CyclicSystem to_cyclic() const {
        std::vector<CyclicComponent> comps;
        comps.reserve(mu_.size());
        for (std::size_t j = 0; j < mu_.size(); ++j) comps.push_back({mu_[j], std::nullopt, g_[j]});
        return CyclicSystem(std::move(comps), tau_);
    }

private:
    std::vector<double> mu_;
    std::vector<Nonlinearity> g_;
    double tau_ = 1.0;
};

enum class HillKind { increasing, decreasing };

/// Cyclic gene regulatory loop with n mRNA/protein pairs:
///   r_i' = -a_i r_i + beta_i f_i(p_{i-1}(t - tau_p[i])),
///   p_i' = -b_i p_i + c_i r_i(t - tau_r[i]),     index i mod n (p_0 = p_n).
/// Vectors are 0-based: entry i-1 holds the parameter with index i.
struct GeneNetwork {
    std::vector<double> a, b, beta, c, nu;
    std::vector<HillKind> f_kind;
    std::vector<double> tau_p;  // delay of p_{i-1} in the r_i equation
    std::vector<double> tau_r;  // delay of r_i in the p_i equation

    std::size_t size() const { return a.size(); }

    double total_delay() const {
        double T = 0.0;
        for (std::size_t i = 0; i < size(); ++i) T += tau_p[i] + tau_r[i];
        return T;
    }

    double max_delay() const {
        double m = 0.0;
        for (std::size_t i = 0; i < size(); ++i) m = std::max({m, tau_p[i], tau_r[i]});
        return m;
    }

    std::size_t decreasing_count() const {
        return static_cast<std::size_t>(std::count(f_kind.begin(), f_kind.end(), HillKind::decreasing));
    }

    void validate() const {
        const std::size_t n = size();
        if (n == 0) throw ArgumentError("gene network needs n >= 1");
        for (const auto* v : {&b, &beta, &c, &nu, &tau_p, &tau_r})
            if (v->size() != n) throw ArgumentError("gene network: parameter vectors differ in length");
        if (f_kind.size() != n) throw ArgumentError("gene network: f_kind has wrong length");
        for (std::size_t i = 0; i < n; ++i) {
            for (double v : {a[i], b[i], beta[i], c[i]})
                if (!(v > 0.0) || !std::isfinite(v)) throw ArgumentError("gene network: rates must be positive");
            if (!(nu[i] >= 1.0) || !std::isfinite(nu[i])) throw ArgumentError("gene network: Hill exponents must be >= 1");
            if (!(tau_p[i] >= 0.0) || !(tau_r[i] >= 0.0) || !std::isfinite(tau_p[i]) || !std::isfinite(tau_r[i]))
                throw ArgumentError("gene network: delays must be >= 0");
        }
        if (decreasing_count() % 2 == 0)
            throw ArgumentError("gene network: the number of decreasing f_i must be odd (negative loop feedback)");
        if (!(total_delay() > 0.0)) throw ArgumentError("gene network: total loop delay must be positive");
    }
};

}  // namespace cycdde
