#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "cycdde/error.hpp"
#include "cycdde/integrator.hpp"
#include "cycdde/nonlinearity.hpp"
#include "cycdde/state.hpp"
#include "cycdde/steady.hpp"
#include "cycdde/system.hpp"

namespace cycdde {

/// Hill function on x >= 0: x^nu/(1+x^nu) or 1/(1+x^nu).
inline double hill(double x, double nu, HillKind kind) {
    if (!(x >= 0.0)) throw DomainError("hill: argument must be nonnegative");
    if (!(nu >= 1.0)) throw ArgumentError("hill: exponent must satisfy nu >= 1");
    const double up = detail::hill_up(x, nu);
    return kind == HillKind::increasing ? up : 1.0 - up;
}

inline double hill_derivative(double x, double nu, HillKind kind) {
    if (!(x >= 0.0)) throw DomainError("hill_derivative: argument must be nonnegative");
    if (!(nu >= 1.0)) throw ArgumentError("hill_derivative: exponent must satisfy nu >= 1");
    const double d = detail::hill_up_derivative(x, nu);
    return kind == HillKind::increasing ? d : -d;
}

/// Which gene variable a component of the transformed loop stands for.
struct GeneVariable {
    bool protein = true;    // p_i if true, r_i otherwise
    std::size_t index = 1;  // i in 1..n
    /// Column in the r1, p1, ..., rn, pn ordering.
    std::size_t column() const { return 2 * (index - 1) + (protein ? 1 : 0); }
};

/// The gene network rewritten as a zero-centered unidirectional loop with tau = 1.
/// Component k (1-based) is x_k(s) = sign_k * (X_k(T s - time_shift_k) - X*_k).
struct GeneTransform {
    UnidirectionalSystem system;
    double total_delay = 0.0;
    double K = 0.0;
    GeneEquilibrium equilibrium;
    std::vector<double> shift;           // X*_k
    std::vector<int> signs;              // sign_k
    std::vector<double> time_shifts;     // time_shift_k
    std::vector<GeneVariable> variables;

    std::size_t size() const { return signs.size(); }

    /// Gene-coordinate value of component k (0-based) with transformed value y.
    double to_gene(std::size_t k, double y) const { return signs[k] * y + shift[k]; }
    double from_gene(std::size_t k, double value) const { return signs[k] * (value - shift[k]); }
    /// Gene time at which component k is observed at transformed time s.
    double gene_time(std::size_t k, double s) const { return total_delay * s - time_shifts[k]; }

    /// Transformed state at time s0 read off a gene trajectory.
    SystemState state_from_gene(const GeneTrajectory& gt, double s0, std::size_t m) const {
        const GeneVariable v0 = variables[0];
        std::vector<double> tail;
        for (std::size_t k = 1; k < size(); ++k)
            tail.push_back(from_gene(k, gt.value(variables[k].column(), gene_time(k, s0))));
        return SystemState::from_function(
            1.0, m, [&](double th) { return from_gene(0, gt.value(v0.column(), gene_time(0, s0 + th))); },
            [&](double th) {
                return signs[0] * total_delay * gt.record().interpolate_derivative(v0.column(), gene_time(0, s0 + th));
            },
            std::move(tail));
    }
};

/// Chain x_1 = p_n, x_2 = r_n, x_3 = p_{n-1}, ..., x_{2n} = r_1, closed by r_1's dependence on
/// p_n; time rescaled by the total loop delay T and each variable shifted by its position in
/// the loop.
inline GeneTransform to_unidirectional(const GeneNetwork& net) {
    if (net.size() > 0 && net.f_kind.size() == net.size() && net.decreasing_count() % 2 == 0)
        throw ArgumentError("inconsistent parity: the number of decreasing f_i is even");
    net.validate();
    const std::size_t n = net.size();
    const std::size_t N = 2 * n;
    const double T = net.total_delay();
    GeneTransform tr;
    tr.total_delay = T;
    tr.equilibrium = equilibrium_gene(net);
    tr.signs.assign(N + 1, 1);
    tr.shift.assign(N, 0.0);
    tr.time_shifts.assign(N + 1, 0.0);
    tr.variables.resize(N);
    auto fsign = [&](std::size_t i0) { return net.f_kind[i0] == HillKind::increasing ? 1 : -1; };
    for (std::size_t j = 1; j <= n; ++j) {
        const std::size_t i0 = n - j;  // 0-based index of i = n + 1 - j
        const std::size_t odd = 2 * j - 2, even = 2 * j - 1;
        tr.variables[odd] = {true, i0 + 1};
        tr.variables[even] = {false, i0 + 1};
        tr.shift[odd] = tr.equilibrium.p[i0];
        tr.shift[even] = tr.equilibrium.r[i0];
        tr.signs[even] = tr.signs[odd];
        tr.signs[even + 1] = tr.signs[even] * fsign(i0);
        tr.time_shifts[even] = tr.time_shifts[odd] + net.tau_r[i0];
        tr.time_shifts[even + 1] = tr.time_shifts[even] + net.tau_p[i0];
    }
    // the sign propagated once around the loop must come back reversed
    if (tr.signs[N] != -1) throw ArgumentError("inconsistent parity: loop sign is not negative");
    std::vector<double> mu(N);
    std::vector<Nonlinearity> g(N);
    double K = std::pow(T, static_cast<double>(N));
    for (std::size_t j = 1; j <= n; ++j) {
        const std::size_t i0 = n - j;
        const std::size_t odd = 2 * j - 2, even = 2 * j - 1;
        const std::size_t prev0 = (i0 + n - 1) % n;  // index of p_{i-1}
        const double pstar = tr.equilibrium.p[prev0];
        mu[odd] = T * net.b[i0];
        mu[even] = T * net.a[i0];
        g[odd] = Nonlinearity::linear(T * net.c[i0]);
        const double gain = static_cast<double>(tr.signs[even] * fsign(i0)) * T * net.beta[i0];
        const double slope = (even + 1 == N) ? 1.0 : static_cast<double>(tr.signs[even + 1]);
        g[even] = Nonlinearity::shifted_hill(gain, net.nu[i0], slope, pstar);
        K *= net.c[i0] * net.beta[i0] * std::abs(hill_derivative(pstar, net.nu[i0], net.f_kind[i0]));
    }
    tr.signs.pop_back();
    tr.time_shifts.pop_back();
    tr.K = K;
    tr.system = UnidirectionalSystem(std::move(mu), std::move(g), 1.0);
    return tr;
}

/// Symmetric three-gene repression loop with unit decay rates and the total delay split evenly.
inline GeneNetwork repressilator_preset(double T, double nu = 2.0, double beta = 1.0, double c = 1.0) {
    if (!(T > 0.0)) throw ArgumentError("repressilator: total delay must be positive");
    GeneNetwork net;
    net.a = {1.0, 1.0, 1.0};
    net.b = {1.0, 1.0, 1.0};
    net.c = {c, c, c};
    net.beta = {beta, beta, beta};
    net.nu = {nu, nu, nu};
    net.f_kind = {HillKind::decreasing, HillKind::decreasing, HillKind::decreasing};
    net.tau_p.assign(3, T / 6.0);
    net.tau_r.assign(3, T / 6.0);
    net.validate();
    return net;
}

/// Upper end of the forward invariant attracting interval of a gene variable:
/// r_i < beta_i / a_i and p_i < (c_i / b_i)(beta_i / a_i).
inline double gene_upper_bound(const GeneNetwork& net, std::size_t column) {
    const std::size_t i0 = column / 2;
    const double rmax = net.beta[i0] / net.a[i0];
    return (column % 2 == 0) ? rmax : net.c[i0] / net.b[i0] * rmax;
}

inline bool within_gene_bounds(const GeneNetwork& net, std::size_t column, double value, double slack = 0.0) {
    const double upper = gene_upper_bound(net, column);
    return value > -slack && value < upper + slack;
}

}  // namespace cycdde
