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
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "cycdde/error.hpp"
#include "cycdde/quadrature.hpp"
#include "cycdde/state.hpp"
#include "cycdde/system.hpp"

namespace cycdde {

using cplx = std::complex<double>;

/// Closed rectangle re_lo <= Re z <= re_hi, im_lo <= Im z <= im_hi.
struct Window {
    double re_lo = -10.0;
    double re_hi = 2.0;
    double im_lo = 0.0;
    double im_hi = 50.0;

    bool contains(cplx z, double slack = 0.0) const {
        return z.real() >= re_lo - slack && z.real() <= re_hi + slack && z.imag() >= im_lo - slack &&
               z.imag() <= im_hi + slack;
    }
};

/// Characteristic function of the linearization at zero, either
///   prod_j (z + mu_j) + K exp(-z tau)                 (unidirectional loop)
/// or det(z I - A - B exp(-z tau))                      (general cyclic form).
class CharFunction {
public:
    static CharFunction unidirectional(std::vector<double> mu, double K, double tau) {
        if (mu.empty()) throw ArgumentError("char function: need at least one decay rate");
        if (!(tau > 0.0)) throw ArgumentError("char function: tau must be positive");
        if (!(K >= 0.0) || !std::isfinite(K)) throw ArgumentError("char function: K must be >= 0");
        CharFunction cf;
        cf.uni_ = true;
        cf.mu_ = std::move(mu);
        cf.K_ = K;
        cf.tau_ = tau;
        const std::size_t n = cf.mu_.size();
        cf.lin_.dim = n;
        cf.lin_.tau = tau;
        cf.lin_.A.assign(n * n, 0.0);
        cf.lin_.B.assign(n * n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            cf.lin_.A[j * n + j] = -cf.mu_[j];
            if (j + 1 < n) cf.lin_.A[j * n + j + 1] = 1.0;
        }
        cf.lin_.B[(n - 1) * n] = -K;
        return cf;
    }

    static CharFunction general(Linearization lin) {
        const std::size_t n = lin.dim;
        if (n == 0 || lin.A.size() != n * n || lin.B.size() != n * n)
            throw ArgumentError("char function: malformed linearization");
        for (std::size_t k = 0; k < n * n; ++k)
            if (lin.B[k] != 0.0 && k != (n - 1) * n)
                throw ArgumentError("char function: B may only couple the last row to x_0");
        if (!(lin.tau > 0.0)) throw ArgumentError("char function: tau must be positive");
        CharFunction cf;
        cf.uni_ = false;
        cf.tau_ = lin.tau;
        cf.lin_ = std::move(lin);
        return cf;
    }

    static CharFunction of(const UnidirectionalSystem& sys) {
        return unidirectional(sys.mu(), sys.loop_gain(), sys.tau());
    }
    static CharFunction of(const CyclicSystem& sys) { return general(sys.linearization()); }

    bool is_unidirectional() const { return uni_; }
    const std::vector<double>& mu() const { return mu_; }
    double K() const { return K_; }
    double tau() const { return tau_; }
    std::size_t order() const { return lin_.dim; }
    /// Linearization whose characteristic function is this one.
    const Linearization& linearization() const { return lin_; }

    /// chi(z) and chi'(z).
    std::pair<cplx, cplx> eval(cplx z) const {
        const cplx e = std::exp(-z * tau_);
        if (uni_) {
            cplx p = 1.0, dp = 0.0;
            for (double m : mu_) {
                dp = dp * (z + m) + p;
                p *= (z + m);
            }
            return {p + K_ * e, dp - K_ * tau_ * e};
        }
        const std::size_t n = lin_.dim;
        Eigen::MatrixXcd M(n, n), D = Eigen::MatrixXcd::Identity(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                M(i, j) = (i == j ? z : cplx(0.0)) - lin_.a(i, j) - lin_.b(i, j) * e;
        D(n - 1, 0) += tau_ * lin_.delayed_gain() * e;
        const cplx det = M.partialPivLu().determinant();
        cplx ddet = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            Eigen::MatrixXcd Mj = M;
            Mj.col(j) = D.col(j);
            ddet += Mj.partialPivLu().determinant();
        }
        return {det, ddet};
    }

    /// Magnitude scale of the terms of chi at z, used for relative residuals.
    double scale(cplx z) const {
        const double e = std::exp(-z.real() * tau_);
        if (uni_) {
            double p = 1.0;
            for (double m : mu_) p *= std::abs(z + m);
            return std::max(p + K_ * e, std::numeric_limits<double>::min());
        }
        double s = 1.0;
        for (std::size_t i = 0; i < lin_.dim; ++i) {
            double row = std::abs(z);
            for (std::size_t j = 0; j < lin_.dim; ++j) row += std::abs(lin_.a(i, j)) + std::abs(lin_.b(i, j)) * e;
            s *= row;
        }
        return std::max(s, std::numeric_limits<double>::min());
    }

    /// Every root with Re z >= -margin satisfies |z| <= bound(margin).
    double bound(double margin) const {
        if (uni_) {
            const double mmax = *std::max_element(mu_.begin(), mu_.end());
            return mmax + std::pow(K_ * std::exp(margin * tau_), 1.0 / static_cast<double>(mu_.size())) + 1.0;
        }
        double na = 0.0, nb = 0.0;
        for (std::size_t i = 0; i < lin_.dim; ++i) {
            double ra = 0.0, rb = 0.0;
            for (std::size_t j = 0; j < lin_.dim; ++j) {
                ra += std::abs(lin_.a(i, j));
                rb += std::abs(lin_.b(i, j));
            }
            na = std::max(na, ra);
            nb = std::max(nb, rb);
        }
        return na + nb * std::exp(margin * tau_) + 1.0;
    }

private:
    bool uni_ = true;
    std::vector<double> mu_;
    double K_ = 0.0;
    double tau_ = 1.0;
    Linearization lin_;
};

inline std::pair<cplx, cplx> char_eval(const CharFunction& cf, cplx z) { return cf.eval(z); }

struct Root {
    cplx value;
    int multiplicity = 1;
    double residual = 0.0;
    bool merged = false;
};

struct LeadingInfo {
    cplx lambda;
    bool complex_pair = false;
};

struct SpectrumReport {
    Window window;
    std::vector<Root> roots;    // sorted by real part descending, then imaginary part descending
    std::vector<double> sigma;  // real parts with multiplicity, descending
    int winding_count = 0;
    std::optional<LeadingInfo> leading;
    std::optional<double> K_u;
    std::optional<double> K_c;
    std::optional<double> omega1;
    bool a1_holds = false;
    std::string a1_reason;
};

namespace detail {

struct BoundaryHit {};

class ArgumentCounter {
public:
    explicit ArgumentCounter(const CharFunction& cf) : cf_(cf) {}

    cplx value(cplx z) const {
        const cplx v = cf_.eval(z).first;
        if (!(std::abs(v) > 1e-13 * cf_.scale(z)) || !std::isfinite(std::abs(v))) throw BoundaryHit{};
        return v;
    }

    /// Continuous change of arg chi along the segment a -> b.
    double arg_change(cplx a, cplx b, cplx fa, cplx fb, int depth = 0) const {
        const auto& gl = GaussLegendre<16>::instance();
        const cplx d = b - a;
        const cplx integral = d * gl.integrate01([&](double s) {
            const auto [f, df] = cf_.eval(a + s * d);
            if (!(std::abs(f) > 1e-13 * cf_.scale(a + s * d))) throw BoundaryHit{};
            return df / f;
        });
        const double principal = std::arg(fb / fa);
        if (std::abs(integral.imag() - principal) < 0.1) return principal;
        if (depth > 40) throw BoundaryHit{};
        const cplx mid = 0.5 * (a + b);
        const cplx fm = value(mid);
        return arg_change(a, mid, fa, fm, depth + 1) + arg_change(mid, b, fm, fb, depth + 1);
    }

    /// Number of roots inside the rectangle [x0,x1] x [y0,y1], counted with multiplicity.
    int count(double x0, double x1, double y0, double y1) const {
        const cplx c[4] = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
        const double panel = 0.5 / std::max(1.0, cf_.tau());
        double total = 0.0;
        for (int e = 0; e < 4; ++e) {
            const cplx a = c[e], b = c[(e + 1) % 4];
            const int panels = std::clamp(static_cast<int>(std::ceil(std::abs(b - a) / panel)), 2, 256);
            cplx za = a, fa = value(a);
            for (int k = 1; k <= panels; ++k) {
                const cplx zb = a + (b - a) * (static_cast<double>(k) / panels);
                const cplx fb = value(zb);
                total += arg_change(za, zb, fa, fb);
                za = zb;
                fa = fb;
            }
        }
        const double w = total / (2.0 * std::numbers::pi);
        const double r = std::round(w);
        if (std::abs(w - r) > 1e-3 || r < 0.0) throw BoundaryHit{};
        return static_cast<int>(r);
    }

private:
    const CharFunction& cf_;
};

struct Rect {
    double x0, x1, y0, y1;
    cplx centre() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
    double size() const { return std::max(x1 - x0, y1 - y0); }
};

inline std::optional<cplx> newton(const CharFunction& cf, cplx z, double tol) {
    for (int it = 0; it < 80; ++it) {
        const auto [f, df] = cf.eval(z);
        if (f == cplx(0.0)) return z;
        if (df == cplx(0.0) || !std::isfinite(std::abs(df))) return std::nullopt;
        const cplx step = f / df;
        z -= step;
        if (!std::isfinite(std::abs(z))) return std::nullopt;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) {
            if (std::abs(cf.eval(z).first) <= std::max(tol, 1e-10) * cf.scale(z)) return z;
            return std::nullopt;
        }
    }
    const double res = std::abs(cf.eval(z).first) / cf.scale(z);
    if (res <= tol) return z;
    return std::nullopt;
}

inline void locate_roots(const CharFunction& cf, const ArgumentCounter& counter, const Rect& r, int count, double tol,
                         std::vector<Root>& out, int depth = 0) {
    if (count <= 0) return;
    const double size = r.size();
    if (count == 1) {
        if (auto z = newton(cf, r.centre(), tol)) {
            const double slack = 1e-9 * std::max(1.0, std::abs(*z));
            if (z->real() >= r.x0 - slack && z->real() <= r.x1 + slack && z->imag() >= r.y0 - slack &&
                z->imag() <= r.y1 + slack) {
                out.push_back({*z, 1, std::abs(cf.eval(*z).first) / cf.scale(*z), false});
                return;
            }
        }
    }
    if (size < 1e-10 * std::max(1.0, std::abs(r.centre())) || depth > 200) {
        cplx z = r.centre();
        if (auto zn = newton(cf, z, tol)) z = *zn;
        out.push_back({z, count, std::abs(cf.eval(z).first) / cf.scale(z), count > 1});
        return;
    }
    const bool split_x = (r.x1 - r.x0) >= (r.y1 - r.y0);
    for (double frac : {0.5123, 0.4871, 0.5379, 0.4617, 0.5731, 0.4243}) {
        Rect a = r, b = r;
        if (split_x) {
            const double xs = r.x0 + frac * (r.x1 - r.x0);
            a.x1 = xs;
            b.x0 = xs;
        } else {
            const double ys = r.y0 + frac * (r.y1 - r.y0);
            a.y1 = ys;
            b.y0 = ys;
        }
        int ca;
        try {
            ca = counter.count(a.x0, a.x1, a.y0, a.y1);
        } catch (const BoundaryHit&) {
            continue;
        }
        if (ca > count) continue;
        locate_roots(cf, counter, a, ca, tol, out, depth + 1);
        locate_roots(cf, counter, b, count - ca, tol, out, depth + 1);
        return;
    }
    throw NumericalError("find_roots: could not place a subdivision line away from the roots");
}

}  // namespace detail

/// Roots of chi in the window by argument-principle subdivision and Newton refinement.
/// Window edges passing through a root are pushed outward by a tiny amount.
inline SpectrumReport find_roots(const CharFunction& cf, const Window& window, double tol = 1e-12) {
    if (!(window.re_lo < window.re_hi) || !(window.im_lo < window.im_hi))
        throw ArgumentError("find_roots: empty window");
    detail::ArgumentCounter counter(cf);
    SpectrumReport rep;
    rep.window = window;
    const double span = std::max(window.re_hi - window.re_lo, window.im_hi - window.im_lo);
    detail::Rect r{window.re_lo, window.re_hi, window.im_lo, window.im_hi};
    int total = -1;
    for (int attempt = 0; attempt < 12 && total < 0; ++attempt) {
        const double d = attempt == 0 ? 0.0 : span * 1e-7 * std::pow(3.0, attempt);
        r = {window.re_lo - d, window.re_hi + d * 0.7, window.im_lo - d * 0.9, window.im_hi + d * 0.8};
        try {
            total = counter.count(r.x0, r.x1, r.y0, r.y1);
        } catch (const detail::BoundaryHit&) {
        }
    }
    if (total < 0) throw NumericalError("find_roots: window boundary could not be separated from the roots");
    rep.winding_count = total;
    std::vector<Root> found;
    detail::locate_roots(cf, counter, r, total, tol, found);

    for (auto& z : found)
        if (std::abs(z.value.imag()) <= 1e-10 * std::max(1.0, std::abs(z.value))) z.value.imag(0.0);
    std::sort(found.begin(), found.end(), [](const Root& a, const Root& b) {
        if (a.value.real() != b.value.real()) return a.value.real() > b.value.real();
        return a.value.imag() > b.value.imag();
    });
    for (const auto& z : found) {
        auto near = std::find_if(rep.roots.begin(), rep.roots.end(), [&](const Root& q) {
            return std::abs(q.value - z.value) <= 1e-8 * std::max(1.0, std::abs(z.value));
        });
        if (near != rep.roots.end()) {
            near->multiplicity += z.multiplicity;
            near->merged = true;
        } else {
            rep.roots.push_back(z);
        }
    }
    std::sort(rep.roots.begin(), rep.roots.end(), [](const Root& a, const Root& b) {
        if (a.value.real() != b.value.real()) return a.value.real() > b.value.real();
        return a.value.imag() > b.value.imag();
    });
    for (const auto& z : rep.roots)
        for (int k = 0; k < z.multiplicity; ++k) rep.sigma.push_back(z.value.real());
    if (!rep.roots.empty()) {
        // prefer the member of a conjugate pair with positive imaginary part
        const double top = rep.roots.front().value.real();
        cplx lead = rep.roots.front().value;
        for (const auto& z : rep.roots)
            if (std::abs(z.value.real() - top) <= 1e-9 * std::max(1.0, std::abs(top)) && z.value.imag() > lead.imag())
                lead = z.value;
        rep.leading = LeadingInfo{lead, lead.imag() != 0.0};
    }
    return rep;
}

/// Unique solution of pi - omega tau = sum_j arctan(omega / mu_j) on (0, pi / tau).
inline double omega1(const std::vector<double>& mu, double tau) {
    if (mu.empty() || !(tau > 0.0)) throw ArgumentError("omega1: need decay rates and tau > 0");
    for (double m : mu)
        if (!(m >= 0.0)) throw ArgumentError("omega1: decay rates must be nonnegative");
    auto F = [&](double w) {
        double s = std::numbers::pi - w * tau;
        for (double m : mu) s -= std::atan2(w, m);
        return s;
    };
    double lo = 0.0, hi = std::numbers::pi / tau;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (F(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Stability border K_u = prod_j sqrt(omega1^2 + mu_j^2).
inline double K_u(const std::vector<double>& mu, double tau) {
    const double w = omega1(mu, tau);
    double k = 1.0;
    for (double m : mu) k *= std::hypot(w, m);
    return k;
}

namespace detail {

inline double char_poly(const std::vector<double>& mu, double x) {
    double p = 1.0;
    for (double m : mu) p *= (x + m);
    return p;
}

inline double char_poly_derivative(const std::vector<double>& mu, double x) {
    double p = 1.0, dp = 0.0;
    for (double m : mu) {
        dp = dp * (x + m) + p;
        p *= (x + m);
    }
    return dp;
}

/// max of -p(x) e^{x tau} on [a, b] where p < 0, via sign scan of p' + tau p and bisection.
inline double max_on_interval(const std::vector<double>& mu, double tau, double a, double b) {
    auto h = [&](double x) { return -char_poly(mu, x) * std::exp(x * tau); };
    auto q = [&](double x) { return char_poly_derivative(mu, x) + tau * char_poly(mu, x); };
    constexpr int samples = 2048;
    double best = std::max({0.0, h(a), h(b)});
    double xp = a, qp = q(a);
    for (int k = 1; k <= samples; ++k) {
        const double x = a + (b - a) * static_cast<double>(k) / samples;
        const double qx = q(x);
        best = std::max(best, h(x));
        if ((qp < 0.0) != (qx < 0.0) || qx == 0.0) {
            double lo = xp, hi = x, qlo = qp;
            for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++it) {
                const double mid = 0.5 * (lo + hi);
                const double qm = q(mid);
                if ((qm < 0.0) == (qlo < 0.0)) {
                    lo = mid;
                    qlo = qm;
                } else {
                    hi = mid;
                }
            }
            best = std::max(best, h(0.5 * (lo + hi)));
        }
        xp = x;
        qp = qx;
    }
    return best;
}

}  // namespace detail

/// Oscillation border: sup over x <= 0 of max(0, -p(x) e^{x tau}), p(x) = prod_j (x + mu_j).
inline double K_c(const std::vector<double>& mu, double tau) {
    if (mu.empty() || !(tau > 0.0)) throw ArgumentError("K_c: need decay rates and tau > 0");
    for (double m : mu)
        if (!(m >= 0.0)) throw ArgumentError("K_c: decay rates must be nonnegative");
    std::vector<double> roots;
    for (double m : mu) roots.push_back(-m);
    std::sort(roots.begin(), roots.end());
    double best = 0.0;
    const std::size_t n = roots.size();
    // interval (roots[k], roots[k+1]) has n-1-k roots to its right
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (roots[k + 1] <= roots[k]) continue;
        if ((n - 1 - k) % 2 == 1) best = std::max(best, detail::max_on_interval(mu, tau, roots[k], roots[k + 1]));
    }
    if (n % 2 == 1) {
        // unbounded tail (-inf, roots[0]); truncate once the function is negligible
        auto h = [&](double x) { return -detail::char_poly(mu, x) * std::exp(x * tau); };
        double len = std::max(1.0, static_cast<double>(n) / tau);
        double tail_best = best;
        for (int it = 0; it < 60; ++it) {
            tail_best = std::max(tail_best, detail::max_on_interval(mu, tau, roots[0] - len, roots[0]));
            const double edge = h(roots[0] - len);
            if (edge < 1e-30 * tail_best && len * tau > static_cast<double>(n)) break;
            len *= 2.0;
        }
        best = std::max(best, tail_best);
    }
    return best;
}

/// Closed form of the oscillation border for N = 2.
inline double K_c_two(double mu1, double mu2, double tau) {
    const double r = std::sqrt(0.25 * (mu1 - mu2) * (mu1 - mu2) + 1.0 / (tau * tau));
    const double lambda = -0.5 * (mu1 + mu2) - 1.0 / tau + r;
    return 2.0 * std::exp(lambda * tau) / tau * (-1.0 / tau + r);
}

struct A1Report {
    bool holds = false;
    std::string reason;
    double sigma0 = 0.0;
    double omega = 0.0;
    double sigma_next = -std::numeric_limits<double>::infinity();
    cplx lambda;
    SpectrumReport spectrum;
};

/// Leading-pair check on all roots with Re >= -margin.
inline A1Report verify_a1(const CharFunction& cf, double margin = 1.0, double tol_gap = 1e-6) {
    const double R = cf.bound(margin);
    A1Report rep;
    rep.spectrum = find_roots(cf, Window{-margin, R, -R, R});
    const auto& roots = rep.spectrum.roots;
    if (roots.empty() || !rep.spectrum.leading) {
        rep.reason = "no roots with real part >= -margin";
        rep.spectrum.a1_reason = rep.reason;
        return rep;
    }
    const cplx lead = rep.spectrum.leading->lambda;
    rep.lambda = lead;
    rep.sigma0 = lead.real();
    rep.omega = std::abs(lead.imag());
    const double gap_tol = 1e-9 * std::max(1.0, std::abs(rep.sigma0));
    std::size_t at_top = 0;
    bool merged = false;
    for (const auto& z : roots) {
        if (std::abs(z.value.real() - rep.sigma0) <= gap_tol) {
            at_top += static_cast<std::size_t>(z.multiplicity);
            merged = merged || z.merged;
        } else if (z.value.real() < rep.sigma0) {
            rep.sigma_next = std::max(rep.sigma_next, z.value.real());
        }
    }
    if (lead.imag() == 0.0)
        rep.reason = "leading root is real";
    else if (merged)
        rep.reason = "leading root is multiple";
    else if (at_top != 2)
        rep.reason = "more than one pair attains the maximal real part";
    else if (!(rep.sigma0 > 0.0))
        rep.reason = "leading pair is not in the right half plane";
    else if (!(rep.sigma_next < rep.sigma0 - tol_gap))
        rep.reason = "no spectral gap after the leading pair";
    else
        rep.holds = true;
    rep.spectrum.a1_holds = rep.holds;
    rep.spectrum.a1_reason = rep.holds ? "" : rep.reason;
    if (cf.is_unidirectional()) {
        bool positive = std::all_of(cf.mu().begin(), cf.mu().end(), [](double m) { return m > 0.0; });
        if (positive) {
            rep.spectrum.omega1 = omega1(cf.mu(), cf.tau());
            rep.spectrum.K_u = K_u(cf.mu(), cf.tau());
            rep.spectrum.K_c = K_c(cf.mu(), cf.tau());
        }
    }
    return rep;
}

/// Spectral projection onto the real two-dimensional eigenspace of a simple root lambda of
/// x' = A x(t) + B x(t - tau), through the adjoint bilinear form.
class SpectralProjection {
public:
    SpectralProjection(const Linearization& lin, cplx lambda) : lin_(lin), lambda_(lambda) {
        const std::size_t n = lin.dim;
        const cplx e = std::exp(-lambda * lin.tau);
        Eigen::MatrixXcd D(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                D(i, j) = (i == j ? lambda : cplx(0.0)) - lin.a(i, j) - lin.b(i, j) * e;
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(D, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const auto& s = svd.singularValues();
        const double smax = std::max(s(0), 1e-300);
        const double tiny = 1e-8 * std::max(1.0, smax);
        const std::size_t deficient =
            static_cast<std::size_t>(std::count_if(s.data(), s.data() + s.size(), [&](double v) { return v <= tiny; }));
        if (deficient != 1)
            throw NumericalError("spectral projection: rank deficiency of the characteristic matrix is " +
                                 std::to_string(deficient) + ", expected 1");
        u_ = svd.matrixV().col(n - 1);
        Eigen::Index imax = 0;
        u_.cwiseAbs().maxCoeff(&imax);
        const cplx pivot = u_(imax);
        u_ /= pivot;  // largest component becomes 1
        v_ = svd.matrixU().col(n - 1).adjoint();
        Eigen::MatrixXcd Dp = Eigen::MatrixXcd::Identity(n, n);
        Dp(n - 1, 0) += lin.tau * lin.delayed_gain() * e;
        const cplx norm = (v_ * Dp * u_)(0, 0);
        if (std::abs(norm) < 1e-14) throw NumericalError("spectral projection: degenerate normalization");
        v_ /= norm;
    }

    cplx lambda() const { return lambda_; }
    const Eigen::VectorXcd& right() const { return u_; }
    const Eigen::RowVectorXcd& left() const { return v_; }
    const Linearization& linearization() const { return lin_; }

    /// Weights w_k with  integral part = sum_k w_k psi_0(theta_k)  on a grid of m intervals.
    std::vector<cplx> history_weights(std::size_t m) const {
        const double tau = lin_.tau;
        const auto w = simpson_weights(m, tau / static_cast<double>(m));
        const cplx factor = v_(static_cast<Eigen::Index>(lin_.dim - 1)) * lin_.delayed_gain();
        std::vector<cplx> out(m + 1);
        for (std::size_t k = 0; k <= m; ++k) {
            const double theta = SystemState::node_theta(tau, m, k);
            out[k] = factor * w[k] * std::exp(-lambda_ * (theta + tau));
        }
        return out;
    }

    /// c(psi) from sampled history values and the current vector (x_0(0), x_1, ..., x_N).
    cplx coefficient(std::span<const double> history, std::span<const double> current,
                     const std::vector<cplx>& weights) const {
        cplx c = 0.0;
        for (std::size_t i = 0; i < current.size(); ++i) c += v_(static_cast<Eigen::Index>(i)) * current[i];
        for (std::size_t k = 0; k < history.size(); ++k) c += weights[k] * history[k];
        return c;
    }

    cplx coefficient(const SystemState& psi) const {
        if (psi.tail_size() + 1 != lin_.dim) throw ArgumentError("plane_coordinates: state dimension mismatch");
        const auto w = history_weights(psi.resolution());
        const auto cur = psi.current();
        return coefficient(psi.history_values(), cur, w);
    }

    /// Coordinates of the projection in the basis {Re phi, Im phi}, phi(theta) = e^{lambda theta} u.
    std::array<double, 2> coordinates(const SystemState& psi) const {
        const cplx c = coefficient(psi);
        return {2.0 * c.real(), -2.0 * c.imag()};
    }

    /// Re or Im of the eigenfunction phi sampled on m intervals, times scale.
    SystemState eigenfunction(std::size_t m, bool imaginary_part = false, double scale = 1.0) const {
        const cplx u0 = u_(0);
        auto part = [&](cplx z) { return scale * (imaginary_part ? z.imag() : z.real()); };
        std::vector<double> tail;
        for (std::size_t j = 1; j < lin_.dim; ++j) tail.push_back(part(u_(static_cast<Eigen::Index>(j))));
        return SystemState::from_function(
            lin_.tau, m, [&](double th) { return part(std::exp(lambda_ * th) * u0); },
            [&](double th) { return part(lambda_ * std::exp(lambda_ * th) * u0); }, std::move(tail));
    }

private:
    Linearization lin_;
    cplx lambda_;
    Eigen::VectorXcd u_;
    Eigen::RowVectorXcd v_;
};

inline std::array<double, 2> plane_coordinates(const SystemState& psi, const SpectralProjection& proj) {
    return proj.coordinates(psi);
}

}  // namespace cycdde
