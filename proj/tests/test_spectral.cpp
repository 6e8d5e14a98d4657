#include <cmath>
#include <numbers>

#include "catch_amalgamated.hpp"
#include "cycdde/cycdde.hpp"
#include "support/random_systems.hpp"

using namespace cycdde;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kOmega1Unit = 2.02875783811043422;  // mpmath findroot, 30 digits
constexpr double kKuUnit = 2.26182633411465144;
constexpr double kOmega1Triple = 0.916318509645042628;
constexpr double kKuTriple = 2.49516418680134963;
constexpr double kKc41 = 0.294123012040637425;
constexpr double kLambda41 = -1.69722436226800535;

bool has_negative_real_root(const std::vector<double>& mu, double K, double tau) {
    const double reach = *std::max_element(mu.begin(), mu.end()) + 4.0 * static_cast<double>(mu.size()) / tau + 2.0;
    const auto rep = find_roots(CharFunction::unidirectional(mu, K, tau), Window{-reach, 0.5, -0.5, 0.5});
    return std::any_of(rep.roots.begin(), rep.roots.end(),
                       [](const Root& r) { return r.value.imag() == 0.0 && r.value.real() < 0.0; });
}

}  // namespace

TEST_CASE("char_eval closed-form values", "[spectral]") {
    const auto cf = CharFunction::unidirectional({2.0, 3.0, 0.5}, 1.7, 1.3);
    CHECK_THAT(std::abs(char_eval(cf, 0.0).first - cplx(3.0 + 1.7)), WithinAbs(0.0, 1e-14));

    const auto one = CharFunction::unidirectional({1.0}, 1.0, 1.0);
    const cplx at = char_eval(one, cplx(0.0, std::numbers::pi)).first;
    CHECK_THAT(at.real(), WithinAbs(0.0, 1e-14));
    CHECK_THAT(at.imag(), WithinAbs(std::numbers::pi, 1e-14));

    for (std::size_t N : {0u, 1u, 2u, 4u})
        for (int J : {1, 3, 5}) {
            const auto ms = model_system(N, J);
            const auto gcf = CharFunction::of(ms.system);
            const cplx z(0.0, ms.omega);
            CHECK(std::abs(char_eval(gcf, z).first) <= 1e-10 * gcf.scale(z));
        }
}

TEST_CASE("char_eval derivative matches finite differences", "[spectral]") {
    testing::Rng rng(5);
    const auto uni = testing::random_unidirectional(rng, 4);
    const auto gen = testing::random_cyclic(rng, 3);
    for (const auto& cf : {CharFunction::of(uni), CharFunction::of(gen)})
        for (cplx z : {cplx(0.3, 0.7), cplx(-1.1, 2.5), cplx(0.0, 6.0)}) {
            const double h = 1e-6;
            const cplx fd = (char_eval(cf, z + h).first - char_eval(cf, z - h).first) / (2.0 * h);
            const cplx d = char_eval(cf, z).second;
            CHECK(std::abs(d - fd) <= 1e-6 * std::max(1.0, std::abs(d)));
        }
}

TEST_CASE("general variant of a unidirectional loop agrees with the product form", "[spectral]") {
    testing::Rng rng(11);
    for (int k = 0; k < 10; ++k) {
        const auto sys = testing::random_unidirectional(rng, 4);
        const auto a = CharFunction::of(sys), b = CharFunction::of(sys.to_cyclic());
        for (cplx z : {cplx(0.2, 1.0), cplx(-0.7, 3.0)}) {
            const cplx va = char_eval(a, z).first, vb = char_eval(b, z).first;
            CHECK(std::abs(va - vb) <= 1e-10 * a.scale(z));
        }
    }
}

TEST_CASE("roots of the scalar equation at K_u sit on the imaginary axis", "[spectral]") {
    const std::vector<double> mu{1.0};
    const auto rep = find_roots(CharFunction::unidirectional(mu, K_u(mu, 1.0), 1.0), Window{-0.5, 0.5, -5.0, 5.0});
    REQUIRE(rep.roots.size() == 2);
    for (const auto& r : rep.roots) {
        CHECK_THAT(r.value.real(), WithinAbs(0.0, 1e-10));
        CHECK_THAT(std::abs(r.value.imag()), WithinAbs(kOmega1Unit, 1e-9));
    }
    const auto cf = CharFunction::unidirectional(mu, kKuUnit, 1.0);
    CHECK(std::abs(char_eval(cf, cplx(0.0, kOmega1Unit)).first) <= 1e-8);
}

TEST_CASE("zero loop gain leaves the decay rates", "[spectral]") {
    const std::vector<double> mu{0.5, 1.5, 3.0};
    const auto rep = find_roots(CharFunction::unidirectional(mu, 0.0, 1.0), Window{-4.0, 1.0, -1.0, 1.0});
    REQUIRE(rep.roots.size() == 3);
    CHECK_THAT(rep.roots[0].value.real(), WithinAbs(-0.5, 1e-12));
    CHECK_THAT(rep.roots[1].value.real(), WithinAbs(-1.5, 1e-12));
    CHECK_THAT(rep.roots[2].value.real(), WithinAbs(-3.0, 1e-12));
    for (const auto& r : rep.roots) CHECK(r.value.imag() == 0.0);
    CHECK(rep.sigma == std::vector<double>{rep.roots[0].value.real(), rep.roots[1].value.real(), rep.roots[2].value.real()});
}

TEST_CASE("model window contains the eigenmode frequency", "[spectral]") {
    for (int J : {1, 3}) {
        const auto ms = model_system(2, J);
        const auto rep = find_roots(CharFunction::of(ms.system), Window{-1.0, 1.0, 0.0, 4.0 * std::numbers::pi});
        const bool found = std::any_of(rep.roots.begin(), rep.roots.end(), [&](const Root& r) {
            return std::abs(r.value - cplx(0.0, ms.omega)) <= 1e-9;
        });
        CAPTURE(J);
        CHECK(found);
    }
    const auto ms = model_system(2, 3);
    const auto rep = find_roots(CharFunction::of(ms.system), Window{-1.0, 1.0, 0.0, 4.0 * std::numbers::pi});
    CHECK(std::any_of(rep.roots.begin(), rep.roots.end(),
                      [](const Root& r) { return std::abs(r.value.imag() - 7.85398) < 1e-5; }));
}

TEST_CASE("roots are closed under conjugation and counts partition", "[spectral][property]") {
    testing::Rng rng(23);
    for (int k = 0; k < 15; ++k) {
        const auto sys = k % 2 ? testing::random_unidirectional(rng).to_cyclic() : testing::random_cyclic(rng);
        const auto cf = CharFunction::of(sys);
        const Window w{-2.0, 3.0, -12.0, 12.0};
        const auto full = find_roots(cf, w);
        int with_mult = 0;
        for (const auto& r : full.roots) {
            with_mult += r.multiplicity;
            const cplx c = std::conj(r.value);
            CHECK(std::abs(char_eval(cf, c).first) <= 1e-9 * cf.scale(c));
            if (r.value.imag() > 0.0) {
                const bool mirrored = std::any_of(full.roots.begin(), full.roots.end(), [&](const Root& q) {
                    return std::abs(q.value - c) <= 1e-8 * std::max(1.0, std::abs(c));
                });
                CHECK(mirrored);
            }
        }
        CHECK(with_mult == full.winding_count);

        const double cut_re = 0.37, cut_im = 1.93;
        int parts = 0;
        for (const Window& sub : {Window{w.re_lo, cut_re, w.im_lo, cut_im}, Window{cut_re, w.re_hi, w.im_lo, cut_im},
                                  Window{w.re_lo, cut_re, cut_im, w.im_hi}, Window{cut_re, w.re_hi, cut_im, w.im_hi}})
            parts += find_roots(cf, sub).winding_count;
        CHECK(parts == full.winding_count);
    }
}

TEST_CASE("omega1 and K_u", "[spectral]") {
    CHECK_THAT(omega1({1.0}, 1.0), WithinAbs(kOmega1Unit, 1e-12));
    CHECK_THAT(K_u({1.0}, 1.0), WithinAbs(kKuUnit, 1e-11));
    CHECK_THAT(K_u({1.0}, 1.0), WithinAbs(2.2617, 5e-4));
    CHECK_THAT(omega1({1.0, 1.0, 1.0}, 1.0), WithinAbs(kOmega1Triple, 1e-12));
    CHECK_THAT(omega1({1.0, 1.0, 1.0}, 1.0), WithinAbs(0.9166, 5e-4));
    CHECK_THAT(K_u({1.0, 1.0, 1.0}, 1.0), WithinAbs(kKuTriple, 1e-11));
    CHECK(K_u({5.0, 5.0, 5.0}, 1.0) > 125.0);

    testing::Rng rng(3);
    for (int k = 0; k < 200; ++k) {
        std::vector<double> mu(1 + k % 5);
        double prod = 1.0;
        for (auto& m : mu) prod *= (m = testing::uniform(rng, 0.01, 10.0));
        const double tau = testing::uniform(rng, 0.05, 10.0);
        const double w = omega1(mu, tau);
        double res = std::numbers::pi - w * tau;
        for (double m : mu) res -= std::atan(w / m);
        REQUIRE(std::abs(res) <= 1e-10);
        REQUIRE(w > 0.0);
        REQUIRE(w < std::numbers::pi / tau);
        REQUIRE(K_u(mu, tau) > prod);
    }
    CHECK_THROWS_AS(omega1({}, 1.0), ArgumentError);
    CHECK_THROWS_AS(omega1({1.0}, 0.0), ArgumentError);
}

TEST_CASE("K_c closed forms", "[spectral]") {
    CHECK_THAT(K_c({1.0}, 1.0), WithinAbs(std::exp(-2.0), 1e-12));
    for (double mu : {0.3, 2.0})
        for (double tau : {0.5, 1.7}) CHECK_THAT(K_c({mu}, tau), WithinRel(std::exp(-1.0) / (tau * std::exp(mu * tau)), 1e-10));
    CHECK(K_c({2.0, 2.0}, 1.0) == 0.0);
    CHECK_THAT(K_c({4.0, 1.0}, 1.0), WithinAbs(kKc41, 1e-10));
    CHECK_THAT(K_c({4.0, 1.0}, 1.0), WithinAbs(0.2941, 1e-4));
    CHECK_THAT(K_c_two(4.0, 1.0, 1.0), WithinAbs(kKc41, 1e-12));
    const double p = (kLambda41 + 4.0) * (kLambda41 + 1.0);
    CHECK_THAT(-p * std::exp(kLambda41), WithinAbs(kKc41, 1e-12));
    CHECK_THAT(K_c({0.01, 0.01, 0.01}, 1.0), WithinRel(27.0 * std::exp(-3.01), 1e-10));

    for (double m1 : {0.1, 0.7, 2.0, 5.0})
        for (double m2 : {0.2, 1.3, 4.0})
            for (double tau : {0.3, 1.0, 2.5}) {
                if (m1 == m2) continue;
                CHECK_THAT(K_c({m1, m2}, tau), WithinRel(K_c_two(m1, m2, tau), 1e-8));
            }
}

TEST_CASE("verify_a1 examples", "[spectral]") {
    const std::vector<double> mu{1.0, 2.0};
    const double ku = K_u(mu, 1.0);
    const auto above = verify_a1(CharFunction::unidirectional(mu, 1.01 * ku, 1.0));
    CHECK(above.holds);
    CHECK(above.sigma0 > 0.0);
    CHECK(above.sigma0 < 0.05);
    CHECK(above.omega > 0.0);
    REQUIRE(above.spectrum.K_u);
    CHECK_THAT(*above.spectrum.K_u, WithinAbs(ku, 1e-14));

    const auto below = verify_a1(CharFunction::unidirectional(mu, 0.99 * ku, 1.0));
    CHECK_FALSE(below.holds);
    CHECK(below.sigma0 < 0.0);
    CHECK_FALSE(below.reason.empty());

    const std::vector<double> small{0.01, 0.01, 0.01};
    const double ku3 = K_u(small, 1.0), kc3 = K_c(small, 1.0);
    REQUIRE(ku3 < kc3);
    const double K = 0.5 * kc3;
    const auto mixed = verify_a1(CharFunction::unidirectional(small, K, 1.0), 8.0);
    CHECK(mixed.holds);
    CHECK(std::any_of(mixed.spectrum.roots.begin(), mixed.spectrum.roots.end(),
                      [](const Root& r) { return r.value.imag() == 0.0 && r.value.real() < 0.0; }));
    CHECK(has_negative_real_root(small, K, 1.0));

    const auto real_lead = verify_a1(CharFunction::unidirectional({1.0}, 0.0, 1.0));
    CHECK_FALSE(real_lead.holds);
}

TEST_CASE("borders separate stability and real roots", "[spectral][property]") {
    testing::Rng rng(101);
    std::size_t checked_kc = 0;
    for (int k = 0; k < 100; ++k) {
        std::vector<double> mu(1 + k % 3);
        for (auto& m : mu) m = testing::uniform(rng, 0.2, 3.0);
        const double tau = testing::uniform(rng, 0.3, 3.0);
        const double ku = K_u(mu, tau);
        CAPTURE(k, tau);
        const auto lo = verify_a1(CharFunction::unidirectional(mu, 0.999 * ku, tau));
        const auto hi = verify_a1(CharFunction::unidirectional(mu, 1.001 * ku, tau));
        REQUIRE(lo.spectrum.leading);
        REQUIRE(hi.spectrum.leading);
        CHECK(lo.sigma0 < 0.0);
        CHECK(hi.sigma0 > 0.0);

        const double kc = K_c(mu, tau);
        if (kc > 1e-6) {
            ++checked_kc;
            CHECK(has_negative_real_root(mu, 0.999 * kc, tau));
            CHECK_FALSE(has_negative_real_root(mu, 1.001 * kc, tau));
        }
    }
    CHECK(checked_kc > 50);
}

TEST_CASE("oscillation border lies below the stability border for N = 1, 2", "[spectral][property]") {
    testing::Rng rng(500);
    for (int k = 0; k < 500; ++k) {
        std::vector<double> mu(1 + k % 2);
        for (auto& m : mu) m = testing::uniform(rng, 0.01, 10.0);
        const double tau = testing::uniform(rng, 0.01, 10.0);
        REQUIRE(K_c(mu, tau) < K_u(mu, tau));
    }
    CHECK(K_c({5.0, 5.0, 5.0}, 1.0) < K_u({5.0, 5.0, 5.0}, 1.0));
    CHECK(K_c({0.01, 0.01, 0.01}, 1.0) > K_u({0.01, 0.01, 0.01}, 1.0));
}

TEST_CASE("plane coordinates of eigenfunctions", "[spectral]") {
    const auto ms = model_system(2, 3);
    const auto cf = CharFunction::of(ms.system);
    const auto a1 = verify_a1(cf);
    REQUIRE(a1.sigma0 > 0.0);
    const SpectralProjection proj(cf.linearization(), a1.lambda);
    for (std::size_t m : {256u, 512u}) {
        const auto re = plane_coordinates(proj.eigenfunction(m, false), proj);
        const auto im = plane_coordinates(proj.eigenfunction(m, true), proj);
        CHECK_THAT(re[0], WithinAbs(1.0, 1e-8));
        CHECK_THAT(re[1], WithinAbs(0.0, 1e-8));
        CHECK_THAT(im[0], WithinAbs(0.0, 1e-8));
        CHECK_THAT(im[1], WithinAbs(1.0, 1e-8));
    }
    const auto x3 = plane_coordinates(ms.exact_state(0.0, 512), proj);
    CHECK_THAT(x3[0], WithinAbs(0.0, 1e-6));
    CHECK_THAT(x3[1], WithinAbs(0.0, 1e-6));
    const auto x3b = plane_coordinates(ms.exact_state(0.4, 512), proj);
    CHECK(std::hypot(x3b[0], x3b[1]) <= 1e-6);

    const auto uni = testing::tanh_pair(3.0);
    const auto ucf = CharFunction::of(uni);
    const auto ua1 = verify_a1(ucf);
    const SpectralProjection up(ucf.linearization(), ua1.lambda);
    const auto c = plane_coordinates(up.eigenfunction(512, false, 2.5), up);
    CHECK_THAT(c[0], WithinAbs(2.5, 1e-8));
    CHECK_THAT(c[1], WithinAbs(0.0, 1e-8));
}

TEST_CASE("plane coordinates are linear", "[spectral][property]") {
    testing::Rng rng(77);
    const auto sys = testing::tanh_pair(2.0);
    const auto cf = CharFunction::of(sys);
    const SpectralProjection proj(cf.linearization(), verify_a1(cf).lambda);
    for (int k = 0; k < 50; ++k) {
        const auto x = testing::random_state(rng, 1.0, 1, 256), y = testing::random_state(rng, 1.0, 1, 256);
        const double a = testing::uniform(rng, -3.0, 3.0), b = testing::uniform(rng, -3.0, 3.0);
        const auto cx = plane_coordinates(x, proj), cy = plane_coordinates(y, proj);
        const auto cz = plane_coordinates(a * x + b * y, proj);
        for (int i = 0; i < 2; ++i) REQUIRE(std::abs(cz[i] - (a * cx[i] + b * cy[i])) <= 1e-10);
    }
}

TEST_CASE("projection does not vanish on sampled states with V = 1", "[spectral][property]") {
    testing::Rng rng(88);
    const auto sys = testing::tanh_pair(3.0);
    const auto cf = CharFunction::of(sys);
    const SpectralProjection proj(cf.linearization(), verify_a1(cf).lambda);
    std::size_t accepted = 0, small = 0;
    double smallest = std::numeric_limits<double>::infinity();
    while (accepted < 100) {
        auto st = testing::random_state(rng, 1.0, 1, 512);
        if (V(st).v != 1) continue;
        st = (1.0 / st.max_norm()) * st;
        ++accepted;
        const auto c = plane_coordinates(st, proj);
        const double r = std::hypot(c[0], c[1]);
        smallest = std::min(smallest, r);
        if (r <= 1e-6) ++small;
    }
    if (small > 0) WARN(small << " of 100 states with |pr| <= 1e-6");
    INFO("smallest |pr| = " << smallest);
    CHECK(accepted == 100);
}

TEST_CASE("projection needs a simple root", "[spectral]") {
    const auto cf = CharFunction::of(testing::tanh_pair(2.0));
    CHECK_THROWS_AS(SpectralProjection(cf.linearization(), cplx(0.3, 1.0)), NumericalError);
    const auto st = SystemState::constant(1.0, 16, 1.0, {1.0, 1.0});
    const SpectralProjection proj(cf.linearization(), verify_a1(cf).lambda);
    CHECK_THROWS_AS(plane_coordinates(st, proj), ArgumentError);
}

TEST_CASE("argument checks", "[spectral]") {
    CHECK_THROWS_AS(CharFunction::unidirectional({}, 1.0, 1.0), ArgumentError);
    CHECK_THROWS_AS(CharFunction::unidirectional({1.0}, -1.0, 1.0), ArgumentError);
    CHECK_THROWS_AS(CharFunction::unidirectional({1.0}, 1.0, 0.0), ArgumentError);
    CHECK_THROWS_AS(find_roots(CharFunction::unidirectional({1.0}, 1.0, 1.0), Window{1.0, 0.0, 0.0, 1.0}), ArgumentError);
    CHECK_THROWS_AS(K_c({}, 1.0), ArgumentError);
}
