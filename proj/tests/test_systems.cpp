#include <cmath>
#include <limits>
#include <vector>

#include "catch_amalgamated.hpp"
#include "cycdde/cycdde.hpp"
#include "support/random_systems.hpp"

using namespace cycdde;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<double> log_grid() {
    std::vector<double> xs;
    for (int k = 0; k <= 240; ++k) {
        const double x = std::pow(10.0, -6.0 + 12.0 * k / 240.0);
        xs.push_back(x);
        xs.push_back(-x);
    }
    return xs;
}

std::vector<Nonlinearity> sample_kinds() {
    return {Nonlinearity::linear(2.0),
            Nonlinearity::linear(-0.5),
            Nonlinearity::tanh(1.5, 0.7),
            Nonlinearity::tanh(-1.0),
            Nonlinearity::hill_increasing(2.0, 3.0, 1.0, 0.5),
            Nonlinearity::hill_decreasing(1.0, 2.0, 1.0, 0.4),
            Nonlinearity::hill_increasing(1.0, 1.0),
            Nonlinearity::shifted_hill(1.5, 2.0, 1.0, 0.7),
            Nonlinearity::shifted_hill(-0.8, 4.0, -1.3, 1.1)};
}

// largest |u| at which the exact derivative is still a normal double, per kind
bool representable(const Nonlinearity& f, double x) {
    const double u = f.kind == NonlinearityKind::linear_gain ? 0.0 : f.slope * x + f.shift;
    if (f.kind == NonlinearityKind::tanh_sigmoid) return std::abs(u) < 300.0;
    if (f.is_hill()) return u != 0.0 && (f.nu + 1.0) * std::log(std::abs(u) + 1.0) < 650.0;
    return true;
}

}  // namespace

TEST_CASE("nonlinearity derivative keeps one sign on a log grid", "[systems][property]") {
    for (const auto& f : sample_kinds()) {
        const int s = f.monotonicity();
        for (double x : log_grid()) {
            const double d = f.derivative(x);
            INFO(to_string(f.kind) << " at x = " << x);
            REQUIRE(std::isfinite(d));
            CHECK(s * d >= 0.0);
            if (representable(f, x)) CHECK(s * d > 0.0);
        }
    }
}

TEST_CASE("linear and tanh kinds vanish at zero", "[systems]") {
    CHECK(Nonlinearity::linear(3.0).value(0.0) == 0.0);
    CHECK(Nonlinearity::tanh(-2.0, 5.0).value(0.0) == 0.0);
    CHECK(Nonlinearity::shifted_hill(1.0, 2.0, 1.0, 0.6).value(0.0) == 0.0);
}

TEST_CASE("hill kinds stay within gain times the unit interval on the gene range", "[systems]") {
    const auto up = Nonlinearity::hill_increasing(2.5, 2.0);
    const auto down = Nonlinearity::hill_decreasing(2.5, 3.0);
    for (double x = 0.0; x <= 1e4; x = x * 1.5 + 0.01) {
        CHECK(up.value(x) >= 0.0);
        CHECK(up.value(x) <= 2.5);
        CHECK(down.value(x) >= 0.0);
        CHECK(down.value(x) <= 2.5);
    }
    CHECK_THAT(up.value(1.0), WithinAbs(1.25, 1e-15));
    CHECK_THAT(down.value(0.0), WithinAbs(2.5, 1e-15));
}

TEST_CASE("nonlinearity limits match far-field values", "[systems]") {
    for (const auto& f : sample_kinds()) {
        if (!f.bounded()) continue;
        const auto [lo, hi] = f.limits();
        CHECK_THAT(f.value(-1e9), WithinAbs(lo, 1e-6));
        CHECK_THAT(f.value(1e9), WithinAbs(hi, 1e-6));
    }
}

TEST_CASE("nonlinearity parameters are validated", "[systems]") {
    CHECK_THROWS_AS(Nonlinearity::linear(0.0).validate(), ArgumentError);
    CHECK_THROWS_AS(Nonlinearity::hill_increasing(1.0, 0.5).validate(), ArgumentError);
    CHECK_THROWS_AS(Nonlinearity::tanh(1.0, 0.0).validate(), ArgumentError);
    CHECK_THROWS_AS(nonlinearity_kind_from_string("cubic"), ArgumentError);
    CHECK(nonlinearity_kind_from_string("shifted_hill") == NonlinearityKind::shifted_hill);
}

TEST_CASE("validate_feedback on unidirectional loops", "[systems]") {
    SECTION("tanh pair passes") {
        const auto rep = validate_feedback(testing::tanh_pair(1.0));
        CHECK(rep.pass);
        CHECK(rep.partials.size() == 2);
        CHECK(rep.partials[1].required == SignRequirement::negative);
        CHECK(rep.partials[1].max < 0.0);
    }
    SECTION("increasing g_N fails on the last component") {
        UnidirectionalSystem sys({1.0, 1.0}, {Nonlinearity::tanh(1.0), Nonlinearity::tanh(1.0)}, 1.0);
        const auto rep = validate_feedback(sys);
        CHECK_FALSE(rep.pass);
        CHECK(rep.partials[0].pass);
        CHECK_FALSE(rep.partials[1].pass);
        REQUIRE_FALSE(rep.diagnostics.empty());
        CHECK(rep.diagnostics[0].find("component 1") != std::string::npos);
    }
    SECTION("repressilator transform passes") {
        CHECK(validate_feedback(to_unidirectional(repressilator_preset(2.0)).system).pass);
    }
    SECTION("non-finite evaluation is reported with its point") {
        UnidirectionalSystem sys({1.0, 1.0}, {Nonlinearity::linear(1e305), Nonlinearity::tanh(-1.0)}, 1.0);
        const auto rep = validate_feedback(sys);
        CHECK_FALSE(rep.pass);
        REQUIRE_FALSE(rep.diagnostics.empty());
        CHECK(rep.diagnostics[0].find("non-finite") != std::string::npos);
    }
}

TEST_CASE("validate_feedback checks backward couplings of cyclic systems", "[systems]") {
    std::vector<CyclicComponent> comps(3);
    comps[0] = {1.0, std::nullopt, Nonlinearity::tanh(1.0)};
    comps[1] = {1.0, Nonlinearity::tanh(0.5), Nonlinearity::linear(1.0)};
    comps[2] = {1.0, Nonlinearity::tanh(0.5), Nonlinearity::tanh(-2.0)};
    CHECK(validate_feedback(CyclicSystem(comps, 1.0)).pass);
    comps[1].prev = Nonlinearity::tanh(-0.5);
    CHECK_FALSE(validate_feedback(CyclicSystem(comps, 1.0)).pass);
}

TEST_CASE("system constructors reject malformed input", "[systems]") {
    std::vector<CyclicComponent> comps(2);
    comps[0].prev = Nonlinearity::linear(1.0);
    CHECK_THROWS_AS(CyclicSystem(comps, 1.0), ArgumentError);
    CHECK_THROWS_AS(CyclicSystem({}, 1.0), ArgumentError);
    CHECK_THROWS_AS(UnidirectionalSystem({1.0}, {}, 1.0), ArgumentError);
    CHECK_THROWS_AS(UnidirectionalSystem({-1.0}, {Nonlinearity::tanh(-1.0)}, 1.0), ArgumentError);
    CHECK_THROWS_AS(UnidirectionalSystem({1.0}, {Nonlinearity::tanh(-1.0)}, 0.0), ArgumentError);
}

TEST_CASE("gene network invariants", "[systems]") {
    auto net = repressilator_preset(3.0);
    CHECK_NOTHROW(net.validate());
    CHECK(net.decreasing_count() == 3);
    CHECK_THAT(net.total_delay(), WithinAbs(3.0, 1e-15));
    net.f_kind[0] = HillKind::increasing;
    CHECK_THROWS_AS(net.validate(), ArgumentError);
    net = repressilator_preset(3.0);
    net.b[1] = 0.0;
    CHECK_THROWS_AS(net.validate(), ArgumentError);
}

TEST_CASE("state grid spans the delay interval and reproduces nodes", "[systems]") {
    const auto st = SystemState::from_function(
        2.0, 16, [](double th) { return std::sin(th); }, [](double th) { return std::cos(th); }, {0.5});
    CHECK(st.theta(0) == -2.0);
    CHECK(st.theta(16) == 0.0);
    for (std::size_t k = 0; k <= 16; ++k) CHECK(st.history(st.theta(k)) == st.history_values()[k]);
    CHECK_THAT(st.history(-0.3), WithinAbs(std::sin(-0.3), 1e-5));
    CHECK_THROWS_AS(st.history(0.5), DomainError);
    CHECK_THROWS_AS(SystemState(1.0, {1.0}, {0.0}, {}), ArgumentError);
}

TEST_CASE("difference coefficients of identical trajectories are the variational ones", "[systems]") {
    const auto sys = testing::tanh_pair(1.7).to_cyclic();
    testing::Rng rng(5);
    const auto x = integrate(sys, testing::random_state(rng, 1.0, 1, 64), 8.0, 64);
    for (double t : {1.0, 2.37, 5.0, 7.9}) {
        const auto d = difference_coefficients(x, x, sys, t);
        const auto v = variational_coefficients(x, t);
        for (std::size_t i = 0; i < d.size(); ++i) {
            CHECK_THAT(d[i].a, WithinAbs(v[i].a, 1e-10));
            CHECK_THAT(d[i].b, WithinAbs(v[i].b, 1e-10));
            CHECK_THAT(d[i].c, WithinAbs(v[i].c, 1e-10));
        }
    }
}

TEST_CASE("difference coefficients of a linear system are its constants", "[systems]") {
    std::vector<CyclicComponent> comps(2);
    comps[0] = {0.7, std::nullopt, Nonlinearity::linear(1.3)};
    comps[1] = {1.1, Nonlinearity::linear(0.4), Nonlinearity::linear(-2.0)};
    const CyclicSystem sys(comps, 1.5);
    testing::Rng rng(6);
    const auto x = integrate(sys, testing::random_state(rng, 1.5, 1, 32), 6.0, 32);
    const auto y = integrate(sys, testing::random_state(rng, 1.5, 1, 32), 6.0, 32);
    for (double t : {0.0, 1.0, 4.2}) {
        const auto d = difference_coefficients(x, y, sys, t);
        CHECK_THAT(d[0].b, WithinAbs(1.3, 1e-14));
        CHECK_THAT(d[0].c, WithinAbs(-0.7, 1e-14));
        CHECK_THAT(d[1].a, WithinAbs(0.4, 1e-14));
        CHECK_THAT(d[1].b, WithinAbs(-2.0, 1e-14));
    }
}

TEST_CASE("difference coefficients on the tanh pair agree with dense Simpson quadrature", "[systems]") {
    const auto sys = testing::tanh_pair(2.0).to_cyclic();
    testing::Rng rng(11);
    const auto x = integrate(sys, testing::random_state(rng, 1.0, 1, 64, 2.0), 6.0, 64);
    const auto y = integrate(sys, testing::random_state(rng, 1.0, 1, 64, 2.0), 6.0, 64);
    const double t = 5.0;
    const auto d = difference_coefficients(x, y, sys, t);
    CHECK(d[0].b > 0.0);
    CHECK(d[1].a >= 0.0);
    CHECK(d[1].b < 0.0);
    CHECK(has_feedback_sign_pattern(d));
    // 160-interval Simpson of the averaged slope
    auto simpson_slope = [](const Nonlinearity& f, double from, double to) {
        const std::size_t n = 160;
        std::vector<double> ys(n + 1);
        for (std::size_t k = 0; k <= n; ++k) ys[k] = f.derivative(from + (to - from) * k / static_cast<double>(n));
        return simpson(std::span<const double>(ys), 1.0 / n);
    };
    const double b0 = simpson_slope(sys.component(0).next, x.value(1, t), y.value(1, t));
    const double b1 = simpson_slope(sys.component(1).next, x.value(0, t - 1.0), y.value(0, t - 1.0));
    CHECK_THAT(d[0].b, WithinAbs(b0, 1e-9));
    CHECK_THAT(d[1].b, WithinAbs(b1, 1e-9));
}

TEST_CASE("difference coefficients require covered times", "[systems]") {
    const auto sys = testing::tanh_pair(1.0).to_cyclic();
    const auto x = integrate(sys, SystemState::constant(1.0, 16, 0.2, {0.1}), 3.0, 16);
    CHECK_THROWS_AS(difference_coefficients(x, x, sys, 3.5), DomainError);
    CHECK_THROWS_AS(difference_coefficients(x, x, sys, -0.5), DomainError);
}

TEST_CASE("feedback sign pattern holds along random trajectory pairs", "[systems][property]") {
    testing::Rng rng(2024);
    int systems = 0;
    while (systems < 12) {
        const auto sys = systems % 2 ? testing::random_cyclic(rng) : testing::random_unidirectional(rng).to_cyclic();
        if (!validate_feedback(sys).pass) continue;
        ++systems;
        const auto x = integrate(sys, testing::random_state(rng, sys.tau(), sys.last(), 32), 10.0 * sys.tau(), 32);
        const auto y = integrate(sys, testing::random_state(rng, sys.tau(), sys.last(), 32), 10.0 * sys.tau(), 32);
        for (double t = 0.0; t <= 10.0 * sys.tau(); t += 0.1) REQUIRE(has_feedback_sign_pattern(difference_coefficients(x, y, sys, t)));
    }
}

TEST_CASE("Gauss-Legendre and Simpson rules integrate polynomials exactly", "[systems]") {
    const auto& gl = GaussLegendre<16>::instance();
    CHECK_THAT(gl.integrate01([](double s) { return std::pow(s, 31); }), WithinAbs(1.0 / 32.0, 1e-15));
    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 10u}) {
        std::vector<double> ys(n + 1);
        for (std::size_t k = 0; k <= n; ++k) {
            const double x = static_cast<double>(k) / n;
            ys[k] = n == 1 ? x : x * x * x;
        }
        const double exact = n == 1 ? 0.5 : 0.25;
        CHECK_THAT(simpson(std::span<const double>(ys), 1.0 / n), WithinAbs(exact, 1e-14));
    }
}
