#include <cmath>

#include "catch_amalgamated.hpp"
#include "cycdde/cycdde.hpp"
#include "support/random_systems.hpp"

using namespace cycdde;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kCubicRoot = 0.682327803828019327;
constexpr double kSlopeAtRoot = -0.635344392343961;  // -2p/(1+p^2)^2 at the cubic root
constexpr double kSlopeCubed = 0.256464703794123;

GeneNetwork asymmetric_network() {
    GeneNetwork net;
    net.a = {1.2, 0.7, 1.5};
    net.b = {0.9, 1.4, 0.6};
    net.beta = {2.0, 1.1, 1.6};
    net.c = {1.3, 0.8, 1.7};
    net.nu = {2.0, 3.0, 1.5};
    net.f_kind = {HillKind::decreasing, HillKind::increasing, HillKind::increasing};
    net.tau_p = {0.4, 0.9, 0.3};
    net.tau_r = {0.7, 0.2, 0.5};
    return net;
}

}  // namespace

TEST_CASE("hill function values", "[genenet]") {
    for (double nu : {1.0, 2.0, 3.7}) {
        CHECK(hill(0.0, nu, HillKind::decreasing) == 1.0);
        CHECK(hill(0.0, nu, HillKind::increasing) == 0.0);
        CHECK_THAT(hill(1.0, nu, HillKind::decreasing), WithinAbs(0.5, 1e-15));
        CHECK_THAT(hill(1.0, nu, HillKind::increasing), WithinAbs(0.5, 1e-15));
        for (double x : {0.1, 0.8, 2.5, 40.0}) {
            CHECK_THAT(hill(x, nu, HillKind::increasing) + hill(x, nu, HillKind::decreasing), WithinAbs(1.0, 1e-15));
            CHECK_THAT(hill(x, nu, HillKind::decreasing), WithinAbs(1.0 / (1.0 + std::pow(x, nu)), 1e-15));
            const double h = 1e-6 * std::max(1.0, x);
            const double fd = (hill(x + h, nu, HillKind::increasing) - hill(x - h, nu, HillKind::increasing)) / (2 * h);
            CHECK_THAT(hill_derivative(x, nu, HillKind::increasing), WithinAbs(fd, 1e-7));
            CHECK(hill_derivative(x, nu, HillKind::decreasing) == -hill_derivative(x, nu, HillKind::increasing));
        }
    }
    CHECK_THAT(hill_derivative(kCubicRoot, 2.0, HillKind::decreasing), WithinAbs(kSlopeAtRoot, 1e-12));
    CHECK_THAT(hill_derivative(kCubicRoot, 2.0, HillKind::decreasing), WithinAbs(-0.635, 5e-4));
    CHECK_THROWS_AS(hill(-0.1, 2.0, HillKind::decreasing), DomainError);
    CHECK_THROWS_AS(hill_derivative(-0.1, 2.0, HillKind::decreasing), DomainError);
    CHECK_THROWS_AS(hill(0.5, 0.5, HillKind::decreasing), ArgumentError);
}

TEST_CASE("repressilator transform", "[genenet]") {
    for (double T : {0.5, 1.0, 2.0, 4.0}) {
        const auto net = repressilator_preset(T);
        const auto tr = to_unidirectional(net);
        CAPTURE(T);
        REQUIRE(tr.system.size() == 6);
        for (double m : tr.system.mu()) CHECK_THAT(m, WithinRel(T, 1e-15));
        CHECK(tr.system.tau() == 1.0);
        CHECK_THAT(tr.total_delay, WithinRel(T, 1e-14));
        CHECK_THAT(tr.K, WithinRel(kSlopeCubed * std::pow(T, 6), 1e-10));
        CHECK_THAT(tr.K / std::pow(T, 6), WithinAbs(0.2565, 1e-4));
        CHECK_THAT(tr.system.loop_gain(), WithinRel(tr.K, 1e-10));
        CHECK(tr.system.zero_centered());
        for (std::size_t j = 0; j + 1 < 6; ++j) CHECK(tr.system.g()[j].derivative(0.0) > 0.0);
        CHECK(tr.system.g()[5].derivative(0.0) < 0.0);
        for (std::size_t k = 0; k < 6; ++k) CHECK_THAT(tr.from_gene(k, tr.to_gene(k, 0.3)), WithinAbs(0.3, 1e-15));
    }
}

TEST_CASE("repressilator preset", "[genenet]") {
    const auto net = repressilator_preset(3.0);
    CHECK(net.size() == 3);
    CHECK(net.decreasing_count() == 3);
    CHECK_THAT(net.total_delay(), WithinRel(3.0, 1e-14));
    CHECK_THAT(net.max_delay(), WithinRel(0.5, 1e-14));
    const auto eq = equilibrium_gene(net);
    for (double p : eq.p) CHECK_THAT(p, WithinAbs(kCubicRoot, 1e-12));
    const auto tr = to_unidirectional(net);
    const auto fb = validate_feedback(tr.system);
    CHECK(fb.pass);

    const auto strong = repressilator_preset(2.0, 3.0, 2.5, 1.5);
    CHECK(strong.nu[1] == 3.0);
    CHECK(strong.beta[2] == 2.5);
    CHECK(strong.c[0] == 1.5);
    CHECK(validate_feedback(to_unidirectional(strong).system).pass);
    CHECK(gene_upper_bound(strong, 0) == 2.5);
    CHECK(gene_upper_bound(strong, 1) == 1.5 * 2.5);
    CHECK(within_gene_bounds(strong, 1, 3.7));
    CHECK_FALSE(within_gene_bounds(strong, 0, 3.7));
    CHECK_FALSE(within_gene_bounds(strong, 0, -1e-9));
    CHECK_THROWS_AS(repressilator_preset(0.0), ArgumentError);
}

TEST_CASE("even repression count is rejected", "[genenet]") {
    auto net = repressilator_preset(1.0);
    net.f_kind[1] = HillKind::increasing;
    CHECK_THROWS_AS(to_unidirectional(net), ArgumentError);
    try {
        to_unidirectional(net);
    } catch (const ArgumentError& e) {
        CHECK(std::string(e.what()).find("parity") != std::string::npos);
    }
}

TEST_CASE("random networks transform to validated loops", "[genenet][property]") {
    testing::Rng rng(314);
    for (int k = 0; k < 40; ++k) {
        const auto net = testing::random_network(rng);
        const auto tr = to_unidirectional(net);
        CAPTURE(k, net.size());
        REQUIRE(tr.system.size() == 2 * net.size());
        CHECK(tr.system.zero_centered());
        CHECK(equilibrium_unidirectional(tr.system, 1e-12).residual <= 1e-12);
        CHECK(validate_feedback(tr.system).pass);
        CHECK_THAT(tr.system.loop_gain(), WithinRel(tr.K, 1e-9));
        double shift_max = 0.0;
        for (double s : tr.time_shifts) shift_max = std::max(shift_max, s);
        CHECK(shift_max < tr.total_delay);
    }
}

TEST_CASE("gene network and transformed loop agree in simulation", "[genenet]") {
    const auto net = asymmetric_network();
    net.validate();
    const auto tr = to_unidirectional(net);
    const double T = tr.total_delay;
    const double s0 = 4.0, s1 = 7.0;
    std::vector<double> start{0.3, 1.1, 0.8, 0.2, 0.5, 0.9};
    const auto gt = integrate_gene(net, GeneInitial::constant(start), T * s1 + 0.5, 256);
    const auto state = tr.state_from_gene(gt, s0, 1024);
    const auto traj = integrate(tr.system, state, s1, 1024, s0);
    double err = 0.0;
    for (double s = s0; s <= s1; s += 0.01)
        for (std::size_t k = 0; k < tr.size(); ++k) {
            const double from_gene = tr.from_gene(k, gt.value(tr.variables[k].column(), tr.gene_time(k, s)));
            err = std::max(err, std::abs(traj.value(k, s) - from_gene));
        }
    CHECK(err <= 1e-6);
}

TEST_CASE("gene simulation stays in the invariant region", "[genenet]") {
    const auto net = asymmetric_network();
    const auto gt = integrate_gene(net, GeneInitial::constant({5.0, 0.1, 0.0, 4.0, 2.0, 0.0}), 80.0, 32);
    const auto& rec = gt.record();
    for (std::size_t k = gt.start_node(); k < rec.size(); ++k)
        for (std::size_t v = 0; v < 6; ++v) {
            REQUIRE(rec.value(k, v) >= -1e-12);
            if (rec.time(k) > 40.0) REQUIRE(within_gene_bounds(net, v, rec.value(k, v), 1e-9));
        }
}
