#include <doctest.h>

#include <algorithm>
#include <random>

#include "loopsec/errors.hpp"
#include "loopsec/loop_model.hpp"
#include "loopsec/oracle.hpp"
#include "support.hpp"

using namespace loopsec;
using loopsec::testing::default_scenario;

TEST_SUITE("loop_model") {

TEST_CASE("zero times give zero metrics") {
    const Scenario s = default_scenario();
    Allocation a;
    a.p_u = a.p_d = 1.0;
    a.b_u = a.b_d = 2e4;
    a.f = 1e9;
    const LoopMetrics m = evaluate(a, s.gains, s.compute);
    CHECK(m.d_u == 0.0);
    CHECK(m.d_d == 0.0);
    CHECK(m.cne == 0.0);
    CHECK(m.leakage_weighted == 0.0);
    CHECK(m.t_compute == 0.0);
}

TEST_CASE("CNE is the smaller of extracted uplink bits and downlink bits") {
    const Scenario s = default_scenario();
    Allocation a;
    a.p_u = a.p_d = 1.0;
    a.b_u = a.b_d = 2e4;
    a.f = 1e9;
    a.t_u = 1000.0 / rate(1.0, 2e4, s.gains.g_u, s.gains.n0);
    a.t_d = 5.0 / rate(1.0, 2e4, s.gains.g_d, s.gains.n0);
    const LoopMetrics m = evaluate(a, s.gains, s.compute);
    CHECK(m.d_u == doctest::Approx(1000.0).epsilon(1e-12));
    CHECK(m.cne == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(m.cne <= std::min(s.compute.rho * m.d_u, m.d_d));
}

TEST_CASE("zero compute frequency with uplink data is rejected") {
    const Scenario s = default_scenario();
    Allocation a;
    a.p_u = 1.0;
    a.b_u = 2e4;
    a.t_u = 0.01;
    a.f = 0.0;
    CHECK_THROWS_AS((void)evaluate(a, s.gains, s.compute), InvalidArgument);
}

TEST_CASE("metrics scale linearly with the transmission times") {
    const Scenario s = default_scenario();
    Allocation a;
    a.p_u = 0.4;
    a.p_d = 0.2;
    a.b_u = 1.5e4;
    a.b_d = 1e4;
    a.f = 1e9;
    a.t_u = 0.02;
    a.t_d = 0.01;
    const LoopMetrics m1 = evaluate(a, s.gains, s.compute);
    a.t_u *= 3.0;
    a.t_d *= 3.0;
    const LoopMetrics m3 = evaluate(a, s.gains, s.compute);
    CHECK(m3.d_u == doctest::Approx(3.0 * m1.d_u).epsilon(1e-14));
    CHECK(m3.d_d == doctest::Approx(3.0 * m1.d_d).epsilon(1e-14));
    CHECK(m3.d_se == doctest::Approx(3.0 * m1.d_se).epsilon(1e-14));
    CHECK(m3.d_ce == doctest::Approx(3.0 * m1.d_ce).epsilon(1e-14));
}

TEST_CASE("feasibility check") {
    const Scenario s = default_scenario();
    SUBCASE("all-zero allocation is feasible") {
        const FeasibilityResult r = is_feasible(Allocation{}, s.gains, s.compute, s.limits, s.policy);
        CHECK(r.feasible);
        CHECK(r.violations.empty());
    }
    SUBCASE("time budget overrun beyond tolerance is reported") {
        const double tol = 1e-9;
        Allocation a;
        a.p_u = a.p_d = 1e-9;
        a.b_u = a.b_d = 2e4;
        a.f = 1e9;
        a.t_u = 0.05;
        const double t_c = s.compute.alpha * a.t_u * rate(a.p_u, a.b_u, s.gains.g_u, s.gains.n0) / a.f;
        a.t_d = s.limits.t_total * (1.0 + 2.0 * tol) - a.t_u - t_c;
        const FeasibilityResult r = is_feasible(a, s.gains, s.compute, s.limits, s.policy, tol);
        CHECK_FALSE(r.feasible);
        REQUIRE(r.violations.size() == 1);
        CHECK(r.violations[0].find("time budget") != std::string::npos);
    }
    SUBCASE("grid-optimal allocation is feasible with time and leakage tight") {
        const auto grid = default_p2_grid(s, 400);
        const OracleResult o = grid_search_p2(s, grid[0], grid[1]);
        const auto [t_u, t_d] = optimal_times(o.p_u, o.b_u, o.p_d, o.b_d, s.gains, s.compute, s.policy);
        Allocation a{o.p_u, t_u, o.b_u, s.limits.f_max, o.p_d, t_d, o.b_d};
        const LoopMetrics m = evaluate(a, s.gains, s.compute);
        CHECK(m.leakage_weighted == doctest::Approx(s.policy.d_th).epsilon(1e-12));
        // Grid points sit just inside the time budget.
        CHECK(a.t_u + m.t_compute + a.t_d <= s.limits.t_total * (1.0 + 1e-9));
        CHECK(a.t_u + m.t_compute + a.t_d == doctest::Approx(s.limits.t_total).epsilon(1e-2));
        CHECK(is_feasible(a, s.gains, s.compute, s.limits, s.policy).feasible);
    }
}

TEST_CASE("leakage-tight times") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SUBCASE("symmetric links with rho near one split time evenly") {
        ChannelGains g{1e-10, 1e-10, 1e-12, 1e-12, 4e-21};
        const auto [t_u, t_d] = optimal_times(0.5, 1e4, 0.5, 1e4, g, ComputeModel{200, 1.0 - 1e-15}, {300});
        CHECK(t_u == doctest::Approx(t_d).epsilon(1e-12));
    }
    SUBCASE("identities at random inputs") {
        for (int i = 0; i < 200; ++i) {
            ChannelGains g;
            g.g_u = std::pow(10.0, -11 + 2 * u(rng));
            g.g_d = std::pow(10.0, -11 + 2 * u(rng));
            g.g_se = std::pow(10.0, -13 + 3 * u(rng));
            g.g_ce = std::pow(10.0, -13 + 3 * u(rng));
            g.n0 = 4e-21;
            const ComputeModel c{200, 0.001 + 0.9 * u(rng)};
            const SecurityPolicy pol{50 + 500 * u(rng)};
            const double p_u = 1e-3 + u(rng);
            const double p_d = 1e-3 + u(rng);
            const double b_u = 1e3 + 2e4 * u(rng);
            const double b_d = 1e3 + 2e4 * u(rng);
            const auto [t_u, t_d] = optimal_times(p_u, b_u, p_d, b_d, g, c, pol);
            const LoopMetrics m = evaluate({p_u, t_u, b_u, 1e9, p_d, t_d, b_d}, g, c);
            CHECK(m.leakage_weighted == doctest::Approx(pol.d_th).epsilon(1e-9));
            CHECK(c.rho * m.d_u == doctest::Approx(m.d_d).epsilon(1e-9));
        }
    }
    SUBCASE("zero rate is rejected") {
        const Scenario s = default_scenario();
        CHECK_THROWS_AS((void)optimal_times(0.0, 2e4, 1.0, 2e4, s.gains, s.compute, s.policy), InvalidArgument);
    }
}

TEST_CASE("full-resource allocation") {
    const Scenario s = default_scenario();
    const BaselineResult b = unconstrained_baseline(s.gains, s.compute, s.limits);
    const Allocation& a = b.allocation;
    CHECK(a.p_u == s.limits.p_umax);
    CHECK(a.p_d == s.limits.p_dmax);
    CHECK(a.b_u == s.limits.b_max);
    CHECK(a.b_d == s.limits.b_max);
    CHECK(a.f == s.limits.f_max);
    CHECK(std::abs(a.t_u + b.metrics.t_compute + a.t_d - s.limits.t_total) <= 1e-9 * s.limits.t_total);
    CHECK(s.compute.rho * b.metrics.d_u == doctest::Approx(b.metrics.d_d).epsilon(1e-12));
    CHECK(b.metrics.leakage_weighted > 300.0);
}

TEST_CASE("LQR cost lower bound") {
    CHECK(lqr_lower_bound(1.0, {1, 0.0, 1.0, 0.0}) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    const LqrParams p{3, 2.0, 5.0, 0.7};
    CHECK(lqr_lower_bound(1e4, p) == doctest::Approx(0.7).epsilon(1e-12));
    double prev = lqr_lower_bound(2.01, p);
    for (double cne = 2.5; cne < 40.0; cne += 0.5) {
        const double v = lqr_lower_bound(cne, p);
        CHECK(v < prev);
        prev = v;
    }
    CHECK_THROWS_AS((void)lqr_lower_bound(2.0, p), InvalidArgument);
    CHECK_THROWS_AS((void)lqr_lower_bound(1.0, p), InvalidArgument);
}

}
