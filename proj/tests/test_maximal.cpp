#include <cmath>
#include <random>

#include "doctest.h"
#include "generators.hpp"
#include "maxlab/maximal.hpp"
#include "oracles.hpp"

using namespace maxlab;

TEST_CASE("centered maximal function of the unit indicator") {
    const auto f = indicator(0, 1);
    CHECK(centered_max_at(f, 0.5) == doctest::Approx(1.0));
    CHECK(centered_max_at(f, 1.0) == doctest::Approx(0.5));
    CHECK(centered_max_at(f, 2.0) == doctest::Approx(0.25));
    for (double x : {1.5, 3.0, 40.0, 1e6}) CHECK(centered_max_at(f, x) == doctest::Approx(1.0 / (2.0 * x)).epsilon(1e-13));
    for (double x : {-0.5, -3.0}) CHECK(centered_max_at(f, x) == doctest::Approx(1.0 / (2.0 * (1.0 - x))).epsilon(1e-13));
}

TEST_CASE("centered maximal function matches the radius-grid oracle") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> where(-5.0, 6.0);
    for (int t = 0; t < 25; ++t) {
        const auto f = gen::general(rng);
        for (int k = 0; k < 6; ++k) {
            const double x = where(rng);
            const double exact = centered_max_at(f, x);
            const double brute = oracle::centered_max(f, x, 4000);
            // the oracle only sees a finite radius set, so it bounds from below
            CHECK_MESSAGE(brute <= exact * (1.0 + 1e-10) + 1e-15, "x=" << x << " f.eval=" << f.eval(x) << " brute-exact=" << brute - exact);
            CHECK(brute == doctest::Approx(exact).epsilon(1e-6));
        }
    }
}

TEST_CASE("maximal function dominates f and decays like mass over twice the distance") {
    std::mt19937_64 rng(22);
    for (int t = 0; t < 20; ++t) {
        const auto f = gen::continuous(rng);
        for (double x = -4.0; x <= 4.0; x += 0.173) CHECK(centered_max_at(f, x) >= f.eval(x) * (1.0 - 1e-14));
        const double far = 1e12;
        CHECK(centered_max_at(f, f.support_hi() + far) == doctest::Approx(f.total_mass() / (2.0 * far)).epsilon(1e-9));
        CHECK(centered_max_at(f, f.support_lo() - far) == doctest::Approx(f.total_mass() / (2.0 * far)).epsilon(1e-9));
    }
}

TEST_CASE("uncentered maximal function") {
    const auto f = indicator(0, 1);
    CHECK(uncentered_max_at(f, 2.0) == doctest::Approx(0.5));
    CHECK(oracle::uncentered_max(f, 2.0, 400) == doctest::Approx(0.5));
    std::mt19937_64 rng(23);
    for (int t = 0; t < 10; ++t) {
        const auto g = gen::general(rng, 4);
        for (double x : {-1.0, 0.0, 0.7, 2.5}) {
            const double u = uncentered_max_at(g, x, 16);
            CHECK(u >= centered_max_at(g, x) * (1.0 - 1e-12));
            CHECK(u == doctest::Approx(oracle::uncentered_max(g, x, 600)).epsilon(2e-3));
        }
    }
}

TEST_CASE("indicator fast path agrees with the generic engine") {
    std::mt19937_64 rng(24);
    std::uniform_real_distribution<double> where(-4.0, 8.0);
    for (int t = 0; t < 30; ++t) {
        const auto e = gen::intervals(rng);
        const auto f = indicator(e);
        for (int k = 0; k < 10; ++k) {
            const double x = where(rng);
            CHECK(indicator_max_at(e, x) == doctest::Approx(centered_max_at(f, x)).epsilon(1e-12));
        }
    }
}

TEST_CASE("truncation window meets the requested tail bound") {
    const auto f = tent(-1, 0, 1, 1);
    for (double p : {1.1, 1.5, 2.0, 3.0}) {
        MaximalConfig cfg;
        const auto grid = maximal_grid(f, Exponent(p), cfg);
        CHECK(grid.err_p <= cfg.tail_tol * lp_norm_p(f, Exponent(p)));
        const double reach = std::min(-grid.points.front(), grid.points.back()) - 1.0;
        CHECK(tail_bound_p(f.total_mass(), reach, Exponent(p)) == doctest::Approx(grid.err_p).epsilon(1e-9));
    }
    CHECK(tail_bound_p(1.0, 10.0, Exponent(2)) > tail_bound_p(1.0, 20.0, Exponent(2)));
}

TEST_CASE("exceeding the tail budget raises BudgetError") {
    MaximalConfig cfg;
    cfg.max_tail_points = 10;
    CHECK_THROWS_AS((void)apply_M(indicator(0, 1), Exponent(2), cfg), BudgetError);
    MaximalConfig bad;
    bad.tail_grid_ratio = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK_THROWS_AS((void)centered_max_at(PiecewiseLinear{}, 0.0), std::invalid_argument);
}

TEST_CASE("one application to the unit indicator") {
    const auto step = apply_M(indicator(0, 1), Exponent(2));
    CHECK(step.window_norm_p + step.err_p == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(step.window_norm_p <= 1.5);
    for (const double x : step.grid) CHECK(step.g.eval(x) == doctest::Approx(centered_max_at(indicator(0, 1), x)).epsilon(2e-5));
}

TEST_CASE("iteration ratios are at least one and invariant under rescaling") {
    const auto f = tent(0, 0.3, 1, 1);
    MaximalConfig cfg;
    cfg.tail_grid_ratio = 1.1;
    const auto a = iterate_M(f, 3, Exponent(2), cfg);
    const auto b = iterate_M(f.scaled(2.0), 3, Exponent(2), cfg);
    const auto c = iterate_M(f.dilated(4.0), 3, Exponent(2), cfg);
    for (std::size_t k = 0; k < a.ratios.size(); ++k) {
        CHECK(a.ratios[k] >= 1.0);
        CHECK(b.ratios[k] == doctest::Approx(a.ratios[k]).epsilon(1e-9));
        CHECK(c.ratios[k] == doctest::Approx(a.ratios[k]).epsilon(1e-9));
    }
    for (std::size_t k = 0; k < a.roots.size(); ++k) CHECK(b.roots[k] == doctest::Approx(a.roots[k]).epsilon(1e-9));
    CHECK(b.raw_roots[1] == doctest::Approx(2.0 * a.raw_roots[1]).epsilon(1e-9));
    CHECK(a.truncation_error_bound_p > 0.0);
}
