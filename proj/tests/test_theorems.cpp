#include <cmath>
#include <random>

#include "doctest.h"
#include "generators.hpp"
#include "maxlab/theorems.hpp"
#include "oracles.hpp"

using namespace maxlab;

namespace {

double phi_brute(const PiecewiseLinear& f, double level, double x) {
    double best = 0.0;
    const double lo = f.support_lo() - 1.0;
    const int n = 20000;
    for (int i = 0; i <= n; ++i) {
        const double y = lo + (x - lo) * i / n;
        if (y < x) best = std::max(best, f.antideriv(x) - f.antideriv(y) - 2.0 * level * (x - y));
    }
    for (const double k : f.knots())
        if (k < x) best = std::max(best, f.antideriv(x) - f.antideriv(k) - 2.0 * level * (x - k));
    return best;
}

std::vector<double> uniform(double lo, double hi, int n) {
    std::vector<double> xs;
    for (int i = 0; i < n; ++i) xs.push_back(lo + (hi - lo) * (i + 0.5) / n);
    return xs;
}

}  // namespace

TEST_CASE("phi envelope matches a dense left-endpoint search") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 15; ++t) {
        const auto f = gen::continuous(rng);
        for (double level : {0.1, 0.4, 0.9}) {
            const PhiEnvelope phi(f, level);
            for (double x = f.support_lo() - 0.5; x < f.support_hi() + 0.5; x += 0.21) {
                const double exact = phi(x);
                const double brute = phi_brute(f, level, x);
                CHECK(exact >= brute - 1e-12);
                CHECK(exact == doctest::Approx(brute).epsilon(1e-6).scale(1.0));
            }
        }
    }
    CHECK_THROWS_AS(PhiEnvelope(indicator(0, 1), 0.5), std::invalid_argument);
}

TEST_CASE("inclusions hold on random continuous functions") {
    std::mt19937_64 rng(32);
    for (int t = 0; t < 10; ++t) {
        const auto f = gen::continuous(rng);
        const auto grid = uniform(f.support_lo() - 1.0, f.support_hi() + 1.0, 2000);
        for (double level : {0.05, 0.3, 0.7}) CHECK(inclusion_check(f, level, grid).pass);
    }
}

TEST_CASE("measure of the maximal superlevel set against dense sampling") {
    std::mt19937_64 rng(33);
    for (int t = 0; t < 6; ++t) {
        const auto f = gen::continuous(rng, 5);
        for (double level : {0.2, 0.6}) {
            const double reach = f.total_mass() / (2.0 * level) + 1.0;
            const double lo = f.support_lo() - reach;
            const double hi = f.support_hi() + reach;
            const int n = 40000;
            int inside = 0;
            for (const double x : uniform(lo, hi, n)) inside += centered_max_at(f, x) >= level;
            const double sampled = (hi - lo) * inside / n;
            CHECK(maximal_superlevel_measure(f, level) == doctest::Approx(sampled).epsilon(2.0 * (hi - lo) / n * 4));
        }
    }
}

TEST_CASE("sunrise inequality on random continuous functions") {
    std::mt19937_64 rng(34);
    for (int t = 0; t < 10; ++t) {
        const auto f = gen::continuous(rng);
        for (double level : {0.05, 0.5, 1.2}) CHECK(sunrise_check(f, level).pass);
    }
    CHECK_THROWS_AS((void)sunrise_check(indicator(0, 1), 0.5), std::invalid_argument);
}

TEST_CASE("the sunrise bound is nearly attained by a steep plateau") {
    const auto f = trapezoid(-0.01, 0.0, 1.0, 1.01, 1.0);
    const auto r = sunrise_check(f, 0.5);
    CHECK(r.pass);
    CHECK(r.slack < 0.01);
}

TEST_CASE("lower bound for 1 < p < 2") {
    CHECK(theorem1_constant(Exponent(1.5)) == doctest::Approx(1.3103706971).epsilon(1e-9));
    std::mt19937_64 rng(35);
    for (int t = 0; t < 5; ++t) {
        const auto f = gen::continuous(rng);
        for (double p : {1.1, 1.5, 1.9}) CHECK(theorem1_check(f, Exponent(p)).pass);
    }
    CHECK_THROWS_AS((void)theorem1_check(tent(0, 1, 2, 1), Exponent(2.0)), std::invalid_argument);
}

TEST_CASE("maximal norm of the unit indicator is exact") {
    const IntervalSet e({{0, 1}});
    for (double p : {1.5, 2.0, 3.0, 5.0})
        CHECK(indicator_maximal_norm_p(e, Exponent(p)) == doctest::Approx(oracle::indicator_unit_norm_p(p)).epsilon(1e-10));
    CHECK(indicator_superlevel_measure(e, 0.25) == doctest::Approx(3.0).epsilon(1e-9));
    const auto r = indicator_check(e, Exponent(2));
    CHECK(r.norm.lhs == doctest::Approx(1.5));
    CHECK(r.norm.pass);
    CHECK(r.quarter_level.pass);
}

TEST_CASE("indicator norm against windowed quadrature") {
    std::mt19937_64 rng(36);
    for (int t = 0; t < 8; ++t) {
        const auto e = gen::intervals(rng);
        for (double p : {2.0, 3.0}) {
            auto mp = [&](double x) { return std::pow(indicator_max_at(e, x), p); };
            const double lo = e.hull_lo() - 1.0;
            const double hi = e.hull_hi() + 1.0;
            double total = oracle::midpoint_integral(mp, lo, hi, 200000);
            // geometric cells out to distance 1e5, then the far-field estimate
            for (double d = 1.0; d < 1e5; d *= 1.0005) {
                const double w = d * 0.0005;
                total += w * (mp(e.hull_lo() - d - 0.5 * w) + mp(e.hull_hi() + d + 0.5 * w));
            }
            total += 2.0 * std::pow(e.measure() / 2.0, p) * std::pow(1e5, 1.0 - p) / (p - 1.0);
            CHECK(indicator_maximal_norm_p(e, Exponent(p)) == doctest::Approx(total).epsilon(1e-5));
        }
    }
}

TEST_CASE("unimodality test") {
    CHECK(is_unimodal(tent(-1, 0, 1, 1), 0.0));
    CHECK_FALSE(is_unimodal(tent(-1, 0, 1, 1), 0.5));
    CHECK(is_unimodal(indicator(0, 1), 0.5));
    CHECK(is_unimodal(indicator(0, 1), 1.0));
    CHECK_FALSE(is_unimodal(add(indicator(0, 1), indicator(2, 3)), 0.5));
    CHECK_THROWS_AS((void)make_witness(add(indicator(0, 1), indicator(2, 3)), 0.5, Exponent(2)), std::invalid_argument);
}

TEST_CASE("dyadic minorant of random unimodal witnesses") {
    std::mt19937_64 rng(37);
    for (int t = 0; t < 20; ++t) {
        double mode = 0.0;
        const auto f = gen::unimodal(rng, mode, t % 3 != 0);
        for (double p : {2.0, 3.0}) {
            const auto w = make_witness(f, mode, Exponent(p));
            CHECK(w.f_tilde.support_lo() >= 0.0);
            CHECK(lp_norm_p(w.f_tilde, Exponent(p)) >= 0.5 * lp_norm_p(f, Exponent(p)) * (1.0 - 1e-12));
            CHECK(psi_minorant_check(w, 2000).pass);
            const auto r = psi_norm_check(w, Exponent(p));
            CHECK_MESSAGE(r.pass, r.details);
        }
    }
}

TEST_CASE("psi of a decreasing ramp") {
    const PiecewiseLinear ft({{0, 4, 1, 0}});
    const auto psi = build_psi(ft);
    CHECK(psi.eval(3.0) == doctest::Approx(0.0));
    CHECK(psi.eval(1.5) == doctest::Approx(0.5));
    CHECK(psi.eval(0.75) == doctest::Approx(0.75));
    CHECK_THROWS_AS((void)build_psi(PiecewiseLinear({{0, 1, 0, 1}})), std::invalid_argument);
}

TEST_CASE("gbar minorant is certified and tight") {
    for (int n : {16, 200, 2000}) {
        const auto g = gbar_minorant(n);
        double worst = 0.0;
        for (int i = 1; i <= 200000; ++i) {
            const double x = i / 200000.0;
            const double gap = gbar(x) - g.eval(x);
            CHECK(gap >= -1e-15);
            worst = std::max(worst, gap);
        }
        CHECK(worst <= 1.0 / n);
    }
}

TEST_CASE("gbar constant and implied iteration count") {
    for (double p : {1.5, 2.0, 3.0}) CHECK(gbar_constant(Exponent(p)) == doctest::Approx(oracle::gbar_constant(p)).epsilon(1e-12));
    CHECK(gbar_constant(Exponent(2)) == doctest::Approx(0.0130712).epsilon(1e-5));
    CHECK(implied_iteration_count(Exponent(2)) == 61);
}

TEST_CASE("one application to gbar") {
    std::vector<double> grid;
    for (int i = 1; i <= 200; ++i) grid.push_back(1.125 * i / 200);
    const auto r = gbar_iterate_check(1, grid);
    CHECK_MESSAGE(r.pass, r.details);
    CHECK_THROWS_AS((void)gbar_iterate_check(1, std::vector<double>{2.0}), std::invalid_argument);
    CHECK_THROWS_AS((void)gbar_iterate_check(20, grid), BudgetError);
}

TEST_CASE("unimodal growth chain for a small n") {
    double mode = 0.0;
    std::mt19937_64 rng(38);
    const auto f = gen::unimodal(rng, mode);
    const auto w = make_witness(f, mode, Exponent(2));
    MaximalConfig cfg;
    cfg.tail_grid_ratio = 1.1;
    const auto g = unimodal_growth_check(w, Exponent(2), 2, cfg);
    CHECK_MESSAGE(g.chain.pass, g.chain.details);
    CHECK(g.implied_n == 61);
}

TEST_CASE("stability gap on random functions") {
    std::mt19937_64 rng(39);
    for (int t = 0; t < 5; ++t) {
        const auto f = gen::continuous(rng);
        for (double p : {2.0, 3.0}) {
            const auto s = stability_gap_check(f, Exponent(p));
            CHECK_MESSAGE(s.report.pass, s.report.details);
            CHECK(s.epsilon > 0.0);
        }
    }
}

TEST_CASE("empirical Lipschitz ratio of a rescaled pair") {
    const auto f = tent(-1, 0, 1, 1);
    const double r = empirical_lipschitz_ratio(f, f.scaled(1.5), Exponent(2));
    CHECK(r > 1.0);
    CHECK(r < 3.0);
}
