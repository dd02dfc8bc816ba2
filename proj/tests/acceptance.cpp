// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "maxlab/asymptotics.hpp"
#include "maxlab/theorems.hpp"
#include "oracles.hpp"

using namespace maxlab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> uniform(double lo, double hi, int n) {
    std::vector<double> xs;
    for (int i = 0; i < n; ++i) xs.push_back(lo + (hi - lo) * (i + 0.5) / n);
    return xs;
}

std::vector<PiecewiseLinear> random_functions(std::uint64_t seed, int count) {
    std::mt19937_64 rng(seed);
    std::vector<PiecewiseLinear> out;
    for (int i = 0; i < count; ++i) out.push_back(gen::continuous(rng));
    return out;
}

Outcome theorem1_suite() {
    const auto t0 = std::chrono::steady_clock::now();
    int failures = 0;
    double worst = 1e300;
    for (const auto& f : random_functions(101, 50))
        for (double p : {1.1, 1.5, 1.9}) {
            const auto r = theorem1_check(f, Exponent(p));
            failures += !r.pass;
            worst = std::min(worst, r.slack / r.rhs);
        }
    const double elapsed = seconds_since(t0);
    std::ostringstream d;
    d << "150 checks, failures=" << failures << ", min relative slack=" << worst << ", " << elapsed << " s (limit 120)";
    return {failures == 0 && elapsed < 120.0, d.str()};
}

Outcome sunrise_suite() {
    int failures = 0;
    double worst = 1e300;
    for (const auto& f : random_functions(102, 50)) {
        const double top = f.max_value();
        for (int i = 0; i < 20; ++i) {
            const double level = top * (0.02 + 0.96 * i / 19.0);
            const auto r = sunrise_check(f, level);
            failures += !r.pass;
            if (r.rhs > 0) worst = std::min(worst, r.slack / r.rhs);
        }
    }
    std::ostringstream d;
    d << "1000 checks, failures=" << failures << ", min slack/rhs=" << worst;
    return {failures == 0, d.str()};
}

Outcome inclusion_suite() {
    std::size_t failures = 0;
    for (const auto& f : random_functions(103, 20)) {
        const double w = f.support_hi() - f.support_lo();
        const auto grid = uniform(f.support_lo() - 0.5 * w, f.support_hi() + 0.5 * w, 10000);
        const double top = f.max_value();
        for (double frac : {0.05, 0.2, 0.35, 0.5, 0.8}) failures += !inclusion_check(f, frac * top, grid).pass;
    }
    std::ostringstream d;
    d << "100 grids of 10^4 points, failing grids=" << failures;
    return {failures == 0, d.str()};
}

Outcome indicator_suite() {
    bool ok = true;
    std::ostringstream d;
    const IntervalSet unit({{0, 1}});
    double worst_rel = 0.0;
    for (double p : {2.0, 3.0, 5.0}) {
        const double got = indicator_maximal_norm_p(unit, Exponent(p));
        worst_rel = std::max(worst_rel, std::abs(got / oracle::indicator_unit_norm_p(p) - 1.0));
    }
    ok = ok && worst_rel <= 1e-4;
    d << "[0,1] closed form max rel err=" << worst_rel;
    std::mt19937_64 rng(104);
    int norm_failures = 0;
    int quarter_failures = 0;
    for (int i = 0; i < 50; ++i) {
        const auto e = gen::intervals(rng);
        for (double p : {2.0, 3.0, 5.0}) {
            const auto r = indicator_check(e, Exponent(p));
            norm_failures += !r.norm.pass;
            quarter_failures += !r.quarter_level.pass;
        }
    }
    ok = ok && norm_failures == 0 && quarter_failures == 0;
    d << "; 150 random sets: norm failures=" << norm_failures << ", quarter-level failures=" << quarter_failures;
    return {ok, d.str()};
}

Outcome gbar_suite() {
    bool ok = true;
    std::ostringstream d;
    for (int n : {1, 2, 3}) {
        const double top = std::pow(9.0 / 8.0, n);
        std::vector<double> grid;
        for (int i = 1; i <= 1000; ++i) grid.push_back(top * i / 1000);
        const auto r = gbar_iterate_check(n, grid);
        ok = ok && r.pass;
        d << (n > 1 ? "; " : "") << "n=" << n << " min slack=" << r.lhs << (r.pass ? "" : " FAILED");
    }
    d << " (tol 1e-6, 1000 points)";
    return {ok, d.str()};
}

Outcome psi_suite() {
    std::mt19937_64 rng(106);
    int failures = 0;
    for (int i = 0; i < 20; ++i) {
        double mode = 0.0;
        const auto f = gen::unimodal(rng, mode, i % 4 != 0);
        for (double p : {2.0, 3.0}) {
            const auto w = make_witness(f, mode, Exponent(p));
            failures += !psi_minorant_check(w, 10000).pass;
            failures += !psi_norm_check(w, Exponent(p)).pass;
        }
    }
    std::ostringstream d;
    d << "20 witnesses x p in {2,3}, failures=" << failures;
    return {failures == 0, d.str()};
}

Outcome ap_suite() {
    bool ok = true;
    std::ostringstream d;
    double worst = 0.0;
    for (double p : {1.5, 2.0, 3.0, 5.0}) {
        const auto s = solve_ap(Exponent(p));
        worst = std::max(worst, std::abs(s.a_p / oracle::ap_log_grid(p) - 1.0));
        ok = ok && s.a_p > std::pow(9.0 / 8.0, 1.0 / p);
    }
    ok = ok && worst <= 1e-6;
    const double a2 = solve_ap(Exponent(2)).a_p;
    ok = ok && std::abs(a2 - 1.6118549) <= 1e-7;
    d << "oracle max rel err=" << worst << ", a_2=" << a2;
    std::vector<double> grid;
    for (int i = 0; i < 1000; ++i) grid.push_back(1e-2 * std::pow(1e5, i / 999.0));
    std::size_t violations = 0;
    for (auto [p, delta] : {std::pair{1.5, 0.1}, std::pair{2.0, 0.1}, std::pair{3.0, 0.5}})
        violations += !h_domination_check(Exponent(p), delta, grid).pass;
    ok = ok && violations == 0;
    d << ", h-domination failing cases=" << violations;
    return {ok, d.str()};
}

Outcome growth_suite() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = growth_bracket(indicator(0, 1), Exponent(2), 6);
    const double elapsed = seconds_since(t0);
    bool ok = elapsed < 300.0;
    for (const double q : r.ratios) ok = ok && q >= 1.0;
    const double first = r.norms[1] * r.norms[1];
    ok = ok && std::abs(first / 1.5 - 1.0) <= 1e-6;
    const double final_p = r.norms.back() * r.norms.back();
    ok = ok && r.truncation_error_bound_p < 1e-6 * final_p;
    std::ostringstream d;
    d << "||Mf||^2=" << first << ", roots=";
    for (std::size_t k = 1; k < r.roots.size(); ++k) d << (k > 1 ? "," : "") << r.roots[k];
    d << " vs [" << r.lower_bracket << ", " << r.upper_bracket << "], truncation/final=" << r.truncation_error_bound_p / final_p
      << ", " << elapsed << " s (limit 300)";
    return {ok, d.str()};
}

Outcome stability_suite() {
    int failures = 0;
    double min_eps = 1e300;
    for (const auto& f : random_functions(109, 20))
        for (double p : {2.0, 3.0}) {
            const auto s = stability_gap_check(f, Exponent(p));
            failures += !s.report.pass;
            min_eps = std::min(min_eps, s.epsilon);
        }
    std::ostringstream d;
    d << "40 checks, failures=" << failures << ", min eps=" << min_eps;
    return {failures == 0, d.str()};
}

Outcome search_suite() {
    const MaximalConfig cfg;
    const auto a = search_extremizer(Exponent(1.5), "pwl-free", 8, 5000, cfg, 20240611);
    const auto b = search_extremizer(Exponent(1.5), "pwl-free", 8, 5000, cfg, 20240611);
    const double floor = theorem1_constant(Exponent(1.5));
    const bool same = a.best_ratio == b.best_ratio && a.best_params == b.best_params;
    std::ostringstream d;
    d << "best_ratio=" << a.best_ratio << " (floor " << floor << "), evaluations=" << a.evaluations
      << ", repeat identical=" << (same ? "yes" : "no");
    return {a.best_ratio >= 1.31037 - 1e-6 && same, d.str()};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"lower bound for 1<p<2", theorem1_suite},
        {"sunrise inequality", sunrise_suite},
        {"phi / superlevel inclusions", inclusion_suite},
        {"indicator exactness and bounds", indicator_suite},
        {"gbar one-step and n-step", gbar_suite},
        {"dyadic minorant psi", psi_suite},
        {"a_p solver and h-domination", ap_suite},
        {"growth bracket for 1_[0,1]", growth_suite},
        {"stability gap", stability_suite},
        {"extremizer search sanity", search_suite},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s [%zu] %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    return failed;
}
