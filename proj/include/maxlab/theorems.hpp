#pragma once

#include <span>
#include <vector>

#include "maxlab/interval_set.hpp"
#include "maxlab/maximal.hpp"
#include "maxlab/piecewise_linear.hpp"
#include "maxlab/report.hpp"

namespace maxlab {

// phi(x) = sup_{y<x} integral_y^x f - 2 level (x - y), via a single left to
// right scan of G(t) = F(t) - 2 level t and its running minimum.
class PhiEnvelope {
public:
    // f must be continuous; throws std::invalid_argument otherwise.
    PhiEnvelope(const PiecewiseLinear& f, double level);
    [[nodiscard]] double operator()(double x) const;

private:
    const PiecewiseLinear* f_;
    double level_;
    std::vector<double> g_at_knot_;
    std::vector<double> prefix_min_;  // inf of G over (-inf, knot_j]
};

[[nodiscard]] double phi_at(const PiecewiseLinear& f, double level, double x);

// {f > 2 level} within {phi > 0} and {phi > 0} ∪ {f >= level} within {Mf >= level}.
[[nodiscard]] CheckReport inclusion_check(const PiecewiseLinear& f, double level,
                                          std::span<const double> sample_grid, double tol = 1e-12);

// Measure of {Mf >= level}, from sign changes of Mf - level on a refined grid
// and bisection of each bracketing cell.
[[nodiscard]] double maximal_superlevel_measure(const PiecewiseLinear& f, double level, int refine = 16,
                                                double bisect_tol = 1e-10);

[[nodiscard]] CheckReport sunrise_check(const PiecewiseLinear& f, double level, const MaximalConfig& cfg = {},
                                        double rel_tol = 1e-6);

[[nodiscard]] double theorem1_constant(Exponent p);  // (p / (2 (p - 1)))^{1/p}
[[nodiscard]] CheckReport theorem1_check(const PiecewiseLinear& f, Exponent p, const MaximalConfig& cfg = {},
                                         double rel_tol = 1e-6);

// Integral of (M 1_E)^p: adaptive quadrature on the hull plus closed-form tails.
[[nodiscard]] double indicator_maximal_norm_p(const IntervalSet& e, Exponent p);
// |{M 1_E >= level}|
[[nodiscard]] double indicator_superlevel_measure(const IntervalSet& e, double level);

struct IndicatorCheck {
    CheckReport norm;          // ||M 1_E||_p^p >= (1 + 4^{-p}) |E|
    CheckReport quarter_level; // |{M 1_E >= 1/4}| >= 2 |E|
};
[[nodiscard]] IndicatorCheck indicator_check(const IntervalSet& e, Exponent p);

struct UnimodalWitness {
    PiecewiseLinear f;
    double mode = 0.0;
    PiecewiseLinear f_tilde;  // dominant half, moved onto (0, inf) and nonincreasing there
    PiecewiseLinear psi;
};

[[nodiscard]] bool is_unimodal(const PiecewiseLinear& f, double mode);
// Chooses the half-line carrying at least half of ||f||_p^p.
[[nodiscard]] UnimodalWitness make_witness(const PiecewiseLinear& f, double mode, Exponent p);

// psi(x) = f_tilde(a(x)) with a(x) the least power of two exceeding x; the
// lowest dyadic cell is extended down to 0.
[[nodiscard]] PiecewiseLinear build_psi(const PiecewiseLinear& f_tilde);
[[nodiscard]] PiecewiseLinear build_psi(const UnimodalWitness& w);

[[nodiscard]] CheckReport psi_norm_check(const UnimodalWitness& w, Exponent p);
// psi <= f_tilde at `samples` points, half uniform and half log-spaced over the support.
[[nodiscard]] CheckReport psi_minorant_check(const UnimodalWitness& w, int samples = 10000);

// gbar(x) = (1 - sqrt x) on (0, 1].
[[nodiscard]] double gbar(double x);
// Continuous piecewise-linear minorant of gbar on knots (i/n)^2, i = 0..n,
// corrected by the exact chord gap of each cell.
[[nodiscard]] PiecewiseLinear gbar_minorant(int n);

struct GbarConfig {
    int minorant_knots = 8000;
    double tol = 1e-6;
    MaximalConfig maximal{};
};

// One step (n = 1) checks M gbar(x) >= 1 - (2/3) sqrt(2x) on the grid; every
// n checks M^n gbar(x) >= gbar((8/9)^n x).
[[nodiscard]] CheckReport gbar_iterate_check(int n, std::span<const double> grid, const GbarConfig& cfg = {});

// C_p = integral over [1/2, 1] of gbar^p.
[[nodiscard]] double gbar_constant(Exponent p);
// ceil(log(2^{p+2} / C_p) / log(9/8))
[[nodiscard]] int implied_iteration_count(Exponent p);

struct UnimodalGrowth {
    CheckReport chain;            // ||M^n psi||_p^p >= C_p (9/8)^n ||psi||_p^p
    bool doubled = false;         // ||M^n f||_p >= 2 ||f||_p at this n
    int implied_n = 0;
    GrowthReport psi_growth;
    GrowthReport f_growth;
};
[[nodiscard]] UnimodalGrowth unimodal_growth_check(const UnimodalWitness& w, Exponent p, int n,
                                                   const MaximalConfig& cfg = {});

struct StabilityGap {
    CheckReport report;
    double epsilon = 0.0;          // ||Mf - f||_p / ||f||_p
    std::size_t nodes = 0;
    std::size_t pointwise_failures = 0;
};
[[nodiscard]] StabilityGap stability_gap_check(const PiecewiseLinear& f, Exponent p,
                                               const MaximalConfig& cfg = {}, double rel_tol = 1e-8);

// ||M f - M g||_p / ||f - g||_p for a test pair, on a common quadrature grid.
[[nodiscard]] double empirical_lipschitz_ratio(const PiecewiseLinear& f, const PiecewiseLinear& g, Exponent p);

}  // namespace maxlab
