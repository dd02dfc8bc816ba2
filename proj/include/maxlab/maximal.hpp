#pragma once

#include <stdexcept>
#include <vector>

#include "maxlab/interval_set.hpp"
#include "maxlab/piecewise_linear.hpp"

namespace maxlab {

// Raised when a numeric budget (tail grid length, iteration depth) cannot be
// met with the configured parameters.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// How Mf is turned back into a PiecewiseLinear.
struct MaximalConfig {
    int refine_factor = 4;          // extra grid points per knot interval
    double tail_grid_ratio = 1.05;  // geometric growth of tail spacing
    // Admissible discarded tail mass per application, relative to the
    // current iterate's ||f||_p^p.
    double tail_tol = 1e-9;
    // Knot thinning after resampling (relative chord deviation); 0 keeps all.
    double simplify_tol = 1e-5;
    std::size_t max_tail_points = 200000;
    // Adaptive quadrature of (Mf)^p over the represented window.
    bool integrate_window = true;
    double quad_rel_tol = 1e-11;

    void validate() const;
};

// Mf(x) = sup_{r>0} (1/2r) integral of f over [x-r, x+r]; exact.
[[nodiscard]] double centered_max_at(const PiecewiseLinear& f, double x);

// Supremum over intervals [a, b] containing x. Left endpoints come from the
// knots of f plus `refine` interior points per knot interval, with b solved
// exactly; the mirrored sweep is included. The value is a lower bound of the
// uncentered maximal function and never below centered_max_at.
[[nodiscard]] double uncentered_max_at(const PiecewiseLinear& f, double x, int refine = 8);

// M 1_E(x), exact.
[[nodiscard]] double indicator_max_at(const IntervalSet& e, double x);

struct MaximalStep {
    PiecewiseLinear g;          // resampled Mf on [window_lo, window_hi]
    double err_p = 0.0;         // bound on the discarded integral of (Mf)^p
    double window_norm_p = 0.0; // quadrature of (Mf)^p over the window
    double window_lo = 0.0;
    double window_hi = 0.0;
    std::vector<double> grid;
};

// Grid used to represent Mf: knots, refinement and the geometric tail out to
// the truncation window. Returns the grid and the tail bound it achieves.
struct TailGrid {
    std::vector<double> points;
    double err_p = 0.0;
};
[[nodiscard]] TailGrid maximal_grid(const PiecewiseLinear& f, Exponent p, const MaximalConfig& cfg);

// Closed-form bound on the integral of (Mf)^p beyond distance `distance` from
// the hull of supp f, on both sides.
[[nodiscard]] double tail_bound_p(double mass, double distance, Exponent p);

[[nodiscard]] MaximalStep apply_M(const PiecewiseLinear& f, Exponent p, const MaximalConfig& cfg = {});

struct GrowthReport {
    double p = 2.0;
    std::vector<double> norms;      // ||M^k f||_p, k = 0..K
    std::vector<double> roots;      // (||M^k f||_p / ||f||_p)^{1/k}; roots[0] = 1
    std::vector<double> raw_roots;  // ||M^k f||_p^{1/k}; raw_roots[0] = 1
    std::vector<double> ratios;     // ||M^{k+1} f||_p / ||M^k f||_p
    double lower_bracket = 0.0;     // (9/8)^{1/p}
    double upper_bracket = 0.0;     // a_p
    double truncation_error_bound_p = 0.0;  // sum of per-step err_p
    std::vector<bool> in_bracket;   // per k >= 1, filled by growth_bracket
    double tail_min_root = 0.0;     // min / max of roots over k >= K/2
    double tail_max_root = 0.0;
};

[[nodiscard]] GrowthReport iterate_M(const PiecewiseLinear& f, int k, Exponent p,
                                     const MaximalConfig& cfg = {});

// Same iteration, but also returns the final represented iterate.
struct IterationResult {
    GrowthReport report;
    std::vector<PiecewiseLinear> iterates;  // M^0 f .. M^k f (resampled)
};
[[nodiscard]] IterationResult iterate_M_with_iterates(const PiecewiseLinear& f, int k, Exponent p,
                                                      const MaximalConfig& cfg = {});

}  // namespace maxlab
