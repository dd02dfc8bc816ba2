#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "maxlab/maximal.hpp"
#include "maxlab/piecewise_linear.hpp"
#include "maxlab/report.hpp"

namespace maxlab {

struct ApSolution {
    double p = 2.0;
    double a_p = 1.0;
    double maximizing_radius = 0.0;
    double method_tolerance = 0.0;
};

// Average of |y|^{-1/p} over [1 - r, 1 + r].
[[nodiscard]] double power_profile_average(double r, Exponent p);

// a_p with M(|x|^{-1/p}) = a_p |x|^{-1/p}: the supremum over r of
// power_profile_average, found by a log-grid scan on [1e-6, 1e6] followed by
// golden-section refinement of every local maximum.
[[nodiscard]] ApSolution solve_ap(Exponent p, double tol = 1e-12);

// h(x) = 1 on [-1, 1] and |x|^{-1/s} outside, s = p - delta.
[[nodiscard]] double h_profile(double x, double s);
// Mh(x), maximised over radii with closed-form averages of h.
[[nodiscard]] double h_maximal_at(double x, double s);

// Mh <= a_{p-delta} h at every grid point.
[[nodiscard]] CheckReport h_domination_check(Exponent p, double delta, std::span<const double> grid,
                                             double rel_tol = 1e-9);

// iterate_M plus the (9/8)^{1/p} .. a_p bracket flags. Excursions at finite k
// are reported, never failed.
[[nodiscard]] GrowthReport growth_bracket(const PiecewiseLinear& f, Exponent p, int k_max,
                                          const MaximalConfig& cfg = {});

struct SearchResult {
    double p = 2.0;
    double best_ratio = 0.0;
    std::vector<double> best_params;
    int evaluations = 0;
    std::string family;
    int dof = 0;
    int budget = 0;
    std::uint64_t seed = 0;
    // power-tail family only: ratio at the best cap width for increasing
    // truncation radii (radius, ratio) pairs.
    std::vector<std::pair<double, double>> trend;
};

// Members of the search families.
[[nodiscard]] PiecewiseLinear pwl_free_member(std::span<const double> params);
[[nodiscard]] PiecewiseLinear power_tail_member(std::span<const double> params, Exponent p, int tail_knots);

// ||M f||_p / ||f||_p from the window quadrature of apply_M plus its tail bound.
[[nodiscard]] double maximal_ratio(const PiecewiseLinear& f, Exponent p, const MaximalConfig& cfg);

// Multistart Nelder-Mead minimisation of ||M f_theta||_p / ||f_theta||_p over a
// low-dimensional family ("pwl-free" or "power-tail").
[[nodiscard]] SearchResult search_extremizer(Exponent p, const std::string& family, int dof, int budget,
                                             const MaximalConfig& cfg, std::uint64_t seed, int starts = 4);

}  // namespace maxlab
