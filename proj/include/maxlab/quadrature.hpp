#pragma once

#include <array>
#include <functional>
#include <span>

namespace maxlab::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
};

// Adaptive Gauss-Kronrod (7/15) on [a, b]; bisects until the local
// |K15 - G7| estimate is below max(abs_tol, rel_tol * |value|).
Result adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-10,
                double abs_tol = 0.0, int max_depth = 40);

// Same rule applied independently on each cell of a strictly increasing grid.
Result adaptive_on_grid(const std::function<double(double)>& f, std::span<const double> grid,
                        double rel_tol = 1e-10, double abs_tol = 0.0, int max_depth = 30);

// Gauss-Legendre nodes and weights on [-1, 1].
struct Rule {
    std::span<const double> nodes;
    std::span<const double> weights;
};
Rule gauss_legendre8();

}  // namespace maxlab::quad
