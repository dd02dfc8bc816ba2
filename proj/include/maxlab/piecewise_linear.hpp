#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "maxlab/interval_set.hpp"

namespace maxlab {

// Exponent of an L^p norm; always p > 1.
class Exponent {
public:
    explicit Exponent(double p);
    [[nodiscard]] double value() const { return p_; }
    operator double() const { return p_; }

private:
    double p_;
};

// On [a, b] the function is the linear interpolant from (a, ya) to (b, yb).
struct Segment {
    double a;
    double b;
    double ya;
    double yb;

    [[nodiscard]] double slope() const { return (yb - ya) / (b - a); }
    [[nodiscard]] double at(double x) const { return ya + (x - a) * slope(); }
    bool operator==(const Segment&) const = default;
};

// Elementary cell between two consecutive knots. Gaps between segments are
// cells with value == slope == 0. The primitive on the cell is
//   F(t) = mass_before + value (t - lo) + slope/2 (t - lo)^2.
struct PrimitiveCell {
    double lo;
    double hi;
    double mass_before;
    double value;     // f at lo from inside the cell
    double value_hi;  // f at hi from inside the cell
    double slope;

    [[nodiscard]] double f_at(double t) const { return value + slope * (t - lo); }
    [[nodiscard]] double primitive_at(double t) const {
        const double d = t - lo;
        return mass_before + d * (value + 0.5 * slope * d);
    }
};

// Nonnegative, compactly supported, piecewise-linear function. Jumps are
// allowed where segments abut. Immutable once constructed.
class PiecewiseLinear {
public:
    PiecewiseLinear() = default;

    // Throws std::invalid_argument when segments are unsorted, overlapping,
    // degenerate, negative or non-finite.
    explicit PiecewiseLinear(std::vector<Segment> segments);

    [[nodiscard]] std::span<const Segment> segments() const { return segments_; }
    [[nodiscard]] std::span<const double> knots() const { return knots_; }
    [[nodiscard]] std::span<const PrimitiveCell> cells() const { return cells_; }
    [[nodiscard]] bool empty() const { return segments_.empty(); }

    [[nodiscard]] double support_lo() const;
    [[nodiscard]] double support_hi() const;

    // Value at x. On a shared endpoint with a jump the right segment wins.
    [[nodiscard]] double eval(double x) const;
    [[nodiscard]] double left_limit(double x) const;
    [[nodiscard]] double right_limit(double x) const;
    [[nodiscard]] double operator()(double x) const { return eval(x); }

    // F(x) = integral of f over (-inf, x].
    [[nodiscard]] double antideriv(double x) const;
    [[nodiscard]] double total_mass() const { return total_mass_; }
    [[nodiscard]] double max_value() const;

    // Index j with knots[j] <= x < knots[j+1]; -1 left of the support and
    // cells().size() at or right of the last knot.
    [[nodiscard]] std::ptrdiff_t cell_index(double x) const;

    // True when f has no jumps, including at the ends of its support
    // (relative tolerance on the jump size).
    [[nodiscard]] bool is_continuous(double rel_tol = 1e-12) const;

    [[nodiscard]] PiecewiseLinear scaled(double c) const;        // c f(x)
    [[nodiscard]] PiecewiseLinear translated(double h) const;    // f(x - h)
    [[nodiscard]] PiecewiseLinear dilated(double c) const;       // f(c x), c > 0
    [[nodiscard]] PiecewiseLinear reflected() const;             // f(-x)
    [[nodiscard]] PiecewiseLinear restricted(double lo, double hi) const;  // f 1_[lo,hi]

    // Removes interior knots of continuous runs whose value deviates from the
    // chord through the surviving neighbours by at most rel_tol * |value|.
    [[nodiscard]] PiecewiseLinear simplified(double rel_tol) const;

    bool operator==(const PiecewiseLinear& other) const { return segments_ == other.segments_; }

private:
    [[nodiscard]] const Segment* segment_at_or_left(double x, bool strict) const;

    std::vector<Segment> segments_;
    std::vector<double> knots_;
    std::vector<PrimitiveCell> cells_;
    double total_mass_ = 0.0;
};

[[nodiscard]] inline double eval(const PiecewiseLinear& f, double x) { return f.eval(x); }
[[nodiscard]] inline double antideriv(const PiecewiseLinear& f, double x) { return f.antideriv(x); }

// ||f||_p^p, exact per segment.
[[nodiscard]] double lp_norm_p(const PiecewiseLinear& f, Exponent p);
[[nodiscard]] double lp_norm(const PiecewiseLinear& f, Exponent p);

// Closed superlevel set {f >= level}; level > 0.
[[nodiscard]] IntervalSet superlevel_set(const PiecewiseLinear& f, double level);
// Integral of f over {f >= level}.
[[nodiscard]] double superlevel_integral(const PiecewiseLinear& f, double level);

// Continuous interpolant through (grid[i], values[i]); zero outside the grid.
[[nodiscard]] PiecewiseLinear from_samples(std::span<const double> grid,
                                           std::span<const double> values);
[[nodiscard]] PiecewiseLinear resample(const std::function<double(double)>& values_at,
                                       std::span<const double> grid);

[[nodiscard]] PiecewiseLinear add(const PiecewiseLinear& f, const PiecewiseLinear& g);

// Common shapes.
[[nodiscard]] PiecewiseLinear indicator(double lo, double hi);
[[nodiscard]] PiecewiseLinear indicator(const IntervalSet& e);
[[nodiscard]] PiecewiseLinear tent(double lo, double peak_at, double hi, double height);
[[nodiscard]] PiecewiseLinear trapezoid(double lo, double top_lo, double top_hi, double hi,
                                        double height);

}  // namespace maxlab
