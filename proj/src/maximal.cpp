#include "maxlab/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "maxlab/asymptotics.hpp"
#include "maxlab/parallel.hpp"
#include "maxlab/quadrature.hpp"

namespace maxlab {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// Integral of f from x outwards over distance rho, in one direction. Cells are
// crossed one at a time so every increment is computed locally, which keeps
// tiny radii free of cancellation against the global primitive.
//
// Within the current cell: I(rho) = base + (rho - offset) * (value + slope_out/2 * (rho - offset)),
// where slope_out is the derivative of f along the ray.
class Ray {
public:
    Ray(const PiecewiseLinear& f, double x, bool rightward)
        : cells_(f.cells()), knots_(f.knots()), x_(x), right_(rightward) {
        const auto n = static_cast<std::ptrdiff_t>(cells_.size());
        if (right_) {
            idx_ = std::upper_bound(knots_.begin(), knots_.end(), x) - knots_.begin();
            const auto j = idx_ - 1;
            if (j >= 0 && j < n) {
                const auto& c = cells_[static_cast<std::size_t>(j)];
                value_ = c.f_at(x);
                slope_ = c.slope;
            }
        } else {
            idx_ = (std::lower_bound(knots_.begin(), knots_.end(), x) - knots_.begin()) - 1;
            const auto j = idx_;
            if (j >= 0 && j < n) {
                const auto& c = cells_[static_cast<std::size_t>(j)];
                value_ = c.f_at(x);
                slope_ = -c.slope;
            }
        }
    }

    // Distance to the next knot along the ray.
    [[nodiscard]] double next() const {
        const auto last = static_cast<std::ptrdiff_t>(knots_.size()) - 1;
        if (right_) return idx_ <= last ? knots_[static_cast<std::size_t>(idx_)] - x_ : inf;
        return idx_ >= 0 ? x_ - knots_[static_cast<std::size_t>(idx_)] : inf;
    }

    [[nodiscard]] double integral(double rho) const {
        const double u = rho - offset_;
        return base_ + u * (value_ + 0.5 * slope_ * u);
    }

    // f along the ray at distance rho within the current cell.
    [[nodiscard]] double value_at(double rho) const { return value_ + slope_ * (rho - offset_); }

    // Value of f just inside the current cell at distance offset.
    [[nodiscard]] double start_value() const { return value_; }

    // I(rho) = c0 + c1 rho + c2 rho^2 on the current cell.
    [[nodiscard]] double c0() const { return base_ - offset_ * value_ + 0.5 * slope_ * offset_ * offset_; }
    [[nodiscard]] double c1() const { return value_ - slope_ * offset_; }
    [[nodiscard]] double c2() const { return 0.5 * slope_; }

    void advance() {
        const double rho = next();
        base_ = integral(rho);
        offset_ = rho;
        const auto n = static_cast<std::ptrdiff_t>(cells_.size());
        if (right_) {
            const auto j = idx_;
            ++idx_;
            if (j < n) {
                const auto& c = cells_[static_cast<std::size_t>(j)];
                value_ = c.value;
                slope_ = c.slope;
            } else {
                value_ = slope_ = 0.0;
            }
        } else {
            const auto j = idx_ - 1;
            --idx_;
            if (j >= 0) {
                const auto& c = cells_[static_cast<std::size_t>(j)];
                value_ = c.value_hi;
                slope_ = -c.slope;
            } else {
                value_ = slope_ = 0.0;
            }
        }
    }

private:
    std::span<const PrimitiveCell> cells_;
    std::span<const double> knots_;
    double x_;
    bool right_;
    std::ptrdiff_t idx_ = 0;
    double base_ = 0.0;
    double offset_ = 0.0;
    double value_ = 0.0;
    double slope_ = 0.0;
};

void require_nonempty(const PiecewiseLinear& f) {
    if (f.empty()) throw std::invalid_argument("maximal operator: empty function");
}

// Best value of (fixed + I(rho)) / (denom_offset + rho) over rho in [lo, hi]
// for a ray in its current cell, checking the interior stationary points.
double best_in_cell(const Ray& ray, double fixed, double denom_offset, double lo, double hi) {
    const double c0 = fixed + ray.c0();
    const double c1 = ray.c1();
    const double c2 = ray.c2();
    double best = -inf;
    if (c2 == 0.0) return best;
    // d/drho [(c0 + c1 r + c2 r^2)/(e + r)] = 0  <=>  c2 r^2 + 2 c2 e r + (c1 e - c0) = 0
    const double e = denom_offset;
    const double disc = e * e - (c1 * e - c0) / c2;
    if (disc < 0.0) return best;
    const double s = std::sqrt(disc);
    // -e + s rewritten without cancellation for large e
    const double near = s + e > 0.0 ? -(c1 * e - c0) / (c2 * (s + e)) : -e + s;
    for (const double r : {near, -e - s}) {
        if (r > lo && r < hi && e + r > 0.0) best = std::max(best, (fixed + ray.integral(r)) / (e + r));
    }
    return best;
}

double sweep_other_end(const PiecewiseLinear& f, double x, bool rightward, double fixed, double e);

}  // namespace

double centered_max_at(const PiecewiseLinear& f, double x) {
    require_nonempty(f);
    // Outside the support only one side of the interval sees f; sweeping from
    // the support edge keeps the distances exact far away.
    if (x > f.support_hi()) return 0.5 * std::max(sweep_other_end(f, f.support_hi(), false, 0.0, x - f.support_hi()), 0.0);
    if (x < f.support_lo()) return 0.5 * std::max(sweep_other_end(f, f.support_lo(), true, 0.0, f.support_lo() - x), 0.0);
    Ray right(f, x, true);
    Ray left(f, x, false);
    double best = 0.5 * (right.start_value() + left.start_value());  // r -> 0+
    double r_prev = 0.0;
    for (;;) {
        const double nr = right.next();
        const double nl = left.next();
        const double r_end = std::min(nr, nl);
        // With N(r_prev + u) = n0 + n1 u + c2 u^2 the average N/(2r) is
        // stationary where c2 u^2 + 2 c2 r_prev u + (n1 r_prev - n0) = 0.
        const double c2 = right.c2() + left.c2();
        if (c2 != 0.0) {
            const double n0 = right.integral(r_prev) + left.integral(r_prev);
            const double n1 = right.value_at(r_prev) + left.value_at(r_prev);
            const double k = (n0 - n1 * r_prev) / c2;
            const double disc = r_prev * r_prev + k;
            if (disc >= 0.0 && r_prev + std::sqrt(disc) > 0.0) {
                const double r = r_prev + k / (r_prev + std::sqrt(disc));
                if (r > r_prev && r < r_end) best = std::max(best, (right.integral(r) + left.integral(r)) / (2.0 * r));
            }
        }
        if (r_end == inf) break;  // beyond the support the average only decays
        best = std::max(best, (right.integral(r_end) + left.integral(r_end)) / (2.0 * r_end));
        if (nr == r_end) right.advance();
        if (nl == r_end) left.advance();
        r_prev = r_end;
    }
    return best;
}

namespace {

// sup over b >= x (b > a) of (fixed + integral_x^b f) / (b - a), where
// fixed = integral_a^x f and e = x - a >= 0. Rightward ray from x.
double sweep_other_end(const PiecewiseLinear& f, double x, bool rightward, double fixed, double e) {
    Ray ray(f, x, rightward);
    double best = -inf;
    double r_prev = 0.0;
    if (e > 0.0) best = fixed / e;
    for (;;) {
        const double r_end = ray.next();
        best = std::max(best, best_in_cell(ray, fixed, e, r_prev, r_end));
        if (r_end == inf) break;
        best = std::max(best, (fixed + ray.integral(r_end)) / (e + r_end));
        ray.advance();
        r_prev = r_end;
    }
    return best;
}

// Candidate endpoints on one side of x (distances from x), nearest first.
std::vector<double> endpoint_distances(const PiecewiseLinear& f, double x, bool rightward, int refine) {
    std::vector<double> d;
    const auto knots = f.knots();
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double lo = knots[i];
        const double hi = knots[i + 1];
        for (int k = 0; k <= refine + 1; ++k) {
            const double t = k == refine + 1 ? hi : lo + (hi - lo) * k / (refine + 1);
            const double dist = rightward ? t - x : x - t;
            if (dist > 0.0) d.push_back(dist);
        }
    }
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    return d;
}

double one_sided_uncentered(const PiecewiseLinear& f, double x, bool fix_left, int refine) {
    // Fix the endpoint on side `fix_left ? left : right`, walk a ray towards it
    // to accumulate the fixed part, and solve the opposite endpoint exactly.
    Ray toward(f, x, !fix_left);
    double best = sweep_other_end(f, x, fix_left, 0.0, 0.0);  // endpoint at x itself
    for (const double dist : endpoint_distances(f, x, !fix_left, refine)) {
        while (toward.next() < dist) toward.advance();
        const double fixed = toward.integral(dist);
        best = std::max(best, sweep_other_end(f, x, fix_left, fixed, dist));
    }
    return best;
}

}  // namespace

double uncentered_max_at(const PiecewiseLinear& f, double x, int refine) {
    require_nonempty(f);
    if (refine < 0) throw std::invalid_argument("uncentered_max_at: refine must be >= 0");
    double best = centered_max_at(f, x);
    best = std::max(best, one_sided_uncentered(f, x, true, refine));
    best = std::max(best, one_sided_uncentered(f, x, false, refine));
    return best;
}

double indicator_max_at(const IntervalSet& e, double x) {
    if (e.empty()) throw std::invalid_argument("indicator_max_at: empty set");
    double best = e.contains(x) ? 1.0 : 0.0;
    for (const auto& iv : e.intervals()) {
        for (const double end : {iv.lo, iv.hi}) {
            const double r = std::abs(x - end);
            if (r > 0.0) best = std::max(best, e.measure_within(x - r, x + r) / (2.0 * r));
        }
    }
    return best;
}

void MaximalConfig::validate() const {
    if (refine_factor < 1) throw std::invalid_argument("MaximalConfig: refine_factor must be >= 1");
    if (!(tail_grid_ratio > 1.0) || !std::isfinite(tail_grid_ratio))
        throw std::invalid_argument("MaximalConfig: tail_grid_ratio must be > 1");
    if (!(tail_tol > 0.0)) throw std::invalid_argument("MaximalConfig: tail_tol must be > 0");
    if (simplify_tol < 0.0) throw std::invalid_argument("MaximalConfig: simplify_tol must be >= 0");
    if (!(quad_rel_tol > 0.0)) throw std::invalid_argument("MaximalConfig: quad_rel_tol must be > 0");
}

double tail_bound_p(double mass, double distance, Exponent p) {
    // For x beyond the hull at distance d, Mf(x) <= mass / (2 d); integrate the
    // p-th power from `distance` to infinity on both sides.
    return 2.0 * std::pow(mass, p) / (std::pow(2.0, p) * (p - 1.0) * std::pow(distance, p - 1.0));
}

TailGrid maximal_grid(const PiecewiseLinear& f, Exponent p, const MaximalConfig& cfg) {
    cfg.validate();
    require_nonempty(f);
    const double mass = f.total_mass();
    if (!(mass > 0.0)) throw std::invalid_argument("apply_M: function has zero mass");

    TailGrid out;
    auto& pts = out.points;
    const auto knots = f.knots();
    const int per = cfg.refine_factor + 1;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double lo = knots[i];
        const double hi = knots[i + 1];
        for (int k = 0; k < per; ++k) pts.push_back(lo + (hi - lo) * k / per);
    }
    pts.push_back(knots.back());

    const double lo = knots.front();
    const double hi = knots.back();
    const double half = 0.5 * (hi - lo);
    const double first_step = std::min(pts[1] - pts[0], pts[pts.size() - 1] - pts[pts.size() - 2]);
    const double budget = cfg.tail_tol * lp_norm_p(f, p);

    std::vector<double> dist;
    double d = 0.0;
    double err = inf;
    while (err > budget) {
        if (dist.size() >= cfg.max_tail_points)
            throw BudgetError("apply_M: tail tolerance " + std::to_string(cfg.tail_tol) +
                              " unreachable within " + std::to_string(cfg.max_tail_points) + " tail points");
        d += std::max(first_step, (half + d) * (cfg.tail_grid_ratio - 1.0));
        dist.push_back(d);
        err = tail_bound_p(mass, d, p);
    }
    out.err_p = err;

    std::vector<double> grid;
    grid.reserve(pts.size() + 2 * dist.size());
    for (auto it = dist.rbegin(); it != dist.rend(); ++it) grid.push_back(lo - *it);
    grid.insert(grid.end(), pts.begin(), pts.end());
    for (const double t : dist) grid.push_back(hi + t);
    pts = std::move(grid);
    return out;
}

MaximalStep apply_M(const PiecewiseLinear& f, Exponent p, const MaximalConfig& cfg) {
    TailGrid tg = maximal_grid(f, p, cfg);
    MaximalStep step;
    step.err_p = tg.err_p;
    step.window_lo = tg.points.front();
    step.window_hi = tg.points.back();

    std::vector<double> values(tg.points.size());
    parallel_for(values.size(), [&](std::size_t i) { values[i] = centered_max_at(f, tg.points[i]); });
    step.g = from_samples(tg.points, values).simplified(cfg.simplify_tol);
    step.grid = std::move(tg.points);

    if (cfg.integrate_window) {
        const auto cells = step.g.knots();
        std::vector<double> partial(cells.size() > 0 ? cells.size() - 1 : 0);
        auto integrand = [&](double t) { return std::pow(centered_max_at(f, t), p.value()); };
        parallel_for(partial.size(), [&](std::size_t i) {
            partial[i] = quad::adaptive(integrand, cells[i], cells[i + 1], cfg.quad_rel_tol, 0.0, 30).value;
        });
        double total = 0.0;
        for (const double v : partial) total += v;
        step.window_norm_p = total;
    } else {
        step.window_norm_p = lp_norm_p(step.g, p);
    }
    return step;
}

IterationResult iterate_M_with_iterates(const PiecewiseLinear& f, int k, Exponent p, const MaximalConfig& cfg) {
    if (k < 1) throw std::invalid_argument("iterate_M: k must be >= 1");
    IterationResult out;
    auto& rep = out.report;
    rep.p = p;
    rep.norms.push_back(lp_norm(f, p));
    rep.roots.push_back(1.0);
    rep.raw_roots.push_back(1.0);
    out.iterates.push_back(f);
    for (int step = 1; step <= k; ++step) {
        MaximalStep s = apply_M(out.iterates.back(), p, cfg);
        const double norm = std::pow(s.window_norm_p, 1.0 / p);
        rep.ratios.push_back(norm / rep.norms.back());
        rep.norms.push_back(norm);
        rep.roots.push_back(std::pow(norm / rep.norms.front(), 1.0 / step));
        rep.raw_roots.push_back(std::pow(norm, 1.0 / step));
        rep.truncation_error_bound_p += s.err_p;
        out.iterates.push_back(std::move(s.g));
    }
    rep.lower_bracket = std::pow(9.0 / 8.0, 1.0 / p);
    rep.upper_bracket = solve_ap(p).a_p;
    const std::size_t from = std::max<std::size_t>(1, static_cast<std::size_t>(k) / 2);
    rep.tail_min_root = *std::min_element(rep.roots.begin() + static_cast<std::ptrdiff_t>(from), rep.roots.end());
    rep.tail_max_root = *std::max_element(rep.roots.begin() + static_cast<std::ptrdiff_t>(from), rep.roots.end());
    return out;
}

GrowthReport iterate_M(const PiecewiseLinear& f, int k, Exponent p, const MaximalConfig& cfg) {
    return iterate_M_with_iterates(f, k, p, cfg).report;
}

}  // namespace maxlab
