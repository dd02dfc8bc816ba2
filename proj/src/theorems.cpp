#include "maxlab/theorems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "maxlab/parallel.hpp"
#include "maxlab/quadrature.hpp"

namespace maxlab {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

void require_continuous(const PiecewiseLinear& f, const char* who) {
    if (!f.is_continuous()) throw std::invalid_argument(std::string(who) + ": f must be continuous");
}

std::vector<double> evaluate_all(std::span<const double> xs, const std::function<double(double)>& fn) {
    std::vector<double> out(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) { out[i] = fn(xs[i]); });
    return out;
}

// Measure of {fn >= level} given samples on a grid whose end points lie
// outside the set; each cell with a sign change is bisected.
double superlevel_measure_on_grid(const std::function<double(double)>& fn, std::span<const double> grid,
                                  double level, double bisect_tol) {
    const auto values = evaluate_all(grid, fn);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const bool in_a = values[i] >= level;
        const bool in_b = values[i + 1] >= level;
        if (in_a && in_b) {
            total += grid[i + 1] - grid[i];
        } else if (in_a != in_b) {
            double a = grid[i];
            double b = grid[i + 1];
            while (b - a > bisect_tol) {
                const double m = 0.5 * (a + b);
                if (m <= a || m >= b) break;
                if ((fn(m) >= level) == in_a)
                    a = m;
                else
                    b = m;
            }
            const double cut = 0.5 * (a + b);
            total += in_a ? cut - grid[i] : grid[i + 1] - cut;
        }
    }
    return total;
}

std::vector<double> refined(std::span<const double> knots, int per) {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
        for (int k = 0; k < per; ++k) out.push_back(knots[i] + (knots[i + 1] - knots[i]) * k / per);
    if (!knots.empty()) out.push_back(knots.back());
    return out;
}

std::vector<double> with_tails(std::vector<double> core, double reach, int tail_points) {
    std::vector<double> out;
    const double lo = core.front();
    const double hi = core.back();
    for (int k = tail_points; k >= 1; --k) out.push_back(lo - reach * k / tail_points);
    out.insert(out.end(), core.begin(), core.end());
    for (int k = 1; k <= tail_points; ++k) out.push_back(hi + reach * k / tail_points);
    return out;
}

}  // namespace

// ---------------------------------------------------------------- envelope

PhiEnvelope::PhiEnvelope(const PiecewiseLinear& f, double level) : f_(&f), level_(level) {
    if (!(level > 0.0)) throw std::invalid_argument("phi: level must be positive");
    require_continuous(f, "phi");
    const auto knots = f.knots();
    const auto cells = f.cells();
    g_at_knot_.resize(knots.size());
    prefix_min_.resize(knots.size());
    for (std::size_t j = 0; j < knots.size(); ++j) g_at_knot_[j] = f.antideriv(knots[j]) - 2.0 * level * knots[j];
    if (knots.empty()) return;
    prefix_min_[0] = g_at_knot_[0];
    for (std::size_t j = 0; j < cells.size(); ++j) {
        const auto& c = cells[j];
        double cell_min = std::min(g_at_knot_[j], g_at_knot_[j + 1]);
        if (c.slope > 0.0) {
            const double t = c.lo + (2.0 * level - c.value) / c.slope;
            if (t > c.lo && t < c.hi) cell_min = std::min(cell_min, c.primitive_at(t) - 2.0 * level * t);
        }
        prefix_min_[j + 1] = std::min(prefix_min_[j], cell_min);
    }
}

double PhiEnvelope::operator()(double x) const {
    const auto knots = f_->knots();
    const auto cells = f_->cells();
    if (knots.empty() || x <= knots.front()) return 0.0;
    const double two_l = 2.0 * level_;
    if (x > knots.back()) {
        const std::size_t n = knots.size() - 1;
        return std::max(0.0, (g_at_knot_[n] - prefix_min_[n]) - two_l * (x - knots[n]));
    }
    // cell j with knots[j] < x <= knots[j+1]
    const auto j = static_cast<std::size_t>(std::lower_bound(knots.begin(), knots.end(), x) - knots.begin() - 1);
    const auto& c = cells[j];
    const double fx = x == c.hi ? c.value_hi : c.f_at(x);
    // y inside the cell: integral_y^x f - 2 level (x - y), evaluated locally
    auto local = [&](double y, double fy) { return (x - y) * (0.5 * (fy + fx) - two_l); };
    double best = local(c.lo, c.value);
    if (c.slope > 0.0) {
        const double t = c.lo + (two_l - c.value) / c.slope;
        if (t > c.lo && t < x) best = std::max(best, local(t, two_l));
    }
    const double d = x - c.lo;
    const double g_rise = d * (c.value + 0.5 * c.slope * d) - two_l * d;
    best = std::max(best, (g_at_knot_[j] - prefix_min_[j]) + g_rise);
    return std::max(best, 0.0);
}

double phi_at(const PiecewiseLinear& f, double level, double x) { return PhiEnvelope(f, level)(x); }

CheckReport inclusion_check(const PiecewiseLinear& f, double level, std::span<const double> sample_grid,
                            double tol) {
    const PhiEnvelope phi(f, level);
    std::vector<int> kind(sample_grid.size(), 0);
    parallel_for(sample_grid.size(), [&](std::size_t i) {
        const double x = sample_grid[i];
        const double fx = f.eval(x);
        const double ph = phi(x);
        int v = 0;
        if (fx > 2.0 * level && !(ph > 0.0)) v |= 1;
        if ((ph > 0.0 || fx >= level) && !f.empty() && centered_max_at(f, x) < level * (1.0 - tol)) v |= 2;
        kind[i] = v;
    });
    std::size_t v_sub = 0;
    std::size_t v_sup = 0;
    for (const int k : kind) {
        v_sub += (k & 1) != 0;
        v_sup += (k & 2) != 0;
    }
    std::ostringstream d;
    d << "points=" << sample_grid.size() << " level=" << level << " violations{f>2l => phi>0}=" << v_sub
      << " violations{phi>0 or f>=l => Mf>=l}=" << v_sup;
    return make_report("inclusion", 0.0, static_cast<double>(v_sub + v_sup), 0.0, d.str());
}

double maximal_superlevel_measure(const PiecewiseLinear& f, double level, int refine, double bisect_tol) {
    if (!(level > 0.0)) throw std::invalid_argument("superlevel measure: level must be positive");
    if (f.empty() || !(f.total_mass() > 0.0)) return 0.0;
    // Mf(x) <= mass / (2 dist(x, hull)) < level beyond reach
    const double reach = f.total_mass() / (2.0 * level) * (1.0 + 1e-9) + 1e-12;
    const auto grid = with_tails(refined(f.knots(), refine), reach, 8 * refine);
    return superlevel_measure_on_grid([&](double x) { return centered_max_at(f, x); }, grid, level, bisect_tol);
}

CheckReport sunrise_check(const PiecewiseLinear& f, double level, const MaximalConfig& cfg, double rel_tol) {
    require_continuous(f, "sunrise_check");
    if (!(level > 0.0)) throw std::invalid_argument("sunrise_check: level must be positive");
    const double rhs = superlevel_integral(f, level) / (2.0 * level);
    const double lhs = maximal_superlevel_measure(f, level, 4 * cfg.refine_factor);
    std::ostringstream d;
    d << "level=" << level << " |{Mf>=l}|=" << lhs << " (1/2l) int_{f>=l} f=" << rhs;
    return make_report("sunrise", lhs, rhs, rel_tol * rhs, d.str());
}

// ---------------------------------------------------------------- theorem 1

double theorem1_constant(Exponent p) { return std::pow(p / (2.0 * (p - 1.0)), 1.0 / p); }

CheckReport theorem1_check(const PiecewiseLinear& f, Exponent p, const MaximalConfig& cfg, double rel_tol) {
    if (!(p < 2.0)) throw std::invalid_argument("theorem1_check: requires 1 < p < 2");
    const auto step = apply_M(f, p, cfg);
    const double lhs = std::pow(std::max(step.window_norm_p - step.err_p, 0.0), 1.0 / p);
    const double rhs = theorem1_constant(p) * lp_norm(f, p);
    std::ostringstream d;
    d << "p=" << p.value() << " constant=" << theorem1_constant(p) << " ||f||_p=" << lp_norm(f, p)
      << " window=[" << step.window_lo << "," << step.window_hi << "] err_p=" << step.err_p
      << " ratio=" << lhs / lp_norm(f, p);
    return make_report("theorem1", lhs, rhs, rel_tol * rhs, d.str());
}

// ---------------------------------------------------------------- indicators

namespace {

// Integral over [hi, inf) of (M 1_E)^p, where M 1_E(x) = max_e mu_e / (2 (x - e))
// over left endpoints e with mu_e = |E ∩ [e, inf)|.
double indicator_right_tail(const IntervalSet& e, double p) {
    const double hi = e.hull_hi();
    struct Branch {
        double at;
        double mu;
    };
    std::vector<Branch> branches;
    for (const auto& iv : e.intervals()) branches.push_back({iv.lo, e.measure_within(iv.lo, hi)});
    auto value = [&](const Branch& b, double x) { return b.mu / (2.0 * (x - b.at)); };

    std::vector<double> cuts{hi};
    for (std::size_t i = 0; i < branches.size(); ++i) {
        for (std::size_t j = i + 1; j < branches.size(); ++j) {
            const auto& a = branches[i];
            const auto& b = branches[j];
            if (a.mu == b.mu) continue;
            const double x = (a.mu * b.at - b.mu * a.at) / (a.mu - b.mu);
            if (x > hi) cuts.push_back(x);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(inf);

    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double a = cuts[k];
        const double b = cuts[k + 1];
        const double probe = std::isinf(b) ? 2.0 * a - e.hull_lo() + 1.0 : 0.5 * (a + b);
        const Branch* dom = &branches.front();
        for (const auto& br : branches)
            if (value(br, probe) > value(*dom, probe)) dom = &br;
        const double ua = std::pow(a - dom->at, 1.0 - p);
        const double ub = std::isinf(b) ? 0.0 : std::pow(b - dom->at, 1.0 - p);
        total += std::pow(dom->mu / 2.0, p) * (ua - ub) / (p - 1.0);
    }
    return total;
}

IntervalSet mirrored(const IntervalSet& e) {
    std::vector<Interval> out;
    for (auto it = e.intervals().rbegin(); it != e.intervals().rend(); ++it) out.push_back({-it->hi, -it->lo});
    return IntervalSet(std::move(out));
}

std::vector<double> endpoints(const IntervalSet& e) {
    std::vector<double> pts;
    for (const auto& iv : e.intervals()) {
        if (pts.empty() || pts.back() != iv.lo) pts.push_back(iv.lo);
        pts.push_back(iv.hi);
    }
    return pts;
}

}  // namespace

double indicator_maximal_norm_p(const IntervalSet& e, Exponent p) {
    if (e.empty()) throw std::invalid_argument("indicator norm: empty set");
    const double pp = p;
    double total = 0.0;
    const auto pts = endpoints(e);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i];
        const double b = pts[i + 1];
        if (e.contains(0.5 * (a + b))) {
            total += b - a;  // M 1_E = 1 on E
            continue;
        }
        total += quad::adaptive([&](double x) { return std::pow(indicator_max_at(e, x), pp); }, a, b, 1e-12, 0.0, 40)
                     .value;
    }
    total += indicator_right_tail(e, pp);
    total += indicator_right_tail(mirrored(e), pp);
    return total;
}

double indicator_superlevel_measure(const IntervalSet& e, double level) {
    if (e.empty()) throw std::invalid_argument("indicator superlevel: empty set");
    const double reach = e.measure() / (2.0 * level) * (1.0 + 1e-9) + 1e-12;
    const auto grid = with_tails(refined(endpoints(e), 64), reach, 512);
    return superlevel_measure_on_grid([&](double x) { return indicator_max_at(e, x); }, grid, level, 1e-12);
}

IndicatorCheck indicator_check(const IntervalSet& e, Exponent p) {
    if (e.empty()) throw std::invalid_argument("indicator_check: empty set");
    IndicatorCheck out;
    const double measure_e = e.measure();
    const double lhs = indicator_maximal_norm_p(e, p);
    const double rhs = (1.0 + std::pow(4.0, -p.value())) * measure_e;
    std::ostringstream d;
    d << "p=" << p.value() << " |E|=" << measure_e << " ||M1_E||_p^p=" << lhs << " intervals=" << e.size();
    out.norm = make_report("indicator", lhs, rhs, 1e-10 * rhs, d.str());

    const double quarter = indicator_superlevel_measure(e, 0.25);
    std::ostringstream q;
    q << "|{M1_E>=1/4}|=" << quarter << " 2|E|=" << 2.0 * measure_e;
    out.quarter_level = make_report("indicator_quarter_level", quarter, 2.0 * measure_e, 1e-9 * measure_e, q.str());
    return out;
}

// ---------------------------------------------------------------- unimodal

bool is_unimodal(const PiecewiseLinear& f, double mode) {
    std::vector<double> xs(f.knots().begin(), f.knots().end());
    xs.push_back(mode);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    constexpr double slack = 1e-12;
    double prev = 0.0;
    for (const double x : xs) {
        const double vals[2] = {f.left_limit(x), f.right_limit(x)};
        for (int side = 0; side < 2; ++side) {
            const double v = vals[side];
            const double scale = slack * std::max({1.0, v, prev});
            if (x == mode && side == 1) {  // no constraint across a jump at the mode
                prev = v;
                continue;
            }
            const bool rising = x < mode || x == mode;
            if (rising && v < prev - scale) return false;
            if (!rising && v > prev + scale) return false;
            prev = v;
        }
    }
    return true;
}

UnimodalWitness make_witness(const PiecewiseLinear& f, double mode, Exponent p) {
    if (f.empty()) throw std::invalid_argument("witness: empty function");
    if (!is_unimodal(f, mode)) throw std::invalid_argument("witness: f is not unimodal about the given mode");
    const double big = 2.0 * (std::abs(f.support_lo()) + std::abs(f.support_hi()) + std::abs(mode)) + 1.0;
    const auto right = f.restricted(mode, big).translated(-mode);
    const auto left = f.restricted(-big, mode).translated(-mode).reflected();
    UnimodalWitness w;
    w.f = f;
    w.mode = mode;
    w.f_tilde = lp_norm_p(right, p) >= lp_norm_p(left, p) ? right : left;
    w.psi = build_psi(w.f_tilde);
    return w;
}

PiecewiseLinear build_psi(const PiecewiseLinear& ft) {
    if (ft.empty()) return {};
    if (ft.support_lo() < 0.0) throw std::invalid_argument("build_psi: f_tilde must live on the positive half-line");
    if (!is_unimodal(ft, ft.support_lo()) || (ft.support_lo() > 0.0 && ft.max_value() > 0.0))
        throw std::invalid_argument("build_psi: f_tilde must be nonincreasing on (0, inf)");

    const auto& first = ft.segments().front();
    const double f0 = first.ya;
    const double slope = std::abs(first.slope());
    double bottom = first.b;
    if (slope > 0.0) bottom = std::min(bottom, 1e-9 * f0 / slope);
    int s0 = static_cast<int>(std::floor(std::log2(bottom)));
    s0 = std::max(s0, -1000);
    while (std::ldexp(1.0, s0) > bottom) --s0;
    const double top = ft.support_hi();
    int s_top = static_cast<int>(std::ceil(std::log2(top)));
    while (std::ldexp(1.0, s_top) < top) ++s_top;

    std::vector<Segment> segs;
    const double c = std::ldexp(1.0, s0);
    if (const double v = ft.eval(c); v > 0.0) segs.push_back({0.0, c, v, v});
    for (int s = s0; s < s_top; ++s) {
        const double a = std::ldexp(1.0, s);
        const double b = std::ldexp(1.0, s + 1);
        const double v = ft.eval(b);
        if (v > 0.0) segs.push_back({a, b, v, v});
    }
    return PiecewiseLinear(std::move(segs));
}

PiecewiseLinear build_psi(const UnimodalWitness& w) { return build_psi(w.f_tilde); }

CheckReport psi_norm_check(const UnimodalWitness& w, Exponent p) {
    const double lhs = 2.0 * lp_norm_p(w.psi, p);
    const double rhs = lp_norm_p(w.f_tilde, p);
    // Dyadic sum of f_tilde(2^s)^p 2^s over the cells of psi, read straight
    // from f_tilde; the lowest cell (0, 2^{s0}] contributes 2^{s0+1} f(2^{s0})^p.
    double dyadic = 0.0;
    bool first = true;
    for (const auto& seg : w.psi.segments()) {
        const double v = std::pow(w.f_tilde.eval(seg.b), p.value());
        dyadic += (first && seg.a == 0.0) ? 2.0 * seg.b * v : seg.b * v;
        first = false;
    }
    const double identity_err = lhs == 0.0 ? std::abs(dyadic) : std::abs(lhs - dyadic) / lhs;
    std::ostringstream d;
    d << "2||psi||_p^p=" << lhs << " ||f_tilde||_p^p=" << rhs << " dyadic_sum=" << dyadic
      << " identity_rel_err=" << identity_err << " cells=" << w.psi.segments().size();
    auto rep = make_report("psi_norm", lhs, rhs, 1e-12 * std::max(rhs, 1e-300), d.str());
    rep.pass = rep.pass && identity_err <= 1e-12;
    return rep;
}

CheckReport psi_minorant_check(const UnimodalWitness& w, int samples) {
    if (samples < 2) throw std::invalid_argument("psi_minorant_check: need at least two samples");
    const double top = w.f_tilde.empty() ? 1.0 : w.f_tilde.support_hi() * 1.01;
    const int half = samples / 2;
    std::vector<double> xs;
    for (int i = 1; i <= half; ++i) xs.push_back(top * i / half);
    const double lo = std::log(top * 1e-9);
    const int rest = samples - half;
    for (int i = 0; i < rest; ++i) xs.push_back(std::exp(lo + (std::log(top) - lo) * i / std::max(rest - 1, 1)));
    double worst = inf;
    std::size_t violations = 0;
    for (const double x : xs) {
        const double gap = w.f_tilde.eval(x) - w.psi.eval(x);
        worst = std::min(worst, gap);
        if (gap < 0.0) ++violations;
    }
    std::ostringstream d;
    d << "samples=" << xs.size() << " violations=" << violations << " min(f_tilde-psi)=" << worst;
    return make_report("psi_minorant", worst, 0.0, 0.0, d.str());
}

// ---------------------------------------------------------------- gbar

double gbar(double x) { return (x > 0.0 && x <= 1.0) ? 1.0 - std::sqrt(x) : 0.0; }

PiecewiseLinear gbar_minorant(int n) {
    if (n < 2) throw std::invalid_argument("gbar_minorant: need at least two cells");
    const double h = 1.0 / n;
    // chord of sqrt on [u^2, (u+h)^2] lies below sqrt by at most h^2 / (8 (u + h/2))
    auto gap = [&](int i) { return h * h / (8.0 * (i * h + 0.5 * h)); };
    std::vector<double> xs(static_cast<std::size_t>(n) + 1);
    std::vector<double> ys(xs.size());
    for (int i = 0; i <= n; ++i) {
        const double u = static_cast<double>(i) / n;
        xs[static_cast<std::size_t>(i)] = u * u;
        double m = 0.0;
        if (i > 0) m = std::max(m, gap(i - 1));
        if (i < n) m = std::max(m, gap(i));
        ys[static_cast<std::size_t>(i)] = (1.0 - u) - m;
    }
    xs.back() = 1.0;
    ys.back() = 0.0;
    // gbar lies above its tangent at 1, which bounds the last chord
    const double x_prev = xs[xs.size() - 2];
    ys[ys.size() - 2] = std::min(ys[ys.size() - 2], 0.5 * (1.0 - x_prev));
    std::vector<Segment> segs;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        segs.push_back({xs[i], xs[i + 1], std::max(ys[i], 0.0), std::max(ys[i + 1], 0.0)});
    return PiecewiseLinear(std::move(segs));
}

CheckReport gbar_iterate_check(int n, std::span<const double> grid, const GbarConfig& cfg) {
    if (n < 1) throw std::invalid_argument("gbar_iterate_check: n must be >= 1");
    if (n > 8) throw BudgetError("gbar_iterate_check: n > 8 exceeds the iteration budget");
    const double reach = std::pow(9.0 / 8.0, n);
    for (const double x : grid)
        if (!(x > 0.0 && x <= reach * (1.0 + 1e-15)))
            throw std::invalid_argument("gbar_iterate_check: grid must lie in (0, (9/8)^n]");

    PiecewiseLinear g = gbar_minorant(cfg.minorant_knots);
    MaximalConfig mc = cfg.maximal;
    mc.integrate_window = false;
    for (int k = 1; k < n; ++k) g = apply_M(g, Exponent(2.0), mc).g;

    const double shrink = std::pow(8.0 / 9.0, n);
    std::vector<double> slack(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        const double x = grid[i];
        double target = gbar(shrink * x);
        if (n == 1) target = std::max(target, 1.0 - (2.0 / 3.0) * std::sqrt(2.0 * x));
        slack[i] = centered_max_at(g, x) - target;
    });
    std::size_t violations = 0;
    double worst = inf;
    for (const double s : slack) {
        worst = std::min(worst, s);
        if (s < -cfg.tol) ++violations;
    }
    std::ostringstream d;
    d << "n=" << n << " points=" << grid.size() << " minorant_knots=" << cfg.minorant_knots
      << " violations=" << violations << " min_slack=" << worst;
    auto rep = make_report("gbar_iterate", worst, 0.0, cfg.tol, d.str());
    rep.pass = violations == 0;
    return rep;
}

double gbar_constant(Exponent p) {
    const double pp = p;
    return quad::adaptive([&](double x) { return std::pow(1.0 - std::sqrt(x), pp); }, 0.5, 1.0, 1e-14, 0.0, 40).value;
}

int implied_iteration_count(Exponent p) {
    return static_cast<int>(std::ceil(std::log(std::pow(2.0, p + 2.0) / gbar_constant(p)) / std::log(9.0 / 8.0)));
}

UnimodalGrowth unimodal_growth_check(const UnimodalWitness& w, Exponent p, int n, const MaximalConfig& cfg) {
    if (n < 1) throw std::invalid_argument("unimodal_growth_check: n must be >= 1");
    if (w.psi.empty() || w.f.empty()) throw std::invalid_argument("unimodal_growth_check: invalid witness");
    UnimodalGrowth out;
    out.psi_growth = iterate_M(w.psi, n, p, cfg);
    out.f_growth = iterate_M(w.f, n, p, cfg);
    out.implied_n = implied_iteration_count(p);
    const double cp = gbar_constant(p);
    const double lhs = std::pow(out.psi_growth.norms.back(), p.value());
    const double rhs = cp * std::pow(9.0 / 8.0, n) * lp_norm_p(w.psi, p);
    out.doubled = out.f_growth.norms.back() >= 2.0 * out.f_growth.norms.front();
    std::ostringstream d;
    d << "p=" << p.value() << " n=" << n << " C_p=" << cp << " implied_n=" << out.implied_n
      << " ||M^n f||/||f||=" << out.f_growth.norms.back() / out.f_growth.norms.front()
      << " doubled=" << (out.doubled ? "yes" : "no");
    out.chain = make_report("unimodal_growth", lhs, rhs, 1e-6 * rhs, d.str());
    return out;
}

// ---------------------------------------------------------------- stability

StabilityGap stability_gap_check(const PiecewiseLinear& f, Exponent p, const MaximalConfig& cfg, double rel_tol) {
    StabilityGap out;
    if (f.empty() || !(f.total_mass() > 0.0)) {
        out.report = make_report("stability_gap", 0.0, 0.0, 0.0, "zero function");
        return out;
    }
    MaximalConfig mc = cfg;
    mc.integrate_window = false;
    const auto step = apply_M(f, p, mc);
    std::vector<double> knots(step.g.knots().begin(), step.g.knots().end());
    knots.insert(knots.end(), f.knots().begin(), f.knots().end());
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    const auto rule = quad::gauss_legendre8();
    struct Sums {
        double m = 0.0, f = 0.0, d = 0.0;
        std::size_t bad = 0;
    };
    std::vector<Sums> per_cell(knots.size() - 1);
    const double pp = p;
    parallel_for(per_cell.size(), [&](std::size_t i) {
        const double a = knots[i];
        const double b = knots[i + 1];
        const double half = 0.5 * (b - a);
        Sums s;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            const double x = a + half * (1.0 + rule.nodes[k]);
            const double w = half * rule.weights[k];
            const double mv = centered_max_at(f, x);
            const double fv = f.eval(x);
            const double mp = std::pow(mv, pp);
            const double fp = std::pow(fv, pp);
            const double dp = std::pow(std::max(mv - fv, 0.0), pp);
            if (mv < fv || mp < (fp + dp) * (1.0 - 1e-14)) ++s.bad;
            s.m += w * mp;
            s.f += w * fp;
            s.d += w * dp;
        }
        per_cell[i] = s;
    });
    Sums total;
    for (const auto& s : per_cell) {
        total.m += s.m;
        total.f += s.f;
        total.d += s.d;
        total.bad += s.bad;
    }
    out.nodes = per_cell.size() * rule.nodes.size();
    out.pointwise_failures = total.bad;
    out.epsilon = std::pow(total.d / total.f, 1.0 / pp);
    std::ostringstream d;
    d << "p=" << pp << " ||Mf||^p=" << total.m << " ||f||^p=" << total.f << " ||Mf-f||^p=" << total.d
      << " eps=" << out.epsilon << " nodes=" << out.nodes << " pointwise_failures=" << total.bad;
    out.report = make_report("stability_gap", total.m, total.f + total.d, rel_tol * total.m, d.str());
    out.report.pass = out.report.pass && total.bad == 0;
    return out;
}

double empirical_lipschitz_ratio(const PiecewiseLinear& f, const PiecewiseLinear& g, Exponent p) {
    if (f.empty() || g.empty()) throw std::invalid_argument("lipschitz ratio: empty function");
    const double lo = std::min(f.support_lo(), g.support_lo());
    const double hi = std::max(f.support_hi(), g.support_hi());
    const double w = hi - lo;
    std::vector<double> knots(f.knots().begin(), f.knots().end());
    knots.insert(knots.end(), g.knots().begin(), g.knots().end());
    for (int k = 1; k <= 64; ++k) {
        knots.push_back(lo - 8.0 * w * k / 64);
        knots.push_back(hi + 8.0 * w * k / 64);
    }
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    const auto rule = quad::gauss_legendre8();
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double half = 0.5 * (knots[i + 1] - knots[i]);
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            const double x = knots[i] + half * (1.0 + rule.nodes[k]);
            num += half * rule.weights[k] * std::pow(std::abs(centered_max_at(f, x) - centered_max_at(g, x)), p.value());
            den += half * rule.weights[k] * std::pow(std::abs(f.eval(x) - g.eval(x)), p.value());
        }
    }
    return std::pow(num / den, 1.0 / p);
}

}  // namespace maxlab
