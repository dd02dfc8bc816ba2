#include "maxlab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "maxlab/parallel.hpp"

namespace maxlab {

namespace {

constexpr double golden = 0.6180339887498949;

template <class F>
std::pair<double, double> golden_max(F&& fn, double lo, double hi, double tol) {
    double a = lo;
    double b = hi;
    double c = b - golden * (b - a);
    double d = a + golden * (b - a);
    double fc = fn(c);
    double fd = fn(d);
    for (int it = 0; it < 300 && (b - a) > tol * std::max(1.0, std::abs(c)); ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - golden * (b - a);
            fc = fn(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + golden * (b - a);
            fd = fn(d);
        }
    }
    return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

// Scan fn on the points, then golden-refine every local maximum between its
// neighbours. Returns (argmax, max).
template <class F>
std::pair<double, double> scan_and_refine(F&& fn, std::span<const double> pts, double tol) {
    std::vector<double> vals(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = fn(pts[i]);
    std::pair<double, double> best{pts[0], vals[0]};
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (vals[i] > best.second) best = {pts[i], vals[i]};
        const bool left_ok = i == 0 || vals[i] >= vals[i - 1];
        const bool right_ok = i + 1 == pts.size() || vals[i] >= vals[i + 1];
        if (!(left_ok && right_ok) || i == 0 || i + 1 == pts.size()) continue;
        const auto refined = golden_max(fn, pts[i - 1], pts[i + 1], tol);
        if (refined.second > best.second) best = refined;
    }
    return best;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    const double step = std::log(hi / lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo * std::exp(step * static_cast<double>(i));
    g.back() = hi;
    return g;
}

}  // namespace

double power_profile_average(double r, Exponent p) {
    const double q = 1.0 - 1.0 / p;
    if (r <= 0.0) return 1.0;
    if (r < 1.0) {
        // ((1+r)^q - (1-r)^q) / (2 q r) without cancellation at small r
        const double up = std::expm1(q * std::log1p(r));
        const double down = std::expm1(q * std::log1p(-r));
        return (up - down) / (2.0 * q * r);
    }
    return (std::pow(1.0 + r, q) + std::pow(r - 1.0, q)) / (2.0 * q * r);
}

ApSolution solve_ap(Exponent p, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("solve_ap: tol must be positive");
    const auto grid = log_grid(1e-6, 1e6, 4001);
    auto fn = [&](double r) { return power_profile_average(r, p); };
    const auto [r, a] = scan_and_refine(fn, grid, tol);
    return {p.value(), std::max(a, 1.0), r, tol};
}

double h_profile(double x, double s) {
    const double ax = std::abs(x);
    return ax <= 1.0 ? 1.0 : std::pow(ax, -1.0 / s);
}

namespace {

// Primitive of h, odd in t.
double h_primitive(double t, double s) {
    const double q = 1.0 - 1.0 / s;
    const double at = std::abs(t);
    const double v = at <= 1.0 ? at : 1.0 + std::expm1(q * std::log(at)) / q;
    return t < 0.0 ? -v : v;
}

}  // namespace

double h_maximal_at(double x, double s) {
    if (!(s > 1.0)) throw std::invalid_argument("h_maximal_at: exponent must exceed 1");
    const double ax = std::abs(x);  // h is even
    auto avg = [&](double r) { return (h_primitive(ax + r, s) - h_primitive(ax - r, s)) / (2.0 * r); };
    std::vector<double> breaks{std::abs(ax - 1.0), ax + 1.0};
    std::erase_if(breaks, [](double b) { return !(b > 0.0); });
    std::sort(breaks.begin(), breaks.end());
    const double scale = std::max(1.0, ax);
    std::vector<double> edges{scale * 1e-9};
    for (const double b : breaks)
        if (b > edges.back()) edges.push_back(b);
    edges.push_back(scale * 1e9);

    double best = h_profile(ax, s);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const auto pts = log_grid(edges[i], edges[i + 1], 400);
        best = std::max(best, scan_and_refine(avg, pts, 1e-14).second);
    }
    return best;
}

CheckReport h_domination_check(Exponent p, double delta, std::span<const double> grid, double rel_tol) {
    if (!(delta > 0.0 && delta < p - 1.0))
        throw std::invalid_argument("h_domination_check: need 0 < delta < p - 1");
    const double s = p - delta;
    const double a = solve_ap(Exponent(s)).a_p;
    std::vector<double> excess(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        const double h = h_profile(grid[i], s);
        excess[i] = h_maximal_at(grid[i], s) / (a * h) - 1.0;
    });
    std::size_t violations = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (const double e : excess) {
        worst = std::max(worst, e);
        if (e > rel_tol) ++violations;
    }
    std::ostringstream d;
    d << "a_{p-delta}=" << a << " points=" << grid.size() << " violations=" << violations
      << " max(Mh/(a h))-1=" << worst;
    // lhs: a_{p-delta}; rhs: worst observed Mh/h
    auto rep = make_report("h_domination", a, a * (1.0 + worst), a * rel_tol, d.str());
    rep.pass = violations == 0;
    return rep;
}

GrowthReport growth_bracket(const PiecewiseLinear& f, Exponent p, int k_max, const MaximalConfig& cfg) {
    if (k_max < 2) throw std::invalid_argument("growth_bracket: k_max must be >= 2");
    if (f.empty() || !(f.total_mass() > 0.0)) throw std::invalid_argument("growth_bracket: f is zero");
    GrowthReport rep = iterate_M(f, k_max, p, cfg);
    rep.in_bracket.assign(rep.roots.size(), false);
    for (std::size_t k = 1; k < rep.roots.size(); ++k)
        rep.in_bracket[k] = rep.roots[k] >= rep.lower_bracket && rep.roots[k] <= rep.upper_bracket;
    return rep;
}

PiecewiseLinear pwl_free_member(std::span<const double> params) {
    const auto n = params.size();
    std::vector<double> xs(n + 2);
    std::vector<double> ys(n + 2, 0.0);
    for (std::size_t i = 0; i < n + 2; ++i) xs[i] = static_cast<double>(i) / static_cast<double>(n + 1);
    for (std::size_t i = 0; i < n; ++i) ys[i + 1] = std::max(params[i], 0.0);
    return from_samples(xs, ys);
}

PiecewiseLinear power_tail_member(std::span<const double> params, Exponent p, int tail_knots) {
    if (params.size() != 2) throw std::invalid_argument("power-tail family has two parameters");
    const double w = std::max(params[0], 1e-6);
    const double t = std::max(params[1], w * (1.0 + 1e-6));
    const int n = std::max(tail_knots, 2);
    std::vector<double> xs;
    std::vector<double> ys;
    const auto tail = log_grid(w, t, static_cast<std::size_t>(n));
    for (auto it = tail.rbegin(); it != tail.rend(); ++it) {
        xs.push_back(-*it);
        ys.push_back(std::pow(*it / w, -1.0 / p));
    }
    for (const double r : tail) {
        xs.push_back(r);
        ys.push_back(std::pow(r / w, -1.0 / p));
    }
    std::vector<Segment> segs;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) segs.push_back({xs[i], xs[i + 1], ys[i], ys[i + 1]});
    return PiecewiseLinear(std::move(segs));
}

double maximal_ratio(const PiecewiseLinear& f, Exponent p, const MaximalConfig& cfg) {
    const double base = lp_norm_p(f, p);
    if (!(base > 0.0)) return std::numeric_limits<double>::infinity();
    const auto step = apply_M(f, p, cfg);
    return std::pow((step.window_norm_p + step.err_p) / base, 1.0 / p);
}

namespace {

struct StartResult {
    double value = std::numeric_limits<double>::infinity();
    std::vector<double> x;
    int evaluations = 0;
};

// Plain Nelder-Mead. The trajectory does not depend on max_evals, so a larger
// budget only extends it.
template <class F>
StartResult nelder_mead(F&& objective, std::vector<double> x0, double step, int max_evals) {
    const std::size_t n = x0.size();
    StartResult out;
    auto eval = [&](const std::vector<double>& x) {
        const double v = objective(x);
        ++out.evaluations;
        if (v < out.value) {
            out.value = v;
            out.x = x;
        }
        return v;
    };
    std::vector<std::vector<double>> simplex{x0};
    for (std::size_t i = 0; i < n; ++i) {
        auto v = x0;
        v[i] += step * (std::abs(x0[i]) + 0.1);
        simplex.push_back(std::move(v));
    }
    std::vector<double> fv;
    for (const auto& v : simplex) {
        if (out.evaluations >= max_evals) return out;
        fv.push_back(eval(v));
    }
    while (out.evaluations < max_evals) {
        std::vector<std::size_t> order(n + 1);
        for (std::size_t i = 0; i <= n; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];
        if (std::abs(fv[worst] - fv[best]) <= 1e-13 * std::abs(fv[best])) break;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i)
            if (i != worst)
                for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);
        auto along = [&](double t) {
            std::vector<double> v(n);
            for (std::size_t j = 0; j < n; ++j) v[j] = centroid[j] + t * (simplex[worst][j] - centroid[j]);
            return v;
        };
        auto xr = along(-1.0);
        const double fr = eval(xr);
        if (fr < fv[best]) {
            if (out.evaluations >= max_evals) break;
            auto xe = along(-2.0);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[worst] = std::move(xe);
                fv[worst] = fe;
            } else {
                simplex[worst] = std::move(xr);
                fv[worst] = fr;
            }
        } else if (fr < fv[second]) {
            simplex[worst] = std::move(xr);
            fv[worst] = fr;
        } else {
            if (out.evaluations >= max_evals) break;
            const bool outside = fr < fv[worst];
            auto xc = along(outside ? -0.5 : 0.5);
            const double fc = eval(xc);
            if (fc < std::min(fr, fv[worst])) {
                simplex[worst] = std::move(xc);
                fv[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= n && out.evaluations < max_evals; ++i) {
                    if (i == best) continue;
                    for (std::size_t j = 0; j < n; ++j)
                        simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
                    fv[i] = eval(simplex[i]);
                }
            }
        }
    }
    return out;
}

}  // namespace

SearchResult search_extremizer(Exponent p, const std::string& family, int dof, int budget,
                               const MaximalConfig& cfg, std::uint64_t seed, int starts) {
    const bool pwl_free = family == "pwl-free";
    if (!pwl_free && family != "power-tail") throw std::invalid_argument("search: unknown family '" + family + "'");
    if (dof < 2) throw std::invalid_argument("search: dof must be >= 2");
    if (budget < 100) throw std::invalid_argument("search: budget must be >= 100");
    if (starts < 1) throw std::invalid_argument("search: starts must be >= 1");
    cfg.validate();

    auto member = [&](const std::vector<double>& theta) {
        return pwl_free ? pwl_free_member(theta) : power_tail_member(theta, p, dof);
    };
    auto objective = [&](const std::vector<double>& theta) {
        std::vector<double> projected(theta.size());
        std::transform(theta.begin(), theta.end(), projected.begin(), [](double v) { return std::max(v, 0.0); });
        return maximal_ratio(member(projected), p, cfg);
    };

    const int per_start = budget / starts;
    std::vector<StartResult> results(static_cast<std::size_t>(starts));
    parallel_for(results.size(), [&](std::size_t s) {
        std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * (s + 1)));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<double> x0;
        if (pwl_free) {
            for (int i = 0; i < dof; ++i) x0.push_back(0.2 + 0.8 * unit(rng));
        } else {
            const double w = 0.5 + 1.5 * unit(rng);
            x0 = {w, w * (2.0 + 48.0 * unit(rng))};
        }
        results[s] = nelder_mead(objective, std::move(x0), 0.25, per_start);
    });

    SearchResult out;
    out.p = p;
    out.family = family;
    out.dof = dof;
    out.budget = budget;
    out.seed = seed;
    for (const auto& r : results) {
        out.evaluations += r.evaluations;
        if (r.value < out.best_ratio || out.best_params.empty()) {
            out.best_ratio = r.value;
            out.best_params = r.x;
        }
    }
    for (auto& v : out.best_params) v = std::max(v, 0.0);
    if (!pwl_free) {
        const double w = std::max(out.best_params[0], 1e-6);
        for (const double mult : {4.0, 16.0, 64.0, 256.0}) {
            const std::vector<double> theta{w, w * mult};
            out.trend.emplace_back(w * mult, maximal_ratio(member(theta), p, cfg));
        }
    }
    return out;
}

}  // namespace maxlab
