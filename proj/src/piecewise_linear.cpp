#include "maxlab/piecewise_linear.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace maxlab {

Exponent::Exponent(double p) : p_(p) {
    if (!std::isfinite(p) || !(p > 1.0))
        throw std::invalid_argument("exponent must satisfy 1 < p < inf, got " + std::to_string(p));
}

PiecewiseLinear::PiecewiseLinear(std::vector<Segment> segments) : segments_(std::move(segments)) {
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const auto& s = segments_[i];
        if (!std::isfinite(s.a) || !std::isfinite(s.b) || !std::isfinite(s.ya) || !std::isfinite(s.yb))
            throw std::invalid_argument("PiecewiseLinear: non-finite segment data");
        if (!(s.a < s.b)) throw std::invalid_argument("PiecewiseLinear: segment with a >= b");
        if (s.ya < 0.0 || s.yb < 0.0) throw std::invalid_argument("PiecewiseLinear: negative value");
        if (i > 0 && segments_[i - 1].b > s.a)
            throw std::invalid_argument("PiecewiseLinear: segments unsorted or overlapping");
    }

    double mass = 0.0;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const auto& s = segments_[i];
        if (i > 0 && segments_[i - 1].b < s.a) {
            const double gap_lo = segments_[i - 1].b;
            cells_.push_back({gap_lo, s.a, mass, 0.0, 0.0, 0.0});
            knots_.push_back(gap_lo);
        }
        cells_.push_back({s.a, s.b, mass, s.ya, s.yb, s.slope()});
        knots_.push_back(s.a);
        mass += 0.5 * (s.ya + s.yb) * (s.b - s.a);
    }
    if (!segments_.empty()) knots_.push_back(segments_.back().b);
    total_mass_ = mass;
}

double PiecewiseLinear::support_lo() const {
    if (empty()) throw std::logic_error("PiecewiseLinear: empty function has no support");
    return segments_.front().a;
}

double PiecewiseLinear::support_hi() const {
    if (empty()) throw std::logic_error("PiecewiseLinear: empty function has no support");
    return segments_.back().b;
}

const Segment* PiecewiseLinear::segment_at_or_left(double x, bool strict) const {
    auto it = strict ? std::lower_bound(segments_.begin(), segments_.end(), x,
                                        [](const Segment& s, double v) { return s.a < v; })
                     : std::upper_bound(segments_.begin(), segments_.end(), x,
                                        [](double v, const Segment& s) { return v < s.a; });
    if (it == segments_.begin()) return nullptr;
    return &*std::prev(it);
}

double PiecewiseLinear::eval(double x) const {
    const Segment* s = segment_at_or_left(x, false);
    if (s == nullptr || x > s->b) return 0.0;
    if (x == s->b) return s->yb;
    return s->at(x);
}

double PiecewiseLinear::left_limit(double x) const {
    const Segment* s = segment_at_or_left(x, true);
    if (s == nullptr || x > s->b) return 0.0;
    if (x == s->b) return s->yb;
    return s->at(x);
}

double PiecewiseLinear::right_limit(double x) const {
    const Segment* s = segment_at_or_left(x, false);
    if (s == nullptr || x >= s->b) return 0.0;
    return s->at(x);
}

std::ptrdiff_t PiecewiseLinear::cell_index(double x) const {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    return static_cast<std::ptrdiff_t>(it - knots_.begin()) - 1;
}

double PiecewiseLinear::antideriv(double x) const {
    if (empty()) return 0.0;
    const auto j = cell_index(x);
    if (j < 0) return 0.0;
    if (j >= static_cast<std::ptrdiff_t>(cells_.size())) return total_mass_;
    return cells_[static_cast<std::size_t>(j)].primitive_at(x);
}

double PiecewiseLinear::max_value() const {
    double m = 0.0;
    for (const auto& s : segments_) m = std::max({m, s.ya, s.yb});
    return m;
}

bool PiecewiseLinear::is_continuous(double rel_tol) const {
    if (empty()) return true;
    const double scale = std::max(max_value(), 1e-300);
    auto close = [&](double u, double v) { return std::abs(u - v) <= rel_tol * scale; };
    if (!close(segments_.front().ya, 0.0) || !close(segments_.back().yb, 0.0)) return false;
    for (std::size_t i = 1; i < segments_.size(); ++i) {
        const auto& prev = segments_[i - 1];
        const auto& next = segments_[i];
        if (prev.b == next.a) {
            if (!close(prev.yb, next.ya)) return false;
        } else if (!close(prev.yb, 0.0) || !close(next.ya, 0.0)) {
            return false;
        }
    }
    return true;
}

PiecewiseLinear PiecewiseLinear::scaled(double c) const {
    if (!(c >= 0.0)) throw std::invalid_argument("scaled: factor must be nonnegative");
    std::vector<Segment> out;
    out.reserve(segments_.size());
    for (const auto& s : segments_) out.push_back({s.a, s.b, c * s.ya, c * s.yb});
    return PiecewiseLinear(std::move(out));
}

PiecewiseLinear PiecewiseLinear::translated(double h) const {
    std::vector<Segment> out;
    out.reserve(segments_.size());
    for (const auto& s : segments_) out.push_back({s.a + h, s.b + h, s.ya, s.yb});
    return PiecewiseLinear(std::move(out));
}

PiecewiseLinear PiecewiseLinear::dilated(double c) const {
    if (!(c > 0.0)) throw std::invalid_argument("dilated: factor must be positive");
    std::vector<Segment> out;
    out.reserve(segments_.size());
    for (const auto& s : segments_) out.push_back({s.a / c, s.b / c, s.ya, s.yb});
    return PiecewiseLinear(std::move(out));
}

PiecewiseLinear PiecewiseLinear::reflected() const {
    std::vector<Segment> out;
    out.reserve(segments_.size());
    for (auto it = segments_.rbegin(); it != segments_.rend(); ++it)
        out.push_back({-it->b, -it->a, it->yb, it->ya});
    return PiecewiseLinear(std::move(out));
}

PiecewiseLinear PiecewiseLinear::restricted(double lo, double hi) const {
    std::vector<Segment> out;
    for (const auto& s : segments_) {
        const double a = std::max(lo, s.a);
        const double b = std::min(hi, s.b);
        if (!(a < b)) continue;
        const double ya = a == s.a ? s.ya : s.at(a);
        const double yb = b == s.b ? s.yb : s.at(b);
        out.push_back({a, b, std::max(ya, 0.0), std::max(yb, 0.0)});
    }
    return PiecewiseLinear(std::move(out));
}

namespace {

void simplify_chain(std::span<const double> xs, std::span<const double> ys, double rel_tol,
                    std::vector<Segment>& out) {
    constexpr std::size_t max_window = 256;
    std::size_t anchor = 0;
    const std::size_t last = xs.size() - 1;
    while (anchor < last) {
        std::size_t end = anchor + 1;
        while (end < last && end + 1 - anchor <= max_window) {
            const std::size_t cand = end + 1;
            const double slope = (ys[cand] - ys[anchor]) / (xs[cand] - xs[anchor]);
            bool ok = true;
            for (std::size_t k = anchor + 1; k < cand && ok; ++k) {
                const double chord = ys[anchor] + slope * (xs[k] - xs[anchor]);
                ok = std::abs(chord - ys[k]) <= rel_tol * std::abs(ys[k]);
            }
            if (!ok) break;
            end = cand;
        }
        out.push_back({xs[anchor], xs[end], ys[anchor], ys[end]});
        anchor = end;
    }
}

}  // namespace

PiecewiseLinear PiecewiseLinear::simplified(double rel_tol) const {
    if (rel_tol <= 0.0 || segments_.size() < 2) return *this;
    std::vector<Segment> out;
    out.reserve(segments_.size());
    std::vector<double> xs;
    std::vector<double> ys;
    auto flush = [&] {
        if (xs.size() >= 2) simplify_chain(xs, ys, rel_tol, out);
        xs.clear();
        ys.clear();
    };
    for (const auto& s : segments_) {
        const bool continues = !xs.empty() && xs.back() == s.a && ys.back() == s.ya;
        if (!continues) {
            flush();
            xs.push_back(s.a);
            ys.push_back(s.ya);
        }
        xs.push_back(s.b);
        ys.push_back(s.yb);
    }
    flush();
    return PiecewiseLinear(std::move(out));
}

namespace {

// Integral of (linear from ya to yb)^p over an interval of the given width.
// Written as width/(p+1) * (hi^{p+1} - lo^{p+1}) / (hi - lo) with the
// difference quotient evaluated through expm1/log1p so that nearly constant
// segments do not cancel.
double segment_power_integral(double width, double ya, double yb, double p) {
    const double hi = std::max(ya, yb);
    const double lo = std::min(ya, yb);
    if (hi == 0.0) return 0.0;
    if (hi - lo < 1e-14 * std::max(hi, 1.0)) return width * std::pow(0.5 * (lo + hi), p);
    if (lo == 0.0) return width * std::pow(hi, p) / (p + 1.0);
    const double log_ratio = std::log1p((lo - hi) / hi);  // < 0
    const double quotient = std::expm1((p + 1.0) * log_ratio) / std::expm1(log_ratio);
    return width * std::pow(hi, p) * quotient / (p + 1.0);
}

}  // namespace

double lp_norm_p(const PiecewiseLinear& f, Exponent p) {
    double total = 0.0;
    for (const auto& s : f.segments()) total += segment_power_integral(s.b - s.a, s.ya, s.yb, p);
    return total;
}

double lp_norm(const PiecewiseLinear& f, Exponent p) { return std::pow(lp_norm_p(f, p), 1.0 / p); }

IntervalSet superlevel_set(const PiecewiseLinear& f, double level) {
    if (!(level > 0.0)) throw std::invalid_argument("superlevel_set: level must be positive");
    std::vector<Interval> pieces;
    for (const auto& s : f.segments()) {
        const bool a_in = s.ya >= level;
        const bool b_in = s.yb >= level;
        if (a_in && b_in) {
            pieces.push_back({s.a, s.b});
        } else if (a_in != b_in) {
            double t = s.a + (level - s.ya) / (s.yb - s.ya) * (s.b - s.a);
            t = std::clamp(t, s.a, s.b);
            if (a_in)
                pieces.push_back({s.a, t});
            else
                pieces.push_back({t, s.b});
        }
    }
    return IntervalSet::from_union(std::move(pieces));
}

double superlevel_integral(const PiecewiseLinear& f, double level) {
    double total = 0.0;
    const auto set = superlevel_set(f, level);
    for (const auto& iv : set.intervals())
        total += f.antideriv(iv.hi) - f.antideriv(iv.lo);
    return total;
}

PiecewiseLinear from_samples(std::span<const double> grid, std::span<const double> values) {
    if (grid.size() < 2) throw std::invalid_argument("resample: grid needs at least two points");
    if (grid.size() != values.size()) throw std::invalid_argument("resample: size mismatch");
    std::vector<Segment> segs;
    segs.reserve(grid.size() - 1);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (!(grid[i] < grid[i + 1])) throw std::invalid_argument("resample: grid not strictly increasing");
        if (values[i] == 0.0 && values[i + 1] == 0.0) continue;
        segs.push_back({grid[i], grid[i + 1], values[i], values[i + 1]});
    }
    return PiecewiseLinear(std::move(segs));
}

PiecewiseLinear resample(const std::function<double(double)>& values_at, std::span<const double> grid) {
    std::vector<double> values(grid.size());
    std::transform(grid.begin(), grid.end(), values.begin(), values_at);
    return from_samples(grid, values);
}

namespace {

// Values at the two ends of [lo, hi] of the linear piece covering the open cell.
std::pair<double, double> cell_values(const PiecewiseLinear& f, double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    for (const auto& s : f.segments()) {
        if (s.a <= mid && mid <= s.b)
            return {lo == s.a ? s.ya : s.at(lo), hi == s.b ? s.yb : s.at(hi)};
        if (s.a > mid) break;
    }
    return {0.0, 0.0};
}

}  // namespace

PiecewiseLinear add(const PiecewiseLinear& f, const PiecewiseLinear& g) {
    std::vector<double> knots(f.knots().begin(), f.knots().end());
    knots.insert(knots.end(), g.knots().begin(), g.knots().end());
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    std::vector<Segment> segs;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const auto [fa, fb] = cell_values(f, knots[i], knots[i + 1]);
        const auto [ga, gb] = cell_values(g, knots[i], knots[i + 1]);
        if (fa + ga == 0.0 && fb + gb == 0.0) continue;
        segs.push_back({knots[i], knots[i + 1], std::max(fa + ga, 0.0), std::max(fb + gb, 0.0)});
    }
    return PiecewiseLinear(std::move(segs));
}

PiecewiseLinear indicator(double lo, double hi) { return PiecewiseLinear({{lo, hi, 1.0, 1.0}}); }

PiecewiseLinear indicator(const IntervalSet& e) {
    std::vector<Segment> segs;
    for (const auto& iv : e.intervals()) segs.push_back({iv.lo, iv.hi, 1.0, 1.0});
    return PiecewiseLinear(std::move(segs));
}

PiecewiseLinear tent(double lo, double peak_at, double hi, double height) {
    return PiecewiseLinear({{lo, peak_at, 0.0, height}, {peak_at, hi, height, 0.0}});
}

PiecewiseLinear trapezoid(double lo, double top_lo, double top_hi, double hi, double height) {
    std::vector<Segment> segs{{lo, top_lo, 0.0, height}};
    if (top_lo < top_hi) segs.push_back({top_lo, top_hi, height, height});
    segs.push_back({top_hi, hi, height, 0.0});
    return PiecewiseLinear(std::move(segs));
}

}  // namespace maxlab
