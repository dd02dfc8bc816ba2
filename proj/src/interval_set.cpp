#include "maxlab/interval_set.hpp"

#include <algorithm>
#include <cmath>

namespace maxlab {

IntervalSet::IntervalSet(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
        const auto& iv = intervals_[i];
        if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi))
            throw std::invalid_argument("IntervalSet: non-finite endpoint");
        if (!(iv.lo < iv.hi))
            throw std::invalid_argument("IntervalSet: interval with lo >= hi");
        if (i > 0 && intervals_[i - 1].hi > iv.lo)
            throw std::invalid_argument("IntervalSet: intervals unsorted or overlapping");
    }
}

IntervalSet IntervalSet::from_union(std::vector<Interval> intervals) {
    std::erase_if(intervals, [](const Interval& iv) { return !(iv.lo < iv.hi); });
    std::sort(intervals.begin(), intervals.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> merged;
    for (const auto& iv : intervals) {
        if (!merged.empty() && iv.lo <= merged.back().hi)
            merged.back().hi = std::max(merged.back().hi, iv.hi);
        else
            merged.push_back(iv);
    }
    return IntervalSet(std::move(merged));
}

double IntervalSet::measure() const {
    double total = 0.0;
    for (const auto& iv : intervals_) total += iv.length();
    return total;
}

bool IntervalSet::contains(double x) const {
    auto it = std::upper_bound(intervals_.begin(), intervals_.end(), x,
                               [](double v, const Interval& iv) { return v < iv.lo; });
    if (it == intervals_.begin()) return false;
    return x <= std::prev(it)->hi;
}

double IntervalSet::hull_lo() const {
    if (intervals_.empty()) throw std::logic_error("IntervalSet: empty set has no hull");
    return intervals_.front().lo;
}

double IntervalSet::hull_hi() const {
    if (intervals_.empty()) throw std::logic_error("IntervalSet: empty set has no hull");
    return intervals_.back().hi;
}

double IntervalSet::measure_within(double lo, double hi) const {
    double total = 0.0;
    for (const auto& iv : intervals_) {
        if (iv.lo >= hi) break;
        const double a = std::max(lo, iv.lo);
        const double b = std::min(hi, iv.hi);
        if (b > a) total += b - a;
    }
    return total;
}

}  // namespace maxlab
