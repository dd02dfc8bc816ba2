#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace maxlab {

struct Interval {
    double lo;
    double hi;

    [[nodiscard]] double length() const { return hi - lo; }
    bool operator==(const Interval&) const = default;
};

// Finite union of sorted, pairwise disjoint bounded intervals. Neighbouring
// intervals may touch at a single point.
class IntervalSet {
public:
    IntervalSet() = default;

    // Throws std::invalid_argument on unsorted, overlapping, degenerate or
    // non-finite input.
    explicit IntervalSet(std::vector<Interval> intervals);

    // Sorts and merges arbitrary intervals; degenerate ones are dropped.
    static IntervalSet from_union(std::vector<Interval> intervals);

    [[nodiscard]] std::span<const Interval> intervals() const { return intervals_; }
    [[nodiscard]] bool empty() const { return intervals_.empty(); }
    [[nodiscard]] std::size_t size() const { return intervals_.size(); }

    [[nodiscard]] double measure() const;
    [[nodiscard]] bool contains(double x) const;   // closed intervals
    [[nodiscard]] double hull_lo() const;
    [[nodiscard]] double hull_hi() const;

    // |this ∩ [lo, hi]|
    [[nodiscard]] double measure_within(double lo, double hi) const;

    bool operator==(const IntervalSet&) const = default;

private:
    std::vector<Interval> intervals_;
};

[[nodiscard]] inline double measure(const IntervalSet& s) { return s.measure(); }

}  // namespace maxlab
