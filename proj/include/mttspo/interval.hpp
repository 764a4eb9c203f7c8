// Closed time intervals and sorted disjoint interval sets.

#ifndef MTTSPO_INTERVAL_HPP
#define MTTSPO_INTERVAL_HPP

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

namespace mttspo {

/// Intervals closer than this (seconds) are merged.
inline constexpr double kMergeTol = 1e-9;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double t) const { return lo <= t && t <= hi; }
  friend bool operator==(const Interval& a, const Interval& b) {
    return a.lo == b.lo && a.hi == b.hi;
  }
};

/// Sorted, pairwise disjoint closed intervals. Gaps are always larger than
/// kMergeTol.
class IntervalSet {
 public:
  IntervalSet() = default;
  IntervalSet(std::initializer_list<Interval> items) {
    for (const Interval& i : items) add(i);
  }

  void add(Interval iv) {
    if (iv.hi < iv.lo) return;
    auto it = std::lower_bound(
        items_.begin(), items_.end(), iv,
        [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    items_.insert(it, iv);
    normalize();
  }

  void unite(const IntervalSet& other) {
    items_.insert(items_.end(), other.items_.begin(), other.items_.end());
    std::sort(items_.begin(), items_.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    normalize();
  }

  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }
  const Interval& operator[](std::size_t i) const { return items_[i]; }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }
  const std::vector<Interval>& intervals() const { return items_; }

  double totalLength() const {
    double total = 0.0;
    for (const Interval& i : items_) total += i.length();
    return total;
  }

  bool contains(double t, double tol = 0.0) const {
    for (const Interval& i : items_) {
      if (i.lo - tol <= t && t <= i.hi + tol) return true;
    }
    return false;
  }

  /// The set {-t : t in this}.
  IntervalSet negated() const {
    IntervalSet out;
    out.items_.reserve(items_.size());
    for (auto it = items_.rbegin(); it != items_.rend(); ++it) {
      out.items_.push_back({-it->hi, -it->lo});
    }
    return out;
  }

  friend bool operator==(const IntervalSet& a, const IntervalSet& b) {
    return a.items_ == b.items_;
  }

 private:
  void normalize() {
    std::vector<Interval> merged;
    for (const Interval& i : items_) {
      if (!merged.empty() && i.lo <= merged.back().hi + kMergeTol) {
        merged.back().hi = std::max(merged.back().hi, i.hi);
      } else {
        merged.push_back(i);
      }
    }
    items_ = std::move(merged);
  }

  std::vector<Interval> items_;
};

}  // namespace mttspo

#endif  // MTTSPO_INTERVAL_HPP
