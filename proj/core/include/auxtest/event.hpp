#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace auxtest {

/// Closed interval [lo, hi]; infinite ends allowed.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
};

/// Finite union of closed intervals on the real line.
class Event {
 public:
  Event() = default;
  /// Throws Error(kInput) on an interval with lo > hi or a NaN end.
  explicit Event(std::vector<Interval> parts);

  static Event at_most(double t);
  static Event between(double lo, double hi);

  bool contains(double x) const noexcept;
  const std::vector<Interval>& parts() const noexcept { return parts_; }

 private:
  std::vector<Interval> parts_;
};

/// A partition of the line given by m - 1 events; the last cell is the
/// complement of their union. Cells must not overlap on the points they are
/// evaluated at (see check_disjoint).
class Partition {
 public:
  /// Throws Error(kInput) when no event is given.
  explicit Partition(std::vector<Event> events);

  std::size_t cells() const noexcept { return events_.size() + 1; }
  const std::vector<Event>& events() const noexcept { return events_; }

  /// Index of the first event containing x, else cells() - 1.
  std::size_t cell_of(double x) const noexcept;
  std::vector<std::size_t> labels(std::span<const double> points) const;

  /// Throws Error(kInput) if some point lies in two explicit events.
  void check_disjoint(std::span<const double> points) const;

 private:
  std::vector<Event> events_;
};

/// Auxiliary information P(X | C) = value for the event C.
struct CondMeanInfo {
  Event c;
  double value = 0.0;
};

}  // namespace auxtest
