#include "auxtest/event.hpp"

#include <cmath>
#include <string>

#include "auxtest/error.hpp"

namespace auxtest {

Event::Event(std::vector<Interval> parts) : parts_(std::move(parts)) {
  for (const Interval& iv : parts_) {
    if (std::isnan(iv.lo) || std::isnan(iv.hi) || iv.lo > iv.hi) {
      throw Error(ErrorKind::kInput, "event interval needs lo <= hi");
    }
  }
}

Event Event::at_most(double t) {
  return Event({Interval{-std::numeric_limits<double>::infinity(), t}});
}

Event Event::between(double lo, double hi) { return Event({Interval{lo, hi}}); }

bool Event::contains(double x) const noexcept {
  for (const Interval& iv : parts_) {
    if (iv.contains(x)) return true;
  }
  return false;
}

Partition::Partition(std::vector<Event> events) : events_(std::move(events)) {
  if (events_.empty()) throw Error(ErrorKind::kInput, "a partition needs at least one event");
}

std::size_t Partition::cell_of(double x) const noexcept {
  for (std::size_t i = 0; i < events_.size(); ++i) {
    if (events_[i].contains(x)) return i;
  }
  return events_.size();
}

std::vector<std::size_t> Partition::labels(std::span<const double> points) const {
  std::vector<std::size_t> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = cell_of(points[i]);
  return out;
}

void Partition::check_disjoint(std::span<const double> points) const {
  for (double x : points) {
    int hits = 0;
    for (const Event& e : events_) hits += e.contains(x) ? 1 : 0;
    if (hits > 1) {
      throw Error(ErrorKind::kInput, "partition cells overlap at x = " + std::to_string(x));
    }
  }
}

}  // namespace auxtest
