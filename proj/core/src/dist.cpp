#include "auxtest/dist.hpp"

#include <algorithm>
#include <cmath>

#include "auxtest/error.hpp"

namespace auxtest {

DiscreteDist::DiscreteDist(std::vector<double> atoms, std::vector<double> probs)
    : atoms_(std::move(atoms)), probs_(std::move(probs)) {
  if (atoms_.empty() || atoms_.size() != probs_.size()) {
    throw Error(ErrorKind::kInput, "distribution needs one probability per atom");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (!std::isfinite(atoms_[i])) throw Error(ErrorKind::kInput, "atoms must be finite");
    if (i > 0 && !(atoms_[i] > atoms_[i - 1])) {
      throw Error(ErrorKind::kInput, "atoms must be strictly increasing");
    }
    if (!(probs_[i] > 0.0)) throw Error(ErrorKind::kInput, "atom probabilities must be > 0");
    total += probs_[i];
    cdf_.push_back(total);
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorKind::kInput, "atom probabilities must sum to 1");
  }
  // guard the last bucket against rounding of the running sum
  cdf_.back() = 1.0;
}

double DiscreteDist::expect(const std::function<double(double)>& f,
                            const std::function<bool(double)>& pred) const {
  double s = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (pred(atoms_[i])) s += probs_[i] * f(atoms_[i]);
  }
  return s;
}

double DiscreteDist::expect(const std::function<double(double)>& f) const {
  return expect(f, [](double) { return true; });
}

double DiscreteDist::prob(const std::function<bool(double)>& pred) const {
  return expect([](double) { return 1.0; }, pred);
}

double DiscreteDist::mean() const {
  return expect([](double x) { return x; });
}

double DiscreteDist::variance() const {
  const double m = mean();
  return expect([m](double x) { return (x - m) * (x - m); });
}

double DiscreteDist::draw(Rng& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto idx = static_cast<std::size_t>(it - cdf_.begin());
  return atoms_[std::min(idx, atoms_.size() - 1)];
}

DiscreteDist reference_distribution() {
  const double e = std::sqrt(2.0) / 12.0;
  std::vector<double> atoms;
  for (double s : {-1.0, 1.0}) {
    for (double a : {2.0 / 3.0, 1.0 / 3.0}) {
      for (double d : {-e, e}) atoms.push_back(s * (a + d));
    }
  }
  std::sort(atoms.begin(), atoms.end());
  return DiscreteDist(std::move(atoms), std::vector<double>(8, 0.125));
}

std::vector<double> draw_sample(const DiscreteDist& dist, std::size_t n, Rng& rng) {
  std::vector<double> out(n);
  for (double& x : out) x = dist.draw(rng);
  return out;
}

std::vector<double> draw_sample(const DiscreteDist& dist, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return draw_sample(dist, n, rng);
}

}  // namespace auxtest
