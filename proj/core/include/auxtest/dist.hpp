#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "auxtest/random.hpp"

namespace auxtest {

/// Finite law on the real line.
class DiscreteDist {
 public:
  /// Throws Error(kInput) unless atoms are strictly increasing, probs are > 0
  /// and sum to 1 within 1e-12.
  DiscreteDist(std::vector<double> atoms, std::vector<double> probs);

  const std::vector<double>& atoms() const noexcept { return atoms_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return atoms_.size(); }

  /// E[f(X) 1_{pred(X)}].
  double expect(const std::function<double(double)>& f,
                const std::function<bool(double)>& pred) const;
  double expect(const std::function<double(double)>& f) const;
  double prob(const std::function<bool(double)>& pred) const;
  double mean() const;
  double variance() const;

  /// One draw by inverse CDF: the first atom whose cumulative weight exceeds a
  /// uniform.
  double draw(Rng& rng) const;

 private:
  std::vector<double> atoms_;
  std::vector<double> probs_;
  std::vector<double> cdf_;
};

/// Eight atoms +-2/3 +- sqrt(2)/12 and +-1/3 +- sqrt(2)/12, mass 1/8 each.
/// E[X] = 0, Var(X) = 7/24, P(X <= 0) = 1/2, P(X <= 0.5) = 3/4,
/// E[X | [-0.5, 0] u [0.5, 1]] = 1/6, E[X | X <= 0] = -1/2, and on
/// C = [-0.5, 0.5]: P(C) = 1/2, E[X | C] = 0, Var(X | C) = 1/8.
DiscreteDist reference_distribution();

/// n iid draws from stream 0 of `seed`.
std::vector<double> draw_sample(const DiscreteDist& dist, std::size_t n, std::uint64_t seed);
/// n iid draws from an existing stream.
std::vector<double> draw_sample(const DiscreteDist& dist, std::size_t n, Rng& rng);

}  // namespace auxtest
