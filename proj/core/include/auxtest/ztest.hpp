#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace auxtest {

/// Null hypothesis E[X] = mu tested at level alpha.
struct ZTestConfig {
  double mu = 0.0;
  double alpha = 0.05;

  /// Two-sided critical value Phi^{-1}(1 - alpha / 2).
  double critical_value() const;
};

/// An estimator of E[X] with smaller asymptotic variance than the sample mean:
/// sqrt(n) (value - E[X]) -> N(0, sigma_hat^2).
struct MeanAuxEstimate {
  double value = 0.0;
  double sigma_hat = 1.0;
  std::size_t n = 1;
};

/// Arithmetic mean. Throws Error(kInput) on an empty sample.
double sample_mean(std::span<const double> sample);

/// Unbiased sample standard deviation (divisor n - 1); 0 for n < 2.
double sample_stddev(std::span<const double> sample);

/// sqrt(n) (mean(sample) - mu) / sigma_n.
double z_statistic(std::span<const double> sample, double mu, double sigma_n);

/// sqrt(n) (est.value - mu) / est.sigma_hat.
double aux_z_statistic(const MeanAuxEstimate& est, double mu);

/// Decision rule shared by both statistics: |z| > Phi^{-1}(1 - alpha / 2).
bool z_rejects(double z, const ZTestConfig& config);

/// Coefficient c with x_n ~ c n in the beta-risk bound
///   P(|Z_n| <= t) / P(|Z^_n| <= t) >= exp(x_n),
/// c = (mean - mu)^2 (1 / sigma_hat - 1 / sigma). Throws
/// Error(kNotInformative) when sigma_hat > sigma.
double theorem1_rate(double mean, double mu, double sigma, double sigma_hat);

struct Theorem1Consequences {
  /// Smallest n for which the power is multiplied by k.
  long long n_for_gain = 0;
  /// Half-width of the enlarged null |E[X] - mu| < radius at the given n.
  std::optional<double> enlarged_h0_radius;
};

/// n = ceil(sigma sigma_hat ln k / ((sigma - sigma_hat)(mean - mu)^2)), clamped
/// at 0, and radius = ln k / sqrt(n (1/sigma_hat - 1/sigma)) when n is given.
/// Throws Error(kDegenerateAlternative) for mean == mu, Error(kNotInformative)
/// when sigma_hat >= sigma.
Theorem1Consequences theorem1_consequences(double mean, double mu, double sigma,
                                           double sigma_hat, double k,
                                           std::optional<std::size_t> n = std::nullopt);

}  // namespace auxtest
