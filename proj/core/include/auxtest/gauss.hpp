#pragma once

#include <optional>

#include <Eigen/Dense>

#include "auxtest/matrix.hpp"
#include "auxtest/random.hpp"

namespace auxtest {

/// Inverse of the standard normal CDF. Throws Error(kInput) unless 0 < p < 1.
double normal_quantile(double p);
double normal_cdf(double x);

/// Chi-square law with integer degrees of freedom.
class ChiSquare {
 public:
  /// Throws Error(kInput) when df < 1.
  explicit ChiSquare(int df);

  int df() const noexcept { return df_; }
  /// 0 for x <= 0.
  double cdf(double x) const;
  /// Throws Error(kInput) unless 0 < p < 1.
  double quantile(double p) const;

 private:
  int df_;
};

/// Centered (possibly singular) multivariate normal N(0, covariance).
class GaussianSpec {
 public:
  /// Throws Error(kNotPsd) if the covariance has an eigenvalue below -cutoff.
  explicit GaussianSpec(SymMatrix covariance, double tol = kDefaultRankTol);

  const SymMatrix& covariance() const noexcept { return covariance_; }
  const SpectralInfo& spectral() const noexcept { return spectral_; }
  Eigen::Index rank() const noexcept { return rank_; }
  double pseudo_det() const noexcept { return pseudo_det_; }
  const SymMatrix& pseudo_inverse() const noexcept { return pinv_; }

  /// Orthogonal projection of x onto range(covariance).
  Eigen::VectorXd project(const Eigen::VectorXd& x) const;

 private:
  SymMatrix covariance_;
  SpectralInfo spectral_;
  Eigen::Index rank_ = 0;
  double pseudo_det_ = 1.0;
  SymMatrix pinv_;
};

/// log f(x) = -(r/2) ln(2 pi) - (1/2) ln|Sigma|_+ - (1/2) x^t Sigma^+ x for x in
/// range(Sigma) (residual <= 1e-8 * ||x||); std::nullopt outside the support.
std::optional<double> singular_mvn_logdensity(const Eigen::VectorXd& x, const GaussianSpec& spec);

/// x = Q Lambda^(1/2) z over the nonzero eigenspace; lies in range(Sigma).
Eigen::VectorXd mvn_sample(const GaussianSpec& spec, Rng& rng);

}  // namespace auxtest
