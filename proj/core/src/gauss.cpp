#include "auxtest/gauss.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "auxtest/error.hpp"

namespace auxtest {

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorKind::kInput, "normal_quantile: p must lie in (0, 1), got " + std::to_string(p));
  }
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

ChiSquare::ChiSquare(int df) : df_(df) {
  if (df < 1) throw Error(ErrorKind::kInput, "chi-square degrees of freedom must be >= 1");
}

double ChiSquare::cdf(double x) const {
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::cdf(boost::math::chi_squared_distribution<double>(df_), x);
}

double ChiSquare::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorKind::kInput, "chi-square quantile: p must lie in (0, 1)");
  }
  return boost::math::quantile(boost::math::chi_squared_distribution<double>(df_), p);
}

GaussianSpec::GaussianSpec(SymMatrix covariance, double tol)
    : covariance_(std::move(covariance)),
      spectral_(spectral_decomposition(covariance_, tol)),
      pinv_(SymMatrix::zero(covariance_.dim())) {
  const PseudoDetRank pd = pseudo_det_rank(covariance_, tol);
  rank_ = pd.rank;
  pseudo_det_ = pd.pseudo_det;
  pinv_ = auxtest::pseudo_inverse(covariance_, tol);
}

Eigen::VectorXd GaussianSpec::project(const Eigen::VectorXd& x) const {
  const Eigen::MatrixXd basis = spectral_.eigenvectors.leftCols(rank_);
  return basis * (basis.transpose() * x);
}

std::optional<double> singular_mvn_logdensity(const Eigen::VectorXd& x, const GaussianSpec& spec) {
  if (x.size() != spec.covariance().dim()) {
    throw Error(ErrorKind::kInput, "singular_mvn_logdensity: dimension mismatch");
  }
  const double residual = (x - spec.project(x)).norm();
  if (residual > 1e-8 * x.norm()) return std::nullopt;

  const double r = static_cast<double>(spec.rank());
  const double quad = x.dot(spec.pseudo_inverse().matrix() * x);
  return -0.5 * r * std::log(2.0 * std::numbers::pi) - 0.5 * std::log(spec.pseudo_det()) -
         0.5 * quad;
}

Eigen::VectorXd mvn_sample(const GaussianSpec& spec, Rng& rng) {
  const auto& s = spec.spectral();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(spec.covariance().dim());
  for (Eigen::Index k = 0; k < spec.rank(); ++k) {
    x += std::sqrt(s.eigenvalues(k)) * rng.normal() * s.eigenvectors.col(k);
  }
  return x;
}

}  // namespace auxtest
