#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "auxtest/matrix.hpp"

namespace auxtest {

/// M cells with null weights P0(A_i) > 0 summing to 1.
class PartitionSpec {
 public:
  /// Throws Error(kInput) unless M >= 2, every weight > 0 and they sum to 1
  /// within 1e-12. Empty labels default to "A1".."AM".
  explicit PartitionSpec(std::vector<double> p0, std::vector<std::string> labels = {});

  std::size_t cells() const noexcept { return p0_.size(); }
  const std::vector<double>& p0() const noexcept { return p0_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  /// P0[f_A] = (sqrt(P0(A_i)))_i, the null value of E[f_A(X)].
  Eigen::VectorXd sqrt_p0() const;

 private:
  std::vector<double> p0_;
  std::vector<std::string> labels_;
};

/// Auxiliary estimator of P[f_A] with covariance data:
/// sqrt(n)(p_hat - P[f_A]) -> N(0, sigma_hat), sigma1 = Var(f_A(X)).
struct ChiAuxEstimate {
  Eigen::VectorXd p_hat;
  SymMatrix sigma_hat;
  SymMatrix sigma1;
  std::size_t n = 1;
};

/// Z_n = sqrt(n) ((P_n(A_i) - P0(A_i)) / sqrt(P0(A_i)))_i.
Eigen::VectorXd chi2_vector(std::span<const std::size_t> counts, const PartitionSpec& spec);

/// sum_i n (counts_i / n - p0_i)^2 / p0_i. Throws Error(kInput) on a zero
/// total or a length mismatch.
double chi2_statistic(std::span<const std::size_t> counts, const PartitionSpec& spec);

struct CovariancePair {
  SymMatrix sigma0;
  SymMatrix sigma1;
};

/// sigma0 = Id - sqrt(p) sqrt(p)^t and
/// sigma1 = Diag(sqrt(p / p0)) sigma0 Diag(sqrt(p / p0)), for a true cell
/// probability vector p.
CovariancePair build_sigma0_sigma1(std::span<const double> p, const PartitionSpec& spec);

/// T_n = sqrt(n) ((p0_i - p_i) / sqrt(p0_i))_i.
Eigen::VectorXd t_vector(std::size_t n, std::span<const double> p, const PartitionSpec& spec);

struct ValidationReport {
  bool order_ok = false;         ///< sigma1 - sigma_hat is PSD
  Eigen::Index rank_hat = -1;    ///< -1 when sigma_hat is not PSD
  Eigen::Index rank_sigma1 = -1;
  bool ranks_ok = false;         ///< both ranks equal M - 1
  bool inverse_order_ok = false; ///< sigma_hat^+ - sigma1^+ is PSD
  bool pass = false;
  std::string message;
};

/// Checks sigma1 - sigma_hat PSD and rank(sigma_hat) = rank(sigma1) = M - 1.
/// On pass the reversed ordering of the pseudo-inverses is verified as well.
/// Never throws on a failed condition; the report carries it.
ValidationReport validate_aux_covariance(const SymMatrix& sigma_hat, const SymMatrix& sigma1,
                                         std::size_t m, double tol = kDefaultRankTol);

/// chi^_n = Z^_n Z^_n^t with Z^_n = sqrt(n)(p_hat - P0[f_A]) S_n (row vector)
/// and S_n = sqrt(sigma_hat^+ sigma1). Throws Error(kPrecondition) when the
/// covariances fail validation.
double aux_chi2_statistic(const ChiAuxEstimate& est, const PartitionSpec& spec,
                          double tol = kDefaultRankTol);

/// Coefficient c with x_n ~ c n: c = 1/2 T_1 (sigma_hat^+ - sigma1^+) T_1^t.
/// Throws Error(kPrecondition) when validation fails.
double theorem2_rate(std::span<const double> p, const PartitionSpec& spec,
                     const SymMatrix& sigma_hat, const SymMatrix& sigma1,
                     double tol = kDefaultRankTol);

}  // namespace auxtest
