#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include <Eigen/Dense>

#include "auxtest/chisq.hpp"
#include "auxtest/dist.hpp"
#include "auxtest/event.hpp"
#include "auxtest/matrix.hpp"
#include "auxtest/ztest.hpp"

namespace auxtest {

/// Empirical pieces of the conditional-mean estimator, with
/// psi = (X - P_n(X|C)) 1_C / P_n(C) the empirical influence function of
/// P_n(X|C).
struct CondMeanEstimates {
  std::size_t n = 0;
  std::size_t n_in_c = 0;
  double p_c = 0.0;        ///< P_n(C)
  double cond_mean = 0.0;  ///< P_n(X|C)
  double cond_var = 0.0;   ///< Var_n(X|C)
  double k22 = 0.0;        ///< P_n(psi^2) / n = Var_n(X|C) / (n P_n(C))
  double k12 = 0.0;        ///< P_n(psi X) / n
  Eigen::VectorXd k12_vec; ///< P_n(psi f_i) / n, empty without cells
};

/// Throws Error(kEmptyConditioning) when no observation lies in C and
/// Error(kDegenerateInformation) when Var_n(X|C) = 0.
CondMeanEstimates cond_mean_estimates(std::span<const double> sample, const CondMeanInfo& info);
/// Also fills k12_vec for f_i = 1_{A_i} / sqrt(p0_i).
CondMeanEstimates cond_mean_estimates(std::span<const double> sample, const CondMeanInfo& info,
                                      const Partition& cells, const PartitionSpec& spec);

/// Exact limits under a known law.
struct ScalarCondMeanLimits {
  double p_c = 0.0;
  double cond_mean = 0.0;
  double cond_var = 0.0;
  double sigma2 = 0.0;
  double sigma22 = 0.0;    ///< Var(X|C) / P(C), limit of n K22
  double coef = 0.0;       ///< K12 / K22 in the limit, equals P(C)
  double sigma_hat2 = 0.0; ///< sigma^2 - P(C) Var(X|C)
};

struct VectorCondMeanLimits {
  ScalarCondMeanLimits scalar;
  std::vector<double> cell_probs;  ///< P(A_i)
  Eigen::VectorXd sigma12;         ///< Cov(f_i, psi)
  SymMatrix sigma1;
  SymMatrix sigma_hat;             ///< sigma1 - sigma12 sigma12^t / sigma22
};

/// Throws Error(kEmptyConditioning) / Error(kDegenerateInformation) as above.
ScalarCondMeanLimits cond_mean_limits(const DiscreteDist& dist, const CondMeanInfo& info);
VectorCondMeanLimits cond_mean_limits(const DiscreteDist& dist, const CondMeanInfo& info,
                                      const Partition& cells, const PartitionSpec& spec);

/// Theta* = P_n(X) - K12 / K22 (P_n(X|C) - P(X|C)). The plug-in variance is
/// sigma_n^2 - P_n(C) Var_n(X|C), floored at 1e-12 sigma_n^2. With limits the
/// exact coefficient and variance are used instead.
MeanAuxEstimate theta_star_scalar(std::span<const double> sample, const CondMeanInfo& info);
MeanAuxEstimate theta_star_scalar(std::span<const double> sample, const CondMeanInfo& info,
                                  const ScalarCondMeanLimits& limits);

/// P_hat = P_n[f_A] - K12 / K22 (P_n(X|C) - P(X|C)) with the plug-in
/// sigma_hat = Sigma_1n - S12 S12^t / S22 (S12 = n K12, S22 = n K22) and
/// Sigma_1n the empirical cell covariance; or the exact quantities.
ChiAuxEstimate theta_star_vector(std::span<const double> sample, const CondMeanInfo& info,
                                 const Partition& cells, const PartitionSpec& spec);
ChiAuxEstimate theta_star_vector(std::span<const double> sample, const CondMeanInfo& info,
                                 const Partition& cells, const PartitionSpec& spec,
                                 const VectorCondMeanLimits& limits);

}  // namespace auxtest
