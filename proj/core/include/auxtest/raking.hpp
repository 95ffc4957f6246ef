#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "auxtest/event.hpp"
#include "auxtest/matrix.hpp"

namespace auxtest {

/// Observations with nonnegative weights summing to 1.
struct WeightedSample {
  std::vector<double> points;
  std::vector<double> weights;

  /// Weights 1/n. Throws Error(kInput) on an empty sample.
  static WeightedSample uniform(std::vector<double> points);
  double mean() const;
};

/// One raking step: a partition and its known cell probabilities (> 0, sum 1).
struct RakingStep {
  Partition partition;
  std::vector<double> targets;
};

/// Ordered partitions; entries may repeat (A1, A2, A1, A2, ...).
using RakingSchedule = std::vector<RakingStep>;

/// Throws Error(kInput) unless each target vector matches its partition, is
/// positive and sums to 1 within 1e-12.
void validate_schedule(const RakingSchedule& schedule);

/// a, b, a, b, ... of length steps.
RakingSchedule alternating_schedule(const RakingStep& a, const RakingStep& b, std::size_t steps);

/// Neumaier-compensated sum.
double stable_sum(std::span<const double> values);

/// Total weight in each of m cells.
std::vector<double> cell_weights(std::span<const double> weights, std::span<const std::size_t> labels,
                                 std::size_t m);

/// In-place step on raw weights: each weight in cell j is multiplied by
/// targets[j] / (current weight of cell j). Throws Error(kRakingDegenerate)
/// when a cell carries no weight.
void rake_weights(std::span<double> weights, std::span<const std::size_t> labels,
                  std::span<const double> targets);

WeightedSample rake_step(const WeightedSample& s, const Partition& partition,
                         std::span<const double> targets);

/// First n steps of the schedule (n <= schedule.size()).
WeightedSample rake(const WeightedSample& s, const RakingSchedule& schedule, std::size_t steps);

/// Weighted mean after `steps` raking steps; 0 steps gives the plain mean.
double raked_mean(const WeightedSample& s, const RakingSchedule& schedule, std::size_t steps);

struct RakingConvergence {
  WeightedSample sample;
  std::size_t sweeps = 0;
  double max_error = 0.0;  ///< largest |cell weight - target| over the schedule
  bool converged = false;
};

/// Sweeps the whole schedule until every marginal error is below tol or
/// max_sweeps is reached.
RakingConvergence rake_to_convergence(const WeightedSample& s, const RakingSchedule& schedule,
                                      double tol = 1e-12, std::size_t max_sweeps = 1000);

/// C = Diag(p) - p p^t. Throws Error(kInput) when a cell has probability <= 0.
SymMatrix cell_covariance(std::span<const double> marginal);

struct PartitionMatrices {
  SymMatrix c;                  ///< covariance of the conditioning partition's indicators
  Eigen::MatrixXd conditional;  ///< (k, l) = P(A_l^(i) | A_k^(j)), row-stochastic
};

/// joint(k, l) = P(A_k^(j) & A_l^(i)), rows indexing the conditioning
/// partition j. Throws Error(kInput) on a negative entry or an empty row.
PartitionMatrices partition_matrices(const Eigen::MatrixXd& joint);

/// Inputs of the variance-reduction formulas for a schedule of N steps and a
/// vector function g with d components.
struct RakingDesign {
  std::vector<SymMatrix> ck;                               ///< per step
  std::vector<std::vector<Eigen::MatrixXd>> conditional;   ///< [i][j], j < i: P_{A(i)|A(j)}
  std::vector<Eigen::MatrixXd> base;                       ///< m_k x d, E[g | A_j^(k)]

  std::size_t steps() const noexcept { return ck.size(); }
  Eigen::Index dim() const noexcept { return base.empty() ? 0 : base.front().cols(); }
};

/// Builds the design from a weighted point set: the atoms of a law with their
/// probabilities (exact) or a sample with weights 1/n (plug-in). C_k uses the
/// schedule targets, conditionals and conditional expectations use the
/// weighted points. g has one row per point. Throws Error(kInput) on shape
/// mismatch and Error(kRakingDegenerate) when a scheduled cell has no mass.
RakingDesign build_design(std::span<const double> points, std::span<const double> probs,
                          const RakingSchedule& schedule, const Eigen::MatrixXd& g);

/// g(x) = x, as a single column.
Eigen::MatrixXd identity_features(std::span<const double> points);
/// g_i(x) = 1_{A_i}(x) / sqrt(p0_i) for the cells of `cells`.
Eigen::MatrixXd cell_features(std::span<const double> points, const Partition& cells,
                              std::span<const double> p0);

/// Phi_k^(N) for 0-based step k < N:
///   Phi_k = base_k - sum_{k < l < N} P_{A(l)|A(k)} Phi_l,
/// which expands to the alternating sum over increasing chains k < l_1 < ... < l_L < N.
Eigen::MatrixXd phi_matrix(const RakingDesign& design, std::size_t k, std::size_t n_steps);

/// sigma^2 - sum_k Phi_k^t C_k Phi_k (design with d = 1).
double raked_covariance(double sigma2, const RakingDesign& design, std::size_t n_steps);
/// Sigma_1 - sum_k Phi_k^t C_k Phi_k.
SymMatrix raked_covariance(const SymMatrix& sigma1, const RakingDesign& design, std::size_t n_steps);

struct TwoPartitionInput {
  double p_a = 0.5;
  double p_b = 0.5;
  double p_ab = 0.25;
  double mean_given_a = 0.0;
  double mean_given_not_a = 0.0;
  double mean_given_b = 0.0;
  double mean_given_not_b = 0.0;
  double sigma2 = 1.0;
  double mean = 0.0;
};

struct TwoPartitionVariances {
  double sigma1_sq = 0.0;
  double sigma2_sq = 0.0;
  double sigma_inf_sq = 0.0;
};

/// Closed forms for raking on {A, A^c} then {B, B^c}. sigma1_sq and
/// sigma_inf_sq use the standard two-partition expressions; sigma2_sq is the N = 2 case of
/// the general Phi formula,
///   sigma^2 - pB pB' dB^2 - pA pA' (dA - (pAB - pA pB) / (pA pA') dB)^2,
/// with dA = E[X|A] - E[X|A^c], which also holds for dependent A, B.
/// Throws Error(kInput) on inadmissible probabilities and
/// Error(kDegenerateDesign) when pA pB pA' pB' = (pAB - pA pB)^2.
TwoPartitionVariances two_partition_formulas(const TwoPartitionInput& in);

}  // namespace auxtest
