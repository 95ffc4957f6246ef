#include "auxtest/raking.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "auxtest/error.hpp"

namespace auxtest {

namespace {

void check_targets(std::span<const double> targets, std::size_t m) {
  if (targets.size() != m) {
    throw Error(ErrorKind::kInput, "expected " + std::to_string(m) + " raking targets, got " +
                                       std::to_string(targets.size()));
  }
  double total = 0.0;
  for (double t : targets) {
    if (!(t > 0.0)) throw Error(ErrorKind::kInput, "raking targets must be > 0");
    total += t;
  }
  if (std::abs(total - 1.0) > 1e-12) throw Error(ErrorKind::kInput, "raking targets must sum to 1");
}

}  // namespace

WeightedSample WeightedSample::uniform(std::vector<double> points) {
  if (points.empty()) throw Error(ErrorKind::kInput, "weighted sample needs at least one point");
  const double w = 1.0 / static_cast<double>(points.size());
  WeightedSample s{std::move(points), {}};
  s.weights.assign(s.points.size(), w);
  return s;
}

double WeightedSample::mean() const {
  double s = 0.0;
  double c = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double v = weights[i] * points[i];
    const double t = s + v;
    c += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
    s = t;
  }
  return s + c;
}

void validate_schedule(const RakingSchedule& schedule) {
  for (const RakingStep& step : schedule) check_targets(step.targets, step.partition.cells());
}

RakingSchedule alternating_schedule(const RakingStep& a, const RakingStep& b, std::size_t steps) {
  RakingSchedule out;
  out.reserve(steps);
  for (std::size_t i = 0; i < steps; ++i) out.push_back(i % 2 == 0 ? a : b);
  return out;
}

double stable_sum(std::span<const double> values) {
  double s = 0.0;
  double c = 0.0;
  for (double v : values) {
    const double t = s + v;
    c += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
    s = t;
  }
  return s + c;
}

std::vector<double> cell_weights(std::span<const double> weights, std::span<const std::size_t> labels,
                                 std::size_t m) {
  if (weights.size() != labels.size()) throw Error(ErrorKind::kInput, "one label per weight expected");
  std::vector<double> sum(m, 0.0);
  std::vector<double> comp(m, 0.0);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const std::size_t j = labels[i];
    if (j >= m) throw Error(ErrorKind::kInput, "cell label out of range");
    const double v = weights[i];
    const double t = sum[j] + v;
    comp[j] += std::abs(sum[j]) >= std::abs(v) ? (sum[j] - t) + v : (v - t) + sum[j];
    sum[j] = t;
  }
  for (std::size_t j = 0; j < m; ++j) sum[j] += comp[j];
  return sum;
}

void rake_weights(std::span<double> weights, std::span<const std::size_t> labels,
                  std::span<const double> targets) {
  const std::vector<double> current = cell_weights(weights, labels, targets.size());
  std::vector<double> factor(targets.size());
  for (std::size_t j = 0; j < targets.size(); ++j) {
    if (!(current[j] > 0.0)) {
      throw Error(ErrorKind::kRakingDegenerate,
                  "raking cell " + std::to_string(j) + " carries no weight");
    }
    factor[j] = targets[j] / current[j];
  }
  for (std::size_t i = 0; i < weights.size(); ++i) weights[i] *= factor[labels[i]];
}

WeightedSample rake_step(const WeightedSample& s, const Partition& partition,
                         std::span<const double> targets) {
  check_targets(targets, partition.cells());
  if (s.points.size() != s.weights.size()) throw Error(ErrorKind::kInput, "one weight per point expected");
  WeightedSample out = s;
  const std::vector<std::size_t> labels = partition.labels(out.points);
  rake_weights(out.weights, labels, targets);
  return out;
}

WeightedSample rake(const WeightedSample& s, const RakingSchedule& schedule, std::size_t steps) {
  if (steps > schedule.size()) {
    throw Error(ErrorKind::kInput, "schedule has " + std::to_string(schedule.size()) +
                                       " steps, " + std::to_string(steps) + " requested");
  }
  WeightedSample out = s;
  for (std::size_t k = 0; k < steps; ++k) {
    out = rake_step(out, schedule[k].partition, schedule[k].targets);
  }
  return out;
}

double raked_mean(const WeightedSample& s, const RakingSchedule& schedule, std::size_t steps) {
  return rake(s, schedule, steps).mean();
}

RakingConvergence rake_to_convergence(const WeightedSample& s, const RakingSchedule& schedule,
                                      double tol, std::size_t max_sweeps) {
  if (schedule.empty()) throw Error(ErrorKind::kInput, "empty raking schedule");
  validate_schedule(schedule);
  std::vector<std::vector<std::size_t>> labels;
  for (const RakingStep& step : schedule) labels.push_back(step.partition.labels(s.points));

  RakingConvergence r{s, 0, 0.0, false};
  auto max_error = [&] {
    double e = 0.0;
    for (std::size_t k = 0; k < schedule.size(); ++k) {
      const auto w = cell_weights(r.sample.weights, labels[k], schedule[k].targets.size());
      for (std::size_t j = 0; j < w.size(); ++j) e = std::max(e, std::abs(w[j] - schedule[k].targets[j]));
    }
    return e;
  };
  while (r.sweeps < max_sweeps) {
    for (std::size_t k = 0; k < schedule.size(); ++k) {
      rake_weights(r.sample.weights, labels[k], schedule[k].targets);
    }
    ++r.sweeps;
    r.max_error = max_error();
    if (r.max_error < tol) {
      r.converged = true;
      break;
    }
  }
  return r;
}

SymMatrix cell_covariance(std::span<const double> marginal) {
  const auto m = static_cast<Eigen::Index>(marginal.size());
  if (m == 0) throw Error(ErrorKind::kInput, "empty marginal");
  Eigen::VectorXd p(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    p(i) = marginal[static_cast<std::size_t>(i)];
    if (!(p(i) > 0.0)) throw Error(ErrorKind::kInput, "every cell needs a positive probability");
  }
  return SymMatrix(Eigen::MatrixXd(p.asDiagonal()) - p * p.transpose());
}

PartitionMatrices partition_matrices(const Eigen::MatrixXd& joint) {
  if (joint.rows() == 0 || joint.cols() == 0) throw Error(ErrorKind::kInput, "empty joint table");
  if ((joint.array() < 0.0).any() || !joint.allFinite()) {
    throw Error(ErrorKind::kInput, "joint probabilities must be finite and >= 0");
  }
  const Eigen::VectorXd row = joint.rowwise().sum();
  std::vector<double> marginal(static_cast<std::size_t>(row.size()));
  Eigen::MatrixXd cond(joint.rows(), joint.cols());
  for (Eigen::Index k = 0; k < joint.rows(); ++k) {
    if (!(row(k) > 0.0)) {
      throw Error(ErrorKind::kInput, "conditioning cell " + std::to_string(k) + " has probability 0");
    }
    marginal[static_cast<std::size_t>(k)] = row(k);
    cond.row(k) = joint.row(k) / row(k);
  }
  return {cell_covariance(marginal), cond};
}

RakingDesign build_design(std::span<const double> points, std::span<const double> probs,
                          const RakingSchedule& schedule, const Eigen::MatrixXd& g) {
  if (points.size() != probs.size() || g.rows() != static_cast<Eigen::Index>(points.size())) {
    throw Error(ErrorKind::kInput, "build_design: points, probabilities and features disagree in length");
  }
  validate_schedule(schedule);
  const std::size_t n_steps = schedule.size();
  std::vector<std::vector<std::size_t>> labels;
  for (const RakingStep& step : schedule) labels.push_back(step.partition.labels(points));

  RakingDesign d;
  d.conditional.resize(n_steps);
  for (std::size_t k = 0; k < n_steps; ++k) {
    const std::size_t m = schedule[k].partition.cells();
    d.ck.push_back(cell_covariance(schedule[k].targets));

    Eigen::VectorXd mass = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), g.cols());
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto j = static_cast<Eigen::Index>(labels[k][i]);
      mass(j) += probs[i];
      sum.row(j) += probs[i] * g.row(static_cast<Eigen::Index>(i));
    }
    for (Eigen::Index j = 0; j < mass.size(); ++j) {
      if (!(mass(j) > 0.0)) {
        throw Error(ErrorKind::kRakingDegenerate,
                    "step " + std::to_string(k) + ": cell " + std::to_string(j) + " has no mass");
      }
      sum.row(j) /= mass(j);
    }
    d.base.push_back(std::move(sum));

    for (std::size_t j = 0; j < k; ++j) {
      Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(
          static_cast<Eigen::Index>(schedule[j].partition.cells()), static_cast<Eigen::Index>(m));
      for (std::size_t i = 0; i < points.size(); ++i) {
        joint(static_cast<Eigen::Index>(labels[j][i]), static_cast<Eigen::Index>(labels[k][i])) += probs[i];
      }
      d.conditional[k].push_back(partition_matrices(joint).conditional);
    }
  }
  return d;
}

Eigen::MatrixXd identity_features(std::span<const double> points) {
  Eigen::MatrixXd g(static_cast<Eigen::Index>(points.size()), 1);
  for (std::size_t i = 0; i < points.size(); ++i) g(static_cast<Eigen::Index>(i), 0) = points[i];
  return g;
}

Eigen::MatrixXd cell_features(std::span<const double> points, const Partition& cells,
                              std::span<const double> p0) {
  if (p0.size() != cells.cells()) throw Error(ErrorKind::kInput, "one null weight per cell expected");
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(points.size()),
                                            static_cast<Eigen::Index>(cells.cells()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::size_t c = cells.cell_of(points[i]);
    g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = 1.0 / std::sqrt(p0[c]);
  }
  return g;
}

Eigen::MatrixXd phi_matrix(const RakingDesign& design, std::size_t k, std::size_t n_steps) {
  if (n_steps > design.steps() || k >= n_steps) {
    throw Error(ErrorKind::kInput, "phi_matrix needs k < N <= design steps");
  }
  // Phi_l for l = N-1 down to k
  std::vector<Eigen::MatrixXd> phi(n_steps);
  for (std::size_t l = n_steps; l-- > k;) {
    phi[l] = design.base[l];
    for (std::size_t m = l + 1; m < n_steps; ++m) {
      const Eigen::MatrixXd& p = design.conditional[m][l];
      if (p.cols() != phi[m].rows() || p.rows() != phi[l].rows()) {
        throw Error(ErrorKind::kInput, "phi_matrix: inconsistent conditional matrix dimensions");
      }
      phi[l] -= p * phi[m];
    }
  }
  return phi[k];
}

namespace {

Eigen::MatrixXd reduction(const RakingDesign& design, std::size_t n_steps) {
  const Eigen::Index d = design.dim();
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t k = 0; k < n_steps; ++k) {
    const Eigen::MatrixXd phi = phi_matrix(design, k, n_steps);
    total += phi.transpose() * design.ck[k].matrix() * phi;
  }
  return total;
}

}  // namespace

double raked_covariance(double sigma2, const RakingDesign& design, std::size_t n_steps) {
  if (n_steps == 0) return sigma2;
  if (design.dim() != 1) throw Error(ErrorKind::kInput, "scalar raked_covariance needs a 1-column design");
  return sigma2 - reduction(design, n_steps)(0, 0);
}

SymMatrix raked_covariance(const SymMatrix& sigma1, const RakingDesign& design, std::size_t n_steps) {
  if (n_steps == 0) return sigma1;
  if (design.dim() != sigma1.dim()) {
    throw Error(ErrorKind::kInput, "raked_covariance: design and covariance dimensions differ");
  }
  return SymMatrix(sigma1.matrix() - reduction(design, n_steps));
}

TwoPartitionVariances two_partition_formulas(const TwoPartitionInput& in) {
  const double pa = in.p_a;
  const double pb = in.p_b;
  const double pab = in.p_ab;
  if (!(pa > 0.0 && pa < 1.0 && pb > 0.0 && pb < 1.0)) {
    throw Error(ErrorKind::kInput, "pA and pB must lie in (0, 1)");
  }
  const double slack = 1e-15;
  if (pab < std::max(0.0, pa + pb - 1.0) - slack || pab > std::min(pa, pb) + slack) {
    throw Error(ErrorKind::kInput, "pAB outside its Frechet bounds");
  }
  const double qa = 1.0 - pa;
  const double qb = 1.0 - pb;
  const double cov = pab - pa * pb;
  const double denom = pa * pb * qa * qb - cov * cov;
  if (std::abs(denom) <= 1e-300) {
    throw Error(ErrorKind::kDegenerateDesign, "pA pB pA' pB' - (pAB - pA pB)^2 vanishes");
  }

  const double d_a = in.mean_given_a - in.mean_given_not_a;
  const double d_b = in.mean_given_b - in.mean_given_not_b;
  const double delta_a = in.mean_given_a - in.mean;
  const double delta_b = in.mean_given_b - in.mean;

  TwoPartitionVariances r;
  r.sigma1_sq = in.sigma2 - pa * qa * d_a * d_a;
  const double adj = d_a - cov / (pa * qa) * d_b;
  r.sigma2_sq = in.sigma2 - pb * qb * d_b * d_b - pa * qa * adj * adj;
  const double num = pa * pb *
                     (pa * delta_a * delta_a + pb * delta_b * delta_b -
                      pa * pb * (delta_a - delta_b) * (delta_a - delta_b) - 2.0 * pab * delta_a * delta_b);
  r.sigma_inf_sq = in.sigma2 - num / denom;
  return r;
}

}  // namespace auxtest
