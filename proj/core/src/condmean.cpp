#include "auxtest/condmean.hpp"

#include <cmath>
#include <vector>

#include "auxtest/error.hpp"

namespace auxtest {

namespace {

CondMeanEstimates scalar_part(std::span<const double> sample, const CondMeanInfo& info) {
  CondMeanEstimates e;
  e.n = sample.size();
  double sum_c = 0.0;
  for (double x : sample) {
    if (info.c.contains(x)) {
      ++e.n_in_c;
      sum_c += x;
    }
  }
  if (e.n_in_c == 0) throw Error(ErrorKind::kEmptyConditioning, "no observation falls in C");
  const double n = static_cast<double>(e.n);
  const double nc = static_cast<double>(e.n_in_c);
  e.p_c = nc / n;
  e.cond_mean = sum_c / nc;
  double ss = 0.0;
  double sx = 0.0;
  for (double x : sample) {
    if (!info.c.contains(x)) continue;
    const double d = x - e.cond_mean;
    ss += d * d;
    sx += d * x;
  }
  e.cond_var = ss / nc;
  if (!(e.cond_var > 0.0)) {
    throw Error(ErrorKind::kDegenerateInformation, "Var_n(X|C) = 0, the information matrix is singular");
  }
  // P_n(psi^2) = Var_n(X|C) / P_n(C)
  e.k22 = e.cond_var / e.p_c / n;
  e.k12 = sx / nc / n;
  return e;
}

void check_cells(const Partition& cells, const PartitionSpec& spec) {
  if (cells.cells() != spec.cells()) {
    throw Error(ErrorKind::kInput, "partition and null weights disagree on the number of cells");
  }
}

double sample_variance(std::span<const double> sample) {
  const double s = sample_stddev(sample);
  return s * s;
}

}  // namespace

CondMeanEstimates cond_mean_estimates(std::span<const double> sample, const CondMeanInfo& info) {
  return scalar_part(sample, info);
}

CondMeanEstimates cond_mean_estimates(std::span<const double> sample, const CondMeanInfo& info,
                                      const Partition& cells, const PartitionSpec& spec) {
  check_cells(cells, spec);
  CondMeanEstimates e = scalar_part(sample, info);
  const auto m = static_cast<Eigen::Index>(spec.cells());
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(m);
  for (double x : sample) {
    if (!info.c.contains(x)) continue;
    acc(static_cast<Eigen::Index>(cells.cell_of(x))) += x - e.cond_mean;
  }
  const double n = static_cast<double>(e.n);
  e.k12_vec.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    // P_n(psi f_i) = sum_{C & A_i} (x - m_C) / (n P_n(C) sqrt(p0_i))
    e.k12_vec(i) = acc(i) / (n * e.p_c * std::sqrt(spec.p0()[static_cast<std::size_t>(i)])) / n;
  }
  return e;
}

ScalarCondMeanLimits cond_mean_limits(const DiscreteDist& dist, const CondMeanInfo& info) {
  ScalarCondMeanLimits l;
  auto in_c = [&](double x) { return info.c.contains(x); };
  l.p_c = dist.prob(in_c);
  if (!(l.p_c > 0.0)) throw Error(ErrorKind::kEmptyConditioning, "P(C) = 0");
  l.cond_mean = dist.expect([](double x) { return x; }, in_c) / l.p_c;
  const double m = l.cond_mean;
  l.cond_var = dist.expect([m](double x) { return (x - m) * (x - m); }, in_c) / l.p_c;
  if (!(l.cond_var > 0.0)) throw Error(ErrorKind::kDegenerateInformation, "Var(X|C) = 0");
  l.sigma2 = dist.variance();
  l.sigma22 = l.cond_var / l.p_c;
  l.coef = l.p_c;
  l.sigma_hat2 = l.sigma2 - l.p_c * l.cond_var;
  return l;
}

VectorCondMeanLimits cond_mean_limits(const DiscreteDist& dist, const CondMeanInfo& info,
                                      const Partition& cells, const PartitionSpec& spec) {
  check_cells(cells, spec);
  VectorCondMeanLimits v{cond_mean_limits(dist, info), {}, {}, SymMatrix::zero(1), SymMatrix::zero(1)};
  const auto m = static_cast<Eigen::Index>(spec.cells());
  v.cell_probs.assign(spec.cells(), 0.0);
  v.sigma12 = Eigen::VectorXd::Zero(m);
  const double mc = v.scalar.cond_mean;
  const double pc = v.scalar.p_c;
  for (std::size_t a = 0; a < dist.size(); ++a) {
    const double x = dist.atoms()[a];
    const double w = dist.probs()[a];
    const std::size_t cell = cells.cell_of(x);
    v.cell_probs[cell] += w;
    if (info.c.contains(x)) {
      // psi has mean zero, so Cov(f_i, psi) = E[f_i psi]
      v.sigma12(static_cast<Eigen::Index>(cell)) += w * (x - mc) / pc / std::sqrt(spec.p0()[cell]);
    }
  }
  v.sigma1 = build_sigma0_sigma1(v.cell_probs, spec).sigma1;
  v.sigma_hat = SymMatrix(v.sigma1.matrix() -
                          v.sigma12 * v.sigma12.transpose() / v.scalar.sigma22);
  return v;
}

MeanAuxEstimate theta_star_scalar(std::span<const double> sample, const CondMeanInfo& info) {
  const CondMeanEstimates e = scalar_part(sample, info);
  const double mean = sample_mean(sample);
  const double var_n = sample_variance(sample);
  const double floor = 1e-12 * var_n;
  double sh2 = var_n - e.p_c * e.cond_var;
  if (sh2 < floor) sh2 = floor;
  MeanAuxEstimate out;
  out.value = mean - e.k12 / e.k22 * (e.cond_mean - info.value);
  out.sigma_hat = std::sqrt(sh2);
  out.n = e.n;
  return out;
}

MeanAuxEstimate theta_star_scalar(std::span<const double> sample, const CondMeanInfo& info,
                                  const ScalarCondMeanLimits& limits) {
  const CondMeanEstimates e = scalar_part(sample, info);
  MeanAuxEstimate out;
  out.value = sample_mean(sample) - limits.coef * (e.cond_mean - info.value);
  out.sigma_hat = std::sqrt(limits.sigma_hat2);
  out.n = e.n;
  return out;
}

namespace {

Eigen::VectorXd empirical_f(std::span<const double> sample, const Partition& cells,
                            const PartitionSpec& spec, std::vector<double>& freq) {
  freq.assign(spec.cells(), 0.0);
  for (double x : sample) freq[cells.cell_of(x)] += 1.0;
  Eigen::VectorXd f(static_cast<Eigen::Index>(spec.cells()));
  for (std::size_t i = 0; i < spec.cells(); ++i) {
    freq[i] /= static_cast<double>(sample.size());
    f(static_cast<Eigen::Index>(i)) = freq[i] / std::sqrt(spec.p0()[i]);
  }
  return f;
}

}  // namespace

ChiAuxEstimate theta_star_vector(std::span<const double> sample, const CondMeanInfo& info,
                                 const Partition& cells, const PartitionSpec& spec) {
  const CondMeanEstimates e = cond_mean_estimates(sample, info, cells, spec);
  std::vector<double> freq;
  const Eigen::VectorXd f = empirical_f(sample, cells, spec, freq);
  const double n = static_cast<double>(e.n);
  const Eigen::VectorXd s12 = n * e.k12_vec;
  const double s22 = n * e.k22;
  const SymMatrix sigma1 = build_sigma0_sigma1(freq, spec).sigma1;
  return ChiAuxEstimate{f - e.k12_vec / e.k22 * (e.cond_mean - info.value),
                        SymMatrix(sigma1.matrix() - s12 * s12.transpose() / s22), sigma1, e.n};
}

ChiAuxEstimate theta_star_vector(std::span<const double> sample, const CondMeanInfo& info,
                                 const Partition& cells, const PartitionSpec& spec,
                                 const VectorCondMeanLimits& limits) {
  check_cells(cells, spec);
  const CondMeanEstimates e = scalar_part(sample, info);
  std::vector<double> freq;
  const Eigen::VectorXd f = empirical_f(sample, cells, spec, freq);
  return ChiAuxEstimate{f - limits.sigma12 / limits.scalar.sigma22 * (e.cond_mean - info.value),
                        limits.sigma_hat, limits.sigma1, e.n};
}

}  // namespace auxtest
