#include "auxtest/chisq.hpp"

#include <cmath>
#include <numeric>

#include "auxtest/error.hpp"

namespace auxtest {

namespace {

void check_length(std::size_t got, const PartitionSpec& spec, const char* what) {
  if (got != spec.cells()) {
    throw Error(ErrorKind::kInput, std::string(what) + ": expected " +
                                       std::to_string(spec.cells()) + " cells, got " +
                                       std::to_string(got));
  }
}

}  // namespace

PartitionSpec::PartitionSpec(std::vector<double> p0, std::vector<std::string> labels)
    : p0_(std::move(p0)), labels_(std::move(labels)) {
  if (p0_.size() < 2) throw Error(ErrorKind::kInput, "a partition needs at least 2 cells");
  double total = 0.0;
  for (double w : p0_) {
    if (!(w > 0.0)) throw Error(ErrorKind::kInput, "null cell weights must be > 0");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorKind::kInput, "null cell weights must sum to 1");
  }
  if (labels_.empty()) {
    for (std::size_t i = 0; i < p0_.size(); ++i) labels_.push_back("A" + std::to_string(i + 1));
  } else if (labels_.size() != p0_.size()) {
    throw Error(ErrorKind::kInput, "one label per cell expected");
  }
}

Eigen::VectorXd PartitionSpec::sqrt_p0() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(p0_.size()));
  for (std::size_t i = 0; i < p0_.size(); ++i) out(static_cast<Eigen::Index>(i)) = std::sqrt(p0_[i]);
  return out;
}

Eigen::VectorXd chi2_vector(std::span<const std::size_t> counts, const PartitionSpec& spec) {
  check_length(counts.size(), spec, "chi2_vector");
  const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  if (total == 0) throw Error(ErrorKind::kInput, "chi-square statistic needs a non-empty sample");
  const double n = static_cast<double>(total);
  Eigen::VectorXd z(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double p0 = spec.p0()[i];
    z(static_cast<Eigen::Index>(i)) =
        std::sqrt(n) * (static_cast<double>(counts[i]) / n - p0) / std::sqrt(p0);
  }
  return z;
}

double chi2_statistic(std::span<const std::size_t> counts, const PartitionSpec& spec) {
  check_length(counts.size(), spec, "chi2_statistic");
  const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  if (total == 0) throw Error(ErrorKind::kInput, "chi-square statistic needs a non-empty sample");
  const double n = static_cast<double>(total);
  double stat = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double d = static_cast<double>(counts[i]) / n - spec.p0()[i];
    stat += n * d * d / spec.p0()[i];
  }
  return stat;
}

CovariancePair build_sigma0_sigma1(std::span<const double> p, const PartitionSpec& spec) {
  check_length(p.size(), spec, "build_sigma0_sigma1");
  const auto m = static_cast<Eigen::Index>(p.size());
  Eigen::VectorXd sqrt_p(m);
  Eigen::VectorXd scale(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double pi = p[static_cast<std::size_t>(i)];
    if (!(pi >= 0.0)) throw Error(ErrorKind::kInput, "cell probabilities must be >= 0");
    sqrt_p(i) = std::sqrt(pi);
    scale(i) = std::sqrt(pi / spec.p0()[static_cast<std::size_t>(i)]);
  }
  const Eigen::MatrixXd sigma0 = Eigen::MatrixXd::Identity(m, m) - sqrt_p * sqrt_p.transpose();
  const Eigen::MatrixXd sigma1 = scale.asDiagonal() * sigma0 * scale.asDiagonal();
  return {SymMatrix(sigma0), SymMatrix(sigma1)};
}

Eigen::VectorXd t_vector(std::size_t n, std::span<const double> p, const PartitionSpec& spec) {
  check_length(p.size(), spec, "t_vector");
  const double root_n = std::sqrt(static_cast<double>(n));
  Eigen::VectorXd t(static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double p0 = spec.p0()[i];
    t(static_cast<Eigen::Index>(i)) = root_n * (p0 - p[i]) / std::sqrt(p0);
  }
  return t;
}

ValidationReport validate_aux_covariance(const SymMatrix& sigma_hat, const SymMatrix& sigma1,
                                         std::size_t m, double tol) {
  ValidationReport r;
  if (sigma_hat.dim() != static_cast<Eigen::Index>(m) ||
      sigma1.dim() != static_cast<Eigen::Index>(m)) {
    r.message = "covariance matrices must be " + std::to_string(m) + "x" + std::to_string(m);
    return r;
  }
  r.order_ok = psd_order_check(sigma1, sigma_hat, tol);
  try {
    r.rank_hat = pseudo_det_rank(sigma_hat, tol).rank;
  } catch (const Error&) {
    r.rank_hat = -1;
  }
  try {
    r.rank_sigma1 = pseudo_det_rank(sigma1, tol).rank;
  } catch (const Error&) {
    r.rank_sigma1 = -1;
  }
  const auto expected = static_cast<Eigen::Index>(m) - 1;
  r.ranks_ok = r.rank_hat == expected && r.rank_sigma1 == expected;

  if (!r.order_ok) {
    r.message = "sigma1 - sigma_hat is not PSD";
  } else if (!r.ranks_ok) {
    r.message = "rank mismatch: rank(sigma_hat) = " + std::to_string(r.rank_hat) +
                ", rank(sigma1) = " + std::to_string(r.rank_sigma1) + ", expected " +
                std::to_string(expected);
  } else {
    r.inverse_order_ok =
        psd_order_check(pseudo_inverse(sigma_hat, tol), pseudo_inverse(sigma1, tol), 1e-8);
    if (!r.inverse_order_ok) r.message = "sigma_hat^+ - sigma1^+ is not PSD";
  }
  r.pass = r.order_ok && r.ranks_ok && r.inverse_order_ok;
  return r;
}

double aux_chi2_statistic(const ChiAuxEstimate& est, const PartitionSpec& spec, double tol) {
  if (est.p_hat.size() != static_cast<Eigen::Index>(spec.cells())) {
    throw Error(ErrorKind::kInput, "aux_chi2_statistic: p_hat length mismatch");
  }
  const ValidationReport report = validate_aux_covariance(est.sigma_hat, est.sigma1, spec.cells(), tol);
  if (!report.pass) throw Error(ErrorKind::kPrecondition, "auxiliary covariance: " + report.message);

  const Eigen::MatrixXd s = psd_sqrt_product(pseudo_inverse(est.sigma_hat, tol), est.sigma1, tol);
  const Eigen::RowVectorXd dev =
      std::sqrt(static_cast<double>(est.n)) * (est.p_hat - spec.sqrt_p0()).transpose();
  const Eigen::RowVectorXd z = dev * s;
  return z.squaredNorm();
}

double theorem2_rate(std::span<const double> p, const PartitionSpec& spec,
                     const SymMatrix& sigma_hat, const SymMatrix& sigma1, double tol) {
  const ValidationReport report = validate_aux_covariance(sigma_hat, sigma1, spec.cells(), tol);
  if (!report.pass) throw Error(ErrorKind::kPrecondition, "auxiliary covariance: " + report.message);
  const Eigen::VectorXd t = t_vector(1, p, spec);
  const Eigen::MatrixXd gap =
      pseudo_inverse(sigma_hat, tol).matrix() - pseudo_inverse(sigma1, tol).matrix();
  return 0.5 * t.dot(gap * t);
}

}  // namespace auxtest
