#include "auxtest/ztest.hpp"

#include <cmath>
#include <numeric>

#include "auxtest/error.hpp"
#include "auxtest/gauss.hpp"

namespace auxtest {

double ZTestConfig::critical_value() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::kInput, "alpha must lie in (0, 1)");
  return normal_quantile(1.0 - alpha / 2.0);
}

double sample_mean(std::span<const double> sample) {
  if (sample.empty()) throw Error(ErrorKind::kInput, "mean of an empty sample");
  return std::accumulate(sample.begin(), sample.end(), 0.0) / static_cast<double>(sample.size());
}

double sample_stddev(std::span<const double> sample) {
  const std::size_t n = sample.size();
  if (n < 2) return 0.0;
  const double mean = std::accumulate(sample.begin(), sample.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double x : sample) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(n - 1));
}

double z_statistic(std::span<const double> sample, double mu, double sigma_n) {
  if (sample.empty()) throw Error(ErrorKind::kInput, "z_statistic: empty sample");
  if (!(sigma_n > 0.0)) throw Error(ErrorKind::kInput, "z_statistic: sigma_n must be > 0");
  const double n = static_cast<double>(sample.size());
  const double mean = std::accumulate(sample.begin(), sample.end(), 0.0) / n;
  return std::sqrt(n) * (mean - mu) / sigma_n;
}

double aux_z_statistic(const MeanAuxEstimate& est, double mu) {
  if (est.n < 1) throw Error(ErrorKind::kInput, "aux_z_statistic: n must be >= 1");
  if (!(est.sigma_hat > 0.0)) throw Error(ErrorKind::kInput, "aux_z_statistic: sigma_hat must be > 0");
  return std::sqrt(static_cast<double>(est.n)) * (est.value - mu) / est.sigma_hat;
}

bool z_rejects(double z, const ZTestConfig& config) {
  return std::abs(z) > config.critical_value();
}

double theorem1_rate(double mean, double mu, double sigma, double sigma_hat) {
  if (!(sigma_hat > 0.0) || !(sigma > 0.0)) {
    throw Error(ErrorKind::kInput, "theorem1_rate: standard deviations must be > 0");
  }
  if (sigma_hat > sigma) {
    throw Error(ErrorKind::kNotInformative, "theorem1_rate: sigma_hat exceeds sigma");
  }
  const double gap = mean - mu;
  return gap * gap * (1.0 / sigma_hat - 1.0 / sigma);
}

Theorem1Consequences theorem1_consequences(double mean, double mu, double sigma,
                                           double sigma_hat, double k,
                                           std::optional<std::size_t> n) {
  if (!(k > 0.0)) throw Error(ErrorKind::kInput, "gain factor k must be > 0");
  if (!(sigma_hat > 0.0) || !(sigma > 0.0)) {
    throw Error(ErrorKind::kInput, "standard deviations must be > 0");
  }
  if (mean == mu) {
    throw Error(ErrorKind::kDegenerateAlternative, "mean equals mu: no alternative to detect");
  }
  if (sigma_hat >= sigma) {
    throw Error(ErrorKind::kNotInformative, "sigma_hat must be strictly below sigma");
  }
  const double gap = mean - mu;
  const double log_k = std::log(k);
  const double raw = sigma * sigma_hat * log_k / ((sigma - sigma_hat) * gap * gap);

  Theorem1Consequences out;
  out.n_for_gain = raw <= 0.0 ? 0 : static_cast<long long>(std::ceil(raw));
  if (n) {
    const double denom = std::sqrt(static_cast<double>(*n) * (1.0 / sigma_hat - 1.0 / sigma));
    out.enlarged_h0_radius = denom > 0.0 ? log_k / denom : 0.0;
  }
  return out;
}

}  // namespace auxtest
