#include "auxtest/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <thread>

#include "auxtest/chisq.hpp"
#include "auxtest/condmean.hpp"
#include "auxtest/error.hpp"
#include "auxtest/gauss.hpp"
#include "auxtest/ztest.hpp"

namespace auxtest {

const char* to_string(TestKind kind) noexcept {
  switch (kind) {
    case TestKind::kZ: return "z";
    case TestKind::kZAuxRaking: return "z-aux-raking";
    case TestKind::kZAuxCondmean: return "z-aux-condmean";
    case TestKind::kChisq: return "chisq";
    case TestKind::kChisqAuxRaking: return "chisq-aux-raking";
    case TestKind::kChisqAuxCondmean: return "chisq-aux-condmean";
  }
  return "unknown";
}

TestKind parse_test_kind(const std::string& name) {
  for (TestKind k : {TestKind::kZ, TestKind::kZAuxRaking, TestKind::kZAuxCondmean, TestKind::kChisq,
                     TestKind::kChisqAuxRaking, TestKind::kChisqAuxCondmean}) {
    if (name == to_string(k)) return k;
  }
  throw Error(ErrorKind::kInput, "unknown test kind '" + name + "'");
}

AuxSource aux_source(TestKind kind) noexcept {
  switch (kind) {
    case TestKind::kZAuxRaking:
    case TestKind::kChisqAuxRaking: return AuxSource::kRaking;
    case TestKind::kZAuxCondmean:
    case TestKind::kChisqAuxCondmean: return AuxSource::kCondmean;
    default: return AuxSource::kNone;
  }
}

bool is_chisq(TestKind kind) noexcept {
  return kind == TestKind::kChisq || kind == TestKind::kChisqAuxRaking ||
         kind == TestKind::kChisqAuxCondmean;
}

TestKind with_aux(TestKind kind, AuxSource aux) noexcept {
  const bool chi = is_chisq(kind);
  switch (aux) {
    case AuxSource::kRaking: return chi ? TestKind::kChisqAuxRaking : TestKind::kZAuxRaking;
    case AuxSource::kCondmean: return chi ? TestKind::kChisqAuxCondmean : TestKind::kZAuxCondmean;
    case AuxSource::kNone: break;
  }
  return chi ? TestKind::kChisq : TestKind::kZ;
}

namespace {

std::vector<double> cell_probs(const DiscreteDist& dist, const Partition& p) {
  std::vector<double> out(p.cells(), 0.0);
  for (std::size_t i = 0; i < dist.size(); ++i) out[p.cell_of(dist.atoms()[i])] += dist.probs()[i];
  return out;
}

RakingStep exact_step(const DiscreteDist& dist, Partition p) {
  std::vector<double> targets = cell_probs(dist, p);
  return RakingStep{std::move(p), std::move(targets)};
}

}  // namespace

BenchConfig preset(TestKind kind, Hypothesis h) {
  BenchConfig c;
  c.test = kind;
  const DiscreteDist& d = c.distribution;
  const Partition a1({Event({Interval{-0.5, 0.0}, Interval{0.5, 1.0}})});
  const Partition b({Event::at_most(0.0)});
  c.schedule = alternating_schedule(exact_step(d, a1), exact_step(d, b), 2);
  c.steps = 2;
  c.condition = CondMeanInfo{Event::between(-0.5, 0.5), 0.0};
  c.mu = 0.05;
  if (kind == TestKind::kChisqAuxCondmean) {
    c.cells = Partition({Event::at_most(0.0)});
    c.p0 = {3.0 / 8.0, 5.0 / 8.0};
  } else {
    c.cells = Partition({Event::at_most(0.5)});
    c.p0 = {5.0 / 8.0, 3.0 / 8.0};
  }
  if (h == Hypothesis::kH0) {
    c.mu = d.mean();
    c.p0 = cell_probs(d, c.cells);
  }
  return c;
}

void validate(const BenchConfig& c) {
  if (c.reps < 1) throw Error(ErrorKind::kInput, "reps must be >= 1");
  if (c.n.empty()) throw Error(ErrorKind::kInput, "the n grid is empty");
  for (std::size_t n : c.n) {
    if (n < 2) throw Error(ErrorKind::kInput, "every n must be >= 2");
  }
  if (c.t.empty()) {
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw Error(ErrorKind::kInput, "alpha must lie in (0, 1)");
  } else {
    if (c.t.size() != 1 && c.t.size() != c.n.size()) {
      throw Error(ErrorKind::kInput, "give one threshold or one per n");
    }
    for (double t : c.t) {
      if (!(t > 0.0) || !std::isfinite(t)) throw Error(ErrorKind::kInput, "thresholds must be > 0");
    }
  }
  if (is_chisq(c.test)) PartitionSpec check(c.p0);
  if (aux_source(c.test) == AuxSource::kRaking) {
    if (c.steps > c.schedule.size()) {
      throw Error(ErrorKind::kInput, "raking steps exceed the schedule length");
    }
    validate_schedule(c.schedule);
  }
}

namespace {

/// Per-run constants shared by all replications.
struct Context {
  const BenchConfig& cfg;
  bool chisq = false;
  AuxSource aux = AuxSource::kNone;
  double mean = 0.0;
  double sigma2 = 0.0;
  std::optional<PartitionSpec> spec;
  std::vector<double> true_cells;
  RakingSchedule schedule;  // truncated to cfg.steps
  std::optional<SymMatrix> sigma1_exact;
  std::optional<SymMatrix> sigma_hat_exact;
  double sigma_hat2_exact = 0.0;
  std::optional<ScalarCondMeanLimits> scalar_limits;
  std::optional<VectorCondMeanLimits> vector_limits;

  explicit Context(const BenchConfig& c) : cfg(c) {
    validate(c);
    chisq = is_chisq(c.test);
    aux = aux_source(c.test);
    mean = c.distribution.mean();
    sigma2 = c.distribution.variance();
    if (chisq) {
      spec.emplace(c.p0);
      if (c.cells.cells() != spec->cells()) {
        throw Error(ErrorKind::kInput, "cells and p0 disagree on the number of cells");
      }
      true_cells = cell_probs(c.distribution, c.cells);
      sigma1_exact = build_sigma0_sigma1(true_cells, *spec).sigma1;
    }
    if (aux == AuxSource::kRaking) {
      schedule.assign(c.schedule.begin(), c.schedule.begin() + static_cast<std::ptrdiff_t>(c.steps));
      const auto& atoms = c.distribution.atoms();
      if (chisq) {
        const RakingDesign d = build_design(atoms, c.distribution.probs(), schedule,
                                            cell_features(atoms, c.cells, c.p0));
        sigma_hat_exact = raked_covariance(*sigma1_exact, d, c.steps);
      } else {
        const RakingDesign d =
            build_design(atoms, c.distribution.probs(), schedule, identity_features(atoms));
        sigma_hat2_exact = raked_covariance(sigma2, d, c.steps);
      }
    } else if (aux == AuxSource::kCondmean) {
      if (chisq) {
        vector_limits = cond_mean_limits(c.distribution, c.condition, c.cells, *spec);
        sigma_hat_exact = vector_limits->sigma_hat;
      } else {
        scalar_limits = cond_mean_limits(c.distribution, c.condition);
        sigma_hat2_exact = scalar_limits->sigma_hat2;
      }
    }
  }
};

struct RepResult {
  double classic = 0.0;
  double aux = 0.0;
  bool failed = false;
  ErrorKind kind = ErrorKind::kInput;
  std::string message;
};

std::vector<double> raked_weights(const std::vector<double>& sample, const RakingSchedule& schedule) {
  std::vector<double> w(sample.size(), 1.0 / static_cast<double>(sample.size()));
  for (const RakingStep& step : schedule) {
    const std::vector<std::size_t> labels = step.partition.labels(sample);
    rake_weights(w, labels, step.targets);
  }
  return w;
}

double weighted_mean(const std::vector<double>& x, const std::vector<double>& w) {
  std::vector<double> terms(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) terms[i] = w[i] * x[i];
  return stable_sum(terms);
}

void run_replication(const Context& ctx, std::size_t n, Rng& rng, RepResult& out) {
  const BenchConfig& c = ctx.cfg;
  const std::vector<double> sample = draw_sample(c.distribution, n, rng);
  const bool oracle = c.mode == AuxMode::kOracle;

  if (!ctx.chisq) {
    const double sd = sample_stddev(sample);
    out.classic = z_statistic(sample, c.mu, sd);
    switch (ctx.aux) {
      case AuxSource::kNone: out.aux = out.classic; break;
      case AuxSource::kRaking: {
        const std::vector<double> w = raked_weights(sample, ctx.schedule);
        MeanAuxEstimate est{weighted_mean(sample, w), 0.0, n};
        if (oracle) {
          est.sigma_hat = std::sqrt(ctx.sigma_hat2_exact);
        } else {
          const std::vector<double> probs(n, 1.0 / static_cast<double>(n));
          const RakingDesign d = build_design(sample, probs, ctx.schedule, identity_features(sample));
          const double var_n = sd * sd;
          est.sigma_hat = std::sqrt(std::max(raked_covariance(var_n, d, c.steps), 1e-12 * var_n));
        }
        out.aux = aux_z_statistic(est, c.mu);
        break;
      }
      case AuxSource::kCondmean: {
        const MeanAuxEstimate est = oracle ? theta_star_scalar(sample, c.condition, *ctx.scalar_limits)
                                           : theta_star_scalar(sample, c.condition);
        out.aux = aux_z_statistic(est, c.mu);
        break;
      }
    }
    return;
  }

  const PartitionSpec& spec = *ctx.spec;
  std::vector<std::size_t> counts(spec.cells(), 0);
  for (double x : sample) ++counts[c.cells.cell_of(x)];
  out.classic = chi2_statistic(counts, spec);
  switch (ctx.aux) {
    case AuxSource::kNone: out.aux = out.classic; break;
    case AuxSource::kRaking: {
      const std::vector<double> w = raked_weights(sample, ctx.schedule);
      const std::vector<double> cw = cell_weights(w, c.cells.labels(sample), spec.cells());
      ChiAuxEstimate est{Eigen::VectorXd(static_cast<Eigen::Index>(spec.cells())), *ctx.sigma_hat_exact,
                         *ctx.sigma1_exact, n};
      for (std::size_t i = 0; i < spec.cells(); ++i) {
        est.p_hat(static_cast<Eigen::Index>(i)) = cw[i] / std::sqrt(spec.p0()[i]);
      }
      if (!oracle) {
        std::vector<double> freq(spec.cells());
        for (std::size_t i = 0; i < spec.cells(); ++i) {
          freq[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
        }
        est.sigma1 = build_sigma0_sigma1(freq, spec).sigma1;
        const std::vector<double> probs(n, 1.0 / static_cast<double>(n));
        const RakingDesign d =
            build_design(sample, probs, ctx.schedule, cell_features(sample, c.cells, spec.p0()));
        est.sigma_hat = raked_covariance(est.sigma1, d, c.steps);
      }
      out.aux = aux_chi2_statistic(est, spec);
      break;
    }
    case AuxSource::kCondmean: {
      const ChiAuxEstimate est =
          oracle ? theta_star_vector(sample, c.condition, c.cells, spec, *ctx.vector_limits)
                 : theta_star_vector(sample, c.condition, c.cells, spec);
      out.aux = aux_chi2_statistic(est, spec);
      break;
    }
  }
}

/// Runs body(r) for r in [0, count) on `workers` threads; each index is
/// handled exactly once and results are written by index.
template <class Body>
void parallel_for(std::size_t count, unsigned workers, Body body) {
  const unsigned w = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (w == 1) {
    for (std::size_t r = 0; r < count; ++r) body(r);
    return;
  }
  constexpr std::size_t kChunk = 64;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t start = next.fetch_add(kChunk);
      if (start >= count) return;
      const std::size_t stop = std::min(count, start + kChunk);
      for (std::size_t r = start; r < stop; ++r) body(r);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < w; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
}

StatisticDraws simulate(const Context& ctx, std::size_t n) {
  const BenchConfig& c = ctx.cfg;
  std::vector<RepResult> results(c.reps);
  const Rng root(c.seed);
  parallel_for(c.reps, c.workers, [&](std::size_t r) {
    Rng rng = root.child(r);
    try {
      run_replication(ctx, n, rng, results[r]);
    } catch (const Error& e) {
      results[r].failed = true;
      results[r].kind = e.kind();
      results[r].message = e.what();
    }
  });
  StatisticDraws d;
  d.n = n;
  d.classic.reserve(c.reps);
  d.aux.reserve(c.reps);
  for (std::size_t r = 0; r < c.reps; ++r) {
    const RepResult& res = results[r];
    if (res.failed) {
      const ErrorKind kind =
          res.kind == ErrorKind::kIncompatibleCovariances ? ErrorKind::kPrecondition : res.kind;
      throw Error(kind, std::string(to_string(c.test)) + ", n = " + std::to_string(n) +
                            ", replication " + std::to_string(r) + ": " + res.message);
    }
    d.classic.push_back(res.classic);
    d.aux.push_back(res.aux);
  }
  return d;
}

double rate_from(const Context& ctx) {
  const BenchConfig& c = ctx.cfg;
  if (ctx.aux == AuxSource::kNone) return 0.0;
  try {
    if (ctx.chisq) return theorem2_rate(ctx.true_cells, *ctx.spec, *ctx.sigma_hat_exact, *ctx.sigma1_exact);
    return theorem1_rate(ctx.mean, c.mu, std::sqrt(ctx.sigma2), std::sqrt(ctx.sigma_hat2_exact));
  } catch (const Error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

double threshold_of(const Context& ctx, std::size_t index) {
  const BenchConfig& c = ctx.cfg;
  if (!c.t.empty()) return c.t.size() == 1 ? c.t.front() : c.t.at(index);
  if (ctx.chisq) return ChiSquare(static_cast<int>(ctx.spec->cells()) - 1).quantile(1.0 - c.alpha);
  return normal_quantile(1.0 - c.alpha / 2.0);
}

}  // namespace

StatisticDraws simulate_statistics(const BenchConfig& config, std::size_t n) {
  const Context ctx(config);
  if (n < 2) throw Error(ErrorKind::kInput, "n must be >= 2");
  return simulate(ctx, n);
}

double threshold(const BenchConfig& config, std::size_t index) {
  const Context ctx(config);
  return threshold_of(ctx, index);
}

double predicted_rate(const BenchConfig& config) {
  const Context ctx(config);
  return rate_from(ctx);
}

PowerReport estimate_power(const BenchConfig& config) {
  const Context ctx(config);
  const double rate = rate_from(ctx);
  PowerReport report;
  report.test = config.test;
  for (std::size_t i = 0; i < config.n.size(); ++i) {
    const std::size_t n = config.n[i];
    const double t = threshold_of(ctx, i);
    const StatisticDraws d = simulate(ctx, n);
    auto rejects = [&](double s) { return ctx.chisq ? s > t : std::abs(s) > t; };
    std::size_t rc = 0;
    std::size_t ra = 0;
    for (std::size_t r = 0; r < d.classic.size(); ++r) {
      rc += rejects(d.classic[r]) ? 1 : 0;
      ra += rejects(d.aux[r]) ? 1 : 0;
    }
    const double reps = static_cast<double>(config.reps);
    PowerRow row;
    row.n = n;
    row.t = t;
    row.power_classic = static_cast<double>(rc) / reps;
    row.power_aux = static_cast<double>(ra) / reps;
    row.stderr_classic = std::sqrt(row.power_classic * (1.0 - row.power_classic) / reps);
    row.stderr_aux = std::sqrt(row.power_aux * (1.0 - row.power_aux) / reps);
    row.accept_classic = static_cast<double>(config.reps - rc) / reps;
    row.accept_aux = static_cast<double>(config.reps - ra) / reps;
    row.beta_ratio = row.accept_aux > 0.0 ? row.accept_classic / row.accept_aux
                                          : std::numeric_limits<double>::quiet_NaN();
    row.predicted_xn = rate * static_cast<double>(n);
    report.rows.push_back(row);
  }
  return report;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_power_csv(const PowerReport& report, std::ostream& out) {
  out << "test,n,t,power_classic,power_aux,stderr_classic,stderr_aux,accept_classic,accept_aux,"
         "beta_ratio,predicted_xn\n";
  for (const PowerRow& r : report.rows) {
    out << to_string(report.test) << ',' << r.n << ',' << format_double(r.t) << ','
        << format_double(r.power_classic) << ',' << format_double(r.power_aux) << ','
        << format_double(r.stderr_classic) << ',' << format_double(r.stderr_aux) << ','
        << format_double(r.accept_classic) << ',' << format_double(r.accept_aux) << ','
        << format_double(r.beta_ratio) << ',' << format_double(r.predicted_xn) << '\n';
  }
}

void write_gain_table_csv(const PowerReport& report, std::ostream& out) {
  out << "test,n,t,accept_classic,accept_aux,gain_ratio,log_gain_ratio,predicted_xn\n";
  for (const PowerRow& r : report.rows) {
    out << to_string(report.test) << ',' << r.n << ',' << format_double(r.t) << ','
        << format_double(r.accept_classic) << ',' << format_double(r.accept_aux) << ','
        << format_double(r.beta_ratio) << ',' << format_double(std::log(r.beta_ratio)) << ','
        << format_double(r.predicted_xn) << '\n';
  }
}

std::vector<std::pair<double, double>> ecdf_rows(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::vector<std::pair<double, double>> rows;
  const double total = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    // ties collapse onto their last rank
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
    rows.emplace_back(values[i], static_cast<double>(i + 1) / total);
  }
  return rows;
}

void write_ecdf_csv(const std::vector<double>& values, std::ostream& out) {
  out << "value,ecdf\n";
  for (const auto& [v, f] : ecdf_rows(values)) out << format_double(v) << ',' << format_double(f) << '\n';
}

void ecdf_export(const std::vector<double>& values, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot open '" + path + "' for writing");
  write_ecdf_csv(values, out);
  out.flush();
  if (!out) throw Error(ErrorKind::kIo, "write to '" + path + "' failed");
}

std::vector<RakingVarianceRow> raking_variance_study(const BenchConfig& config) {
  validate(config);
  if (config.steps > config.schedule.size()) {
    throw Error(ErrorKind::kInput, "raking steps exceed the schedule length");
  }
  validate_schedule(config.schedule);
  const DiscreteDist& dist = config.distribution;
  const double mean = dist.mean();
  const double sigma2 = dist.variance();
  const RakingSchedule schedule(config.schedule.begin(),
                                config.schedule.begin() + static_cast<std::ptrdiff_t>(config.steps));
  std::optional<RakingDesign> design;
  if (config.steps > 0) {
    design = build_design(dist.atoms(), dist.probs(), schedule, identity_features(dist.atoms()));
  }

  std::vector<RakingVarianceRow> rows;
  const Rng root(config.seed);
  for (std::size_t n : config.n) {
    // values[r * (steps + 1) + N]
    const std::size_t width = config.steps + 1;
    std::vector<double> values(config.reps * width);
    std::vector<std::string> errors(config.reps);
    parallel_for(config.reps, config.workers, [&](std::size_t r) {
      Rng rng = root.child(r);
      const std::vector<double> sample = draw_sample(dist, n, rng);
      std::vector<double> w(n, 1.0 / static_cast<double>(n));
      const double root_n = std::sqrt(static_cast<double>(n));
      values[r * width] = root_n * (weighted_mean(sample, w) - mean);
      try {
        for (std::size_t k = 0; k < config.steps; ++k) {
          rake_weights(w, schedule[k].partition.labels(sample), schedule[k].targets);
          values[r * width + k + 1] = root_n * (weighted_mean(sample, w) - mean);
        }
      } catch (const Error& e) {
        errors[r] = e.what();
      }
    });
    for (std::size_t r = 0; r < config.reps; ++r) {
      if (!errors[r].empty()) {
        throw Error(ErrorKind::kRakingDegenerate,
                    "n = " + std::to_string(n) + ", replication " + std::to_string(r) + ": " + errors[r]);
      }
    }
    for (std::size_t k = 0; k <= config.steps; ++k) {
      double s = 0.0;
      for (std::size_t r = 0; r < config.reps; ++r) s += values[r * width + k];
      const double m = s / static_cast<double>(config.reps);
      double ss = 0.0;
      for (std::size_t r = 0; r < config.reps; ++r) {
        const double d = values[r * width + k] - m;
        ss += d * d;
      }
      RakingVarianceRow row;
      row.n = n;
      row.steps = k;
      row.predicted = k == 0 ? sigma2 : raked_covariance(sigma2, *design, k);
      row.empirical = config.reps > 1 ? ss / static_cast<double>(config.reps - 1) : 0.0;
      rows.push_back(row);
    }
  }
  return rows;
}

void write_raking_csv(const std::vector<RakingVarianceRow>& rows, std::ostream& out) {
  out << "n,steps,predicted_var,empirical_var,relative_error\n";
  for (const RakingVarianceRow& r : rows) {
    out << r.n << ',' << r.steps << ',' << format_double(r.predicted) << ','
        << format_double(r.empirical) << ',' << format_double(r.empirical / r.predicted - 1.0) << '\n';
  }
}

}  // namespace auxtest
