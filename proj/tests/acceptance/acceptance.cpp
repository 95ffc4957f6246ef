// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "auxtest/bench.hpp"
#include "auxtest/chisq.hpp"
#include "auxtest/condmean.hpp"
#include "auxtest/gauss.hpp"
#include "auxtest/matrix.hpp"
#include "auxtest/raking.hpp"
#include "auxtest/ztest.hpp"
#include "oracles.hpp"

using namespace auxtest;

namespace {

// tolerances
constexpr double kRate1Tol = 1e-5;
constexpr double kRate2Tol = 1e-8;
constexpr double kMatrixTol = 1e-12;
constexpr double kRakeVarRel = 0.03;
constexpr double kMarginalTol = 1e-15;
constexpr double kIpfTol = 1e-8;
constexpr double kThetaVarRel = 0.03;
constexpr double kVectorCovRel = 0.05;
constexpr double kLevelSigmas = 3.0;
constexpr double kDominanceSigmas = 3.0;
constexpr double kGrowthLo = 1.3;
constexpr double kGrowthHi = 3.0;
constexpr double kMinRatio = 2.0;
constexpr double kKsMax = 0.02;
constexpr double kRangeTol = 1e-12;

// replication counts
constexpr std::size_t kRakeReps = 20000;
constexpr std::size_t kThetaReps = 20000;
constexpr std::size_t kLevelReps = 20000;
constexpr std::size_t kPowerReps = 20000;
constexpr std::size_t kRatioReps = 50000;
constexpr std::size_t kBigN = 2000;

int failures = 0;

void report(const std::string& id, bool ok, const std::string& detail) {
  std::printf("%s %s %s\n", ok ? "PASS" : "FAIL", id.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

template <typename... Args>
std::string str(const char* f, Args... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

double variance(const std::vector<double>& v) { return oracle::variance(v); }

const std::vector<double> kRakeP{0.75, 0.25};
const PartitionSpec kRakeSpec({5.0 / 8.0, 3.0 / 8.0});
const std::vector<double> kCondP{0.5, 0.5};
const PartitionSpec kCondSpec({3.0 / 8.0, 5.0 / 8.0});

SymMatrix rank_one_form(double coefficient) {
  const double r = std::sqrt(15.0);
  return SymMatrix::from_rows({{3.0 * coefficient, -r * coefficient}, {-r * coefficient, 5.0 * coefficient}});
}

void criterion1() {
  const double s = std::sqrt(7.0 / 24.0);
  const double r2 = theorem1_rate(0.0, 0.05, s, std::sqrt(1.0 / 72.0));
  const double r1 = theorem1_rate(0.0, 0.05, s, std::sqrt(19.0 / 72.0));
  report("1a", std::abs(r2 - 0.016583) <= kRate1Tol && std::abs(r1 - 0.000237) <= kRate1Tol,
         str("theorem1_rate N=2: %.6f (0.016583), N=1: %.6f (0.000237)", r2, r1));

  const SymMatrix s1 = build_sigma0_sigma1(kRakeP, kRakeSpec).sigma1;
  const double a = theorem2_rate(kRakeP, kRakeSpec, pseudo_inverse(rank_one_form(15.0 / 94.0)), s1);
  const double b = theorem2_rate(kRakeP, kRakeSpec, pseudo_inverse(rank_one_form(15.0 / 92.0)), s1);
  report("1b", std::abs(a - 1.0 / 1128.0) <= kRate2Tol && std::abs(b - 1.0 / 552.0) <= kRate2Tol,
         str("theorem2_rate %.10f (1/1128), %.10f (1/552)", a, b));

  const SymMatrix c1 = build_sigma0_sigma1(kCondP, kCondSpec).sigma1;
  const double c = theorem2_rate(kCondP, kCondSpec, 0.5 * c1, c1);
  report("1c", std::abs(c - 1.0 / 32.0) <= kRate2Tol, str("cond-mean chi-square rate %.12f (1/32)", c));
}

void criterion2() {
  const double r = std::sqrt(3.0 / 5.0);
  const SymMatrix s1 = SymMatrix::from_rows({{0.5 * 3.0 / 5.0, -0.5 * r}, {-0.5 * r, 0.5}});
  const double e1 = oracle::max_abs(pseudo_inverse(s1).matrix() - rank_one_form(5.0 / 32.0).matrix());
  const double q = std::sqrt(15.0);
  const SymMatrix s2 = (23.0 / 16.0) * SymMatrix::from_rows({{0.2, -1.0 / q}, {-1.0 / q, 1.0 / 3.0}});
  const double e2 = oracle::max_abs(pseudo_inverse(s2).matrix() - rank_one_form(15.0 / 92.0).matrix());
  report("2a", e1 <= kMatrixTol && e2 <= kMatrixTol,
         str("pseudo-inverses of Sigma_1 and Sigma^(2): max errors %.3g, %.3g", e1, e2));

  double worst = 0.0;
  for (const std::vector<double>& p0 : {std::vector<double>{5.0 / 8.0, 3.0 / 8.0},
                                        std::vector<double>{0.2, 0.3, 0.5},
                                        std::vector<double>{0.1, 0.2, 0.3, 0.4}}) {
    const PartitionSpec spec(p0);
    const SymMatrix s0 = build_sigma0_sigma1(p0, spec).sigma0;
    worst = std::max(worst, oracle::max_abs(s0.matrix() * s0.matrix() - s0.matrix()));
    worst = std::max(worst, oracle::max_abs(pseudo_inverse(s0).matrix() - s0.matrix()));
  }
  report("2b", worst <= kMatrixTol, str("Sigma_0 idempotent and self-pseudo-inverse: max error %.3g", worst));
}

void criterion3() {
  BenchConfig c = preset(TestKind::kZAuxRaking);
  c.n = {kBigN};
  c.reps = kRakeReps;
  c.seed = 3;
  const auto rows = raking_variance_study(c);
  double v1 = 0.0;
  double v2 = 0.0;
  for (const auto& row : rows) {
    if (row.steps == 1) v1 = row.empirical;
    if (row.steps == 2) v2 = row.empirical;
  }
  const double e1 = std::abs(v1 / (19.0 / 72.0) - 1.0);
  const double e2 = std::abs(v2 / (1.0 / 72.0) - 1.0);
  report("3a", e1 <= kRakeVarRel && e2 <= kRakeVarRel,
         str("raked mean variance n=2000: N=1 %.6f (19/72 = %.6f, rel %.4f), N=2 %.6f (1/72 = %.6f, rel %.4f)",
             v1, 19.0 / 72.0, e1, v2, 1.0 / 72.0, e2));

  // marginals after each step
  const DiscreteDist d = reference_distribution();
  double worst = 0.0;
  for (std::uint64_t r = 0; r < 200; ++r) {
    Rng rng = Rng(33).child(r);
    WeightedSample s = WeightedSample::uniform(draw_sample(d, 500, rng));
    const RakingSchedule sched = alternating_schedule(c.schedule[0], c.schedule[1], 6);
    for (const RakingStep& step : sched) {
      s = rake_step(s, step.partition, step.targets);
      const auto w = cell_weights(s.weights, step.partition.labels(s.points), step.partition.cells());
      for (std::size_t j = 0; j < w.size(); ++j) worst = std::max(worst, std::abs(w[j] - step.targets[j]));
    }
  }
  report("3b", worst <= kMarginalTol, str("raked marginals after every step: max error %.3g", worst));

  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::uniform_real_distribution<double> m(0.2, 0.8);
  double ipf = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::Matrix2d p;
    p << u(gen), u(gen), u(gen), u(gen);
    p /= p.sum();
    const double r0 = m(gen);
    const double c0 = m(gen);
    WeightedSample s;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        s.points.push_back(10.0 * i + j);
        s.weights.push_back(p(i, j));
      }
    }
    const RakingSchedule sched{
        RakingStep{Partition({Event::at_most(5.0)}), {r0, 1.0 - r0}},
        RakingStep{Partition({Event({Interval{-1.0, 0.5}, Interval{9.0, 10.5}})}), {c0, 1.0 - c0}}};
    const RakingConvergence conv = rake_to_convergence(s, sched);
    const Eigen::Matrix2d q = oracle::kl_projection_2x2(p, {r0, 1.0 - r0}, {c0, 1.0 - c0});
    for (int k = 0; k < 4; ++k) ipf = std::max(ipf, std::abs(conv.sample.weights[static_cast<std::size_t>(k)] - q(k / 2, k % 2)));
  }
  report("3c", ipf <= kIpfTol, str("2x2 IPF limit vs KL projection: max error %.3g", ipf));
}

void criterion4() {
  const DiscreteDist d = reference_distribution();
  const CondMeanInfo info{Event::between(-0.5, 0.5), 0.0};
  const Partition cells({Event::at_most(0.0)});
  const double root_n = std::sqrt(static_cast<double>(kBigN));
  std::vector<double> theta;
  std::vector<Eigen::Vector2d> dev;
  const Eigen::Vector2d truth(0.5 / std::sqrt(3.0 / 8.0), 0.5 / std::sqrt(5.0 / 8.0));
  for (std::size_t r = 0; r < kThetaReps; ++r) {
    Rng rng = Rng(4).child(r);
    const std::vector<double> x = draw_sample(d, kBigN, rng);
    theta.push_back(root_n * theta_star_scalar(x, info).value);
    const ChiAuxEstimate e = theta_star_vector(x, info, cells, kCondSpec);
    dev.push_back(root_n * (e.p_hat - truth));
  }
  const double v = variance(theta);
  const double rel = std::abs(v / (11.0 / 48.0) - 1.0);
  report("4a", rel <= kThetaVarRel,
         str("Var(sqrt(n)(Theta* - E[X])) n=2000: %.6f (11/48 = %.6f, rel %.4f)", v, 11.0 / 48.0, rel));

  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& x : dev) mean += x;
  mean /= static_cast<double>(dev.size());
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& x : dev) cov += (x - mean) * (x - mean).transpose();
  cov /= static_cast<double>(dev.size() - 1);
  const Eigen::MatrixXd s1 = build_sigma0_sigma1(kCondP, kCondSpec).sigma1.matrix();
  const Eigen::MatrixXd half = 0.5 * s1;
  const double rel_half = oracle::max_abs(cov - half) / oracle::max_abs(half);
  const double rel_59 = oracle::max_abs(cov - (5.0 / 9.0) * s1) / oracle::max_abs((5.0 / 9.0) * s1);
  report("4b", rel_half <= kVectorCovRel,
         str("vector covariance vs Sigma_1/2: rel max-norm %.4f (vs exact limit 5/9 Sigma_1: %.4f)", rel_half,
             rel_59));
}

struct LevelRun {
  TestKind kind;
  StatisticDraws draws;
};

std::vector<LevelRun> level_runs;

void criterion5() {
  const double se = std::sqrt(0.05 * 0.95 / static_cast<double>(kLevelReps));
  for (TestKind k : {TestKind::kZAuxRaking, TestKind::kZAuxCondmean, TestKind::kChisqAuxRaking,
                     TestKind::kChisqAuxCondmean}) {
    BenchConfig c = preset(k, Hypothesis::kH0);
    c.reps = kLevelReps;
    c.seed = 5;
    c.n = {kBigN};
    const StatisticDraws d = simulate_statistics(c, kBigN);
    const double t = threshold(c, 0);
    auto rate = [&](const std::vector<double>& v) {
      double r = 0.0;
      for (double s : v) r += (is_chisq(k) ? s > t : std::abs(s) > t) ? 1.0 : 0.0;
      return r / static_cast<double>(v.size());
    };
    const double rc = rate(d.classic);
    const double ra = rate(d.aux);
    const bool ok_c = std::abs(rc - 0.05) <= kLevelSigmas * se;
    const bool ok_a = std::abs(ra - 0.05) <= kLevelSigmas * se;
    const std::string classic = is_chisq(k) ? "chisq" : "z";
    report("5", ok_c && ok_a,
           str("%s H0 n=2000: classic (%s) rejects %.4f, auxiliary rejects %.4f (0.05 +- %.4f)", to_string(k),
               classic.c_str(), rc, ra, kLevelSigmas * se));
    level_runs.push_back({k, d});
  }
}

struct PowerCase {
  TestKind kind;
  std::vector<double> t;
};

void criterion6() {
  const std::vector<PowerCase> cases{
      {TestKind::kZAuxRaking, {3.5069, 4.9595, 7.8415, 11.0897}},
      {TestKind::kZAuxCondmean, {0.309, 0.436992, 0.690945, 0.977144}},
      {TestKind::kChisqAuxRaking, {13.950225, 27.90045, 69.751125, 139.50225}},
      {TestKind::kChisqAuxCondmean, {7.4529, 14.9058, 37.2645, 74.529}},
  };
  for (const PowerCase& pc : cases) {
    BenchConfig c = preset(pc.kind);
    c.reps = kPowerReps;
    c.seed = 6;
    c.t = pc.t;
    const PowerReport rep = estimate_power(c);
    bool dominance = true;
    bool increasing = true;
    std::ostringstream detail;
    double prev = -INFINITY;
    std::vector<double> logs;
    for (const PowerRow& r : rep.rows) {
      const double margin = r.power_aux - r.power_classic;
      const double joint = std::hypot(r.stderr_classic, r.stderr_aux);
      dominance = dominance && margin > kDominanceSigmas * joint;
      const double lr = std::log(r.beta_ratio);
      increasing = increasing && lr > prev;
      prev = lr;
      logs.push_back(lr);
      detail << " n=" << r.n << ": " << fmt("%.4f", r.power_classic) << "/" << fmt("%.4f", r.power_aux)
             << " (3se " << fmt("%.4f", kDominanceSigmas * joint) << ", log ratio " << fmt("%.4f", lr) << ")";
    }
    report("6", dominance, std::string(to_string(pc.kind)) + " power classic/aux:" + detail.str());
    report("6", increasing, std::string(to_string(pc.kind)) + " log acceptance ratio increasing in n");
    const double growth = logs[3] / logs[2];
    report("6", growth >= kGrowthLo && growth <= kGrowthHi,
           str("%s log ratio growth n=500 -> 1000: %.4f (in [%.1f, %.1f])", to_string(pc.kind), growth, kGrowthLo,
               kGrowthHi));
  }

  BenchConfig c = preset(TestKind::kChisqAuxCondmean);
  c.reps = kRatioReps;
  c.seed = 66;
  c.n = {100};
  c.t = {3.84};
  const PowerRow r = estimate_power(c).rows.front();
  report("6", r.beta_ratio >= kMinRatio,
         str("chisq-aux-condmean n=100 t=3.84: acceptance %.4f / %.4f = %.4f (>= 2)", r.accept_classic,
             r.accept_aux, r.beta_ratio));
}

double ks_chi2(std::vector<double> v, int df) {
  std::sort(v.begin(), v.end());
  const ChiSquare law(df);
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = law.cdf(v[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

void criterion7() {
  for (const LevelRun& run : level_runs) {
    if (!is_chisq(run.kind)) continue;
    const double ks = ks_chi2(run.draws.aux, 1);
    report("7", ks < kKsMax,
           str("%s H0 n=2000 auxiliary statistic KS distance to chi2(1): %.4f", to_string(run.kind), ks));
  }

  double worst = 0.0;
  Rng rng(7);
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = 2 + trial % 4;
    const int rank = 1 + trial % (dim - 1);
    const GaussianSpec spec(SymMatrix(oracle::random_psd(dim, rank, gen)));
    const Eigen::MatrixXd q = spec.spectral().eigenvectors.leftCols(spec.rank());
    for (int k = 0; k < 20; ++k) {
      const Eigen::VectorXd x = mvn_sample(spec, rng);
      worst = std::max(worst, (x - q * (q.transpose() * x)).cwiseAbs().maxCoeff());
    }
  }
  const PartitionSpec p({0.2, 0.3, 0.5});
  const GaussianSpec s0(build_sigma0_sigma1(p.p0(), p).sigma0);
  for (int k = 0; k < 1000; ++k) worst = std::max(worst, std::abs(mvn_sample(s0, rng).dot(p.sqrt_p0())));
  report("7", worst <= kRangeTol, str("singular normal samples in range(Sigma): max residual %.3g", worst));
}

std::string power_csv(const BenchConfig& c) {
  std::ostringstream out;
  write_power_csv(estimate_power(c), out);
  write_gain_table_csv(estimate_power(c), out);
  return out.str();
}

void criterion8() {
  bool same = true;
  std::size_t bytes = 0;
  for (TestKind k : {TestKind::kZ, TestKind::kZAuxRaking, TestKind::kZAuxCondmean, TestKind::kChisq,
                     TestKind::kChisqAuxRaking, TestKind::kChisqAuxCondmean}) {
    for (AuxMode mode : {AuxMode::kPlugin, AuxMode::kOracle}) {
      BenchConfig c = preset(k);
      c.reps = 400;
      c.n = {100, 250};
      c.seed = 88;
      c.mode = mode;
      c.workers = 1;
      const std::string a = power_csv(c);
      const std::string b = power_csv(c);
      c.workers = 4;
      const std::string w = power_csv(c);
      same = same && a == b && a == w;
      bytes += a.size();

      std::ostringstream e1;
      std::ostringstream e4;
      c.workers = 1;
      write_ecdf_csv(simulate_statistics(c, 120).aux, e1);
      c.workers = 3;
      write_ecdf_csv(simulate_statistics(c, 120).aux, e4);
      same = same && e1.str() == e4.str();
    }
  }
  BenchConfig r = preset(TestKind::kZAuxRaking);
  r.reps = 300;
  r.n = {200};
  std::ostringstream r1;
  std::ostringstream r2;
  write_raking_csv(raking_variance_study(r), r1);
  r.workers = 4;
  write_raking_csv(raking_variance_study(r), r2);
  same = same && r1.str() == r2.str();
  report("8", same, str("reports byte-identical across runs and worker counts (%zu bytes compared)", bytes));
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d failing line(s), %.1f s\n", failures, secs);
  return failures == 0 ? 0 : 1;
}
