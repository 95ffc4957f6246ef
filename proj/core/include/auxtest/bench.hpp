#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "auxtest/dist.hpp"
#include "auxtest/event.hpp"
#include "auxtest/raking.hpp"

namespace auxtest {

enum class TestKind { kZ, kZAuxRaking, kZAuxCondmean, kChisq, kChisqAuxRaking, kChisqAuxCondmean };
enum class AuxSource { kNone, kRaking, kCondmean };
enum class AuxMode { kPlugin, kOracle };
enum class Hypothesis { kH0, kH1 };

const char* to_string(TestKind kind) noexcept;
/// Throws Error(kInput) on an unknown name.
TestKind parse_test_kind(const std::string& name);
AuxSource aux_source(TestKind kind) noexcept;
bool is_chisq(TestKind kind) noexcept;
/// Same family (z or chisq) with another auxiliary source.
TestKind with_aux(TestKind kind, AuxSource aux) noexcept;

struct BenchConfig {
  TestKind test = TestKind::kZAuxRaking;
  DiscreteDist distribution = reference_distribution();
  std::vector<std::size_t> n = {100, 200, 500, 1000};
  std::size_t reps = 10000;
  /// Level of the asymptotic test; ignored when t is non-empty.
  double alpha = 0.05;
  /// Fixed thresholds, one for every n or a single shared value. For the Z
  /// tests the rule is |Z| > t, for chi-square stat > t.
  std::vector<double> t;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  AuxMode mode = AuxMode::kPlugin;

  double mu = 0.05;  ///< null mean (z tests)
  Partition cells{{Event::at_most(0.5)}};
  std::vector<double> p0 = {5.0 / 8.0, 3.0 / 8.0};

  /// Raking schedule; the first `steps` entries are used.
  RakingSchedule schedule;
  std::size_t steps = 2;

  CondMeanInfo condition{Event::between(-0.5, 0.5), 0.0};
};

/// The reference experiments on the reference law:
///   z-aux-raking       mu = 0.05, raking on {[-0.5,0] u [0.5,1]} then {X <= 0}
///   z-aux-condmean     mu = 0.05, C = [-0.5, 0.5], P(X|C) = 0
///   chisq-aux-raking   cells {X <= 0.5}, P0 = (5/8, 3/8), same raking
///   chisq-aux-condmean cells {X <= 0}, P0 = (3/8, 5/8), same C
/// z and chisq use the raking setups. Under H0, mu = E[X] and P0 equals the
/// true cell probabilities.
BenchConfig preset(TestKind kind, Hypothesis h = Hypothesis::kH1);

/// Throws Error(kInput) on an inconsistent configuration.
void validate(const BenchConfig& config);

/// Classic and auxiliary statistics of every replication, in replication
/// order. Z statistics are signed.
struct StatisticDraws {
  std::size_t n = 0;
  std::vector<double> classic;
  std::vector<double> aux;
};

/// Replication r draws its sample from Rng(seed).child(r). Results do not
/// depend on the worker count. An auxiliary validation failure aborts the run
/// with Error(kPrecondition) naming the first failing replication.
StatisticDraws simulate_statistics(const BenchConfig& config, std::size_t n);

struct PowerRow {
  std::size_t n = 0;
  double t = 0.0;
  double power_classic = 0.0;
  double power_aux = 0.0;
  double stderr_classic = 0.0;
  double stderr_aux = 0.0;
  double accept_classic = 0.0;
  double accept_aux = 0.0;
  /// (1 - power_classic) / (1 - power_aux); NaN when the denominator is 0.
  double beta_ratio = 0.0;
  /// n times the asymptotic rate; NaN when the rate is undefined.
  double predicted_xn = 0.0;
};

struct PowerReport {
  TestKind test = TestKind::kZ;
  std::vector<PowerRow> rows;
};

/// Threshold used at the i-th n of the grid.
double threshold(const BenchConfig& config, std::size_t index);
/// Rate c with x_n ~ c n for the configured alternative, from exact
/// quantities; 0 without auxiliary information.
double predicted_rate(const BenchConfig& config);

PowerReport estimate_power(const BenchConfig& config);

/// Acceptance-probability view of a report.
void write_gain_table_csv(const PowerReport& report, std::ostream& out);
void write_power_csv(const PowerReport& report, std::ostream& out);

/// Sorted (value, rank / size) pairs.
std::vector<std::pair<double, double>> ecdf_rows(std::vector<double> values);
void write_ecdf_csv(const std::vector<double>& values, std::ostream& out);
/// Throws Error(kIo) when the file cannot be written.
void ecdf_export(const std::vector<double>& values, const std::string& path);

struct RakingVarianceRow {
  std::size_t n = 0;
  std::size_t steps = 0;
  double predicted = 0.0;  ///< sigma^(N)^2 from the exact design
  double empirical = 0.0;  ///< Var(sqrt(n) (raked mean - E[X])) over replications
};

/// Monte-Carlo check of the raked-mean variance for 0..config.steps steps.
std::vector<RakingVarianceRow> raking_variance_study(const BenchConfig& config);
void write_raking_csv(const std::vector<RakingVarianceRow>& rows, std::ostream& out);

/// 17 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

/// JSON config mirroring BenchConfig. Fields missing from the document keep
/// the preset of the named test. Throws Error(kInput) on schema errors.
BenchConfig config_from_json(const std::string& text);
/// Throws Error(kIo) when the file cannot be read.
BenchConfig load_config(const std::string& path);
std::string config_to_json(const BenchConfig& config);

}  // namespace auxtest
