// auxpower: Monte-Carlo power of classic vs auxiliary-information tests.
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "auxtest/bench.hpp"
#include "auxtest/error.hpp"

namespace {

using namespace auxtest;

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitInvalid = 2;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::vector<std::size_t> n;
  std::optional<std::size_t> reps;
  std::optional<double> alpha;
  std::vector<double> t;
  std::string out;
  bool oracle = false;
  bool plugin = false;
  std::string aux;
  bool h0 = false;
  std::optional<unsigned> workers;
  std::optional<std::size_t> steps;
};

AuxSource parse_aux(const std::string& s) {
  if (s == "raking") return AuxSource::kRaking;
  if (s == "condmean") return AuxSource::kCondmean;
  if (s == "none") return AuxSource::kNone;
  throw Error(ErrorKind::kInput, "--aux must be raking, condmean or none");
}

// family: kZ, kChisq, or nullopt to keep the config's test
BenchConfig build_config(const Options& o, std::optional<TestKind> family) {
  const Hypothesis h = o.h0 ? Hypothesis::kH0 : Hypothesis::kH1;
  BenchConfig c;
  if (!o.config.empty()) {
    c = load_config(o.config);
    if (family && is_chisq(*family) != is_chisq(c.test)) c.test = with_aux(*family, aux_source(c.test));
    if (!o.aux.empty()) c.test = with_aux(c.test, parse_aux(o.aux));
  } else {
    TestKind kind = family.value_or(TestKind::kZ);
    kind = with_aux(kind, o.aux.empty() ? AuxSource::kRaking : parse_aux(o.aux));
    // the no-aux tests use the raking setups
    const TestKind setup = aux_source(kind) == AuxSource::kNone ? with_aux(kind, AuxSource::kRaking) : kind;
    c = preset(setup, h);
    c.test = kind;
  }
  if (o.seed) c.seed = *o.seed;
  if (!o.n.empty()) c.n = o.n;
  if (o.reps) c.reps = *o.reps;
  if (o.alpha) {
    c.alpha = *o.alpha;
    c.t.clear();
  }
  if (!o.t.empty()) c.t = o.t;
  if (o.oracle) c.mode = AuxMode::kOracle;
  if (o.plugin) c.mode = AuxMode::kPlugin;
  if (o.workers) c.workers = *o.workers;
  if (o.steps) c.steps = *o.steps;
  validate(c);
  return c;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw Error(ErrorKind::kIo, "cannot write to stdout");
    return;
  }
  std::ofstream f(o.out, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::kIo, "cannot open '" + o.out + "' for writing");
  f << text;
  f.flush();
  if (!f) throw Error(ErrorKind::kIo, "write to '" + o.out + "' failed");
}

std::string power_csv(const BenchConfig& c) {
  std::ostringstream s;
  write_power_csv(estimate_power(c), s);
  return s.str();
}

std::string gain_csv(const BenchConfig& c) {
  std::ostringstream s;
  write_gain_table_csv(estimate_power(c), s);
  return s.str();
}

std::string ecdf_csv(const BenchConfig& c) {
  std::ostringstream s;
  s << "test,n,statistic,value,ecdf\n";
  for (std::size_t n : c.n) {
    const StatisticDraws d = simulate_statistics(c, n);
    const bool chi = is_chisq(c.test);
    for (const auto& [name, values] : {std::pair{"classic", &d.classic}, std::pair{"aux", &d.aux}}) {
      std::vector<double> v = *values;
      if (!chi) {
        for (double& x : v) x = std::abs(x);
      }
      for (const auto& [x, f] : ecdf_rows(std::move(v))) {
        s << to_string(c.test) << ',' << n << ',' << name << ',' << format_double(x) << ','
          << format_double(f) << '\n';
      }
    }
  }
  return s.str();
}

std::string rake_csv(const BenchConfig& c) {
  std::ostringstream s;
  write_raking_csv(raking_variance_study(c), s);
  return s.str();
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "JSON experiment file");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--n", o.n, "sample sizes, e.g. 100,200,500")->delimiter(',');
  cmd->add_option("--reps", o.reps, "Monte-Carlo replications per n")->check(CLI::PositiveNumber);
  auto* alpha = cmd->add_option("--alpha", o.alpha, "level of the asymptotic test");
  auto* t = cmd->add_option("--t", o.t, "fixed threshold(s), one or one per n")->delimiter(',');
  alpha->excludes(t);
  auto* oracle = cmd->add_flag("--oracle", o.oracle, "exact Sigma/K quantities");
  auto* plugin = cmd->add_flag("--plugin", o.plugin, "empirical Sigma/K quantities (default)");
  oracle->excludes(plugin);
  cmd->add_option("--aux", o.aux, "auxiliary information: raking, condmean or none")
      ->check(CLI::IsMember({"raking", "condmean", "none"}));
  cmd->add_option("--out", o.out, "CSV output path (stdout when absent)");
  cmd->add_flag("--h0", o.h0, "simulate under the null hypothesis (presets only)");
  cmd->add_option("--workers", o.workers, "worker threads");
  cmd->add_option("--steps", o.steps, "raking steps N");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Power of auxiliary-information Z and chi-square tests"};
  app.require_subcommand(1);
  Options o;
  auto* ztest = app.add_subcommand("ztest", "power of the classic and auxiliary Z-test");
  auto* chisq = app.add_subcommand("chisq", "power of the classic and auxiliary chi-square test");
  auto* rake = app.add_subcommand("rake", "variance of the raked mean, predicted vs simulated");
  auto* power = app.add_subcommand("power", "power report for the configured test");
  auto* gain = app.add_subcommand("gain-table", "acceptance-probability ratios on an (n, t) grid");
  auto* ecdf = app.add_subcommand("ecdf", "empirical CDFs of both statistics");
  for (CLI::App* cmd : {ztest, chisq, rake, power, gain, ecdf}) add_common(cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    std::string text;
    if (ztest->parsed()) {
      text = power_csv(build_config(o, TestKind::kZ));
    } else if (chisq->parsed()) {
      text = power_csv(build_config(o, TestKind::kChisq));
    } else if (rake->parsed()) {
      text = rake_csv(build_config(o, TestKind::kZ));
    } else if (power->parsed()) {
      text = power_csv(build_config(o, std::nullopt));
    } else if (gain->parsed()) {
      text = gain_csv(build_config(o, std::nullopt));
    } else {
      text = ecdf_csv(build_config(o, std::nullopt));
    }
    emit(o, text);
  } catch (const Error& e) {
    std::cerr << "auxpower: " << to_string(e.kind()) << " error: " << e.what() << '\n';
    return e.kind() == ErrorKind::kIo ? kExitIo : kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "auxpower: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}
