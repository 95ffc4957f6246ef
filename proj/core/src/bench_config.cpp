#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <nlohmann/json.hpp>

#include "auxtest/bench.hpp"
#include "auxtest/error.hpp"

namespace auxtest {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& what) {
  throw Error(ErrorKind::kInput, "config: " + what);
}

double bound_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  }
  schema_error("interval ends must be numbers or \"-inf\"/\"inf\"");
}

json bound_to(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  return v;
}

Event event_from(const json& j) {
  if (!j.is_array() || j.empty()) schema_error("an event is a non-empty list of [lo, hi] pairs");
  std::vector<Interval> parts;
  for (const json& iv : j) {
    if (!iv.is_array() || iv.size() != 2) schema_error("an interval is a [lo, hi] pair");
    parts.push_back(Interval{bound_from(iv[0]), bound_from(iv[1])});
  }
  return Event(std::move(parts));
}

json event_to(const Event& e) {
  json out = json::array();
  for (const Interval& iv : e.parts()) out.push_back(json::array({bound_to(iv.lo), bound_to(iv.hi)}));
  return out;
}

Partition partition_from(const json& j) {
  if (!j.is_array() || j.empty()) schema_error("a partition is a non-empty list of events");
  std::vector<Event> events;
  for (const json& e : j) events.push_back(event_from(e));
  return Partition(std::move(events));
}

json partition_to(const Partition& p) {
  json out = json::array();
  for (const Event& e : p.events()) out.push_back(event_to(e));
  return out;
}

std::vector<double> cell_probs(const DiscreteDist& dist, const Partition& p) {
  std::vector<double> out(p.cells(), 0.0);
  for (std::size_t i = 0; i < dist.size(); ++i) out[p.cell_of(dist.atoms()[i])] += dist.probs()[i];
  return out;
}

// nlohmann converts -4 to a huge unsigned value; refuse that
bool unsigned_ok(const json& j) { return j.is_number_unsigned(); }

template <class T>
T get(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) schema_error(std::string("missing field '") + key + "'");
  const json& j = doc.at(key);
  if constexpr (std::is_unsigned_v<T>) {
    if (!unsigned_ok(j)) schema_error(std::string("field '") + key + "' must be a non-negative integer");
  } else if constexpr (std::is_same_v<T, std::vector<std::size_t>>) {
    if (!j.is_array()) schema_error(std::string("field '") + key + "' must be a list");
    for (const json& e : j) {
      if (!unsigned_ok(e)) schema_error(std::string("field '") + key + "' must hold non-negative integers");
    }
  }
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    schema_error(std::string("field '") + key + "' has the wrong type");
  }
}

const char* mode_name(AuxMode m) { return m == AuxMode::kOracle ? "oracle" : "plugin"; }

}  // namespace

BenchConfig config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    schema_error(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) schema_error("top level must be an object");

  static const char* const kKnown[] = {"test", "hypothesis", "distribution", "n", "reps", "alpha", "t",
                                       "seed", "workers", "mode", "mu", "cells", "p0", "schedule",
                                       "steps", "condition"};
  for (const auto& item : doc.items()) {
    bool ok = false;
    for (const char* k : kKnown) ok = ok || item.key() == k;
    if (!ok) schema_error("unknown field '" + item.key() + "'");
  }

  const TestKind kind = doc.contains("test") ? parse_test_kind(get<std::string>(doc, "test"))
                                             : TestKind::kZAuxRaking;
  Hypothesis h = Hypothesis::kH1;
  if (doc.contains("hypothesis")) {
    const std::string s = get<std::string>(doc, "hypothesis");
    if (s == "h0") {
      h = Hypothesis::kH0;
    } else if (s != "h1") {
      schema_error("hypothesis must be \"h0\" or \"h1\"");
    }
  }
  BenchConfig c = preset(kind, h);

  if (doc.contains("distribution")) {
    const json& d = doc.at("distribution");
    if (!d.is_object()) schema_error("distribution must be an object with atoms and probs");
    c.distribution = DiscreteDist(get<std::vector<double>>(d, "atoms"), get<std::vector<double>>(d, "probs"));
    for (RakingStep& step : c.schedule) step.targets = cell_probs(c.distribution, step.partition);
    if (h == Hypothesis::kH0) c.mu = c.distribution.mean();
  }
  if (doc.contains("n")) c.n = get<std::vector<std::size_t>>(doc, "n");
  if (doc.contains("reps")) c.reps = get<std::size_t>(doc, "reps");
  if (doc.contains("alpha")) c.alpha = get<double>(doc, "alpha");
  if (doc.contains("t")) {
    c.t = doc.at("t").is_array() ? get<std::vector<double>>(doc, "t")
                                 : std::vector<double>{get<double>(doc, "t")};
  }
  if (doc.contains("seed")) c.seed = get<std::uint64_t>(doc, "seed");
  if (doc.contains("workers")) c.workers = get<unsigned>(doc, "workers");
  if (doc.contains("mode")) {
    const std::string m = get<std::string>(doc, "mode");
    if (m == "oracle") {
      c.mode = AuxMode::kOracle;
    } else if (m == "plugin") {
      c.mode = AuxMode::kPlugin;
    } else {
      schema_error("mode must be \"plugin\" or \"oracle\"");
    }
  }
  if (doc.contains("mu")) c.mu = get<double>(doc, "mu");
  if (doc.contains("cells")) c.cells = partition_from(doc.at("cells"));
  if (doc.contains("p0")) {
    c.p0 = get<std::vector<double>>(doc, "p0");
  } else if (h == Hypothesis::kH0 || doc.contains("cells")) {
    if (h == Hypothesis::kH0) {
      c.p0 = cell_probs(c.distribution, c.cells);
    } else if (c.p0.size() != c.cells.cells()) {
      schema_error("cells given without a matching p0");
    }
  }
  if (doc.contains("schedule")) {
    const json& s = doc.at("schedule");
    if (!s.is_array()) schema_error("schedule must be a list of steps");
    c.schedule.clear();
    for (const json& step : s) {
      if (!step.is_object() || !step.contains("events")) schema_error("a schedule step needs 'events'");
      Partition p = partition_from(step.at("events"));
      std::vector<double> targets = step.contains("targets") ? get<std::vector<double>>(step, "targets")
                                                             : cell_probs(c.distribution, p);
      c.schedule.push_back(RakingStep{std::move(p), std::move(targets)});
    }
    if (!doc.contains("steps")) c.steps = c.schedule.size();
  }
  if (doc.contains("steps")) c.steps = get<std::size_t>(doc, "steps");
  if (doc.contains("condition")) {
    const json& cond = doc.at("condition");
    if (!cond.is_object() || !cond.contains("event")) schema_error("condition needs 'event' and 'value'");
    c.condition.c = event_from(cond.at("event"));
    c.condition.value = cond.contains("value") ? get<double>(cond, "value") : 0.0;
  }
  validate(c);
  return c;
}

BenchConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::kIo, "error while reading '" + path + "'");
  return config_from_json(buf.str());
}

std::string config_to_json(const BenchConfig& c) {
  json doc;
  doc["test"] = to_string(c.test);
  doc["distribution"] = {{"atoms", c.distribution.atoms()}, {"probs", c.distribution.probs()}};
  doc["n"] = c.n;
  doc["reps"] = c.reps;
  doc["alpha"] = c.alpha;
  if (!c.t.empty()) doc["t"] = c.t;
  doc["seed"] = c.seed;
  doc["workers"] = c.workers;
  doc["mode"] = mode_name(c.mode);
  doc["mu"] = c.mu;
  doc["cells"] = partition_to(c.cells);
  doc["p0"] = c.p0;
  json sched = json::array();
  for (const RakingStep& s : c.schedule) {
    sched.push_back({{"events", partition_to(s.partition)}, {"targets", s.targets}});
  }
  doc["schedule"] = sched;
  doc["steps"] = c.steps;
  doc["condition"] = {{"event", event_to(c.condition.c)}, {"value", c.condition.value}};
  return doc.dump(2) + "\n";
}

}  // namespace auxtest
