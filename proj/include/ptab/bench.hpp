#pragma once

// Benchmark harness: serial vs. parallel evaluation on generated inputs, and
// link vs. copy merging in isolation. Reports are JSON (schema in
// docs/bench.schema.json) with an optional CSV rendering of the rows.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "ptab/engine.hpp"
#include "ptab/generators.hpp"

namespace ptab::bench {

struct Options {
  std::string suite = "tc";  // tc | pointsto | merge
  std::vector<std::size_t> sizes;  // empty: suite default
  std::vector<std::size_t> workers{1, 2};
  std::vector<MergeStrategy> merges{MergeStrategy::Link};
  std::size_t trials = 5;
  std::uint64_t seed = 42;
  // Include solve_serial rows. Unset: on for pointsto, off for tc.
  std::optional<bool> serial;
  std::string machine_note;
};

struct Row {
  std::string input;
  std::string mode;
  std::size_t workers = 0;
  std::string merge;
  std::size_t trial = 0;
  std::size_t answer_count = 0;
  double plan_ms = 0;
  std::vector<double> worker_ms;
  double merge_ms = 0;
  double total_ms = 0;
};

struct Aggregate {
  std::string input;
  std::string mode;
  std::size_t workers = 0;
  std::string merge;
  std::size_t trials = 0;
  std::size_t answer_count = 0;
  double median_total_ms = 0;
  double mean_total_ms = 0;
  double median_merge_ms = 0;
  double mean_merge_ms = 0;
  double median_plan_ms = 0;
};

struct Improvement {
  std::string input;
  std::size_t workers = 0;
  std::string merge;
  std::string baseline;  // "serial" or "1-worker"
  double baseline_median_ms = 0;
  double median_ms = 0;
  double improvement_pct = 0;       // from medians
  double improvement_pct_mean = 0;  // from means
};

struct Report {
  std::string machine;
  nlohmann::json config;
  std::vector<Row> rows;
  std::vector<Aggregate> aggregates;
  std::vector<Improvement> improvements;

  const Aggregate* find(const std::string& input, const std::string& mode, std::size_t workers,
                        const std::string& merge) const {
    for (const auto& a : aggregates)
      if (a.input == input && a.mode == mode && a.workers == workers && a.merge == merge) return &a;
    return nullptr;
  }

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

inline double median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

inline double mean(const std::vector<double>& v) {
  return v.empty() ? 0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double improvement(double baseline, double value) {
  return baseline > 0 ? 100.0 * (baseline - value) / baseline : 0.0;
}

/// Physical core count from /proc/cpuinfo; falls back to the logical count.
inline unsigned physical_cores() {
  std::ifstream in("/proc/cpuinfo");
  std::set<std::pair<std::string, std::string>> cores;
  std::string line, physical = "0";
  while (std::getline(in, line)) {
    auto value = [&] { return line.substr(line.find(':') + 1); };
    if (line.rfind("physical id", 0) == 0) physical = value();
    if (line.rfind("core id", 0) == 0) cores.emplace(physical, value());
  }
  if (!cores.empty()) return static_cast<unsigned>(cores.size());
  return std::max(1u, std::thread::hardware_concurrency());
}

inline std::string machine_description(const std::string& note) {
  std::string s = std::to_string(physical_cores()) + " physical cores, " +
                  std::to_string(std::thread::hardware_concurrency()) + " hardware threads";
  return note.empty() ? s : s + "; " + note;
}

/// Writes a buffer larger than the last-level cache so every timed merge
/// starts cold, whatever the size of the tables built before it.
inline void evict_caches() {
  static std::vector<unsigned char> buffer(64u << 20);
  static unsigned char round = 0;
  ++round;
  for (std::size_t i = 0; i < buffer.size(); i += 64) buffer[i] = round;
  std::atomic_signal_fence(std::memory_order_seq_cst);
}

/// Times one merge of a `child_size`-tuple child into a 100-tuple parent,
/// `reps` times, each on fresh tables with cold caches. Returns nanoseconds
/// per merge.
inline std::vector<double> time_merges(MergeStrategy strategy, std::size_t child_size, std::size_t reps) {
  constexpr std::size_t kParentSize = 100;
  std::vector<double> out;
  for (std::size_t r = 0; r < reps; ++r) {
    AnswerTable parent(2), child(2);
    for (std::uint32_t i = 0; i < kParentSize; ++i) parent.insert({ConstId{0}, ConstId{i + 1}});
    child.reserve(child_size);
    for (std::size_t i = 0; i < child_size; ++i)
      child.insert({ConstId{0}, ConstId{static_cast<std::uint32_t>(kParentSize + 1 + i)}});
    child.seal();
    evict_caches();
    const auto t0 = std::chrono::steady_clock::now();
    merge(parent, child, strategy);
    const auto t1 = std::chrono::steady_clock::now();
    out.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count());
    if (parent.size() != kParentSize + child_size) throw Error("merge lost tuples");
  }
  return out;
}

namespace detail {

struct Config {
  EvalMode mode;
  std::size_t workers;
  MergeStrategy merge;

  std::string merge_name() const { return mode == EvalMode::Serial ? "none" : to_string(merge); }
};

inline void aggregate(Report& report) {
  std::map<std::tuple<std::string, std::string, std::size_t, std::string>, std::vector<const Row*>> groups;
  std::vector<std::tuple<std::string, std::string, std::size_t, std::string>> order;
  for (const auto& r : report.rows) {
    auto key = std::make_tuple(r.input, r.mode, r.workers, r.merge);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  for (const auto& key : order) {
    const auto& rows = groups[key];
    Aggregate a;
    std::tie(a.input, a.mode, a.workers, a.merge) = key;
    a.trials = rows.size();
    a.answer_count = rows.front()->answer_count;
    std::vector<double> total, merge, plan;
    for (const auto* r : rows) {
      total.push_back(r->total_ms);
      merge.push_back(r->merge_ms);
      plan.push_back(r->plan_ms);
    }
    a.median_total_ms = median(total);
    a.mean_total_ms = mean(total);
    a.median_merge_ms = median(merge);
    a.mean_merge_ms = mean(merge);
    a.median_plan_ms = median(plan);
    report.aggregates.push_back(a);
  }
  for (const auto& a : report.aggregates) {
    if (a.mode != "parallel" || a.workers < 2) continue;
    auto add = [&](const Aggregate* base, const char* name) {
      if (!base) return;
      Improvement imp;
      imp.input = a.input;
      imp.workers = a.workers;
      imp.merge = a.merge;
      imp.baseline = name;
      imp.baseline_median_ms = base->median_total_ms;
      imp.median_ms = a.median_total_ms;
      imp.improvement_pct = improvement(base->median_total_ms, a.median_total_ms);
      imp.improvement_pct_mean = improvement(base->mean_total_ms, a.mean_total_ms);
      report.improvements.push_back(imp);
    };
    add(report.find(a.input, "parallel", 1, "link"), "1-worker");
    add(report.find(a.input, "serial", 1, "none"), "serial");
  }
}

inline void run_queries(Report& report, const Options& opt, const std::string& input, const Program& prog,
                        const Query& query, bool serial) {
  std::vector<Config> configs;
  if (serial) configs.push_back({EvalMode::Serial, 1, MergeStrategy::Link});
  for (auto w : opt.workers) {
    if (w == 1) {
      configs.push_back({EvalMode::Parallel, 1, MergeStrategy::Link});
      continue;
    }
    for (auto m : opt.merges) configs.push_back({EvalMode::Parallel, w, m});
  }
  std::optional<std::set<Tuple>> reference;
  std::string reference_config;
  for (std::size_t t = 0; t < opt.trials; ++t) {
    for (const auto& c : configs) {
      EvalConfig cfg;
      cfg.mode = c.mode;
      cfg.workers = c.workers;
      cfg.merge = c.merge;
      auto result = solve(prog, query, cfg);
      auto answers = result.answer_set();
      const std::string name = std::string(to_string(c.mode)) + "/" + std::to_string(c.workers) + "/" + c.merge_name();
      if (!reference) {
        reference = std::move(answers);
        reference_config = name;
      } else if (answers != *reference) {
        throw Error("answer sets disagree on " + input + ": " + name + " has " + std::to_string(answers.size()) +
                    " answers, " + reference_config + " has " + std::to_string(reference->size()));
      }
      Row row;
      row.input = input;
      row.mode = to_string(c.mode);
      row.workers = c.workers;
      row.merge = c.merge_name();
      row.trial = t;
      row.answer_count = result.stats.answer_count;
      row.plan_ms = result.stats.plan_ms;
      row.worker_ms = result.stats.worker_ms;
      row.merge_ms = result.stats.merge_ms;
      row.total_ms = result.stats.total_ms;
      report.rows.push_back(std::move(row));
    }
  }
}

inline std::vector<std::string> merge_names(const std::vector<MergeStrategy>& merges) {
  std::vector<std::string> out;
  for (auto m : merges) out.push_back(to_string(m));
  return out;
}

}  // namespace detail

inline Report run(Options opt) {
  if (opt.trials == 0) throw std::invalid_argument("trials must be >= 1");
  if (opt.suite != "tc" && opt.suite != "pointsto" && opt.suite != "merge")
    throw std::invalid_argument("unknown suite: " + opt.suite);
  if (opt.sizes.empty()) {
    if (opt.suite == "tc") opt.sizes = {100};
    if (opt.suite == "pointsto") opt.sizes = {10000};
    if (opt.suite == "merge") opt.sizes = {100, 10000, 1000000};
  }
  for (auto w : opt.workers)
    if (w == 0) throw std::invalid_argument("worker counts must be >= 1");
  const bool serial = opt.serial.value_or(opt.suite == "pointsto");

  Report report;
  report.machine = machine_description(opt.machine_note);
  report.config = {{"suite", opt.suite},
                   {"sizes", opt.sizes},
                   {"workers", opt.workers},
                   {"merge", detail::merge_names(opt.merges)},
                   {"trials", opt.trials},
                   {"seed", opt.seed},
                   {"serial", serial}};

  for (auto n : opt.sizes) {
    if (opt.suite == "merge") {
      const std::string input = "merge(" + std::to_string(n) + ")";
      for (auto m : opt.merges) {
        const auto times = time_merges(m, n, opt.trials);
        for (std::size_t t = 0; t < times.size(); ++t) {
          Row row;
          row.input = input;
          row.mode = "merge";
          row.workers = 0;
          row.merge = to_string(m);
          row.trial = t;
          row.answer_count = 100 + n;
          row.merge_ms = times[t] / 1e6;
          row.total_ms = row.merge_ms;
          report.rows.push_back(std::move(row));
        }
      }
    } else if (opt.suite == "tc") {
      const Program prog = gen::tc_program(true, [&](auto&& sink) { gen::complete_graph(n, sink); });
      const Query q = parse_query(prog, "reachr(n1,Y)");
      detail::run_queries(report, opt, "complete(" + std::to_string(n) + ")", prog, q, serial);
    } else {
      PointsToFacts facts;
      gen::pointsto(n, opt.seed, gen::PointsToSink{facts});
      const Program prog = pointsto_program(facts);
      const Query q = parse_query(prog, "pt(v1,H)");
      detail::run_queries(report, opt, "pointsto(" + std::to_string(n) + "," + std::to_string(opt.seed) + ")", prog,
                          q, serial);
    }
  }
  detail::aggregate(report);
  return report;
}

inline nlohmann::json Report::to_json() const {
  nlohmann::json j;
  j["machine"] = machine;
  j["config"] = config;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows)
    j["rows"].push_back({{"input", r.input},
                         {"mode", r.mode},
                         {"workers", r.workers},
                         {"merge_strategy", r.merge},
                         {"trial", r.trial},
                         {"answer_count", r.answer_count},
                         {"plan_ms", r.plan_ms},
                         {"worker_ms", r.worker_ms},
                         {"merge_ms", r.merge_ms},
                         {"total_ms", r.total_ms}});
  j["aggregates"] = nlohmann::json::array();
  for (const auto& a : aggregates)
    j["aggregates"].push_back({{"input", a.input},
                               {"mode", a.mode},
                               {"workers", a.workers},
                               {"merge_strategy", a.merge},
                               {"trials", a.trials},
                               {"answer_count", a.answer_count},
                               {"median_total_ms", a.median_total_ms},
                               {"mean_total_ms", a.mean_total_ms},
                               {"median_merge_ms", a.median_merge_ms},
                               {"mean_merge_ms", a.mean_merge_ms},
                               {"median_plan_ms", a.median_plan_ms}});
  j["improvements"] = nlohmann::json::array();
  for (const auto& i : improvements)
    j["improvements"].push_back({{"input", i.input},
                                 {"workers", i.workers},
                                 {"merge_strategy", i.merge},
                                 {"baseline", i.baseline},
                                 {"baseline_median_ms", i.baseline_median_ms},
                                 {"median_ms", i.median_ms},
                                 {"improvement_pct", i.improvement_pct},
                                 {"improvement_pct_mean", i.improvement_pct_mean}});
  return j;
}

inline std::string Report::to_csv() const {
  std::ostringstream out;
  out << "input,mode,workers,merge_strategy,trial,answer_count,plan_ms,merge_ms,total_ms,worker_ms\n";
  for (const auto& r : rows) {
    out << '"' << r.input << "\"," << r.mode << ',' << r.workers << ',' << r.merge << ',' << r.trial << ','
        << r.answer_count << ',' << r.plan_ms << ',' << r.merge_ms << ',' << r.total_ms << ',';
    for (std::size_t i = 0; i < r.worker_ms.size(); ++i) out << (i ? ";" : "") << r.worker_ms[i];
    out << '\n';
  }
  return out.str();
}

}  // namespace ptab::bench
