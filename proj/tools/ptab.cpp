// ptab: command-line front end.
//
//   ptab run FILE --query 'reachr(a,Y)' [--mode serial|parallel|oracle] ...
//   ptab gen complete|chain|random|pointsto --n N [--p P] [--seed S]
//   ptab bench tc|pointsto|merge [--sizes ...] [--workers ...] ...
//   ptab explain-plan FILE --query 'reachr(a,Y)' [--threads K]
//
// Exit status: 0 on success, 1 on invalid input (parse, validation, missing
// file, bad parameters, answer mismatch in bench), 2 when a resource bound
// is exceeded.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ptab/ptab.hpp"

namespace {

using json = nlohmann::ordered_json;

const std::map<std::string, ptab::EvalMode> kModes{
    {"serial", ptab::EvalMode::Serial}, {"parallel", ptab::EvalMode::Parallel}, {"oracle", ptab::EvalMode::Oracle}};
const std::map<std::string, ptab::MergeStrategy> kMerges{{"link", ptab::MergeStrategy::Link},
                                                         {"copy", ptab::MergeStrategy::Copy}};

json plan_json(const ptab::Program& prog, const ptab::Query& q, const std::string& query_text, std::size_t workers) {
  using namespace ptab;
  const auto& syms = prog.symbols();
  const auto shape = classify_shape(prog, q);
  json j{{"query", query_text}, {"shape", to_string(shape.kind)}, {"workers", workers}};
  if (!shape.is_reachability()) {
    j["split"] = false;
    j["reason"] = "query is not in the reachability class; evaluated serially";
    return j;
  }
  j["recursive"] = prog.display(shape.recursive);
  j["step"] = prog.display(shape.step);
  j["base"] = prog.display(shape.base);
  if (workers < 2) {
    j["split"] = false;
    j["reason"] = "one worker: no split";
    return j;
  }
  const auto plan = plan_split(prog, q, shape, workers);
  if (!plan) {
    j["split"] = false;
    j["reason"] = "reachable set exhausted before a fan-out of 2; evaluated serially";
    return j;
  }
  auto names = [&](const std::vector<ConstId>& ids) {
    json a = json::array();
    for (auto c : ids) a.push_back(syms.text(c));
    return a;
  };
  j["split"] = true;
  j["start"] = syms.text(plan->start);
  j["branches"] = json::array();
  for (const auto& b : plan->branches) j["branches"].push_back(names(b));
  j["pre_claimed"] = names(plan->pre_claimed);
  j["pre_answers"] = json::array();
  for (const auto& t : plan->pre_answers) j["pre_answers"].push_back(names(t));
  return j;
}

std::vector<std::vector<std::string>> sorted_answers(const ptab::Program& prog, const ptab::QueryResult& r) {
  std::vector<std::vector<std::string>> rows;
  r.answers.for_each(
      [&](std::span<const ptab::ConstId> row) {
        std::vector<std::string> t;
        for (auto c : row) t.push_back(prog.symbols().text(c));
        rows.push_back(std::move(t));
      },
      r.dedup);
  std::sort(rows.begin(), rows.end());
  return rows;
}

void print_stats(std::ostream& out, const ptab::QueryResult& r) {
  const auto& s = r.stats;
  out << "% mode " << to_string(r.mode) << (s.fallback ? " (fell back to serial: " + s.fallback_reason + ")" : "")
      << "\n% answers " << s.answer_count << "\n% total_ms " << s.total_ms << "\n";
  if (r.mode == ptab::EvalMode::Parallel && !s.fallback) {
    out << "% plan_ms " << s.plan_ms << "\n% worker_ms";
    for (auto w : s.worker_ms) out << ' ' << w;
    out << "\n% merge_ms " << s.merge_ms << "\n% claims " << s.claims << " (parent " << s.parent_claims << ", workers";
    for (auto c : s.worker_claims) out << ' ' << c;
    out << ")\n% child_sizes";
    for (auto c : s.child_sizes) out << ' ' << c;
    out << "\n% pre_answers " << s.pre_answers << "\n";
  }
  if (r.mode == ptab::EvalMode::Serial || s.fallback)
    out << "% subgoals " << s.subgoals << "\n% rule_runs " << s.rule_runs << " (min " << s.min_rule_runs << ", max "
        << s.max_rule_runs << ")\n% resumptions " << s.resumptions << "\n";
}

template <class T>
std::vector<T> parse_list(const std::string& text, const std::string& what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const auto v = std::stoull(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(static_cast<T>(v));
    } catch (const std::exception&) {
      throw CLI::ValidationError(what, "not a number: " + item);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tabled Datalog engine with parallel reachability evaluation"};
  app.require_subcommand(1);

  // run
  std::string file, query, mode = "serial", merge = "link";
  std::size_t threads = 2, max_answers = 50'000'000;
  bool count = false, stats = false, dedup = false, debug_disjoint = false, explain = false;
  auto* run = app.add_subcommand("run", "Evaluate a query against a program file");
  run->add_option("file", file, "Program file")->required();
  run->add_option("--query,-q", query, "Query atom, e.g. 'reachr(a,Y)'")->required();
  run->add_option("--mode", mode, "Evaluation mode")->check(CLI::IsMember({"serial", "parallel", "oracle"}));
  run->add_option("--threads,-t", threads, "Workers in parallel mode")->check(CLI::PositiveNumber);
  run->add_option("--merge", merge, "Merge strategy in parallel mode")->check(CLI::IsMember({"link", "copy"}));
  run->add_flag("--count", count, "Print only the number of answers");
  run->add_flag("--stats", stats, "Print phase times and counters as % comments");
  run->add_flag("--dedup", dedup, "Deduplicate across table segments when iterating");
  run->add_flag("--debug-disjoint", debug_disjoint, "Fail if worker answer tables overlap");
  run->add_flag("--explain-plan", explain, "Print the parallel plan as JSON on standard error");
  run->add_option("--max-answers", max_answers, "Bound on derived answers");

  // gen
  std::string kind;
  std::size_t n = 0;
  double p = 0.05;
  std::uint64_t seed = 42;
  auto* gen = app.add_subcommand("gen", "Generate benchmark facts on standard output");
  gen->add_option("kind", kind, "Input kind")->required()->check(CLI::IsMember({"complete", "chain", "random", "pointsto"}));
  gen->add_option("--n,-n", n, "Number of vertices or variables")->required();
  gen->add_option("--p", p, "Edge probability (random)");
  gen->add_option("--seed", seed, "Random seed");
  bool with_rules = false;
  gen->add_flag("--rules", with_rules, "Prepend the matching program rules");

  // bench
  std::string suite, sizes, workers = "1,2", merges = "link", format = "json", note, output, serial = "auto";
  std::size_t trials = 5;
  auto* bench = app.add_subcommand("bench", "Benchmark serial vs parallel evaluation or merge strategies");
  bench->add_option("suite", suite, "Suite")->required()->check(CLI::IsMember({"tc", "pointsto", "merge"}));
  bench->add_option("--sizes", sizes, "Comma-separated input sizes");
  bench->add_option("--workers", workers, "Comma-separated worker counts");
  bench->add_option("--merge", merges, "Comma-separated merge strategies (link,copy)");
  bench->add_option("--trials", trials, "Trials per configuration")->check(CLI::PositiveNumber);
  bench->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  bench->add_option("--seed", seed, "Generator seed (pointsto)");
  bench->add_option("--serial", serial, "Include serial rows")->check(CLI::IsMember({"auto", "on", "off"}));
  bench->add_option("--note", note, "Free-text machine note recorded in the report");
  bench->add_option("--output,-o", output, "Write the report to a file instead of standard output");

  // explain-plan
  std::string plan_file, plan_query;
  std::size_t plan_threads = 2;
  auto* explain_cmd = app.add_subcommand("explain-plan", "Print the frontier split for a query as JSON");
  explain_cmd->add_option("file", plan_file, "Program file")->required();
  explain_cmd->add_option("--query,-q", plan_query, "Query atom")->required();
  explain_cmd->add_option("--threads,-t", plan_threads, "Workers")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*run) {
      const auto prog = ptab::load_program(file);
      const auto q = ptab::parse_query(prog, query);
      ptab::EvalConfig cfg;
      cfg.mode = kModes.at(mode);
      cfg.workers = threads;
      cfg.merge = kMerges.at(merge);
      if (dedup) cfg.dedup = true;
      cfg.debug_disjoint = debug_disjoint;
      cfg.max_answers = max_answers;
      if (explain) std::cerr << plan_json(prog, q, query, cfg.mode == ptab::EvalMode::Parallel ? threads : 1).dump(2) << "\n";
      const auto result = ptab::solve(prog, q, cfg);
      const std::string name = prog.predicate(q.atom.pred).name;
      if (count) {
        std::cout << result.stats.answer_count << "\n";
      } else {
        for (const auto& row : sorted_answers(prog, result)) {
          std::cout << name << '(';
          for (std::size_t i = 0; i < row.size(); ++i) std::cout << (i ? "," : "") << row[i];
          std::cout << ")\n";
        }
      }
      if (stats) print_stats(std::cout, result);
    } else if (*gen) {
      std::string out;
      ptab::gen::TextSink sink{out};
      if (kind == "complete") {
        if (with_rules) out += ptab::gen::kRightTcRules;
        ptab::gen::complete_graph(n, sink);
      } else if (kind == "chain") {
        if (with_rules) out += ptab::gen::kRightTcRules;
        ptab::gen::chain_graph(n, sink);
      } else if (kind == "random") {
        if (with_rules) out += ptab::gen::kRightTcRules;
        ptab::gen::random_graph(n, p, seed, sink);
      } else {
        if (with_rules) out += ptab::kPointsToProgram;
        ptab::gen::pointsto(n, seed, sink);
      }
      std::fwrite(out.data(), 1, out.size(), stdout);
    } else if (*bench) {
      ptab::bench::Options opt;
      opt.suite = suite;
      opt.sizes = parse_list<std::size_t>(sizes, "--sizes");
      opt.workers = parse_list<std::size_t>(workers, "--workers");
      opt.merges.clear();
      std::stringstream ss(merges);
      for (std::string m; std::getline(ss, m, ',');) {
        if (!kMerges.count(m)) throw CLI::ValidationError("--merge", "unknown strategy: " + m);
        opt.merges.push_back(kMerges.at(m));
      }
      if (opt.merges.empty()) throw CLI::ValidationError("--merge", "no strategy given");
      opt.trials = trials;
      opt.seed = seed;
      if (serial != "auto") opt.serial = serial == "on";
      opt.machine_note = note;
      const auto report = ptab::bench::run(opt);
      const std::string text = format == "json" ? report.to_json().dump(2) + "\n" : report.to_csv();
      if (output.empty()) {
        std::cout << text;
      } else {
        std::ofstream f(output);
        if (!f) throw ptab::Error("cannot write " + output);
        f << text;
      }
    } else if (*explain_cmd) {
      const auto prog = ptab::load_program(plan_file);
      const auto q = ptab::parse_query(prog, plan_query);
      std::cout << plan_json(prog, q, plan_query, plan_threads).dump(2) << "\n";
    }
  } catch (const ptab::ResourceError& e) {
    std::cerr << "ptab: resource limit: " << e.what() << "\n";
    return 2;
  } catch (const CLI::Error& e) {
    std::cerr << "ptab: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "ptab: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
