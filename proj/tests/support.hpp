#pragma once

// Test-side reference code. Everything here works on constant texts and
// plain standard containers, never on the engine's indexes, so it can check
// the engine independently.

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ptab/engine.hpp"
#include "ptab/generators.hpp"
#include "ptab/pdg.hpp"

namespace support {

using Edges = std::vector<std::pair<std::string, std::string>>;
using Adjacency = std::map<std::string, std::set<std::string>>;

inline Adjacency adjacency(const Edges& edges) {
  Adjacency adj;
  for (const auto& [a, b] : edges) adj[a].insert(b);
  return adj;
}

/// Vertices reachable from `start` in one or more steps.
inline std::set<std::string> reach_plus(const Adjacency& adj, const std::string& start) {
  std::set<std::string> seen;
  std::deque<std::string> todo{start};
  while (!todo.empty()) {
    const auto v = todo.front();
    todo.pop_front();
    auto it = adj.find(v);
    if (it == adj.end()) continue;
    for (const auto& w : it->second)
      if (seen.insert(w).second) todo.push_back(w);
  }
  return seen;
}

/// Breadth-first level widths starting from the successors of `start`.
inline std::vector<std::size_t> level_widths(const Adjacency& adj, const std::string& start) {
  std::vector<std::size_t> widths;
  std::set<std::string> seen;
  std::vector<std::string> level;
  if (auto it = adj.find(start); it != adj.end())
    for (const auto& w : it->second)
      if (seen.insert(w).second) level.push_back(w);
  while (!level.empty()) {
    widths.push_back(level.size());
    std::vector<std::string> next;
    for (const auto& v : level)
      if (auto it = adj.find(v); it != adj.end())
        for (const auto& w : it->second)
          if (seen.insert(w).second) next.push_back(w);
    level = std::move(next);
  }
  return widths;
}

struct Graph {
  Edges edges;
  ptab::Program program;
  std::string relation;  // reachr or reachl
};

struct EdgeCollector {
  Edges& edges;
  ptab::ProgramBuilder& builder;
  void operator()(std::string_view pred, std::string_view a, std::string_view b) const {
    edges.emplace_back(a, b);
    builder.fact(pred, {a, b});
  }
};

/// Transitive-closure program over a seeded random graph.
inline Graph random_tc(std::size_t n, double p, std::uint64_t seed, bool right) {
  Edges edges;
  auto prog = ptab::gen::tc_program(right, [&](ptab::gen::BuilderSink sink) {
    ptab::gen::random_graph(n, p, seed, EdgeCollector{edges, sink.builder});
  });
  return {std::move(edges), std::move(prog), right ? "reachr" : "reachl"};
}

inline std::set<std::string> texts(const ptab::Program& prog, const std::vector<ptab::ConstId>& ids) {
  std::set<std::string> out;
  for (auto c : ids) out.insert(prog.symbols().text(c));
  return out;
}

inline std::set<std::string> answer_texts(const ptab::Program& prog, const std::set<ptab::Tuple>& answers) {
  std::set<std::string> out;
  for (const auto& t : answers) {
    std::string s;
    for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + prog.symbols().text(t[i]);
    out.insert(s);
  }
  return out;
}

/// Checks the planner contract on one graph. Returns an empty string on
/// success, otherwise a description of the first violation.
inline std::string check_plan(const Graph& g, const std::string& start, std::size_t workers) {
  using namespace ptab;
  const auto& prog = g.program;
  const Query q = parse_query(prog, g.relation + "(" + start + ",Y)");
  const auto adj = adjacency(g.edges);
  const auto widths = level_widths(adj, start);
  const auto reach = reach_plus(adj, start);
  const bool can_split = std::any_of(widths.begin(), widths.end(), [](auto w) { return w >= 2; });

  const auto plan = plan_split(prog, q, workers);
  if (!plan) return can_split ? "no split although some level has width >= 2" : "";
  if (!can_split) return "split although every level has width <= 1";

  const auto again = plan_split(prog, q, workers);
  if (!again || again->branches != plan->branches || again->pre_claimed != plan->pre_claimed ||
      again->pre_answers != plan->pre_answers || again->claimed_nodes != plan->claimed_nodes)
    return "plan is not deterministic";

  // Expected branch count: K at the first level of width >= K, otherwise the
  // width of the first level of width >= 2.
  std::size_t expect_k = 0;
  for (auto w : widths)
    if (w >= workers) {
      expect_k = workers;
      break;
    }
  if (!expect_k)
    for (auto w : widths)
      if (w >= 2) {
        expect_k = w;
        break;
      }
  if (plan->branches.size() != expect_k)
    return "expected " + std::to_string(expect_k) + " branches, got " + std::to_string(plan->branches.size());

  if (plan->pre_claimed.empty() || prog.symbols().text(plan->pre_claimed.front()) != start)
    return "pre_claimed does not begin with the start";
  const auto claimed = texts(prog, plan->pre_claimed);
  if (claimed.size() != plan->pre_claimed.size()) return "pre_claimed has duplicates";

  // The start's root claim does not cover it as a graph node, so on a cycle
  // it may appear in a branch; branches must avoid the planned nodes.
  const auto planned = texts(prog, plan->claimed_nodes);
  std::set<std::string> in_branches;
  for (const auto& b : plan->branches) {
    if (b.empty()) return "empty branch";
    for (auto c : b) {
      const auto& t = prog.symbols().text(c);
      if (!in_branches.insert(t).second) return "branches overlap at " + t;
      if (!reach.count(t)) return "branch constant " + t + " is not reachable";
      if (planned.count(t)) return "branch constant " + t + " was expanded during planning";
    }
  }

  // Soundness: every planned answer is a true answer.
  const auto truth = answer_texts(prog, solve_oracle(prog, q));
  for (const auto& a : plan->pre_answers) {
    const auto s = prog.symbols().text(a[0]) + "," + prog.symbols().text(a[1]);
    if (!truth.count(s)) return "pre_answer (" + s + ") is not an answer";
  }
  std::set<std::string> answer_nodes;
  for (const auto& a : plan->pre_answers) answer_nodes.insert(prog.symbols().text(a[1]));
  if (answer_nodes != planned) return "pre_answers differ from planned nodes";

  // Coverage: what the plan holds, closed under edges, is the reachable set.
  std::set<std::string> covered;
  std::deque<std::string> todo;
  for (const auto& t : in_branches) todo.push_back(t);
  for (const auto& t : planned) todo.push_back(t);
  while (!todo.empty()) {
    const auto v = todo.front();
    todo.pop_front();
    if (!covered.insert(v).second) continue;
    if (auto it = adj.find(v); it != adj.end())
      for (const auto& w : it->second) todo.push_back(w);
  }
  if (covered != reach) return "plan does not cover the reachable set";
  return "";
}

/// Runs the query serially, in parallel with each K (debug_disjoint on), and
/// with the oracle; returns an empty string when all answer sets agree with
/// the independent reachability oracle.
inline std::string check_equivalence(const Graph& g, const std::string& start, const std::vector<std::size_t>& ks,
                                     std::size_t* disjoint_runs = nullptr) {
  using namespace ptab;
  const auto& prog = g.program;
  const Query q = parse_query(prog, g.relation + "(" + start + ",Y)");
  std::set<std::string> expect;
  for (const auto& v : reach_plus(adjacency(g.edges), start)) expect.insert(start + "," + v);

  auto check = [&](const char* what, const std::set<Tuple>& got) -> std::string {
    const auto t = answer_texts(prog, got);
    if (t == expect) return "";
    return std::string(what) + ": " + std::to_string(t.size()) + " answers, expected " + std::to_string(expect.size());
  };
  if (auto e = check("oracle", solve_oracle(prog, q)); !e.empty()) return e;
  if (auto e = check("serial", solve_serial(prog, q).answer_set()); !e.empty()) return e;
  for (auto k : ks) {
    EvalConfig cfg;
    cfg.mode = EvalMode::Parallel;
    cfg.workers = k;
    cfg.debug_disjoint = true;
    QueryResult r(2);
    try {
      r = solve_parallel(prog, q, cfg);
    } catch (const DisjointnessError& e) {
      return "K=" + std::to_string(k) + ": " + e.what();
    }
    if (!r.stats.fallback && disjoint_runs) ++*disjoint_runs;
    if (r.stats.child_overlap != 0) return "K=" + std::to_string(k) + ": children overlap";
    // Without dedup, the raw tuple count must already equal the distinct count.
    if (r.answers.size() != r.answers.distinct_size()) return "K=" + std::to_string(k) + ": duplicate tuples";
    if (auto e = check(("parallel K=" + std::to_string(k)).c_str(), r.answer_set()); !e.empty()) return e;
  }
  return "";
}

}  // namespace support
