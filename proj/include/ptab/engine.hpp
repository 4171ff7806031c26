#pragma once

// Three evaluators over the same Program/Query:
//   solve_oracle   - naive bottom-up fixpoint, the reference answer set;
//   solve_serial   - top-down tabled evaluation for definite Datalog;
//   solve_parallel - split / claim / link-merge evaluation of reachability
//                    queries on K worker threads.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <deque>
#include <exception>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ptab/error.hpp"
#include "ptab/lang.hpp"
#include "ptab/pdg.hpp"
#include "ptab/tables.hpp"

namespace ptab {

enum class EvalMode { Serial, Parallel, Oracle };

inline const char* to_string(EvalMode m) {
  switch (m) {
    case EvalMode::Serial: return "serial";
    case EvalMode::Parallel: return "parallel";
    case EvalMode::Oracle: return "oracle";
  }
  return "?";
}

inline const char* to_string(MergeStrategy m) { return m == MergeStrategy::Link ? "link" : "copy"; }

struct EvalConfig {
  EvalMode mode = EvalMode::Serial;
  // Parallel mode: number of workers. 1 runs the claim-guarded traversal on
  // the calling thread without planning.
  std::size_t workers = 2;
  MergeStrategy merge = MergeStrategy::Link;
  // Deduplicate across segments when counting/iterating. Unset: off for
  // parallel reachability, on elsewhere.
  std::optional<bool> dedup;
  // Check pairwise child-table disjointness before merging; throw on overlap.
  bool debug_disjoint = false;
  // Bound on derived answers (serial, oracle) before ResourceError.
  std::size_t max_answers = 50'000'000;
  // Each worker sleeps a random 0..jitter microseconds before starting.
  unsigned start_jitter_us = 0;
  std::uint64_t jitter_seed = 0;
};

struct QueryStats {
  double plan_ms = 0;
  std::vector<double> worker_ms;
  double merge_ms = 0;
  double total_ms = 0;
  std::size_t answer_count = 0;

  // Parallel: Claimed results. parent_claims counts the start plus nodes
  // claimed during planning.
  std::size_t claims = 0;
  std::size_t parent_claims = 0;
  std::vector<std::size_t> worker_claims;
  std::size_t answer_claims = 0;
  std::vector<std::size_t> child_sizes;
  std::size_t pre_answers = 0;
  std::size_t child_overlap = 0;
  bool fallback = false;
  std::string fallback_reason;

  // Serial: one subgoal per distinct call pattern.
  std::size_t subgoals = 0;
  std::size_t rule_runs = 0;
  std::size_t min_rule_runs = 0;
  std::size_t max_rule_runs = 0;
  std::size_t continuations = 0;
  std::size_t resumptions = 0;
};

struct QueryResult {
  explicit QueryResult(std::uint32_t arity) : answers(arity) {}

  AnswerTable answers;
  QueryStats stats;
  EvalMode mode = EvalMode::Serial;
  bool dedup = true;

  /// Distinct answers as an ordered set.
  std::set<Tuple> answer_set() const {
    std::set<Tuple> out;
    answers.for_each([&](std::span<const ConstId> row) { out.emplace(row.begin(), row.end()); }, dedup);
    return out;
  }
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

inline bool matches(const Query& q, std::span<const ConstId> row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    const auto& t = q.atom.args[i];
    if (t.is_constant() && t.as_constant() != row[i]) return false;
  }
  return true;
}

struct TupleHash {
  std::size_t operator()(const Tuple& t) const noexcept {
    std::uint64_t h = t.size();
    for (auto c : t) h = mix64(h ^ index_of(c));
    return static_cast<std::size_t>(h);
  }
};

// Binds `atom`'s arguments against `row`; records newly bound slots in
// `undo`. Returns false on a mismatch (bindings are then partially set; the
// caller rolls back via `undo`).
inline bool unify(const Atom& atom, std::span<const ConstId> row, std::vector<ConstId>& b,
                  std::vector<std::uint32_t>& undo) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    const auto& t = atom.args[i];
    if (t.is_constant()) {
      if (t.as_constant() != row[i]) return false;
    } else if (b[t.slot()] == kNoConst) {
      b[t.slot()] = row[i];
      undo.push_back(t.slot());
    } else if (b[t.slot()] != row[i]) {
      return false;
    }
  }
  return true;
}

inline void rollback(std::vector<ConstId>& b, std::vector<std::uint32_t>& undo, std::size_t mark) {
  while (undo.size() > mark) {
    b[undo.back()] = kNoConst;
    undo.pop_back();
  }
}

inline ConstId resolve(const Term& t, const std::vector<ConstId>& b) {
  return t.is_constant() ? t.as_constant() : b[t.slot()];
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Oracle

/// Least-model answers by naive bottom-up iteration: every round re-derives
/// all rule consequences from the previous round's relations, until a round
/// adds nothing. Throws ResourceError beyond `max_facts` derived facts.
inline std::set<Tuple> solve_oracle(const Program& prog, const Query& query,
                                    std::size_t max_facts = 50'000'000) {
  std::set<Tuple> out;
  if (!query.satisfiable) return out;
  const PredId qp = query.atom.pred;
  if (prog.is_edb(qp)) {
    for (auto row : prog.relation(qp).all())
      if (detail::matches(query, row)) out.emplace(row.begin(), row.end());
    return out;
  }

  using Set = std::unordered_set<Tuple, detail::TupleHash>;
  using Index = std::unordered_map<std::uint32_t, std::vector<Tuple>>;
  const auto npred = prog.predicates().size();
  std::vector<Set> idb(npred);
  std::size_t total = 0;

  for (;;) {
    std::vector<Index> index(npred);
    for (std::size_t p = 0; p < npred; ++p)
      for (const auto& t : idb[p]) index[p][index_of(t[0])].push_back(t);

    std::vector<std::pair<PredId, Tuple>> derived;
    for (const auto& c : prog.clauses()) {
      std::vector<ConstId> b(c.variable_count(), kNoConst);
      std::vector<std::uint32_t> undo;
      auto join = [&](auto&& self, std::size_t i) -> void {
        if (i == c.body.size()) {
          Tuple head;
          for (const auto& t : c.head.args) head.push_back(detail::resolve(t, b));
          derived.emplace_back(c.head.pred, std::move(head));
          return;
        }
        const Atom& a = c.body[i];
        const ConstId first = detail::resolve(a.args[0], b);
        auto visit = [&](std::span<const ConstId> row) {
          const auto mark = undo.size();
          if (detail::unify(a, row, b, undo)) self(self, i + 1);
          detail::rollback(b, undo, mark);
        };
        if (prog.is_edb(a.pred)) {
          const auto& rel = prog.relation(a.pred);
          for (auto row : first == kNoConst ? rel.all() : rel.lookup(first)) visit(row);
          return;
        }
        const auto& idx = index[index_of(a.pred)];
        if (first != kNoConst) {
          if (auto it = idx.find(index_of(first)); it != idx.end())
            for (const auto& t : it->second) visit(t);
          return;
        }
        for (const auto& [key, rows] : idx)
          for (const auto& t : rows) visit(t);
      };
      join(join, 0);
    }

    bool grew = false;
    for (auto& [p, t] : derived) {
      if (idb[index_of(p)].insert(std::move(t)).second) {
        grew = true;
        if (++total > max_facts) throw ResourceError("oracle exceeded " + std::to_string(max_facts) + " derived facts");
      }
    }
    if (!grew) break;
  }

  for (const auto& t : idb[index_of(qp)])
    if (detail::matches(query, t)) out.insert(t);
  return out;
}

// ---------------------------------------------------------------------------
// Serial tabled evaluation

/// Top-down evaluation with one answer table per call pattern. Each subgoal's
/// clauses run once. A body call to a tabled subgoal leaves a continuation on
/// the callee (clause, literal, bindings, cursor); whenever the callee gains
/// answers the continuation is resumed over the answers it has not seen yet.
/// The work list empties exactly when every table has reached its fixpoint.
class SerialEvaluator {
 public:
  explicit SerialEvaluator(const Program& prog, std::size_t max_answers = 50'000'000)
      : prog_(prog), max_answers_(max_answers) {}

  /// Evaluates `query`. The returned table holds exactly the query's answers.
  AnswerTable run(const Query& query) {
    const auto arity = static_cast<std::uint32_t>(query.arity());
    AnswerTable out(arity);
    if (!query.satisfiable) return out;
    const PredId qp = query.atom.pred;
    if (prog_.is_edb(qp)) {
      for (auto row : prog_.relation(qp).all())
        if (detail::matches(query, row)) out.insert(row);
      return out;
    }
    std::vector<ConstId> pattern;
    for (const auto& t : query.atom.args) pattern.push_back(t.is_constant() ? t.as_constant() : kNoConst);
    const auto idx = call(qp, pattern);
    drain();
    // The subgoal table has the query's binding pattern; bound positions match.
    return std::move(subgoals_[idx].table);
  }

  std::size_t subgoal_count() const noexcept { return subgoals_.size(); }
  std::size_t continuation_count() const noexcept { return conts_.size(); }
  std::size_t resumptions() const noexcept { return resumptions_; }

  /// Number of times each subgoal's clauses were run, in creation order.
  std::vector<std::size_t> rule_runs() const {
    std::vector<std::size_t> out;
    for (const auto& s : subgoals_) out.push_back(s.runs);
    return out;
  }

  /// How often the clauses of one call pattern were run. Tabling makes this 1.
  std::size_t evaluations(PredId pred, std::span<const ConstId> pattern) const {
    auto it = index_.find(key(pred, pattern));
    return it == index_.end() ? 0 : subgoals_[it->second].runs;
  }

 private:
  struct Subgoal {
    Subgoal(PredId p, std::vector<ConstId> pat, std::uint32_t arity)
        : pred(p), pattern(std::move(pat)), table(arity) {}
    PredId pred;
    std::vector<ConstId> pattern;  // kNoConst at free positions
    AnswerTable table;
    std::vector<std::size_t> consumers;  // continuation ids
    std::size_t runs = 0;
  };

  // The rest of clause `clause` after body literal `literal`, waiting on the
  // answers of `callee`. `seen` answers have been consumed so far.
  struct Continuation {
    std::size_t consumer;
    std::size_t callee;
    std::uint32_t clause;
    std::uint32_t literal;
    std::vector<ConstId> binding;
    std::size_t seen = 0;
    bool queued = false;
  };

  struct KeyHash {
    std::size_t operator()(const std::vector<std::uint32_t>& k) const noexcept {
      std::uint64_t h = k.size();
      for (auto v : k) h = detail::mix64(h ^ v);
      return static_cast<std::size_t>(h);
    }
  };

  static std::vector<std::uint32_t> key(PredId pred, std::span<const ConstId> pattern) {
    std::vector<std::uint32_t> k{index_of(pred)};
    for (auto c : pattern) k.push_back(index_of(c));
    return k;
  }

  std::size_t call(PredId pred, const std::vector<ConstId>& pattern) {
    auto k = key(pred, pattern);
    if (auto it = index_.find(k); it != index_.end()) return it->second;
    const auto idx = subgoals_.size();
    subgoals_.emplace_back(pred, pattern, prog_.predicate(pred).arity);
    index_.emplace(std::move(k), idx);
    fresh_.push_back(idx);
    return idx;
  }

  void drain() {
    while (!fresh_.empty() || !ready_.empty()) {
      if (!fresh_.empty()) {
        const auto s = fresh_.back();
        fresh_.pop_back();
        run_rules(s);
      } else {
        const auto k = ready_.back();
        ready_.pop_back();
        conts_[k].queued = false;
        resume(k);
      }
    }
  }

  void run_rules(std::size_t idx) {
    ++subgoals_[idx].runs;
    for (auto ci : prog_.clauses_for(subgoals_[idx].pred)) {
      const Clause& c = prog_.clauses()[ci];
      std::vector<ConstId> b(c.variable_count(), kNoConst);
      std::vector<std::uint32_t> undo;
      if (!bind_head(c.head, subgoals_[idx].pattern, b)) continue;
      join(idx, ci, 0, b, undo);
    }
  }

  void resume(std::size_t k) {
    ++resumptions_;
    // conts_ is a deque: the reference survives continuations added below.
    Continuation& ct = conts_[k];
    const Clause& c = prog_.clauses()[ct.clause];
    const Atom& a = c.body[ct.literal];
    std::vector<ConstId> b = ct.binding;
    std::vector<std::uint32_t> undo;
    const auto& answers = subgoals_[ct.callee].table.first_segment();
    while (ct.seen < answers.size()) {
      const auto row = answers.row(ct.seen++);
      if (detail::unify(a, row, b, undo)) join(ct.consumer, ct.clause, ct.literal + 1, b, undo);
      detail::rollback(b, undo, 0);
    }
  }

  void add_answer(std::size_t idx) {
    auto& sg = subgoals_[idx];
    if (sg.table.insert(head_buf_) != InsertResult::Inserted) return;
    if (++answers_ > max_answers_)
      throw ResourceError("serial evaluation exceeded " + std::to_string(max_answers_) + " answers");
    for (auto k : sg.consumers)
      if (!conts_[k].queued) {
        conts_[k].queued = true;
        ready_.push_back(k);
      }
  }

  // Binds head arguments at the call's bound positions.
  static bool bind_head(const Atom& head, const std::vector<ConstId>& pattern, std::vector<ConstId>& b) {
    for (std::size_t k = 0; k < pattern.size(); ++k) {
      if (pattern[k] == kNoConst) continue;
      const Term& t = head.args[k];
      if (t.is_constant()) {
        if (t.as_constant() != pattern[k]) return false;
      } else if (b[t.slot()] == kNoConst) {
        b[t.slot()] = pattern[k];
      } else if (b[t.slot()] != pattern[k]) {
        return false;
      }
    }
    return true;
  }

  void join(std::size_t self, std::uint32_t ci, std::size_t i, std::vector<ConstId>& b,
            std::vector<std::uint32_t>& undo) {
    const Clause& c = prog_.clauses()[ci];
    if (i == c.body.size()) {
      head_buf_.clear();
      for (const auto& t : c.head.args) head_buf_.push_back(detail::resolve(t, b));
      add_answer(self);
      return;
    }
    const Atom& a = c.body[i];
    if (prog_.is_edb(a.pred)) {
      const auto& rel = prog_.relation(a.pred);
      const ConstId first = detail::resolve(a.args[0], b);
      for (auto row : first == kNoConst ? rel.all() : rel.lookup(first)) {
        const auto mark = undo.size();
        if (detail::unify(a, row, b, undo)) join(self, ci, i + 1, b, undo);
        detail::rollback(b, undo, mark);
      }
      return;
    }
    std::vector<ConstId> pattern;
    pattern.reserve(a.args.size());
    for (const auto& t : a.args) pattern.push_back(detail::resolve(t, b));
    const auto callee = call(a.pred, pattern);
    const auto k = conts_.size();
    conts_.push_back({self, callee, ci, static_cast<std::uint32_t>(i), b, 0, true});
    subgoals_[callee].consumers.push_back(k);
    ready_.push_back(k);
  }

  const Program& prog_;
  std::size_t max_answers_;
  std::deque<Subgoal> subgoals_;
  std::deque<Continuation> conts_;
  std::unordered_map<std::vector<std::uint32_t>, std::size_t, KeyHash> index_;
  std::vector<std::size_t> fresh_;
  std::vector<std::size_t> ready_;
  std::size_t resumptions_ = 0;
  std::size_t answers_ = 0;
  std::vector<ConstId> head_buf_;
};

inline bool resolve_dedup(const EvalConfig& cfg, bool parallel_reachability) {
  return cfg.dedup.value_or(!parallel_reachability);
}

inline QueryResult solve_serial(const Program& prog, const Query& query, const EvalConfig& cfg = {}) {
  const auto t0 = detail::Clock::now();
  SerialEvaluator ev(prog, cfg.max_answers);
  QueryResult result(static_cast<std::uint32_t>(query.arity()));
  result.mode = EvalMode::Serial;
  result.dedup = resolve_dedup(cfg, false);
  result.answers = ev.run(query);
  result.answers.seal();
  auto& st = result.stats;
  st.subgoals = ev.subgoal_count();
  st.continuations = ev.continuation_count();
  st.resumptions = ev.resumptions();
  const auto runs = ev.rule_runs();
  for (auto r : runs) st.rule_runs += r;
  if (!runs.empty()) {
    st.min_rule_runs = *std::min_element(runs.begin(), runs.end());
    st.max_rule_runs = *std::max_element(runs.begin(), runs.end());
  }
  st.answer_count = result.dedup ? result.answers.distinct_size() : result.answers.size();
  st.total_ms = detail::ms_since(t0);
  return result;
}

// ---------------------------------------------------------------------------
// Parallel reachability evaluation

namespace detail {

struct WorkerOutcome {
  double ms = 0;
  std::size_t claims = 0;
  std::size_t answer_claims = 0;
  std::exception_ptr error;
};

// Depth-first exploration from `branch`. A node is expanded, and its answers
// recorded, only by the worker whose claim on it succeeds.
inline void explore(const Traversal& tr, std::span<const ConstId> branch, DenseClaimSet& nodes,
                    DenseClaimSet* answers, AnswerTable& out, WorkerOutcome& outcome) {
  std::vector<ConstId> stack;
  ConstId tuple[2] = {tr.start, tr.start};
  auto emit = [&](ConstId node) {
    tr.for_each_answer(node, [&](ConstId h) {
      if (answers) {
        if (answers->try_claim(h) != ClaimResult::Claimed) return;
        ++outcome.answer_claims;
      }
      tuple[1] = h;
      out.insert(tuple);
    });
  };
  auto visit = [&](ConstId c) {
    if (nodes.try_claim(c) != ClaimResult::Claimed) return;
    ++outcome.claims;
    emit(c);
    stack.push_back(c);
  };
  for (auto c : branch) visit(c);
  while (!stack.empty()) {
    const ConstId z = stack.back();
    stack.pop_back();
    tr.for_each_successor(z, visit);
  }
}

inline std::size_t count_overlap(const AnswerTable& a, const AnswerTable& b) {
  const AnswerTable& small = a.size() <= b.size() ? a : b;
  const AnswerTable& large = a.size() <= b.size() ? b : a;
  std::size_t n = 0;
  small.for_each([&](std::span<const ConstId> row) { n += large.contains(row); });
  return n;
}

}  // namespace detail

/// Parallel evaluation of a reachability query:
///   1. split the frontier (plan_split); fall back to serial on no split;
///   2. the parent claims planned nodes and stores planned answers;
///   3. one worker per branch explores under node claims into a private table;
///   4. join all workers, seal their tables, merge them into the parent.
/// Queries outside the reachability class are evaluated serially.
inline QueryResult solve_parallel(const Program& prog, const Query& query, const EvalConfig& cfg) {
  const auto t0 = detail::Clock::now();
  const auto shape = classify_shape(prog, query);
  auto fallback = [&](std::string reason, double plan_ms) {
    auto r = solve_serial(prog, query, cfg);
    r.stats.fallback = true;
    r.stats.fallback_reason = std::move(reason);
    r.stats.plan_ms = plan_ms;
    r.stats.total_ms = detail::ms_since(t0);
    return r;
  };
  if (!shape.is_reachability()) return fallback("query is not in the reachability class", 0);
  if (cfg.workers == 0) throw std::invalid_argument("parallel evaluation needs at least one worker");

  QueryResult result(2);
  result.mode = EvalMode::Parallel;
  result.dedup = resolve_dedup(cfg, true);
  auto& st = result.stats;
  if (!query.satisfiable) {
    result.answers.seal();
    st.total_ms = detail::ms_since(t0);
    return result;
  }

  const Traversal tr = make_traversal(prog, query, shape);
  DenseClaimSet nodes(prog.constant_count());
  std::optional<DenseClaimSet> answer_claims;
  if (!tr.answers_are_nodes()) answer_claims.emplace(prog.constant_count());
  AnswerTable& parent = result.answers;

  std::vector<std::vector<ConstId>> branches;
  st.parent_claims = 1;  // the start
  if (cfg.workers == 1) {
    std::vector<ConstId> roots;
    tr.for_each_root_successor([&](ConstId c) { roots.push_back(c); });
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    branches.push_back(std::move(roots));
  } else {
    const auto tp = detail::Clock::now();
    auto plan = plan_split(prog, query, shape, cfg.workers);
    st.plan_ms = detail::ms_since(tp);
    if (!plan) return fallback("no split: reachable set exhausted before a fan-out of 2", st.plan_ms);
    for (auto n : plan->claimed_nodes)
      if (nodes.try_claim(n) == ClaimResult::Claimed) ++st.parent_claims;
    for (const auto& a : plan->pre_answers) {
      if (answer_claims && answer_claims->try_claim(a[1]) == ClaimResult::Claimed) ++st.answer_claims;
      parent.insert(a);
    }
    st.pre_answers = plan->pre_answers.size();
    branches = std::move(plan->branches);
  }

  const auto k = branches.size();
  std::vector<AnswerTable> children;
  children.reserve(k);
  for (std::size_t i = 0; i < k; ++i) children.emplace_back(2);
  std::vector<detail::WorkerOutcome> outcomes(k);
  DenseClaimSet* answers_ptr = answer_claims ? &*answer_claims : nullptr;

  auto work = [&](std::size_t i) {
    auto& out = outcomes[i];
    try {
      if (cfg.start_jitter_us) {
        std::mt19937_64 rng(cfg.jitter_seed * 1000003 + i);
        std::this_thread::sleep_for(std::chrono::microseconds(rng() % (cfg.start_jitter_us + 1)));
      }
      const auto tw = detail::Clock::now();
      detail::explore(tr, branches[i], nodes, answers_ptr, children[i], out);
      out.ms = detail::ms_since(tw);
    } catch (...) {
      out.error = std::current_exception();
    }
  };

  if (cfg.workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(k);
    for (std::size_t i = 0; i < k; ++i) threads.emplace_back(work, i);
    for (auto& t : threads) t.join();
  }

  for (std::size_t i = 0; i < k; ++i) {
    if (!outcomes[i].error) continue;
    try {
      std::rethrow_exception(outcomes[i].error);
    } catch (const ResourceError&) {
      throw;
    } catch (const std::exception& e) {
      throw EvalError("worker " + std::to_string(i) + " failed: " + e.what());
    } catch (...) {
      throw EvalError("worker " + std::to_string(i) + " failed");
    }
  }

  st.claims = st.parent_claims;
  for (std::size_t i = 0; i < k; ++i) {
    children[i].seal();
    st.worker_ms.push_back(outcomes[i].ms);
    st.worker_claims.push_back(outcomes[i].claims);
    st.claims += outcomes[i].claims;
    st.answer_claims += outcomes[i].answer_claims;
    st.child_sizes.push_back(children[i].size());
  }

  if (cfg.debug_disjoint) {
    for (std::size_t i = 0; i < k; ++i) {
      st.child_overlap += detail::count_overlap(parent, children[i]);
      for (std::size_t j = i + 1; j < k; ++j) st.child_overlap += detail::count_overlap(children[i], children[j]);
    }
    if (st.child_overlap)
      throw DisjointnessError("child answer tables share " + std::to_string(st.child_overlap) + " tuples");
  }

  const auto tm = detail::Clock::now();
  for (auto& child : children) merge(parent, child, cfg.merge);
  st.merge_ms = detail::ms_since(tm);
  parent.seal();

  st.answer_count = result.dedup ? parent.distinct_size() : parent.size();
  st.total_ms = detail::ms_since(t0);
  return result;
}

inline QueryResult solve_oracle_result(const Program& prog, const Query& query, const EvalConfig& cfg = {}) {
  const auto t0 = detail::Clock::now();
  QueryResult result(static_cast<std::uint32_t>(query.arity()));
  result.mode = EvalMode::Oracle;
  result.dedup = true;
  for (const auto& t : solve_oracle(prog, query, cfg.max_answers)) result.answers.insert(t);
  result.answers.seal();
  result.stats.answer_count = result.answers.size();
  result.stats.total_ms = detail::ms_since(t0);
  return result;
}

inline QueryResult solve(const Program& prog, const Query& query, const EvalConfig& cfg) {
  switch (cfg.mode) {
    case EvalMode::Serial: return solve_serial(prog, query, cfg);
    case EvalMode::Parallel: return solve_parallel(prog, query, cfg);
    case EvalMode::Oracle: return solve_oracle_result(prog, query, cfg);
  }
  throw std::invalid_argument("unknown evaluation mode");
}

// ---------------------------------------------------------------------------
// Points-to analysis

/// Inclusion-based points-to: alloc(V,H) gives V a heap object; assign(V,W)
/// makes V point to everything W points to.
inline constexpr std::string_view kPointsToProgram =
    ":- table pt/2.\n"
    "pt(V,H) :- alloc(V,H).\n"
    "pt(V,H) :- assign(V,W), pt(W,H).\n";

struct PointsToFacts {
  std::vector<std::pair<std::string, std::string>> alloc;
  std::vector<std::pair<std::string, std::string>> assign;
};

inline Program pointsto_program(const PointsToFacts& facts) {
  ProgramBuilder b;
  b.table("pt", 2);
  b.clause({"pt", {{"V", true}, {"H", true}}}, {{"alloc", {{"V", true}, {"H", true}}}});
  b.clause({"pt", {{"V", true}, {"H", true}}},
           {{"assign", {{"V", true}, {"W", true}}}, {"pt", {{"W", true}, {"H", true}}}});
  for (const auto& [v, h] : facts.alloc) b.fact("alloc", {v, h});
  for (const auto& [v, w] : facts.assign) b.fact("assign", {v, w});
  return std::move(b).build();
}

/// Evaluates pt(variable, H) in the configured mode.
inline QueryResult run_pointsto(const PointsToFacts& facts, std::string_view variable, const EvalConfig& cfg) {
  const Program prog = pointsto_program(facts);
  const Query q = parse_query(prog, "pt(" + std::string(variable) + ",H)");
  return solve(prog, q, cfg);
}

}  // namespace ptab
