#pragma once

// Predicate dependency analysis, reachability-shape recognition, and the
// frontier split that seeds parallel workers.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ptab/lang.hpp"

namespace ptab {

class DependencyGraph {
 public:
  DependencyGraph() = default;

  explicit DependencyGraph(const Program& prog) {
    const auto n = static_cast<std::uint32_t>(prog.predicates().size());
    for (std::uint32_t i = 0; i < n; ++i) nodes_.push_back(PredId{i});
    adjacency_.assign(n, {});
    for (const auto& c : prog.clauses())
      for (const auto& a : c.body) adjacency_[index_of(c.head.pred)].push_back(a.pred);
    for (std::uint32_t i = 0; i < n; ++i) {
      auto& succ = adjacency_[i];
      std::sort(succ.begin(), succ.end());
      succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
      for (auto q : succ) edges_.emplace_back(PredId{i}, q);
    }
    compute_cycles();
  }

  /// Predicates in interning order.
  const std::vector<PredId>& nodes() const noexcept { return nodes_; }
  /// (head, body) pairs ordered by head then body id.
  const std::vector<std::pair<PredId, PredId>>& edges() const noexcept { return edges_; }
  const std::vector<PredId>& successors(PredId p) const { return adjacency_.at(index_of(p)); }

  bool has_edge(PredId from, PredId to) const {
    const auto& s = successors(from);
    return std::binary_search(s.begin(), s.end(), to);
  }

  /// True iff `p` reaches itself through at least one edge.
  bool is_cyclic(PredId p) const { return cyclic_.at(index_of(p)); }

  std::vector<PredId> cyclic() const {
    std::vector<PredId> out;
    for (auto p : nodes_)
      if (is_cyclic(p)) out.push_back(p);
    return out;
  }

  /// Strongly connected component id per predicate.
  std::uint32_t component(PredId p) const { return component_.at(index_of(p)); }

 private:
  // Tarjan's algorithm; a node is cyclic if its component has more than one
  // member or it has a self edge.
  void compute_cycles() {
    const auto n = nodes_.size();
    constexpr std::uint32_t kUnvisited = ~std::uint32_t{0};
    std::vector<std::uint32_t> order(n, kUnvisited), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::uint32_t> stack;
    component_.assign(n, 0);
    cyclic_.assign(n, false);
    std::uint32_t counter = 0, components = 0;

    std::function<void(std::uint32_t)> visit = [&](std::uint32_t v) {
      order[v] = low[v] = counter++;
      stack.push_back(v);
      on_stack[v] = true;
      for (auto q : adjacency_[v]) {
        const auto w = index_of(q);
        if (order[w] == kUnvisited) {
          visit(w);
          low[v] = std::min(low[v], low[w]);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], order[w]);
        }
      }
      if (low[v] != order[v]) return;
      std::vector<std::uint32_t> members;
      std::uint32_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        component_[w] = components;
        members.push_back(w);
      } while (w != v);
      ++components;
      if (members.size() > 1) {
        for (auto m : members) cyclic_[m] = true;
      } else if (has_edge(PredId{v}, PredId{v})) {
        cyclic_[v] = true;
      }
    };
    for (std::uint32_t v = 0; v < n; ++v)
      if (order[v] == kUnvisited) visit(v);
  }

  std::vector<PredId> nodes_;
  std::vector<std::pair<PredId, PredId>> edges_;
  std::vector<std::vector<PredId>> adjacency_;
  std::vector<bool> cyclic_;
  std::vector<std::uint32_t> component_;
};

inline DependencyGraph build_pdg(const Program& prog) { return DependencyGraph(prog); }

enum class ShapeKind { RightLinear, LeftLinear, NotReachability };

inline const char* to_string(ShapeKind k) {
  switch (k) {
    case ShapeKind::RightLinear: return "RightLinear";
    case ShapeKind::LeftLinear: return "LeftLinear";
    case ShapeKind::NotReachability: return "NotReachability";
  }
  return "?";
}

/// Linear transitive closure over extensional relations:
///   r(X,Y) :- base(X,Y).
///   r(X,Y) :- step(X,Z), r(Z,Y).     (RightLinear)
///   r(X,Y) :- r(X,Z), step(Z,Y).     (LeftLinear)
struct ReachabilityShape {
  ShapeKind kind = ShapeKind::NotReachability;
  PredId recursive{};
  PredId step{};
  PredId base{};

  bool is_reachability() const noexcept { return kind != ShapeKind::NotReachability; }
};

namespace detail {

// Arguments are pairwise distinct variables; returns their slots.
inline std::optional<std::vector<std::uint32_t>> distinct_vars(const Atom& a) {
  std::vector<std::uint32_t> out;
  for (const auto& t : a.args) {
    if (!t.is_variable() || std::find(out.begin(), out.end(), t.slot()) != out.end()) return std::nullopt;
    out.push_back(t.slot());
  }
  return out;
}

inline bool binary_edb(const Program& prog, PredId p) { return prog.is_edb(p) && prog.predicate(p).arity == 2; }

}  // namespace detail

inline ReachabilityShape classify_shape(const Program& prog, const Query& query) {
  ReachabilityShape none;
  const PredId r = query.atom.pred;
  if (!prog.is_idb(r) || !prog.is_tabled(r) || query.arity() != 2) return none;
  if (!query.is_bound(0) || query.is_bound(1)) return none;
  const auto clauses = prog.clauses_for(r);
  if (clauses.size() != 2) return none;

  std::optional<PredId> base;
  std::optional<std::pair<ShapeKind, PredId>> step;
  for (auto ci : clauses) {
    const Clause& c = prog.clauses()[ci];
    const auto head = detail::distinct_vars(c.head);
    if (!head) return none;
    const auto x = (*head)[0], y = (*head)[1];
    if (c.body.size() == 1) {
      const auto& b = c.body[0];
      const auto v = detail::distinct_vars(b);
      if (!v || !detail::binary_edb(prog, b.pred) || (*v)[0] != x || (*v)[1] != y) return none;
      base = b.pred;
    } else if (c.body.size() == 2) {
      const auto v0 = detail::distinct_vars(c.body[0]);
      const auto v1 = detail::distinct_vars(c.body[1]);
      if (!v0 || !v1) return none;
      const auto& a0 = c.body[0];
      const auto& a1 = c.body[1];
      const auto z = (*v0)[1];
      if (z == x || z == y || (*v1)[0] != z) return none;
      if ((*v0)[0] != x || (*v1)[1] != y) return none;
      if (a1.pred == r && a0.pred != r && detail::binary_edb(prog, a0.pred)) {
        step = std::pair{ShapeKind::RightLinear, a0.pred};
      } else if (a0.pred == r && a1.pred != r && detail::binary_edb(prog, a1.pred)) {
        step = std::pair{ShapeKind::LeftLinear, a1.pred};
      } else {
        return none;
      }
    } else {
      return none;
    }
  }
  if (!base || !step) return none;
  return {step->first, r, step->second, *base};
}

/// How a reachability query is answered by a graph traversal. Traversal
/// starts from a virtual root (the bound start constant in its role as the
/// caller) whose successors come from `root_step`, then follows `step`.
struct Traversal {
  ConstId start{};
  // null: the start constant itself is the only root successor.
  const Relation* root_step = nullptr;
  const Relation* step = nullptr;
  // null: a claimed node Z yields the answer (start, Z).
  // Otherwise a claimed node Z yields (start, H) for every answer_base(Z, H).
  const Relation* answer_base = nullptr;

  template <class F>
  void for_each_root_successor(F&& f) const {
    if (!root_step) {
      f(start);
      return;
    }
    for (auto row : root_step->lookup(start)) f(row[1]);
  }

  template <class F>
  void for_each_successor(ConstId node, F&& f) const {
    for (auto row : step->lookup(node)) f(row[1]);
  }

  /// Answer values (second tuple component) contributed by a claimed node.
  template <class F>
  void for_each_answer(ConstId node, F&& f) const {
    if (!answer_base) {
      f(node);
      return;
    }
    for (auto row : answer_base->lookup(node)) f(row[1]);
  }

  bool answers_are_nodes() const noexcept { return answer_base == nullptr; }
};

inline Traversal make_traversal(const Program& prog, const Query& query, const ReachabilityShape& shape) {
  if (!shape.is_reachability()) throw std::invalid_argument("traversal requires a reachability shape");
  Traversal t;
  t.start = query.atom.args[0].as_constant();
  t.step = &prog.relation(shape.step);
  if (shape.base == shape.step) {
    // Left and right forms coincide: answers are nodes reachable in >= 1 step.
    t.root_step = t.step;
  } else if (shape.kind == ShapeKind::RightLinear) {
    // Nodes reachable in >= 0 steps, each contributing its base facts.
    t.root_step = nullptr;
    t.answer_base = &prog.relation(shape.base);
  } else {
    // Base successors of the start, closed under step.
    t.root_step = &prog.relation(shape.base);
  }
  return t;
}

struct ParallelPlan {
  ConstId start{};
  /// One non-empty set of frontier constants per worker; pairwise disjoint.
  std::vector<std::vector<ConstId>> branches;
  /// Constants claimed while planning: the start, then visited nodes.
  std::vector<ConstId> pre_claimed;
  /// Graph nodes claimed while planning, in visit order.
  std::vector<ConstId> claimed_nodes;
  /// Answers discovered while planning, in discovery order.
  std::vector<Tuple> pre_answers;
};

/// Breadth-first expansion from the start until a frontier level has at least
/// `workers` distinct unvisited successors. Returns nullopt (no split) when
/// the reachable set is exhausted without any level of width >= 2. If it is
/// exhausted after a level of width f with 2 <= f < workers, the first such
/// level is split into f branches.
inline std::optional<ParallelPlan> plan_split(const Program& prog, const Query& query, const ReachabilityShape& shape,
                                              std::size_t workers) {
  if (workers < 2) throw std::invalid_argument("plan_split requires at least 2 workers");
  if (!shape.is_reachability()) throw std::invalid_argument("plan_split requires a reachability shape");
  if (!query.satisfiable) return std::nullopt;

  const Traversal tr = make_traversal(prog, query, shape);
  enum : std::uint8_t { kUnseen, kQueued, kVisited };
  std::vector<std::uint8_t> mark(prog.constant_count(), kUnseen);
  std::vector<std::uint8_t> answered(tr.answers_are_nodes() ? 0 : prog.constant_count(), 0);

  ParallelPlan plan;
  plan.start = tr.start;

  auto finish = [&](const std::vector<ConstId>& level) {
    const auto k = std::min(workers, level.size());
    plan.branches.assign(k, {});
    for (std::size_t i = 0; i < level.size(); ++i) plan.branches[i % k].push_back(level[i]);
    plan.pre_claimed.push_back(plan.start);
    for (auto n : plan.claimed_nodes)
      if (n != plan.start) plan.pre_claimed.push_back(n);
    return plan;
  };

  std::vector<ConstId> next;
  tr.for_each_root_successor([&](ConstId c) {
    if (mark[index_of(c)] == kUnseen) {
      mark[index_of(c)] = kQueued;
      next.push_back(c);
    }
  });
  std::sort(next.begin(), next.end());

  struct Snapshot {
    std::size_t nodes;
    std::size_t answers;
    std::vector<ConstId> level;
  };
  std::optional<Snapshot> wide;

  for (;;) {
    if (next.size() >= workers) return finish(next);
    if (next.size() >= 2 && !wide) wide = Snapshot{plan.claimed_nodes.size(), plan.pre_answers.size(), next};
    if (next.empty()) {
      if (!wide) return std::nullopt;
      plan.claimed_nodes.resize(wide->nodes);
      plan.pre_answers.resize(wide->answers);
      return finish(wide->level);
    }
    for (auto n : next) {
      mark[index_of(n)] = kVisited;
      plan.claimed_nodes.push_back(n);
      tr.for_each_answer(n, [&](ConstId h) {
        if (!tr.answers_are_nodes()) {
          if (answered[index_of(h)]) return;
          answered[index_of(h)] = 1;
        }
        plan.pre_answers.push_back({tr.start, h});
      });
    }
    std::vector<ConstId> frontier = std::move(next);
    next.clear();
    for (auto z : frontier)
      tr.for_each_successor(z, [&](ConstId y) {
        if (mark[index_of(y)] == kUnseen) {
          mark[index_of(y)] = kQueued;
          next.push_back(y);
        }
      });
    std::sort(next.begin(), next.end());
  }
}

inline std::optional<ParallelPlan> plan_split(const Program& prog, const Query& query, std::size_t workers) {
  const auto shape = classify_shape(prog, query);
  if (!shape.is_reachability()) throw std::invalid_argument("query is not in the reachability class");
  return plan_split(prog, query, shape, workers);
}

}  // namespace ptab
