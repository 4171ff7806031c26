#pragma once

// Deterministic benchmark inputs. Every generator reports binary facts to a
// sink `emit(predicate, arg1, arg2)`; the same stream can be rendered as
// program text or fed straight into a ProgramBuilder.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ptab/engine.hpp"
#include "ptab/lang.hpp"

namespace ptab::gen {

inline std::string node(std::size_t i) { return "n" + std::to_string(i); }

// Uniform double in [0,1) from the top 53 bits; mt19937_64 is fully
// specified, so output is identical across standard libraries.
inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

/// Every ordered pair of distinct vertices: n(n-1) edges.
template <class Sink>
void complete_graph(std::size_t n, Sink&& emit) {
  for (std::size_t i = 1; i <= n; ++i) {
    const auto a = node(i);
    for (std::size_t j = 1; j <= n; ++j)
      if (i != j) emit("edge", a, node(j));
  }
}

/// n1 -> n2 -> ... -> nN.
template <class Sink>
void chain_graph(std::size_t n, Sink&& emit) {
  for (std::size_t i = 1; i < n; ++i) emit("edge", node(i), node(i + 1));
}

/// Each ordered pair of distinct vertices independently with probability p.
template <class Sink>
void random_graph(std::size_t n, double p, std::uint64_t seed, Sink&& emit) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("edge probability must be in [0,1]");
  std::mt19937_64 rng(seed);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= n; ++j)
      if (i != j && unit(rng) < p) emit("edge", node(i), node(j));
}

/// Synthetic points-to input over variables v1..vN and heap objects h1..hN:
/// alloc(vi,hi) for every i; a random assignment tree rooted at v1
/// (assign(v_parent, v_i), parent < i) so v1 reaches every variable; plus
/// n/4 extra random assignments that add sharing and cycles.
template <class Sink>
void pointsto(std::size_t n, std::uint64_t seed, Sink&& emit) {
  if (n == 0) throw std::invalid_argument("points-to generator needs n >= 1");
  std::mt19937_64 rng(seed);
  auto var = [](std::uint64_t i) { return "v" + std::to_string(i); };
  for (std::size_t i = 1; i <= n; ++i) emit("alloc", var(i), "h" + std::to_string(i));
  for (std::size_t i = 2; i <= n; ++i) emit("assign", var(1 + below(rng, i - 1)), var(i));
  if (n >= 2)
    for (std::size_t e = 0; e < n / 4; ++e) {
      const auto a = 1 + below(rng, n);
      auto b = 1 + below(rng, n - 1);
      if (b >= a) ++b;
      emit("assign", var(a), var(b));
    }
}

/// Sink that renders facts in program syntax.
struct TextSink {
  std::string& out;
  void operator()(std::string_view pred, std::string_view a, std::string_view b) const {
    out.append(pred).append("(").append(a).append(",").append(b).append(").\n");
  }
};

/// Sink that adds facts to a builder.
struct BuilderSink {
  ProgramBuilder& builder;
  void operator()(std::string_view pred, std::string_view a, std::string_view b) const { builder.fact(pred, {a, b}); }
};

struct PointsToSink {
  PointsToFacts& facts;
  void operator()(std::string_view pred, std::string_view a, std::string_view b) const {
    (pred == "alloc" ? facts.alloc : facts.assign).emplace_back(a, b);
  }
};

/// Right-recursive transitive closure, as rules only.
inline constexpr std::string_view kRightTcRules =
    ":- table reachr/2.\n"
    "reachr(X,Y) :- edge(X,Y).\n"
    "reachr(X,Y) :- edge(X,Z), reachr(Z,Y).\n";

/// Left-recursive transitive closure, as rules only.
inline constexpr std::string_view kLeftTcRules =
    ":- table reachl/2.\n"
    "reachl(X,Y) :- edge(X,Y).\n"
    "reachl(X,Y) :- reachl(X,Z), edge(Z,Y).\n";

/// Transitive-closure program (right or left recursive) over a generated graph.
template <class Generate>
Program tc_program(bool right_recursive, Generate&& generate) {
  ProgramBuilder b;
  const char* r = right_recursive ? "reachr" : "reachl";
  b.table(r, 2);
  b.clause({r, {{"X", true}, {"Y", true}}}, {{"edge", {{"X", true}, {"Y", true}}}});
  if (right_recursive)
    b.clause({r, {{"X", true}, {"Y", true}}},
             {{"edge", {{"X", true}, {"Z", true}}}, {r, {{"Z", true}, {"Y", true}}}});
  else
    b.clause({r, {{"X", true}, {"Y", true}}},
             {{r, {{"X", true}, {"Z", true}}}, {"edge", {{"Z", true}, {"Y", true}}}});
  generate(BuilderSink{b});
  return std::move(b).build();
}

}  // namespace ptab::gen
