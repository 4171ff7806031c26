#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "ptab/lang.hpp"

using namespace ptab;

namespace {

constexpr const char* kProgram1 =
    ":- table reachr/2.\n"
    "reachr(X,Y) :- edge(X,Y).\n"
    "reachr(X,Y) :- edge(X,Z), reachr(Z,Y).\n";

std::set<std::string> rendered(const Program& p, PredId pred, Relation::Rows rows) {
  std::set<std::string> out;
  for (auto r : rows) out.insert(to_string(p, pred, r));
  return out;
}

struct Generated {
  std::string text;
  // predicate name -> ground facts, as rendered text, for extensional predicates
  std::map<std::string, std::vector<std::vector<std::string>>> facts;
};

// Random valid program: up to five predicates of arity 1..3, facts over a
// small constant pool (symbols and integers), safe rules, some directives.
Generated random_program(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  const std::vector<std::string> consts{"a", "b", "c0", "d_1", "0", "17", "e"};
  const std::vector<std::string> vars{"X", "Y", "Z", "W", "_Tmp"};
  const std::size_t npred = 2 + pick(4);
  std::vector<std::size_t> arity(npred);
  for (auto& a : arity) a = 1 + pick(3);
  auto name = [](std::size_t i) { return "p" + std::to_string(i); };

  // The first half are fact-only; the rest get rules.
  const std::size_t nedb = (npred + 1) / 2;
  Generated g;
  std::string& t = g.text;
  if (rng() % 2) t += "% generated\n";
  for (std::size_t i = nedb; i < npred; ++i)
    if (rng() % 2) t += ":- table " + name(i) + "/" + std::to_string(arity[i]) + ".\n";
  for (std::size_t f = 0, nf = 3 + pick(12); f < nf; ++f) {
    const auto p = pick(nedb);
    std::vector<std::string> args;
    for (std::size_t k = 0; k < arity[p]; ++k) args.push_back(consts[pick(consts.size())]);
    std::string s = name(p) + "(";
    for (std::size_t k = 0; k < args.size(); ++k) s += (k ? "," : "") + args[k];
    t += s + ").\n";
    g.facts[name(p)].push_back(args);
  }
  for (std::size_t i = nedb; i < npred; ++i) {
    for (std::size_t r = 0, nr = 1 + pick(3); r < nr; ++r) {
      std::vector<std::string> seen;
      std::string body;
      for (std::size_t b = 0, nb = 1 + pick(3); b < nb; ++b) {
        const auto q = pick(npred);
        body += std::string(b ? ", " : "") + name(q) + "(";
        for (std::size_t k = 0; k < arity[q]; ++k) {
          std::string term;
          if (rng() % 4 == 0) {
            term = consts[pick(consts.size())];
          } else if (rng() % 8 == 0) {
            term = "_";
          } else {
            term = vars[pick(vars.size())];
            seen.push_back(term);
          }
          body += (k ? "," : "") + term;
        }
        body += ")";
      }
      std::string head = name(i) + "(";
      for (std::size_t k = 0; k < arity[i]; ++k) {
        const std::string term = seen.empty() || rng() % 5 == 0 ? consts[pick(consts.size())] : seen[pick(seen.size())];
        head += (k ? "," : "") + term;
      }
      t += head + ") :- " + body + ".\n";
    }
  }
  return g;
}

}  // namespace

TEST(Parse, SingleFact) {
  const auto p = parse_program("edge(a,b).");
  EXPECT_EQ(p.fact_count(), 1u);
  const auto edge = p.find_predicate("edge");
  ASSERT_TRUE(edge);
  EXPECT_TRUE(p.is_edb(*edge));
  EXPECT_EQ(p.predicate(*edge).arity, 2u);
  EXPECT_TRUE(p.clauses().empty());
}

TEST(Parse, Program1) {
  const auto p = parse_program(kProgram1);
  EXPECT_EQ(p.clauses().size(), 2u);
  const auto r = p.find_predicate("reachr");
  ASSERT_TRUE(r);
  EXPECT_TRUE(p.is_tabled(*r));
  EXPECT_TRUE(p.is_idb(*r));
  EXPECT_EQ(p.display(*r), "reachr/2");
  std::size_t tabled = 0;
  for (std::uint32_t i = 0; i < p.predicates().size(); ++i) tabled += p.is_tabled(PredId{i});
  EXPECT_EQ(tabled, 1u);
  // edge/2 only appears in bodies: an extensional predicate with no facts.
  const auto e = p.find_predicate("edge");
  ASSERT_TRUE(e);
  EXPECT_TRUE(p.is_edb(*e));
  EXPECT_EQ(p.relation(*e).size(), 0u);
}

TEST(Parse, NonGroundFactRejected) { EXPECT_THROW(parse_program("p(X)."), ValidationError); }

TEST(Parse, UnsafeVariableRejected) {
  try {
    parse_program("q(a).\np(X,Y) :- q(X).\n");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("Y"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(Parse, ArityConflictRejected) {
  EXPECT_THROW(parse_program("p(a).\np(a,b).\n"), ValidationError);
  EXPECT_THROW(parse_program(":- table p/1.\np(X) :- q(X,Y), q(Y).\n"), ValidationError);
}

TEST(Parse, SyntaxErrorsCarryPosition) {
  try {
    parse_program("edge(a,b).\nedge(a b).\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 8u);
  }
  EXPECT_THROW(parse_program("edge(a,b)"), ParseError);
  EXPECT_THROW(parse_program("p()."), ParseError);
  EXPECT_THROW(parse_program(":- tabled p/2."), ParseError);
}

TEST(Parse, CommentsAndDirectiveForms) {
  const auto p = parse_program(
      "% header\n"
      ":- table(r/2).   % trailing\n"
      "r(X,Y) :- e(X,Y).\n"
      "e(1, 2). e(foo_bar, 3).\n");
  const auto r = p.find_predicate("r");
  ASSERT_TRUE(r);
  EXPECT_TRUE(p.is_tabled(*r));
  EXPECT_EQ(p.fact_count(), 2u);
}

TEST(Parse, IntegersAndSymbolsShareIdSpace) {
  const auto p = parse_program("e(1,a). e(a,1).");
  const auto one = p.symbols().find("1");
  const auto a = p.symbols().find("a");
  ASSERT_TRUE(one && a);
  EXPECT_NE(*one, *a);
  EXPECT_EQ(p.constant_count(), 2u);
  // Interning order is first occurrence.
  EXPECT_EQ(index_of(*one), 0u);
  EXPECT_EQ(index_of(*a), 1u);
}

TEST(Parse, IdbFactsBecomeClauses) {
  const auto p = parse_program("p(a). p(a). p(X) :- q(X). q(b).");
  const auto pp = p.find_predicate("p");
  ASSERT_TRUE(pp);
  EXPECT_TRUE(p.is_idb(*pp));
  EXPECT_EQ(p.clauses_for(*pp).size(), 2u);  // the rule and one deduplicated fact
}

TEST(Parse, DuplicateFactsCollapse) {
  const auto p = parse_program("e(a,b). e(a,b). e(a,c).");
  EXPECT_EQ(p.fact_count(), 2u);
}

TEST(Query, BoundFreePattern) {
  const auto p = parse_program(std::string(kProgram1) + "edge(a,b).\n");
  const auto q = parse_query(p, "reachr(a,Y)");
  EXPECT_EQ(q.binding_pattern(), (std::vector<bool>{true, false}));
  EXPECT_TRUE(q.satisfiable);
  const auto q2 = parse_query(p, "edge(X,Y)");
  EXPECT_EQ(q2.binding_pattern(), (std::vector<bool>{false, false}));
  const auto q3 = parse_query(p, "?- reachr(a,Y).");
  EXPECT_EQ(q3.binding_pattern(), (std::vector<bool>{true, false}));
}

TEST(Query, Errors) {
  const auto p = parse_program(std::string(kProgram1) + "edge(a,b).\n");
  EXPECT_THROW(parse_query(p, "reachr(a,b,c)"), ValidationError);
  EXPECT_THROW(parse_query(p, "nope(a,Y)"), ValidationError);
  EXPECT_THROW(parse_query(p, "reachr(X,X)"), ValidationError);
  EXPECT_THROW(parse_query(p, "reachr(a,"), ParseError);
  EXPECT_THROW(parse_query(p, "reachr(a,Y) extra"), ParseError);
}

TEST(Query, UnknownConstantIsUnsatisfiable) {
  const auto p = parse_program(std::string(kProgram1) + "edge(a,b).\n");
  EXPECT_FALSE(parse_query(p, "reachr(zzz,Y)").satisfiable);
}

TEST(Properties, RoundTrip) {
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    const auto g = random_program(seed);
    const Program p = parse_program(g.text);
    const std::string printed = print_program(p);
    const Program again = parse_program(printed);
    ASSERT_TRUE(equivalent(p, again)) << "seed " << seed << "\n" << g.text << "---\n" << printed;
    ASSERT_TRUE(equivalent(again, parse_program(print_program(again)))) << "seed " << seed;
  }
}

TEST(Properties, InterningIsInjective) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Program p = parse_program(random_program(seed).text);
    const auto& syms = p.symbols();
    std::set<std::string> texts;
    for (std::uint32_t i = 0; i < syms.size(); ++i) {
      const ConstId c{i};
      ASSERT_TRUE(texts.insert(syms.text(c)).second) << "duplicate text " << syms.text(c);
      ASSERT_EQ(syms.find(syms.text(c)), c);
    }
  }
}

TEST(Properties, IndexMatchesLinearScan) {
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    const auto g = random_program(seed);
    const Program p = parse_program(g.text);
    for (const auto& [name, rows] : g.facts) {
      const auto pred = p.find_predicate(name);
      ASSERT_TRUE(pred);
      if (!p.is_edb(*pred)) continue;
      const auto& rel = p.relation(*pred);
      std::set<std::vector<std::string>> unique(rows.begin(), rows.end());
      ASSERT_EQ(rel.size(), unique.size());
      for (std::uint32_t k = 0; k < p.constant_count(); ++k) {
        const ConstId c{k};
        std::set<std::string> expect;
        for (const auto& r : unique)
          if (r[0] == p.symbols().text(c)) {
            std::string s = name + "(";
            for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + r[i];
            expect.insert(s + ")");
          }
        ASSERT_EQ(rendered(p, *pred, rel.lookup(c)), expect) << "seed " << seed << " key " << p.symbols().text(c);
        for (auto row : rel.lookup(c)) ASSERT_EQ(row[0], c);
      }
    }
  }
}
