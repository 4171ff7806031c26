#pragma once

// Definite Datalog: terms, atoms, clauses, the validated Program model with
// its first-argument fact index, and the text parser / printer.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ptab/error.hpp"

namespace ptab {

/// Interned constant. Ids are dense and assigned in first-occurrence order.
enum class ConstId : std::uint32_t {};
/// Interned predicate (name, arity).
enum class PredId : std::uint32_t {};

constexpr std::uint32_t index_of(ConstId c) noexcept { return static_cast<std::uint32_t>(c); }
constexpr std::uint32_t index_of(PredId p) noexcept { return static_cast<std::uint32_t>(p); }

inline constexpr ConstId kNoConst{std::numeric_limits<std::uint32_t>::max()};

using Tuple = std::vector<ConstId>;

class SymbolTable {
 public:
  ConstId intern(std::string_view text) {
    auto [it, inserted] = ids_.try_emplace(std::string(text), ConstId{static_cast<std::uint32_t>(texts_.size())});
    if (inserted) texts_.push_back(it->first);
    return it->second;
  }

  std::optional<ConstId> find(std::string_view text) const {
    auto it = ids_.find(std::string(text));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& text(ConstId c) const { return texts_.at(index_of(c)); }
  std::size_t size() const noexcept { return texts_.size(); }

 private:
  std::vector<std::string> texts_;
  std::unordered_map<std::string, ConstId> ids_;
};

struct Predicate {
  std::string name;
  std::uint32_t arity = 0;

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

struct Term {
  enum class Kind : std::uint8_t { Variable, Constant };

  Kind kind = Kind::Constant;
  // ConstId for constants; clause-local slot for variables.
  std::uint32_t id = 0;

  static Term constant(ConstId c) noexcept { return {Kind::Constant, index_of(c)}; }
  static Term variable(std::uint32_t slot) noexcept { return {Kind::Variable, slot}; }

  bool is_variable() const noexcept { return kind == Kind::Variable; }
  bool is_constant() const noexcept { return kind == Kind::Constant; }
  ConstId as_constant() const noexcept { return ConstId{id}; }
  std::uint32_t slot() const noexcept { return id; }

  friend bool operator==(const Term&, const Term&) = default;
};

struct Atom {
  PredId pred{};
  std::vector<Term> args;

  friend bool operator==(const Atom&, const Atom&) = default;
};

struct Clause {
  Atom head;
  std::vector<Atom> body;  // empty for facts
  std::vector<std::string> var_names;  // indexed by variable slot
  std::size_t line = 0;

  bool is_fact() const noexcept { return body.empty(); }
  std::size_t variable_count() const noexcept { return var_names.size(); }
};

/// Facts of one EDB predicate, deduplicated and grouped by first argument.
/// Rows within a group are ordered by their ids.
class Relation {
 public:
  class Rows {
   public:
    class iterator {
     public:
      using value_type = std::span<const ConstId>;
      using difference_type = std::ptrdiff_t;

      iterator() = default;
      iterator(const ConstId* p, std::uint32_t arity) : p_(p), arity_(arity) {}
      std::span<const ConstId> operator*() const { return {p_, arity_}; }
      iterator& operator++() {
        p_ += arity_;
        return *this;
      }
      iterator operator++(int) {
        auto tmp = *this;
        ++*this;
        return tmp;
      }
      friend bool operator==(const iterator& a, const iterator& b) { return a.p_ == b.p_; }

     private:
      const ConstId* p_ = nullptr;
      std::uint32_t arity_ = 1;
    };

    Rows(const ConstId* first, std::size_t count, std::uint32_t arity)
        : first_(first), count_(count), arity_(arity) {}

    iterator begin() const { return {first_, arity_}; }
    iterator end() const { return {first_ + count_ * arity_, arity_}; }
    std::size_t size() const noexcept { return count_; }
    bool empty() const noexcept { return count_ == 0; }
    std::span<const ConstId> operator[](std::size_t i) const { return {first_ + i * arity_, arity_}; }

   private:
    const ConstId* first_;
    std::size_t count_;
    std::uint32_t arity_;
  };

  Relation() = default;

  // `rows` is arity-strided; duplicates are removed. Ids must be < universe.
  Relation(std::uint32_t arity, std::size_t universe, std::vector<ConstId> rows) : arity_(arity) {
    const std::size_t n = arity == 0 ? 0 : rows.size() / arity;
    std::vector<std::uint32_t> counts(universe + 1, 0);
    for (std::size_t r = 0; r < n; ++r) ++counts[index_of(rows[r * arity]) + 1];
    for (std::size_t k = 0; k < universe; ++k) counts[k + 1] += counts[k];
    std::vector<std::uint32_t> order(n);
    {
      auto next = counts;
      for (std::size_t r = 0; r < n; ++r) order[next[index_of(rows[r * arity])]++] = static_cast<std::uint32_t>(r);
    }
    auto less = [&](std::uint32_t a, std::uint32_t b) {
      return std::lexicographical_compare(rows.begin() + a * arity, rows.begin() + (a + 1) * arity,
                                          rows.begin() + b * arity, rows.begin() + (b + 1) * arity);
    };
    auto same = [&](std::uint32_t a, std::uint32_t b) {
      return std::equal(rows.begin() + a * arity, rows.begin() + (a + 1) * arity, rows.begin() + b * arity);
    };
    offsets_.assign(universe + 1, 0);
    data_.reserve(rows.size());
    std::size_t out = 0;
    for (std::size_t k = 0; k < universe; ++k) {
      offsets_[k] = static_cast<std::uint32_t>(out);
      auto first = order.begin() + counts[k];
      auto last = order.begin() + counts[k + 1];
      std::sort(first, last, less);
      last = std::unique(first, last, same);
      for (auto it = first; it != last; ++it) {
        data_.insert(data_.end(), rows.begin() + *it * arity, rows.begin() + (*it + 1) * arity);
        ++out;
      }
    }
    offsets_[universe] = static_cast<std::uint32_t>(out);
  }

  std::uint32_t arity() const noexcept { return arity_; }
  std::size_t size() const noexcept { return offsets_.empty() ? 0 : offsets_.back(); }
  std::span<const ConstId> row(std::size_t i) const { return {data_.data() + i * arity_, arity_}; }

  /// Rows whose first argument is `k`.
  Rows lookup(ConstId k) const {
    const auto i = index_of(k);
    if (i + 1 >= offsets_.size()) return {data_.data(), 0, arity_};
    return {data_.data() + std::size_t{offsets_[i]} * arity_, std::size_t{offsets_[i + 1] - offsets_[i]}, arity_};
  }

  Rows all() const { return {data_.data(), size(), arity_}; }

 private:
  std::uint32_t arity_ = 0;
  std::vector<ConstId> data_;
  std::vector<std::uint32_t> offsets_;
};

class ProgramBuilder;

/// Immutable, validated program. Safe for concurrent reads.
class Program {
 public:
  const SymbolTable& symbols() const noexcept { return symbols_; }
  std::size_t constant_count() const noexcept { return symbols_.size(); }

  std::span<const Predicate> predicates() const noexcept { return predicates_; }
  const Predicate& predicate(PredId p) const { return predicates_.at(index_of(p)); }
  std::optional<PredId> find_predicate(std::string_view name) const {
    auto it = pred_ids_.find(std::string(name));
    if (it == pred_ids_.end()) return std::nullopt;
    return it->second;
  }

  /// Rules, plus facts of predicates that also have rules, in source order.
  std::span<const Clause> clauses() const noexcept { return clauses_; }
  std::span<const std::uint32_t> clauses_for(PredId p) const { return clauses_by_pred_.at(index_of(p)); }

  bool is_tabled(PredId p) const { return tabled_.at(index_of(p)); }
  bool is_edb(PredId p) const { return edb_.at(index_of(p)); }
  bool is_idb(PredId p) const { return !is_edb(p); }

  /// Fact index of an EDB predicate.
  const Relation& relation(PredId p) const {
    if (!is_edb(p)) throw ValidationError("predicate " + display(p) + " is not extensional");
    return relations_[index_of(p)];
  }

  std::size_t fact_count() const noexcept {
    std::size_t n = 0;
    for (const auto& r : relations_) n += r.size();
    return n;
  }

  std::string display(PredId p) const {
    const auto& pr = predicate(p);
    return pr.name + "/" + std::to_string(pr.arity);
  }

 private:
  friend class ProgramBuilder;

  SymbolTable symbols_;
  std::vector<Predicate> predicates_;
  std::unordered_map<std::string, PredId> pred_ids_;
  std::vector<bool> tabled_;
  std::vector<bool> edb_;
  std::vector<Relation> relations_;
  std::vector<Clause> clauses_;
  std::vector<std::vector<std::uint32_t>> clauses_by_pred_;
};

/// One argument as written in source: constant text or variable name.
struct RawTerm {
  std::string text;
  bool variable = false;
};

struct RawAtom {
  std::string name;
  std::vector<RawTerm> args;
};

namespace detail {

inline bool is_variable_name(std::string_view s) {
  return !s.empty() && (std::isupper(static_cast<unsigned char>(s[0])) || s[0] == '_');
}

inline std::string render(const RawAtom& a) {
  std::string out = a.name + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) out += ",";
    out += a.args[i].text;
  }
  return out + ")";
}

inline std::string render(const RawAtom& head, const std::vector<RawAtom>& body) {
  std::string out = render(head);
  for (std::size_t i = 0; i < body.size(); ++i) out += (i ? ", " : " :- ") + render(body[i]);
  return out + ".";
}

}  // namespace detail

/// Accumulates directives, facts and rules, then validates them into a Program.
class ProgramBuilder {
 public:
  void table(std::string_view name, std::uint32_t arity, std::size_t line = 0) {
    const auto p = declare(name, arity, [&] { return ":- table " + std::string(name) + "/" + std::to_string(arity) + "."; }, line);
    info_[index_of(p)].tabled = true;
  }

  /// Ground fact from constant texts.
  void fact(std::string_view name, std::span<const std::string_view> args, std::size_t line = 0) {
    const auto p = declare(name, static_cast<std::uint32_t>(args.size()), [&] {
      RawAtom a{std::string(name), {}};
      for (auto s : args) a.args.push_back({std::string(s), detail::is_variable_name(s)});
      return detail::render(a, {});
    }, line);
    auto& rows = info_[index_of(p)].fact_rows;
    for (auto s : args) rows.push_back(prog_.symbols_.intern(s));
  }

  void fact(std::string_view name, std::initializer_list<std::string_view> args, std::size_t line = 0) {
    fact(name, std::span<const std::string_view>(args.begin(), args.size()), line);
  }

  /// Fact or rule from source form. Validates safety and groundness.
  void clause(const RawAtom& head, const std::vector<RawAtom>& body, std::size_t line = 0) {
    auto context = [&] { return detail::render(head, body); };
    if (body.empty()) {
      for (const auto& t : head.args)
        if (t.variable) throw ValidationError(where(line) + "non-ground fact: " + context());
      std::vector<std::string_view> texts;
      texts.reserve(head.args.size());
      for (const auto& t : head.args) texts.emplace_back(t.text);
      fact(head.name, texts, line);
      return;
    }

    Clause c;
    c.line = line;
    std::unordered_map<std::string, std::uint32_t> slots;
    auto convert = [&](const RawAtom& raw) {
      Atom a;
      a.pred = declare(raw.name, static_cast<std::uint32_t>(raw.args.size()), context, line);
      for (const auto& t : raw.args) {
        if (!t.variable) {
          a.args.push_back(Term::constant(prog_.symbols_.intern(t.text)));
        } else if (t.text == "_") {
          a.args.push_back(Term::variable(static_cast<std::uint32_t>(c.var_names.size())));
          c.var_names.push_back("_");
        } else {
          auto [it, inserted] = slots.try_emplace(t.text, static_cast<std::uint32_t>(c.var_names.size()));
          if (inserted) c.var_names.push_back(t.text);
          a.args.push_back(Term::variable(it->second));
        }
      }
      return a;
    };
    c.head = convert(head);
    for (const auto& b : body) c.body.push_back(convert(b));

    std::vector<bool> in_body(c.var_names.size(), false);
    for (const auto& a : c.body)
      for (const auto& t : a.args)
        if (t.is_variable()) in_body[t.slot()] = true;
    for (const auto& t : c.head.args)
      if (t.is_variable() && !in_body[t.slot()])
        throw ValidationError(where(line) + "unsafe variable " + c.var_names[t.slot()] + " in clause: " + context());

    info_[index_of(c.head.pred)].has_rules = true;
    for (const auto& a : c.body) info_[index_of(a.pred)].used_in_body = true;
    prog_.clauses_.push_back(std::move(c));
  }

  Program build() && {
    const std::size_t npred = prog_.predicates_.size();
    const std::size_t universe = prog_.symbols_.size();
    prog_.tabled_.assign(npred, false);
    prog_.edb_.assign(npred, false);
    prog_.relations_.resize(npred);
    for (std::size_t i = 0; i < npred; ++i) {
      auto& info = info_[i];
      prog_.tabled_[i] = info.tabled;
      // Predicates with no rules are extensional; body-only ones get an empty
      // relation. A tabled predicate with neither rules nor facts stays intensional.
      const bool edb = !info.has_rules && !(info.tabled && info.fact_rows.empty());
      prog_.edb_[i] = edb;
      const auto arity = prog_.predicates_[i].arity;
      if (edb) {
        prog_.relations_[i] = Relation(arity, universe, std::move(info.fact_rows));
      } else {
        std::unordered_set<std::string> seen;
        for (std::size_t r = 0; r * arity < info.fact_rows.size(); ++r) {
          Clause c;
          c.head.pred = PredId{static_cast<std::uint32_t>(i)};
          std::string key;
          for (std::uint32_t k = 0; k < arity; ++k) {
            const auto id = info.fact_rows[r * arity + k];
            c.head.args.push_back(Term::constant(id));
            key += std::to_string(index_of(id)) + ",";
          }
          if (seen.insert(key).second) prog_.clauses_.push_back(std::move(c));
        }
      }
    }
    prog_.clauses_by_pred_.assign(npred, {});
    for (std::size_t i = 0; i < prog_.clauses_.size(); ++i)
      prog_.clauses_by_pred_[index_of(prog_.clauses_[i].head.pred)].push_back(static_cast<std::uint32_t>(i));
    return std::move(prog_);
  }

 private:
  struct PredInfo {
    bool tabled = false;
    bool has_rules = false;
    bool used_in_body = false;
    std::vector<ConstId> fact_rows;
  };

  static std::string where(std::size_t line) { return line ? "line " + std::to_string(line) + ": " : std::string(); }

  template <class Context>
  PredId declare(std::string_view name, std::uint32_t arity, Context&& context, std::size_t line) {
    if (arity == 0) throw ValidationError(where(line) + "predicate " + std::string(name) + " must have arity >= 1");
    auto [it, inserted] = prog_.pred_ids_.try_emplace(std::string(name), PredId{static_cast<std::uint32_t>(prog_.predicates_.size())});
    if (inserted) {
      prog_.predicates_.push_back({std::string(name), arity});
      info_.emplace_back();
    } else if (prog_.predicates_[index_of(it->second)].arity != arity) {
      const auto& p = prog_.predicates_[index_of(it->second)];
      throw ValidationError(where(line) + "arity conflict for " + p.name + ": declared /" + std::to_string(p.arity) +
                            ", used /" + std::to_string(arity) + " in: " + context());
    }
    return it->second;
  }

  Program prog_;
  std::vector<PredInfo> info_;
};

/// A query atom. Arguments are constants (bound) or distinct variables (free).
struct Query {
  Atom atom;
  std::vector<std::string> var_names;
  // False when a bound constant never occurs in the program; the answer set is then empty.
  bool satisfiable = true;

  std::size_t arity() const noexcept { return atom.args.size(); }
  bool is_bound(std::size_t i) const { return atom.args.at(i).is_constant(); }
  std::vector<bool> binding_pattern() const {
    std::vector<bool> out;
    for (const auto& t : atom.args) out.push_back(t.is_constant());
    return out;
  }
};

namespace detail {

class Lexer {
 public:
  enum class Tok { Name, Variable, Integer, LParen, RParen, Comma, Dot, Neck, Query, Slash, End };

  struct Token {
    Tok kind;
    std::string_view text;
    std::size_t line;
    std::size_t column;
  };

  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const noexcept { return cur_; }

  Token take() {
    Token t = cur_;
    advance();
    return t;
  }

  Token expect(Tok kind, const char* what) {
    if (cur_.kind != kind) fail(cur_, std::string("expected ") + what);
    return take();
  }

  [[noreturn]] static void fail(const Token& at, const std::string& msg) {
    std::string found = at.kind == Tok::End ? "end of input" : "'" + std::string(at.text) + "'";
    throw ParseError(at.line, at.column, msg + ", found " + found);
  }

 private:
  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void advance() {
    for (;;) {
      while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) bump();
      if (pos_ < src_.size() && src_[pos_] == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
        continue;
      }
      break;
    }
    cur_.line = line_;
    cur_.column = col_;
    if (pos_ >= src_.size()) {
      cur_.kind = Tok::End;
      cur_.text = {};
      return;
    }
    const std::size_t start = pos_;
    const char c = src_[pos_];
    auto single = [&](Tok k) {
      bump();
      cur_.kind = k;
      cur_.text = src_.substr(start, 1);
    };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() && ident_char(src_[pos_])) bump();
      cur_.kind = (std::isupper(static_cast<unsigned char>(c)) || c == '_') ? Tok::Variable : Tok::Name;
      cur_.text = src_.substr(start, pos_ - start);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) bump();
      if (pos_ < src_.size() && ident_char(src_[pos_]))
        throw ParseError(line_, col_, "malformed integer literal");
      cur_.kind = Tok::Integer;
      cur_.text = src_.substr(start, pos_ - start);
    } else if (c == '(') {
      single(Tok::LParen);
    } else if (c == ')') {
      single(Tok::RParen);
    } else if (c == ',') {
      single(Tok::Comma);
    } else if (c == '.') {
      single(Tok::Dot);
    } else if (c == '/') {
      single(Tok::Slash);
    } else if (c == ':' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '-') {
      bump();
      bump();
      cur_.kind = Tok::Neck;
      cur_.text = src_.substr(start, 2);
    } else if (c == '?' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '-') {
      bump();
      bump();
      cur_.kind = Tok::Query;
      cur_.text = src_.substr(start, 2);
    } else {
      throw ParseError(line_, col_, std::string("unexpected character '") + c + "'");
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
  Token cur_{Tok::End, {}, 1, 1};
};

inline RawAtom parse_atom(Lexer& lex) {
  using Tok = Lexer::Tok;
  RawAtom a;
  a.name = std::string(lex.expect(Tok::Name, "predicate name").text);
  lex.expect(Tok::LParen, "'('");
  for (;;) {
    const auto& t = lex.peek();
    if (t.kind == Tok::Variable) {
      a.args.push_back({std::string(t.text), true});
    } else if (t.kind == Tok::Name || t.kind == Tok::Integer) {
      a.args.push_back({std::string(t.text), false});
    } else {
      Lexer::fail(t, "expected term");
    }
    lex.take();
    if (lex.peek().kind == Tok::Comma) {
      lex.take();
      continue;
    }
    lex.expect(Tok::RParen, "',' or ')'");
    return a;
  }
}

}  // namespace detail

/// Parses and validates program text. Throws ParseError or ValidationError.
inline Program parse_program(std::string_view text) {
  using detail::Lexer;
  using Tok = Lexer::Tok;
  Lexer lex(text);
  ProgramBuilder builder;
  while (lex.peek().kind != Tok::End) {
    if (lex.peek().kind == Tok::Neck) {
      const auto start = lex.take();
      const auto kw = lex.expect(Tok::Name, "'table'");
      if (kw.text != "table") Lexer::fail(kw, "expected 'table'");
      // Both `:- table p/2.` and `:- table(p/2).` are accepted.
      const bool paren = lex.peek().kind == Tok::LParen;
      if (paren) lex.take();
      const auto name = lex.expect(Tok::Name, "predicate name");
      lex.expect(Tok::Slash, "'/'");
      const auto arity = lex.expect(Tok::Integer, "arity");
      if (paren) lex.expect(Tok::RParen, "')'");
      lex.expect(Tok::Dot, "'.'");
      std::uint32_t n = 0;
      try {
        n = static_cast<std::uint32_t>(std::stoul(std::string(arity.text)));
      } catch (const std::exception&) {
        throw ParseError(arity.line, arity.column, "arity out of range");
      }
      builder.table(name.text, n, start.line);
      continue;
    }
    const auto line = lex.peek().line;
    RawAtom head = detail::parse_atom(lex);
    std::vector<RawAtom> body;
    if (lex.peek().kind == Tok::Neck) {
      lex.take();
      body.push_back(detail::parse_atom(lex));
      while (lex.peek().kind == Tok::Comma) {
        lex.take();
        body.push_back(detail::parse_atom(lex));
      }
    }
    lex.expect(Tok::Dot, "'.'");
    builder.clause(head, body, line);
  }
  return std::move(builder).build();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Program load_program(const std::string& path) { return parse_program(read_file(path)); }

/// Parses `atom`, `atom.` or `?- atom.` against a loaded program.
inline Query parse_query(const Program& program, std::string_view text) {
  using detail::Lexer;
  using Tok = Lexer::Tok;
  Lexer lex(text);
  if (lex.peek().kind == Tok::Query) lex.take();
  RawAtom raw = detail::parse_atom(lex);
  if (lex.peek().kind == Tok::Dot) lex.take();
  if (lex.peek().kind != Tok::End) Lexer::fail(lex.peek(), "expected end of query");

  const auto pred = program.find_predicate(raw.name);
  if (!pred) throw ValidationError("unknown predicate in query: " + raw.name);
  const auto& p = program.predicate(*pred);
  if (p.arity != raw.args.size())
    throw ValidationError("arity mismatch in query: " + p.name + "/" + std::to_string(p.arity) + " called with " +
                          std::to_string(raw.args.size()) + " arguments");

  Query q;
  q.atom.pred = *pred;
  for (const auto& t : raw.args) {
    if (t.variable) {
      if (t.text != "_" && std::find(q.var_names.begin(), q.var_names.end(), t.text) != q.var_names.end())
        throw ValidationError("query variables must be distinct: " + t.text + " repeated");
      q.atom.args.push_back(Term::variable(static_cast<std::uint32_t>(q.var_names.size())));
      q.var_names.push_back(t.text);
    } else if (auto id = program.symbols().find(t.text)) {
      q.atom.args.push_back(Term::constant(*id));
    } else {
      q.atom.args.push_back(Term::constant(kNoConst));
      q.satisfiable = false;
    }
  }
  return q;
}

// ---------------------------------------------------------------------------
// Printing

inline std::string to_string(const Program& prog, const Atom& a, std::span<const std::string> var_names = {}) {
  std::string out = prog.predicate(a.pred).name + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) out += ",";
    const auto& t = a.args[i];
    if (t.is_variable()) {
      out += t.slot() < var_names.size() ? var_names[t.slot()] : "_V" + std::to_string(t.slot());
    } else if (t.as_constant() == kNoConst) {
      out += "?";
    } else {
      out += prog.symbols().text(t.as_constant());
    }
  }
  return out + ")";
}

inline std::string to_string(const Program& prog, const Clause& c) {
  std::string out = to_string(prog, c.head, c.var_names);
  for (std::size_t i = 0; i < c.body.size(); ++i) out += (i ? ", " : " :- ") + to_string(prog, c.body[i], c.var_names);
  return out + ".";
}

/// Renders a ground tuple of `pred` as `name(c1,...,cn)`.
inline std::string to_string(const Program& prog, PredId pred, std::span<const ConstId> tuple) {
  std::string out = prog.predicate(pred).name + "(";
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    if (i) out += ",";
    out += prog.symbols().text(tuple[i]);
  }
  return out + ")";
}

/// Program text that re-parses to an equivalent program.
inline std::string print_program(const Program& prog) {
  std::string out;
  for (std::uint32_t i = 0; i < prog.predicates().size(); ++i) {
    const PredId p{i};
    if (prog.is_tabled(p)) out += ":- table " + prog.display(p) + ".\n";
  }
  for (std::uint32_t i = 0; i < prog.predicates().size(); ++i) {
    const PredId p{i};
    if (!prog.is_edb(p)) continue;
    for (auto row : prog.relation(p).all()) out += to_string(prog, p, row) + ".\n";
  }
  for (const auto& c : prog.clauses()) out += to_string(prog, c) + "\n";
  return out;
}

/// Structural equality up to interning order: same predicates, tabling
/// directives, fact sets and clause sequence.
inline bool equivalent(const Program& a, const Program& b) {
  auto preds = [](const Program& p) {
    std::vector<std::string> out;
    for (std::uint32_t i = 0; i < p.predicates().size(); ++i) {
      const PredId id{i};
      out.push_back(p.display(id) + (p.is_tabled(id) ? " tabled" : "") + (p.is_edb(id) ? " edb" : " idb"));
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  auto facts = [](const Program& p) {
    std::vector<std::string> out;
    for (std::uint32_t i = 0; i < p.predicates().size(); ++i) {
      const PredId id{i};
      if (!p.is_edb(id)) continue;
      for (auto row : p.relation(id).all()) out.push_back(to_string(p, id, row));
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  auto clauses = [](const Program& p) {
    std::vector<std::string> out;
    for (const auto& c : p.clauses()) out.push_back(to_string(p, c));
    return out;
  };
  return preds(a) == preds(b) && facts(a) == facts(b) && clauses(a) == clauses(b);
}

}  // namespace ptab
