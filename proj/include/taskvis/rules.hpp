#pragma once
// A small answer-set-style constraint language: ground facts and headless
// integrity constraints with default negation and variables.
//
//   fact       := atom "."
//   constraint := ":-" literal ("," literal)* "."
//   literal    := ["not"] atom
//   atom       := ident "(" term ("," term)* ")" | ident
//   term       := ident | Variable | "string" | integer
//
// `%` starts a comment. A constraint is violated by an atom set when some
// substitution makes every positive literal a member of the set and every
// negated literal a non-member. The anonymous variable `_` is allowed in
// negated literals, where `not p(X, _)` holds when no p(X, ...) atom exists.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "taskvis/error.hpp"

namespace taskvis::rules {

struct Term {
  enum class Kind { symbol, string, integer, variable };

  Kind kind = Kind::symbol;
  std::string text;
  std::int64_t integer = 0;

  static Term sym(std::string s) { return {Kind::symbol, std::move(s), 0}; }
  static Term var(std::string s) { return {Kind::variable, std::move(s), 0}; }
  static Term str(std::string s) { return {Kind::string, std::move(s), 0}; }
  static Term num(std::int64_t n) { return {Kind::integer, {}, n}; }

  bool is_variable() const { return kind == Kind::variable; }
  // `_` matches anything and never binds; under negation it reads as
  // "no matching atom exists".
  bool is_anonymous() const { return kind == Kind::variable && text == "_"; }

  auto operator<=>(const Term&) const = default;

  std::string to_text() const {
    switch (kind) {
      case Kind::integer: return std::to_string(integer);
      case Kind::string: {
        std::string out = "\"";
        for (char c : text) {
          if (c == '"' || c == '\\') out.push_back('\\');
          if (c == '\n') {
            out += "\\n";
            continue;
          }
          out.push_back(c);
        }
        return out + "\"";
      }
      default: return text;
    }
  }
};

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  auto operator<=>(const Atom& o) const {
    if (auto c = predicate <=> o.predicate; c != 0) return c;
    if (auto c = args.size() <=> o.args.size(); c != 0) return c;
    return args <=> o.args;
  }
  bool operator==(const Atom&) const = default;

  bool is_ground() const {
    return std::none_of(args.begin(), args.end(), [](const Term& t) { return t.is_variable(); });
  }

  std::string to_text() const {
    std::string out = predicate;
    if (args.empty()) return out;
    out += "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) out += ",";
      out += args[i].to_text();
    }
    return out + ")";
  }
};

// Convenience for building ground atoms: atom("channel", {"e1", "x"}).
inline Atom atom(std::string predicate, std::initializer_list<std::string> symbols) {
  Atom a{std::move(predicate), {}};
  for (const auto& s : symbols) a.args.push_back(Term::sym(s));
  return a;
}

struct Literal {
  Atom atom;
  bool negated = false;

  bool operator==(const Literal&) const = default;

  std::string to_text() const { return (negated ? "not " : "") + atom.to_text(); }
};

struct Origin {
  std::string source;
  std::size_t line = 0;
};

struct IntegrityConstraint {
  std::vector<Literal> body;
  Origin origin;

  // Structural identity ignores where the constraint came from.
  bool operator==(const IntegrityConstraint& o) const { return body == o.body; }

  std::string to_text() const {
    std::string out = ":- ";
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (i) out += ", ";
      out += body[i].to_text();
    }
    return out + ".";
  }
};

struct RuleSet {
  std::vector<Atom> facts;
  std::vector<IntegrityConstraint> constraints;

  bool operator==(const RuleSet&) const = default;

  bool empty() const { return facts.empty() && constraints.empty(); }

  RuleSet& append(const RuleSet& other) {
    facts.insert(facts.end(), other.facts.begin(), other.facts.end());
    constraints.insert(constraints.end(), other.constraints.begin(), other.constraints.end());
    return *this;
  }
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::string source, std::size_t line, std::size_t column,
             std::vector<std::string> expected)
      : Error(render(message, source, line, column, expected)),
        line_(line),
        column_(column),
        expected_(std::move(expected)) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  static std::string render(const std::string& message, const std::string& source, std::size_t line,
                            std::size_t column, const std::vector<std::string>& expected) {
    std::string out = source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message;
    if (!expected.empty()) {
      out += " (expected ";
      for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i) out += i + 1 == expected.size() ? " or " : ", ";
        out += expected[i];
      }
      out += ")";
    }
    return out;
  }

  std::size_t line_;
  std::size_t column_;
  std::vector<std::string> expected_;
};

class UnsafeVariable : public Error {
 public:
  UnsafeVariable(std::string variable, const Origin& where)
      : Error(where.source + ":" + std::to_string(where.line) + ": unsafe variable " + variable +
              " (it appears only under negation)"),
        variable_(std::move(variable)) {}

  const std::string& variable() const { return variable_; }

 private:
  std::string variable_;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

namespace detail {

struct Token {
  enum class Kind { ident, variable, string, integer, if_, lparen, rparen, comma, dot, lbrace, hash, other, end };
  Kind kind = Kind::end;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

inline std::string describe(const Token& t) {
  switch (t.kind) {
    case Token::Kind::ident:
    case Token::Kind::variable:
    case Token::Kind::integer: return "'" + t.text + "'";
    case Token::Kind::string: return "string";
    case Token::Kind::end: return "end of input";
    default: return "'" + t.text + "'";
  }
}

class Lexer {
 public:
  Lexer(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = column_;
      if (pos_ >= text_.size()) {
        t.kind = Token::Kind::end;
        out.push_back(t);
        return out;
      }
      const char c = text_[pos_];
      if (std::islower(static_cast<unsigned char>(c))) {
        t.kind = Token::Kind::ident;
        t.text = take_word();
      } else if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = Token::Kind::variable;
        t.text = take_word();
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '-' && pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
        t.kind = Token::Kind::integer;
        t.text.push_back(advance());
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) t.text.push_back(advance());
      } else if (c == '"') {
        t.kind = Token::Kind::string;
        t.text = take_string(t);
      } else if (c == ':' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
        t.kind = Token::Kind::if_;
        t.text = ":-";
        advance();
        advance();
      } else {
        t.text = std::string(1, advance());
        switch (c) {
          case '(': t.kind = Token::Kind::lparen; break;
          case ')': t.kind = Token::Kind::rparen; break;
          case ',': t.kind = Token::Kind::comma; break;
          case '.': t.kind = Token::Kind::dot; break;
          case '{': t.kind = Token::Kind::lbrace; break;
          case '#': t.kind = Token::Kind::hash; break;
          default: t.kind = Token::Kind::other; break;
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  char advance() {
    const char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  std::string take_word() {
    std::string w;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      w.push_back(advance());
    }
    return w;
  }

  std::string take_string(const Token& start) {
    advance();
    std::string s;
    while (true) {
      if (pos_ >= text_.size() || text_[pos_] == '\n') {
        throw ParseError("unterminated string", source_, start.line, start.column, {"'\"'"});
      }
      char c = advance();
      if (c == '"') return s;
      if (c == '\\' && pos_ < text_.size()) {
        c = advance();
        if (c == 'n') c = '\n';
      }
      s.push_back(c);
    }
  }

  std::string_view text_;
  std::string source_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::string source) : tokens_(std::move(tokens)), source_(std::move(source)) {}

  RuleSet run() {
    RuleSet out;
    while (peek().kind != Token::Kind::end) statement(out);
    return out;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const { return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)]; }
  const Token& next() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }

  [[noreturn]] void fail(const Token& at, const std::string& message, std::vector<std::string> expected = {}) const {
    throw ParseError(message, source_, at.line, at.column, std::move(expected));
  }

  [[noreturn]] void unexpected(const Token& at, std::vector<std::string> expected) const {
    fail(at, "unexpected " + describe(at), std::move(expected));
  }

  void expect(Token::Kind kind, const std::string& label) {
    if (peek().kind != kind) unexpected(peek(), {label});
    next();
  }

  void statement(RuleSet& out) {
    const Token& first = peek();
    switch (first.kind) {
      case Token::Kind::if_: {
        next();
        IntegrityConstraint c;
        c.origin = {source_, first.line};
        c.body.push_back(literal());
        while (peek().kind == Token::Kind::comma) {
          next();
          c.body.push_back(literal());
        }
        if (peek().kind != Token::Kind::dot) unexpected(peek(), {"','", "'.'"});
        next();
        check_safety(c);
        out.constraints.push_back(std::move(c));
        return;
      }
      case Token::Kind::ident: {
        if (first.text == "not") fail(first, "a fact cannot be negated", {"atom", "':-'"});
        Atom a = parse_atom();
        if (peek().kind == Token::Kind::if_) {
          fail(peek(), "rules with a head are not supported; write an integrity constraint ':- body.' instead");
        }
        if (peek().kind != Token::Kind::dot) unexpected(peek(), {"'('", "'.'"});
        next();
        for (const auto& t : a.args) {
          if (t.is_variable()) fail(first, "fact " + a.to_text() + " is not ground (variable " + t.text + ")");
        }
        out.facts.push_back(std::move(a));
        return;
      }
      case Token::Kind::lbrace:
        fail(first, "choice rules 'p { ... } q' are not supported; only facts and integrity constraints are");
      case Token::Kind::integer:
        if (peek(1).kind == Token::Kind::lbrace) {
          fail(first, "choice rules 'p { ... } q' are not supported; only facts and integrity constraints are");
        }
        unexpected(first, {"atom", "':-'"});
      case Token::Kind::hash: fail(first, "directives ('#...') are not supported");
      default: unexpected(first, {"atom", "':-'"});
    }
  }

  Literal literal() {
    Literal lit;
    if (peek().kind == Token::Kind::ident && peek().text == "not" && peek(1).kind == Token::Kind::ident) {
      next();
      lit.negated = true;
    }
    if (peek().kind != Token::Kind::ident) unexpected(peek(), {"atom", "'not'"});
    lit.atom = parse_atom();
    return lit;
  }

  Atom parse_atom() {
    const Token& name = next();
    Atom a{name.text, {}};
    if (peek().kind != Token::Kind::lparen) return a;
    next();
    a.args.push_back(term());
    while (peek().kind == Token::Kind::comma) {
      next();
      a.args.push_back(term());
    }
    if (peek().kind != Token::Kind::rparen) unexpected(peek(), {"','", "')'"});
    next();
    return a;
  }

  Term term() {
    const Token& t = next();
    switch (t.kind) {
      case Token::Kind::ident: return Term::sym(t.text);
      case Token::Kind::variable: return Term::var(t.text);
      case Token::Kind::string: return Term::str(t.text);
      case Token::Kind::integer: return Term::num(std::stoll(t.text));
      default: unexpected(t, {"constant", "variable", "string", "integer"});
    }
  }

  static void check_safety(const IntegrityConstraint& c) {
    std::set<std::string> bound;
    for (const auto& lit : c.body) {
      if (lit.negated) continue;
      for (const auto& t : lit.atom.args) {
        if (t.is_variable()) bound.insert(t.text);
      }
    }
    for (const auto& lit : c.body) {
      if (!lit.negated) continue;
      for (const auto& t : lit.atom.args) {
        if (t.is_variable() && !t.is_anonymous() && !bound.count(t.text)) throw UnsafeVariable(t.text, c.origin);
      }
    }
  }

  std::vector<Token> tokens_;
  std::string source_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline RuleSet parse_rules(std::string_view text, std::string source = "<rules>") {
  auto tokens = detail::Lexer(text, source).run();
  return detail::Parser(std::move(tokens), std::move(source)).run();
}

inline RuleSet load_rules_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open rule file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_rules(ss.str(), path);
}

// Canonical text: facts first, then constraints, one statement per line.
inline std::string format_ruleset(const RuleSet& rules) {
  std::string out;
  for (const auto& f : rules.facts) out += f.to_text() + ".\n";
  for (const auto& c : rules.constraints) out += c.to_text() + "\n";
  return out;
}

// Ground atoms, kept sorted and unique; atoms sharing a predicate are
// contiguous so lookups by predicate are a range scan.
class AtomSet {
 public:
  AtomSet() = default;
  AtomSet(std::initializer_list<Atom> atoms) : atoms_(atoms) { normalize(); }
  explicit AtomSet(std::vector<Atom> atoms) : atoms_(std::move(atoms)) { normalize(); }

  void insert(Atom a) {
    if (!a.is_ground()) throw EvaluationError("atom set member is not ground: " + a.to_text());
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), a);
    if (it == atoms_.end() || *it != a) atoms_.insert(it, std::move(a));
  }

  void merge(const AtomSet& other) {
    std::vector<Atom> merged;
    merged.reserve(atoms_.size() + other.atoms_.size());
    std::set_union(atoms_.begin(), atoms_.end(), other.atoms_.begin(), other.atoms_.end(),
                   std::back_inserter(merged));
    atoms_ = std::move(merged);
  }

  bool contains(const Atom& a) const { return std::binary_search(atoms_.begin(), atoms_.end(), a); }

  std::pair<std::vector<Atom>::const_iterator, std::vector<Atom>::const_iterator> with_predicate(
      const std::string& predicate, std::size_t arity) const {
    auto lo = std::lower_bound(atoms_.begin(), atoms_.end(), predicate, [&](const Atom& a, const std::string& p) {
      return a.predicate < p || (a.predicate == p && a.args.size() < arity);
    });
    auto hi = lo;
    while (hi != atoms_.end() && hi->predicate == predicate && hi->args.size() == arity) ++hi;
    return {lo, hi};
  }

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  auto begin() const { return atoms_.begin(); }
  auto end() const { return atoms_.end(); }

  bool operator==(const AtomSet&) const = default;

  std::string to_text() const {
    std::string out = "{";
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (i) out += ", ";
      out += atoms_[i].to_text();
    }
    return out + "}";
  }

 private:
  void normalize() {
    for (const auto& a : atoms_) {
      if (!a.is_ground()) throw EvaluationError("atom set member is not ground: " + a.to_text());
    }
    std::sort(atoms_.begin(), atoms_.end());
    atoms_.erase(std::unique(atoms_.begin(), atoms_.end()), atoms_.end());
  }

  std::vector<Atom> atoms_;
};

using Substitution = std::vector<std::pair<std::string, Term>>;

namespace detail {

inline const Term* lookup(const Substitution& theta, const std::string& var) {
  for (const auto& [name, value] : theta) {
    if (name == var) return &value;
  }
  return nullptr;
}

inline Atom substitute(const Atom& a, const Substitution& theta) {
  Atom out{a.predicate, {}};
  out.args.reserve(a.args.size());
  for (const auto& t : a.args) {
    const Term* bound = t.is_variable() ? lookup(theta, t.text) : nullptr;
    out.args.push_back(bound ? *bound : t);
  }
  return out;
}

// Extends theta so that pattern matches ground; on failure theta is restored.
inline bool unify(const Atom& pattern, const Atom& ground, Substitution& theta) {
  const std::size_t mark = theta.size();
  for (std::size_t i = 0; i < pattern.args.size(); ++i) {
    const Term& p = pattern.args[i];
    const Term& g = ground.args[i];
    if (p.is_anonymous()) continue;
    if (!p.is_variable()) {
      if (p != g) {
        theta.resize(mark);
        return false;
      }
      continue;
    }
    if (const Term* bound = lookup(theta, p.text)) {
      if (*bound != g) {
        theta.resize(mark);
        return false;
      }
    } else {
      theta.emplace_back(p.text, g);
    }
  }
  return true;
}

struct Search {
  const std::vector<const AtomSet*>& sources;
  std::vector<const Literal*> positives;
  std::vector<const Literal*> negatives;
  Substitution theta;

  bool member(const Atom& a) const {
    if (a.is_ground()) {
      return std::any_of(sources.begin(), sources.end(), [&](const AtomSet* s) { return s->contains(a); });
    }
    for (const AtomSet* src : sources) {
      auto [lo, hi] = src->with_predicate(a.predicate, a.args.size());
      for (auto it = lo; it != hi; ++it) {
        Substitution scratch;
        if (unify(a, *it, scratch)) return true;
      }
    }
    return false;
  }

  bool run(std::size_t depth) {
    if (depth == positives.size()) {
      for (const Literal* n : negatives) {
        if (member(substitute(n->atom, theta))) return false;
      }
      return true;
    }
    const Atom& pattern = positives[depth]->atom;
    for (const AtomSet* src : sources) {
      auto [lo, hi] = src->with_predicate(pattern.predicate, pattern.args.size());
      for (auto it = lo; it != hi; ++it) {
        const std::size_t mark = theta.size();
        if (!unify(pattern, *it, theta)) continue;
        if (run(depth + 1)) return true;
        theta.resize(mark);
      }
    }
    return false;
  }
};

inline bool violates_in(const std::vector<const AtomSet*>& sources, const IntegrityConstraint& c,
                        Substitution* witness) {
  Search s{sources, {}, {}, {}};
  for (const auto& lit : c.body) (lit.negated ? s.negatives : s.positives).push_back(&lit);
  // Ground positives first: they prune without branching.
  std::stable_partition(s.positives.begin(), s.positives.end(), [](const Literal* l) { return l->atom.is_ground(); });
  const bool hit = s.run(0);
  if (hit && witness) *witness = s.theta;
  return hit;
}

}  // namespace detail

// True iff some substitution satisfies the whole body. When `witness` is
// given it receives the satisfying substitution.
inline bool violates(const AtomSet& atoms, const IntegrityConstraint& c, Substitution* witness = nullptr) {
  const std::vector<const AtomSet*> sources{&atoms};
  return detail::violates_in(sources, c, witness);
}

// Evaluates a rule set against many atom sets; the rule set's facts are added
// to every atom set and predicate arities are checked for consistency.
class Checker {
 public:
  explicit Checker(const RuleSet& rules) : constraints_(rules.constraints), facts_(rules.facts) {
    for (const auto& f : rules.facts) note_arity(f, rule_arity_);
    for (const auto& c : rules.constraints) {
      for (const auto& lit : c.body) note_arity(lit.atom, rule_arity_);
    }
  }

  std::vector<IntegrityConstraint> violations(const AtomSet& atoms) const {
    for (const auto& a : atoms) {
      auto it = rule_arity_.find(a.predicate);
      if (it != rule_arity_.end() && it->second != a.args.size()) {
        throw EvaluationError("predicate " + a.predicate + " used with arity " + std::to_string(a.args.size()) +
                              " and " + std::to_string(it->second));
      }
    }
    const std::vector<const AtomSet*> sources{&atoms, &facts_};
    std::vector<IntegrityConstraint> out;
    for (const auto& c : constraints_) {
      if (detail::violates_in(sources, c, nullptr)) out.push_back(c);
    }
    return out;
  }

  bool admissible(const AtomSet& atoms) const {
    const std::vector<const AtomSet*> sources{&atoms, &facts_};
    return std::none_of(constraints_.begin(), constraints_.end(),
                        [&](const IntegrityConstraint& c) { return detail::violates_in(sources, c, nullptr); });
  }

 private:
  void note_arity(const Atom& a, std::map<std::string, std::size_t>& arity) {
    auto [it, inserted] = arity.emplace(a.predicate, a.args.size());
    if (!inserted && it->second != a.args.size()) {
      throw EvaluationError("predicate " + a.predicate + " used with arity " + std::to_string(a.args.size()) +
                            " and " + std::to_string(it->second));
    }
  }

  std::vector<IntegrityConstraint> constraints_;
  AtomSet facts_;
  std::map<std::string, std::size_t> rule_arity_;
};

// Every constraint of `rules` violated by `atoms` plus the rule set's facts.
inline std::vector<IntegrityConstraint> check(const AtomSet& atoms, const RuleSet& rules) {
  return Checker(rules).violations(atoms);
}

}  // namespace taskvis::rules
