#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fluentkb/error.hpp"
#include "fluentkb/hash.hpp"
#include "fluentkb/rdf_io.hpp"
#include "fluentkb/store.hpp"
#include "fluentkb/temporal.hpp"
#include "fluentkb/term.hpp"
#include "fluentkb/utf8.hpp"
#include "fluentkb/vocab.hpp"

namespace fluentkb::rules {

using temporal::Instant;
using temporal::Interval;

struct VarRef {
  std::size_t index;
  friend bool operator==(const VarRef&, const VarRef&) = default;
};

/// A rule position: a variable or a constant term.
using Slot = std::variant<VarRef, Term>;

struct TriplePattern {
  Slot subject;
  Slot predicate;
  Slot object;
};

enum class CompareOp { lt, le, eq, ne, ge, gt };

inline const char* to_string(CompareOp op) {
  switch (op) {
    case CompareOp::lt: return "<";
    case CompareOp::le: return "<=";
    case CompareOp::eq: return "=";
    case CompareOp::ne: return "!=";
    case CompareOp::ge: return ">=";
    case CompareOp::gt: return ">";
  }
  return "?";
}

/// Date comparison builtin. Both operands must denote instants (sentinels
/// included); otherwise the condition does not hold.
struct Condition {
  Slot lhs;
  CompareOp op;
  Slot rhs;
};

struct FluentHead {
  Slot subject;
  Term property;
  Slot object;
  Slot begin;
  Slot end;
};

enum class RuleKind { static_rule, fluent_generating };

struct Rule {
  std::string id;
  RuleKind kind = RuleKind::static_rule;
  std::vector<std::string> variables;  // names without '?', indexed by VarRef
  std::vector<TriplePattern> body;
  std::vector<Condition> conditions;
  std::vector<TriplePattern> head;  // static rules
  std::optional<FluentHead> fluent;  // fluent-generating rules
  std::string source;

  bool is_static() const noexcept { return kind == RuleKind::static_rule; }
};

struct SaturationReport {
  std::size_t rounds = 0;
  std::size_t new_static_triples = 0;
  std::size_t new_fluents = 0;
  std::size_t blocked_fluents = 0;
  std::vector<std::string> diagnostics;
};

struct FluentTally {
  std::size_t inserted = 0;
  std::size_t blocked = 0;
  std::vector<std::string> diagnostics;
};

// ---------------------------------------------------------------------------
// DSL compiler

namespace detail {

struct CompileFailure {
  std::size_t offset;
  std::string message;
};

class RuleParser {
 public:
  explicit RuleParser(std::string_view text) : text_(text), prefixes_(rdf::default_prefixes()) {}

  std::vector<Rule> parse_all() {
    std::vector<Rule> out;
    try {
      skip_ws();
      while (!at_end()) {
        if (peek() == '@' || keyword("PREFIX")) {
          directive();
        } else if (keyword("RULE")) {
          out.push_back(rule());
        } else {
          fail("expected RULE or a prefix directive");
        }
        skip_ws();
      }
    } catch (const CompileFailure& f) {
      throw Error(ErrorCode::invalid_rule, position(f.offset) + ": " + f.message);
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& m) const { throw CompileFailure{pos_, m}; }
  [[noreturn]] void fail_at(std::size_t at, const std::string& m) const { throw CompileFailure{at, m}; }

  std::string position(std::size_t offset) const {
    offset = std::min(offset, text_.size());
    std::size_t line = 1, line_start = 0;
    for (std::size_t i = 0; i < offset; ++i)
      if (text_[i] == '\n') {
        ++line;
        line_start = i + 1;
      }
    return std::to_string(line) + ":" + std::to_string(utf8::length(text_.substr(line_start, offset - line_start)) + 1);
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek(std::size_t k = 0) const { return pos_ + k < text_.size() ? text_[pos_ + k] : '\0'; }
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }
  static bool is_name_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
           c == '-' || c == '.' || static_cast<unsigned char>(c) >= 0x80;
  }

  void skip_ws() {
    while (!at_end()) {
      if (is_space(peek())) {
        ++pos_;
      } else if (peek() == '#') {
        while (!at_end() && peek() != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  bool keyword(std::string_view kw) const {
    if (text_.substr(pos_, kw.size()) != kw) return false;
    char after = peek(kw.size());
    return after == '\0' || is_space(after) || after == '[';
  }

  void expect_keyword(std::string_view kw) {
    skip_ws();
    if (!keyword(kw)) fail("expected " + std::string(kw));
    pos_ += kw.size();
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  // Declarations beyond the defaults, so a stored source compiles on its own.
  std::string prefix_preamble() const {
    static const auto defaults = rdf::default_prefixes();
    std::string out;
    for (const auto& [name, iri] : prefixes_) {
      auto it = defaults.find(name);
      if (it == defaults.end() || it->second != iri) out += "@prefix " + name + ": <" + iri + "> .\n";
    }
    return out;
  }

  void directive() {
    bool at_form = peek() == '@';
    if (at_form) {
      if (text_.substr(pos_, 7) != "@prefix") fail("unknown directive");
      pos_ += 7;
    } else {
      pos_ += 6;
    }
    skip_ws();
    std::size_t start = pos_;
    while (!at_end() && peek() != ':' && !is_space(peek())) ++pos_;
    if (peek() != ':') fail("expected prefix name followed by ':'");
    std::string name(text_.substr(start, pos_ - start));
    ++pos_;
    skip_ws();
    prefixes_[name] = iriref();
    if (at_form) expect('.');
  }

  std::string iriref() {
    std::size_t at = pos_;
    if (peek() != '<') fail("expected IRI");
    auto close = text_.find('>', pos_);
    if (close == std::string_view::npos) fail_at(at, "unterminated IRI");
    std::string v(text_.substr(pos_ + 1, close - pos_ - 1));
    pos_ = close + 1;
    if (!fluentkb::detail::has_scheme(v)) fail_at(at, "relative IRI <" + v + "> is not allowed in rules");
    return v;
  }

  Rule rule() {
    Rule r;
    std::size_t rule_start = pos_;
    vars_.clear();
    pos_ += 4;
    skip_ws();
    std::size_t id_start = pos_;
    while (!at_end() && peek() != ':' && !is_space(peek())) ++pos_;
    if (pos_ == id_start) fail("expected rule id");
    r.id = std::string(text_.substr(id_start, pos_ - id_start));
    expect(':');

    expect_keyword("WHEN");
    while (true) {
      r.body.push_back(pattern(/*in_head=*/false));
      skip_ws();
      if (peek() == '.') {
        ++pos_;
        skip_ws();
      }
      if (keyword("IF") || keyword("THEN")) break;
      if (at_end()) fail("expected THEN");
    }
    std::size_t body_vars = vars_.size();

    if (keyword("IF")) {
      pos_ += 2;
      while (true) {
        skip_ws();
        r.conditions.push_back(condition(body_vars));
        skip_ws();
        if (peek() == ',') {
          ++pos_;
        } else if (peek() == '&' && peek(1) == '&') {
          pos_ += 2;
        } else if (keyword("AND")) {
          pos_ += 3;
        } else if (peek() == '.') {
          ++pos_;
          skip_ws();
        }
        skip_ws();
        if (keyword("THEN")) break;
        if (at_end()) fail("expected THEN");
      }
    }

    expect_keyword("THEN");
    skip_ws();
    if (keyword("FLUENT")) {
      r.kind = RuleKind::fluent_generating;
      pos_ += 6;
      skip_ws();
      FluentHead h{head_slot(body_vars), Term(), Slot{}, Slot{}, Slot{}};
      skip_ws();
      std::size_t prop_at = pos_;
      Slot prop = slot(false);
      if (!std::holds_alternative<Term>(prop) || !std::get<Term>(prop).is_iri())
        fail_at(prop_at, "fluent property must be an IRI");
      h.property = std::get<Term>(prop);
      skip_ws();
      h.object = head_slot(body_vars);
      expect_keyword("DURING");
      expect('[');
      skip_ws();
      h.begin = interval_slot(body_vars);
      expect(',');
      skip_ws();
      h.end = interval_slot(body_vars);
      expect(']');
      expect('.');
      if (std::holds_alternative<Term>(h.begin) && std::holds_alternative<Term>(h.end)) {
        auto b = temporal::instant_of(std::get<Term>(h.begin));
        auto e = temporal::instant_of(std::get<Term>(h.end));
        if (b && e && *e < *b) fail("interval expression has begin after end");
      }
      r.fluent = std::move(h);
    } else {
      r.kind = RuleKind::static_rule;
      while (true) {
        skip_ws();
        auto tp = pattern(/*in_head=*/true, body_vars);
        r.head.push_back(std::move(tp));
        expect('.');
        skip_ws();
        if (at_end() || keyword("RULE") || keyword("PREFIX") || peek() == '@') break;
      }
    }
    r.variables = vars_;
    r.source = prefix_preamble() + std::string(text_.substr(rule_start, pos_ - rule_start));
    return r;
  }

  Slot head_slot(std::size_t body_vars) {
    std::size_t at = pos_;
    Slot s = slot(true);
    check_bound(s, body_vars, at, "unbound head variable ?");
    return s;
  }

  Slot interval_slot(std::size_t body_vars) {
    std::size_t at = pos_;
    if (keyword("START") || (text_.substr(pos_, 5) == "START" && !is_name_char(peek(5)))) {
      pos_ += 5;
      return temporal::start_term();
    }
    if (text_.substr(pos_, 3) == "END" && !is_name_char(peek(3))) {
      pos_ += 3;
      return temporal::end_term();
    }
    Slot s = slot(false);
    check_bound(s, body_vars, at, "unbound head variable ?");
    if (auto* t = std::get_if<Term>(&s); t && !temporal::instant_of(*t))
      fail_at(at, "interval bound must be a variable, a date, START or END");
    return s;
  }

  void check_bound(const Slot& s, std::size_t body_vars, std::size_t at, const std::string& msg) {
    if (auto* v = std::get_if<VarRef>(&s); v && v->index >= body_vars) fail_at(at, msg + vars_[v->index]);
  }

  Condition condition(std::size_t body_vars) {
    std::size_t at = pos_;
    Slot lhs = operand();
    check_bound(lhs, body_vars, at, "unbound variable in condition ?");
    skip_ws();
    CompareOp op;
    if (peek() == '<' && peek(1) == '=') op = CompareOp::le, pos_ += 2;
    else if (peek() == '>' && peek(1) == '=') op = CompareOp::ge, pos_ += 2;
    else if (peek() == '!' && peek(1) == '=') op = CompareOp::ne, pos_ += 2;
    else if (peek() == '<') op = CompareOp::lt, ++pos_;
    else if (peek() == '>') op = CompareOp::gt, ++pos_;
    else if (peek() == '=') op = CompareOp::eq, ++pos_;
    else fail("expected comparison operator");
    skip_ws();
    std::size_t rat = pos_;
    Slot rhs = operand();
    check_bound(rhs, body_vars, rat, "unbound variable in condition ?");
    return Condition{std::move(lhs), op, std::move(rhs)};
  }

  Slot operand() {
    if (text_.substr(pos_, 5) == "START" && !is_name_char(peek(5))) {
      pos_ += 5;
      return temporal::start_term();
    }
    if (text_.substr(pos_, 3) == "END" && !is_name_char(peek(3))) {
      pos_ += 3;
      return temporal::end_term();
    }
    return slot(false);
  }

  TriplePattern pattern(bool in_head, std::size_t body_vars = 0) {
    skip_ws();
    std::size_t at_s = pos_;
    Slot s = slot(in_head);
    skip_ws();
    std::size_t at_p = pos_;
    Slot p = predicate_slot();
    skip_ws();
    std::size_t at_o = pos_;
    Slot o = slot(in_head);
    if (in_head) {
      check_bound(s, body_vars, at_s, "unbound head variable ?");
      check_bound(p, body_vars, at_p, "unbound head variable ?");
      check_bound(o, body_vars, at_o, "unbound head variable ?");
    }
    if (auto* t = std::get_if<Term>(&s); t && t->is_literal()) fail_at(at_s, "a literal cannot be a subject");
    if (auto* t = std::get_if<Term>(&p); t && !t->is_iri()) fail_at(at_p, "predicate must be an IRI");
    return TriplePattern{std::move(s), std::move(p), std::move(o)};
  }

  Slot predicate_slot() {
    if (peek() == 'a' && (is_space(peek(1)) || peek(1) == '<' || peek(1) == '?')) {
      ++pos_;
      return Term::iri(vocab::rdf_type);
    }
    return slot(false);
  }

  std::size_t var_index(const std::string& name) {
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i] == name) return i;
    vars_.push_back(name);
    return vars_.size() - 1;
  }

  Slot slot(bool in_head) {
    skip_ws();
    std::size_t at = pos_;
    char c = peek();
    if (c == '?') {
      ++pos_;
      std::size_t start = pos_;
      while (!at_end() && is_name_char(peek()) && peek() != '.') ++pos_;
      if (pos_ == start) fail("empty variable name");
      return VarRef{var_index(std::string(text_.substr(start, pos_ - start)))};
    }
    if (c == '[' || (c == '_' && peek(1) == ':')) {
      if (in_head) fail_at(at, "fresh node in static head");
      fail_at(at, "blank nodes are not allowed in rule bodies; use a variable");
    }
    if (c == '<') return Term::iri(iriref());
    if (c == '"' || c == '\'') return string_literal();
    if (c >= '0' && c <= '9') return number_or_date();
    if (c == '+' || c == '-') return number_or_date();
    if (c == '\0') fail("unexpected end of input");
    return prefixed_name();
  }

  Term prefixed_name() {
    std::size_t at = pos_;
    std::size_t start = pos_;
    while (!at_end() && peek() != ':' && is_name_char(peek())) ++pos_;
    if (peek() != ':') fail_at(at, "expected a term");
    std::string prefix(text_.substr(start, pos_ - start));
    ++pos_;
    std::size_t ls = pos_;
    while (!at_end() && (is_name_char(peek()) || peek() == ':')) ++pos_;
    while (pos_ > ls && text_[pos_ - 1] == '.') --pos_;
    auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) fail_at(at, "undefined prefix '" + prefix + ":'");
    try {
      return Term::iri(it->second + std::string(text_.substr(ls, pos_ - ls)));
    } catch (const Error& e) {
      fail_at(at, e.what());
    }
  }

  Term string_literal() {
    std::size_t at = pos_;
    char q = peek();
    ++pos_;
    std::string lex;
    while (true) {
      if (at_end() || peek() == '\n') fail_at(at, "unterminated string literal");
      char c = peek();
      ++pos_;
      if (c == q) break;
      if (c == '\\') {
        char e = peek();
        ++pos_;
        switch (e) {
          case 'n': lex.push_back('\n'); break;
          case 't': lex.push_back('\t'); break;
          case '"': lex.push_back('"'); break;
          case '\'': lex.push_back('\''); break;
          case '\\': lex.push_back('\\'); break;
          default: fail_at(pos_ - 2, "invalid escape sequence");
        }
        continue;
      }
      lex.push_back(c);
    }
    if (peek() == '@') {
      std::size_t s = ++pos_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) ++pos_;
      return Term::lang_literal(std::move(lex), std::string(text_.substr(s, pos_ - s)));
    }
    if (peek() == '^' && peek(1) == '^') {
      pos_ += 2;
      Term dt = peek() == '<' ? Term::iri(iriref()) : prefixed_name();
      return Term::literal(std::move(lex), dt.value());
    }
    return Term::literal(std::move(lex));
  }

  Term number_or_date() {
    std::size_t start = pos_;
    if (peek() == '+' || peek() == '-') ++pos_;
    while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '-' ||
                         (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))))
      ++pos_;
    std::string lex(text_.substr(start, pos_ - start));
    if (auto d = Instant::parse_date(lex)) return Term::literal(lex, vocab::xsd_date);
    bool is_int = !lex.empty() && lex.find('-', 1) == std::string::npos;
    if (!is_int) fail_at(start, "malformed number or date '" + lex + "'");
    return Term::literal(lex, lex.find('.') == std::string::npos ? vocab::xsd_integer : vocab::xsd_decimal);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::map<std::string, std::string> prefixes_;
  std::vector<std::string> vars_;
};

}  // namespace detail

/// Compiles every rule in a .rules document.
inline std::vector<Rule> compile_rules(std::string_view text) {
  auto rules = detail::RuleParser(text).parse_all();
  std::set<std::string> ids;
  for (const auto& r : rules)
    if (!ids.insert(r.id).second) throw Error(ErrorCode::invalid_rule, "duplicate rule id '" + r.id + "'");
  return rules;
}

/// Compiles exactly one rule.
inline Rule compile_rule(std::string_view text) {
  auto rules = compile_rules(text);
  if (rules.size() != 1)
    throw Error(ErrorCode::invalid_rule, "expected exactly one rule, found " + std::to_string(rules.size()));
  return std::move(rules.front());
}

/// rdfs:subClassOf / rdfs:subPropertyOf closure. These make the sism
/// abstraction mappings effective.
inline const std::vector<Rule>& schema_rules() {
  static const std::vector<Rule> rules = compile_rules(R"(
RULE rdfs-subclass-transitive: WHEN ?a rdfs:subClassOf ?b . ?b rdfs:subClassOf ?c THEN ?a rdfs:subClassOf ?c .
RULE rdfs-type-propagation: WHEN ?x a ?c . ?c rdfs:subClassOf ?d THEN ?x a ?d .
RULE rdfs-subproperty-transitive: WHEN ?p rdfs:subPropertyOf ?q . ?q rdfs:subPropertyOf ?r THEN ?p rdfs:subPropertyOf ?r .
RULE rdfs-subproperty-propagation: WHEN ?x ?p ?y . ?p rdfs:subPropertyOf ?q THEN ?x ?q ?y .
)");
  return rules;
}

// ---------------------------------------------------------------------------
// Evaluation

using Binding = std::vector<std::optional<Term>>;

namespace detail {

inline std::optional<Term> resolve(const Slot& s, const Binding& b) {
  if (auto* v = std::get_if<VarRef>(&s)) return b[v->index];
  return std::get<Term>(s);
}

inline bool compare(CompareOp op, const Instant& a, const Instant& b) {
  switch (op) {
    case CompareOp::lt: return a < b;
    case CompareOp::le: return a <= b;
    case CompareOp::eq: return a == b;
    case CompareOp::ne: return a != b;
    case CompareOp::ge: return a >= b;
    case CompareOp::gt: return a > b;
  }
  return false;
}

// Some(true/false) once both operands are bound; nullopt before.
inline std::optional<bool> evaluate(const Condition& c, const Binding& b, const Dataset& ds) {
  auto l = resolve(c.lhs, b);
  auto r = resolve(c.rhs, b);
  if (!l || !r) return std::nullopt;
  auto li = temporal::instant_of(*l, &ds);
  auto ri = temporal::instant_of(*r, &ds);
  if (!li || !ri) return false;
  return compare(c.op, *li, *ri);
}

inline std::size_t bound_count(const TriplePattern& p, const Binding& b) {
  std::size_t n = 0;
  for (const Slot* s : {&p.subject, &p.predicate, &p.object})
    if (resolve(*s, b)) ++n;
  return n;
}

inline bool unify(const Slot& s, const Term& t, Binding& b, std::vector<std::size_t>& trail) {
  if (auto* v = std::get_if<VarRef>(&s)) {
    auto& cell = b[v->index];
    if (cell) return *cell == t;
    cell = t;
    trail.push_back(v->index);
    return true;
  }
  return std::get<Term>(s) == t;
}

class Matcher {
 public:
  using Visit = std::function<void(const Binding&)>;

  Matcher(const Dataset& ds, const Rule& rule) : ds_(ds), rule_(rule), used_(rule.body.size(), false) {}

  void run(Binding binding, const Visit& visit) {
    binding.resize(rule_.variables.size());
    visit_ = &visit;
    step(binding, 0);
  }

 private:
  bool conditions_hold(const Binding& b) const {
    for (const auto& c : rule_.conditions) {
      auto r = evaluate(c, b, ds_);
      if (r && !*r) return false;
    }
    return true;
  }

  void step(Binding& b, std::size_t done) {
    if (!conditions_hold(b)) return;
    if (done == rule_.body.size()) {
      (*visit_)(b);
      return;
    }
    // Most-bound pattern next; ties go to the earliest.
    std::size_t best = rule_.body.size();
    std::size_t best_bound = 0;
    for (std::size_t i = 0; i < rule_.body.size(); ++i) {
      if (used_[i]) continue;
      std::size_t n = bound_count(rule_.body[i], b);
      if (best == rule_.body.size() || n > best_bound) {
        best = i;
        best_bound = n;
      }
    }
    const auto& p = rule_.body[best];
    QuadPattern qp{resolve(p.subject, b), resolve(p.predicate, b), resolve(p.object, b), std::nullopt};
    if (qp.subject && qp.subject->is_literal()) return;
    if (qp.predicate && !qp.predicate->is_iri()) return;
    used_[best] = true;
    // Graph-blind matching: the same triple in two graphs is one match.
    std::set<std::string> seen;
    std::vector<Quad> hits = ds_.match(qp);
    for (const auto& q : hits) {
      std::string triple_key = q.subject().to_nquads() + ' ' + q.predicate().to_nquads() + ' ' + q.object().to_nquads();
      if (!seen.insert(triple_key).second) continue;
      std::vector<std::size_t> trail;
      if (unify(p.subject, q.subject(), b, trail) && unify(p.predicate, q.predicate(), b, trail) &&
          unify(p.object, q.object(), b, trail))
        step(b, done + 1);
      for (auto idx : trail) b[idx].reset();
    }
    used_[best] = false;
  }

  const Dataset& ds_;
  const Rule& rule_;
  std::vector<bool> used_;
  const Visit* visit_ = nullptr;
};

struct Triple {
  Term s, p, o;
  std::string key() const { return s.to_nquads() + ' ' + p.to_nquads() + ' ' + o.to_nquads(); }
};

inline std::optional<Triple> instantiate(const TriplePattern& t, const Binding& b) {
  auto s = resolve(t.subject, b);
  auto p = resolve(t.predicate, b);
  auto o = resolve(t.object, b);
  if (!s || !p || !o) return std::nullopt;
  if (!s->is_resource() || !p->is_iri()) return std::nullopt;
  return Triple{*s, *p, *o};
}

}  // namespace detail

/// Every body match of rule over ds, in deterministic order.
inline void for_each_match(const Dataset& ds, const Rule& rule, const std::function<void(const Binding&)>& fn,
                           Binding initial = {}) {
  detail::Matcher(ds, rule).run(std::move(initial), fn);
}

/// Least fixpoint of the schema rules plus the given static rules. Derived
/// triples go to <sys:inferred>; returns how many were genuinely new (absent
/// from every graph).
inline std::size_t apply_static_rules(Dataset& ds, const std::vector<Rule>& rules) {
  for (const auto& r : rules)
    if (!r.is_static())
      throw Error(ErrorCode::invalid_argument, "rule '" + r.id + "' is not a static rule");
  std::vector<const Rule*> all;
  for (const auto& r : schema_rules()) all.push_back(&r);
  for (const auto& r : rules) all.push_back(&r);

  const Term inferred = Term::iri(vocab::graph_inferred);
  std::size_t total = 0;
  while (true) {
    std::map<std::string, detail::Triple> fresh;
    for (const Rule* rule : all) {
      for_each_match(ds, *rule, [&](const Binding& b) {
        for (const auto& h : rule->head) {
          auto t = detail::instantiate(h, b);
          if (!t || ds.contains_triple(t->s, t->p, t->o)) continue;
          fresh.emplace(t->key(), *t);
        }
      });
    }
    if (fresh.empty()) break;
    for (const auto& [key, t] : fresh) ds.insert(Quad(t.s, t.p, t.o, inferred));
    total += fresh.size();
  }
  return total;
}

namespace detail {

struct FluentStep {
  FluentTally tally;
  std::set<std::string> inserted_keys;
  std::set<std::string> blocked_keys;
};

inline FluentStep apply_fluent_rules_detailed(Dataset& ds, const std::vector<Rule>& rules) {
  FluentStep step;
  for (const auto& rule : rules) {
    if (rule.is_static())
      throw Error(ErrorCode::invalid_argument, "rule '" + rule.id + "' is not fluent-generating");
    const FluentHead& h = *rule.fluent;
    std::vector<Binding> matches;
    for_each_match(ds, rule, [&](const Binding& b) { matches.push_back(b); });
    for (const auto& b : matches) {
      auto s = resolve(h.subject, b);
      auto o = resolve(h.object, b);
      auto bt = resolve(h.begin, b);
      auto et = resolve(h.end, b);
      if (!s || !o || !bt || !et) continue;
      if (!s->is_resource()) {
        step.tally.diagnostics.push_back(rule.id + ": fluent subject " + s->to_nquads() + " is a literal; match skipped");
        continue;
      }
      // Fluents about engine-minted nodes would feed on themselves.
      if (temporal::is_generated_node(*s) || temporal::is_generated_node(*o)) continue;
      auto bi = temporal::instant_of(*bt, &ds);
      auto ei = temporal::instant_of(*et, &ds);
      if (!bi || !ei) {
        step.tally.diagnostics.push_back(rule.id + ": interval bound " + (!bi ? bt : et)->to_nquads() +
                                         " is not an instant; match skipped");
        continue;
      }
      if (*ei < *bi) {
        step.tally.diagnostics.push_back(rule.id + ": interval [" + bi->to_string() + ", " + ei->to_string() +
                                         "] has begin after end; match skipped");
        continue;
      }
      Interval during(*bi, *ei);
      std::string key = temporal::fluent_id(*s, h.property, *o, during);
      auto outcome = temporal::assert_fluent(
          ds, temporal::FluentSpec{*s, h.property, *o, during, temporal::Provenance::rule(rule.id)});
      if (outcome.inserted()) {
        step.inserted_keys.insert(key);
        step.blocked_keys.erase(key);
      } else if (!step.inserted_keys.count(key)) {
        step.blocked_keys.insert(key);
      }
    }
  }
  step.tally.inserted = step.inserted_keys.size();
  step.tally.blocked = step.blocked_keys.size();
  return step;
}

}  // namespace detail

/// Fires each fluent-generating rule on every body match, asserting the
/// resulting fluent under the subsumption guard. Counts are over distinct
/// candidate fluents.
inline FluentTally apply_fluent_rules(Dataset& ds, const std::vector<Rule>& rules) {
  return detail::apply_fluent_rules_detailed(ds, rules).tally;
}

struct SaturateOptions {
  std::size_t max_rounds = 64;
};

/// Alternates static closure and fluent generation until a round adds
/// nothing. Throws round_cap_exceeded if still productive after max_rounds.
inline SaturationReport saturate(Dataset& ds, const std::vector<Rule>& static_rules,
                                 const std::vector<Rule>& fluent_rules, SaturateOptions options = {}) {
  SaturationReport report;
  std::set<std::string> inserted;
  std::set<std::string> blocked;
  for (std::size_t round = 1;; ++round) {
    if (round > options.max_rounds)
      throw Error(ErrorCode::round_cap_exceeded,
                  "saturation still productive after " + std::to_string(options.max_rounds) + " rounds");
    std::size_t s = apply_static_rules(ds, static_rules);
    auto step = detail::apply_fluent_rules_detailed(ds, fluent_rules);
    report.new_static_triples += s;
    for (const auto& k : step.inserted_keys) inserted.insert(k);
    for (const auto& k : step.blocked_keys) blocked.insert(k);
    for (auto& d : step.tally.diagnostics) report.diagnostics.push_back(std::move(d));
    report.rounds = round;
    if (s == 0 && step.tally.inserted == 0) break;
  }
  report.new_fluents = inserted.size();
  for (const auto& k : inserted) blocked.erase(k);
  report.blocked_fluents = blocked.size();
  return report;
}

/// Splits a mixed rule list by kind, preserving order.
inline SaturationReport saturate(Dataset& ds, const std::vector<Rule>& rules, SaturateOptions options = {}) {
  std::vector<Rule> st, fl;
  for (const auto& r : rules) (r.is_static() ? st : fl).push_back(r);
  return saturate(ds, st, fl, options);
}

/// Ids of the static rules that derive (s, p, o) from the current dataset.
inline std::vector<std::string> explain(const Dataset& ds, const std::vector<Rule>& rules, const Term& s,
                                        const Term& p, const Term& o) {
  std::vector<std::string> out;
  for (const auto& rule : rules) {
    if (!rule.is_static()) continue;
    bool derives = false;
    for (const auto& h : rule.head) {
      Binding b(rule.variables.size());
      std::vector<std::size_t> trail;
      if (!detail::unify(h.subject, s, b, trail) || !detail::unify(h.predicate, p, b, trail) ||
          !detail::unify(h.object, o, b, trail))
        continue;
      for_each_match(ds, rule, [&](const Binding&) { derives = true; }, b);
      if (derives) break;
    }
    if (derives) out.push_back(rule.id);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rule persistence

inline std::string rule_iri(const std::string& id) {
  std::string out = "urn:fluentkb:rule:";
  static constexpr char hex[] = "0123456789ABCDEF";
  for (unsigned char c : id) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 0xf]);
    }
  }
  return out;
}

/// Records rule sources in <sys:rules>, replacing same-id rules.
inline void store_rules(Dataset& ds, const std::vector<Rule>& rules) {
  const Term g = Term::iri(vocab::graph_rules);
  const Term source_p = Term::iri(vocab::sism("ruleSource"));
  for (const auto& r : rules) {
    Term node = Term::iri(rule_iri(r.id));
    for (const auto& q : ds.match(node, source_p, std::nullopt, g)) ds.erase(q);
    ds.insert(Quad(node, source_p, Term::literal(r.source), g));
  }
}

inline std::vector<Rule> stored_rules(const Dataset& ds) {
  std::vector<Rule> out;
  for (const auto& q : ds.match(std::nullopt, Term::iri(vocab::sism("ruleSource")), std::nullopt,
                                Term::iri(vocab::graph_rules)))
    out.push_back(compile_rule(q.object().value()));
  return out;
}

// ---------------------------------------------------------------------------
// Writing-time inference

struct WritingTimeContradiction {
  Term manuscript;
  Instant not_before;
  Instant not_after;
};

struct WritingTimeReport {
  std::size_t updated = 0;
  std::vector<std::pair<Term, Interval>> dated;
  std::vector<WritingTimeContradiction> contradictions;
};

struct Bounds {
  std::optional<Instant> not_before;  // max of all notBefore
  std::optional<Instant> not_after;   // min of all notAfter
};

inline Bounds writing_bounds(const Dataset& ds, const Term& manuscript) {
  Bounds b;
  for (const auto& q : ds.match(manuscript, Term::iri(vocab::sism("notBefore")), std::nullopt))
    if (auto i = temporal::instant_of(q.object(), &ds)) b.not_before = b.not_before ? std::max(*b.not_before, *i) : *i;
  for (const auto& q : ds.match(manuscript, Term::iri(vocab::sism("notAfter")), std::nullopt))
    if (auto i = temporal::instant_of(q.object(), &ds)) b.not_after = b.not_after ? std::min(*b.not_after, *i) : *i;
  return b;
}

namespace detail {

inline void clear_inferred_writing_time(Dataset& ds, const Term& m) {
  const Term g = Term::iri(vocab::graph_inferred);
  for (const auto& q : ds.match(m, Term::iri(vocab::sism("inferredWritingTime")), std::nullopt, g)) {
    ds.erase(q);
    if (temporal::is_generated_node(q.object()))
      for (const auto& nq : ds.match(q.object(), std::nullopt, std::nullopt, g)) ds.erase(nq);
  }
}

}  // namespace detail

/// Sets sism:inferredWritingTime to [max notBefore, min notAfter] on every
/// manuscript with at least one bound and no explicit sism:writingTime.
/// Contradictory bounds are reported and leave no interval.
inline WritingTimeReport infer_writing_times(Dataset& ds) {
  WritingTimeReport report;
  const Term iwt_p = Term::iri(vocab::sism("inferredWritingTime"));
  const Term wt_p = Term::iri(vocab::sism("writingTime"));
  const Term g = Term::iri(vocab::graph_inferred);
  std::set<std::string> seen;
  std::vector<Term> manuscripts;
  for (const char* p : {"notBefore", "notAfter"})
    for (const auto& q : ds.match(std::nullopt, Term::iri(vocab::sism(p)), std::nullopt))
      if (seen.insert(q.subject().to_nquads()).second) manuscripts.push_back(q.subject());
  std::sort(manuscripts.begin(), manuscripts.end(),
            [](const Term& a, const Term& b) { return a.to_nquads() < b.to_nquads(); });

  for (const auto& m : manuscripts) {
    if (!ds.match(m, wt_p, std::nullopt).empty()) continue;
    Bounds b = writing_bounds(ds, m);
    if (!b.not_before && !b.not_after) continue;
    Instant lo = b.not_before.value_or(Instant::start());
    Instant hi = b.not_after.value_or(Instant::end());
    if (hi < lo) {
      report.contradictions.push_back({m, lo, hi});
      detail::clear_inferred_writing_time(ds, m);
      continue;
    }
    Interval during(lo, hi);
    report.dated.emplace_back(m, during);
    auto current = ds.match(m, iwt_p, std::nullopt, g);
    if (current.size() == 1) {
      auto existing = temporal::interval_of(current.front().object(), ds);
      if (existing && *existing == during) continue;
    }
    detail::clear_inferred_writing_time(ds, m);
    Term node = Term::skolem("iwt-" + key_hash({m.to_nquads(), lo.to_string(), hi.to_string()}));
    ds.insert(Quad(m, iwt_p, node, g));
    ds.insert(Quad(node, Term::iri(vocab::rdf_type), Term::iri(vocab::time("Interval")), g));
    ds.insert(Quad(node, Term::iri(vocab::time("hasBeginning")), temporal::to_term(lo), g));
    ds.insert(Quad(node, Term::iri(vocab::time("hasEnd")), temporal::to_term(hi), g));
    ++report.updated;
  }
  return report;
}

}  // namespace fluentkb::rules
