#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fluentkb/error.hpp"
#include "fluentkb/hash.hpp"
#include "fluentkb/store.hpp"
#include "fluentkb/term.hpp"
#include "fluentkb/utf8.hpp"
#include "fluentkb/vocab.hpp"

namespace fluentkb::rdf {

struct Diagnostic {
  std::size_t line = 0;
  std::size_t column = 0;
  std::string message;

  std::string to_string() const {
    return std::to_string(line) + ":" + std::to_string(column) + ": " + message;
  }
};

struct ParseOutcome {
  std::vector<Quad> quads;
  std::map<std::string, std::string> prefixes;
  std::vector<Diagnostic> diagnostics;

  bool ok() const noexcept { return diagnostics.empty(); }
};

/// Prefixes every fixture and rule file may use without declaring them.
inline std::map<std::string, std::string> default_prefixes() {
  return {
      {"", std::string(vocab::sism_ns)},
      {"rdf", std::string(vocab::rdf_ns)},
      {"rdfs", std::string(vocab::rdfs_ns)},
      {"owl", std::string(vocab::owl_ns)},
      {"xsd", std::string(vocab::xsd_ns)},
      {"skos", std::string(vocab::skos_ns)},
      {"time", std::string(vocab::time_ns)},
      {"sism", std::string(vocab::sism_ns)},
  };
}

namespace detail {

struct ParseFailure {
  std::size_t offset;
  std::string message;
};

inline std::string remove_dot_segments(std::string path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  bool absolute = !path.empty() && path[0] == '/';
  if (absolute) i = 1;
  bool trailing = false;
  while (i <= path.size()) {
    auto next = path.find('/', i);
    if (next == std::string::npos) next = path.size();
    std::string seg = path.substr(i, next - i);
    trailing = false;
    if (seg == ".") {
      trailing = true;
    } else if (seg == "..") {
      if (!out.empty()) out.pop_back();
      trailing = true;
    } else {
      out.push_back(seg);
    }
    i = next + 1;
  }
  std::string result = absolute ? "/" : "";
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (k) result += '/';
    result += out[k];
  }
  if (trailing && (result.empty() || result.back() != '/')) result += '/';
  return result;
}

// Reference resolution for the cases Turtle documents use in practice.
inline std::string resolve_iri(const std::string& base, const std::string& rel) {
  if (fluentkb::detail::has_scheme(rel)) return rel;
  auto strip = [](std::string s, char c) {
    auto p = s.find(c);
    return p == std::string::npos ? s : s.substr(0, p);
  };
  std::string base_nofrag = strip(base, '#');
  if (rel.empty()) return base_nofrag;
  if (rel[0] == '#') return base_nofrag + rel;
  if (rel[0] == '?') return strip(base_nofrag, '?') + rel;
  auto colon = base.find(':');
  std::string scheme = base.substr(0, colon + 1);
  if (rel.starts_with("//")) return scheme + rel;
  std::string rest = strip(base_nofrag, '?').substr(colon + 1);
  std::string authority;
  std::string path = rest;
  if (rest.starts_with("//")) {
    auto slash = rest.find('/', 2);
    authority = rest.substr(0, slash == std::string::npos ? rest.size() : slash);
    path = slash == std::string::npos ? std::string() : rest.substr(slash);
  }
  if (rel[0] == '/') return scheme + authority + remove_dot_segments(rel);
  std::string dir;
  auto last = path.rfind('/');
  if (last != std::string::npos) dir = path.substr(0, last + 1);
  else if (!authority.empty()) dir = "/";
  return scheme + authority + remove_dot_segments(dir + rel);
}

class TurtleParser {
 public:
  TurtleParser(std::string_view text, Term graph)
      : text_(text), graph_(std::move(graph)),
        doc_id_("doc" + hex64(fnv1a64(text))) {
    prefixes_ = default_prefixes();
  }

  ParseOutcome run() {
    ParseOutcome outcome;
    try {
      skip_ws();
      while (!at_end()) {
        statement();
        skip_ws();
      }
      outcome.quads = std::move(quads_);
    } catch (const ParseFailure& f) {
      outcome.diagnostics.push_back(make_diagnostic(f.offset, f.message));
    } catch (const Error& e) {
      outcome.diagnostics.push_back(make_diagnostic(pos_, e.what()));
    }
    outcome.prefixes = prefixes_;
    return outcome;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw ParseFailure{pos_, message}; }
  [[noreturn]] void fail_at(std::size_t at, const std::string& message) const {
    throw ParseFailure{at, message};
  }

  Diagnostic make_diagnostic(std::size_t offset, std::string message) const {
    offset = std::min(offset, text_.size());
    std::size_t line = 1;
    std::size_t line_start = 0;
    for (std::size_t i = 0; i < offset; ++i) {
      if (text_[i] == '\n') {
        ++line;
        line_start = i + 1;
      }
    }
    std::size_t column = utf8::length(text_.substr(line_start, offset - line_start)) + 1;
    return Diagnostic{line, column, std::move(message)};
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  void skip_ws() {
    while (!at_end()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos_;
      } else if (c == '#') {
        while (!at_end() && peek() != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool keyword_ci(std::string_view kw) const {
    if (pos_ + kw.size() > text_.size()) return false;
    for (std::size_t i = 0; i < kw.size(); ++i) {
      char a = text_[pos_ + i];
      if (a >= 'a' && a <= 'z') a = static_cast<char>(a - 'a' + 'A');
      if (a != kw[i]) return false;
    }
    char after = pos_ + kw.size() < text_.size() ? text_[pos_ + kw.size()] : ' ';
    return after == ' ' || after == '\t' || after == '\n' || after == '\r' || after == '<';
  }

  void statement() {
    if (peek() == '@') {
      if (text_.substr(pos_).starts_with("@prefix")) {
        pos_ += 7;
        prefix_directive();
        expect('.');
        return;
      }
      if (text_.substr(pos_).starts_with("@base")) {
        pos_ += 5;
        base_directive();
        expect('.');
        return;
      }
      fail("unknown directive");
    }
    if (keyword_ci("PREFIX")) {
      pos_ += 6;
      prefix_directive();
      return;
    }
    if (keyword_ci("BASE")) {
      pos_ += 4;
      base_directive();
      return;
    }
    triples();
    expect('.');
  }

  void prefix_directive() {
    skip_ws();
    std::size_t start = pos_;
    while (!at_end() && peek() != ':' && !is_space(peek())) ++pos_;
    if (peek() != ':') fail("expected prefix name followed by ':'");
    std::string name(text_.substr(start, pos_ - start));
    ++pos_;
    skip_ws();
    std::string iri_text = iriref();
    prefixes_[name] = iri_text;
  }

  void base_directive() {
    skip_ws();
    base_ = iriref();
  }

  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

  void triples() {
    skip_ws();
    if (peek() == '[') {
      Term subject = blank_node_property_list();
      skip_ws();
      if (peek() != '.') predicate_object_list(subject);
    } else {
      Term subject = subject_term();
      predicate_object_list(subject);
    }
  }

  Term subject_term() {
    skip_ws();
    char c = peek();
    if (c == '<') {
      if (peek(1) == '<') fail("quoted triples are not supported");
      return Term::iri(iriref());
    }
    if (c == '_' && peek(1) == ':') return blank_label();
    if (c == '(') fail("collections are not supported");
    if (c == '"' || c == '\'' || c == '+' || c == '-' || (c >= '0' && c <= '9'))
      fail("a literal cannot be a subject");
    return prefixed_name_term();
  }

  void predicate_object_list(const Term& subject) {
    while (true) {
      skip_ws();
      Term predicate = verb();
      object_list(subject, predicate);
      skip_ws();
      if (peek() != ';') return;
      while (peek() == ';') {
        ++pos_;
        skip_ws();
      }
      char c = peek();
      if (c == '.' || c == ']' || at_end()) return;
    }
  }

  Term verb() {
    skip_ws();
    if (peek() == 'a') {
      char n = peek(1);
      if (is_space(n) || n == '<' || n == '[' || n == '"' || n == '_') {
        ++pos_;
        return Term::iri(vocab::rdf_type);
      }
    }
    std::size_t at = pos_;
    if (peek() == '[') fail("a blank node cannot be a predicate");
    Term t = peek() == '<' ? Term::iri(iriref()) : prefixed_name_term();
    if (!t.is_iri()) fail_at(at, "predicate must be an IRI");
    return t;
  }

  void object_list(const Term& subject, const Term& predicate) {
    while (true) {
      Term object = object_term();
      emit(subject, predicate, object);
      skip_ws();
      if (peek() != ',') return;
      ++pos_;
    }
  }

  Term object_term() {
    skip_ws();
    char c = peek();
    if (c == '<') {
      if (peek(1) == '<') fail("quoted triples are not supported");
      return Term::iri(iriref());
    }
    if (c == '_' && peek(1) == ':') return blank_label();
    if (c == '[') return blank_node_property_list();
    if (c == '(') fail("collections are not supported");
    if (c == '"' || c == '\'') return string_literal();
    if (c == '+' || c == '-' || c == '.' || (c >= '0' && c <= '9')) return numeric_literal();
    if (text_.substr(pos_).starts_with("true") && !is_name_char(peek(4)))
      return (pos_ += 4, Term::literal("true", vocab::xsd_boolean));
    if (text_.substr(pos_).starts_with("false") && !is_name_char(peek(5)))
      return (pos_ += 5, Term::literal("false", vocab::xsd_boolean));
    return prefixed_name_term();
  }

  Term blank_node_property_list() {
    expect('[');
    Term node = fresh_blank();
    skip_ws();
    if (peek() == ']') {
      ++pos_;
      return node;
    }
    predicate_object_list(node);
    expect(']');
    return node;
  }

  Term fresh_blank() { return Term::skolem(doc_id_ + ":b" + std::to_string(counter_++)); }

  Term blank_label() {
    pos_ += 2;
    std::size_t start = pos_;
    while (!at_end() && is_name_char(peek())) ++pos_;
    while (pos_ > start && text_[pos_ - 1] == '.') --pos_;
    if (pos_ == start) fail("empty blank node label");
    std::string label(text_.substr(start, pos_ - start));
    auto it = labels_.find(label);
    if (it != labels_.end()) return it->second;
    Term node = fresh_blank();
    labels_.emplace(label, node);
    return node;
  }

  static bool is_name_char(char c) {
    auto u = static_cast<unsigned char>(c);
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '-' || c == '.' || u >= 0x80;
  }

  std::string iriref() {
    skip_ws();
    std::size_t at = pos_;
    if (peek() != '<') fail("expected IRI");
    ++pos_;
    std::string raw;
    while (true) {
      if (at_end()) fail_at(at, "unterminated IRI");
      char c = peek();
      if (c == '>') break;
      if (c == '\\') {
        ++pos_;
        char e = peek();
        if (e == 'u' || e == 'U') {
          ++pos_;
          utf8::append(raw, hex_escape(e == 'u' ? 4 : 8));
          continue;
        }
        fail("invalid escape in IRI");
      }
      if (static_cast<unsigned char>(c) <= 0x20 || c == '<' || c == '"' || c == '{' ||
          c == '}' || c == '|' || c == '^' || c == '`')
        fail("invalid character in IRI");
      raw.push_back(c);
      ++pos_;
    }
    ++pos_;
    return absolutize(raw, at);
  }

  std::string absolutize(const std::string& raw, std::size_t at) const {
    if (fluentkb::detail::has_scheme(raw)) return raw;
    if (!base_) fail_at(at, "relative IRI <" + raw + "> with no @base");
    return resolve_iri(*base_, raw);
  }

  Term prefixed_name_term() {
    std::size_t at = pos_;
    std::size_t start = pos_;
    while (!at_end() && peek() != ':' && is_name_char(peek())) ++pos_;
    if (peek() != ':') fail_at(at, "expected IRI, prefixed name, or literal");
    std::string prefix(text_.substr(start, pos_ - start));
    ++pos_;
    std::string local;
    while (!at_end()) {
      char c = peek();
      if (is_name_char(c) || c == ':') {
        local.push_back(c);
        ++pos_;
      } else if (c == '%' && pos_ + 2 < text_.size()) {
        local.append(text_.substr(pos_, 3));
        pos_ += 3;
      } else if (c == '\\' && pos_ + 1 < text_.size()) {
        local.push_back(text_[pos_ + 1]);
        pos_ += 2;
      } else {
        break;
      }
    }
    while (!local.empty() && local.back() == '.') {
      local.pop_back();
      --pos_;
    }
    auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) fail_at(at, "undefined prefix '" + prefix + ":'");
    std::string full = absolutize(it->second, at) + local;
    try {
      return Term::iri(full);
    } catch (const Error& e) {
      fail_at(at, e.what());
    }
  }

  char32_t hex_escape(int digits) {
    char32_t v = 0;
    for (int i = 0; i < digits; ++i) {
      char c = peek();
      int d;
      if (c >= '0' && c <= '9') d = c - '0';
      else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
      else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
      else fail("invalid hex digit in escape");
      v = v * 16 + static_cast<char32_t>(d);
      ++pos_;
    }
    if (v > 0x10FFFF || (v >= 0xD800 && v <= 0xDFFF)) fail("escape is not a Unicode scalar value");
    return v;
  }

  Term string_literal() {
    std::size_t at = pos_;
    char q = peek();
    bool long_form = peek(1) == q && peek(2) == q;
    pos_ += long_form ? 3 : 1;
    std::string lex;
    while (true) {
      if (at_end()) fail_at(at, "unterminated string literal");
      char c = peek();
      if (long_form) {
        if (c == q && peek(1) == q && peek(2) == q) {
          pos_ += 3;
          break;
        }
      } else {
        if (c == q) {
          ++pos_;
          break;
        }
        if (c == '\n' || c == '\r') fail("newline in short string literal");
      }
      if (c == '\\') {
        ++pos_;
        char e = peek();
        ++pos_;
        switch (e) {
          case 't': lex.push_back('\t'); break;
          case 'b': lex.push_back('\b'); break;
          case 'n': lex.push_back('\n'); break;
          case 'r': lex.push_back('\r'); break;
          case 'f': lex.push_back('\f'); break;
          case '"': lex.push_back('"'); break;
          case '\'': lex.push_back('\''); break;
          case '\\': lex.push_back('\\'); break;
          case 'u': utf8::append(lex, hex_escape(4)); break;
          case 'U': utf8::append(lex, hex_escape(8)); break;
          default: fail_at(pos_ - 2, "invalid escape sequence");
        }
        continue;
      }
      lex.push_back(c);
      ++pos_;
    }
    if (peek() == '@') {
      ++pos_;
      std::size_t start = pos_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) ++pos_;
      if (pos_ == start) fail("empty language tag");
      return Term::lang_literal(std::move(lex), std::string(text_.substr(start, pos_ - start)));
    }
    if (peek() == '^' && peek(1) == '^') {
      pos_ += 2;
      std::size_t dt_at = pos_;
      Term dt = peek() == '<' ? Term::iri(iriref()) : prefixed_name_term();
      if (!dt.is_iri()) fail_at(dt_at, "datatype must be an IRI");
      if (dt.value() == vocab::rdf_lang_string) fail_at(dt_at, "rdf:langString requires a language tag");
      return Term::literal(std::move(lex), dt.value());
    }
    return Term::literal(std::move(lex));
  }

  Term numeric_literal() {
    std::size_t start = pos_;
    if (peek() == '+' || peek() == '-') ++pos_;
    bool digits = false;
    bool dot = false;
    bool exponent = false;
    while (!at_end() && peek() >= '0' && peek() <= '9') {
      ++pos_;
      digits = true;
    }
    if (peek() == '.' && peek(1) >= '0' && peek(1) <= '9') {
      dot = true;
      ++pos_;
      while (!at_end() && peek() >= '0' && peek() <= '9') {
        ++pos_;
        digits = true;
      }
    }
    if (digits && (peek() == 'e' || peek() == 'E')) {
      exponent = true;
      ++pos_;
      if (peek() == '+' || peek() == '-') ++pos_;
      bool exp_digits = false;
      while (!at_end() && peek() >= '0' && peek() <= '9') {
        ++pos_;
        exp_digits = true;
      }
      if (!exp_digits) fail("malformed exponent");
    }
    if (!digits) fail_at(start, "malformed number");
    std::string lex(text_.substr(start, pos_ - start));
    const std::string& dt = exponent ? vocab::xsd_double : dot ? vocab::xsd_decimal : vocab::xsd_integer;
    return Term::literal(std::move(lex), dt);
  }

  void emit(const Term& s, const Term& p, const Term& o) {
    quads_.emplace_back(s, p, o, graph_);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Term graph_;
  std::string doc_id_;
  std::size_t counter_ = 0;
  std::optional<std::string> base_;
  std::map<std::string, std::string> prefixes_;
  std::map<std::string, Term> labels_;
  std::vector<Quad> quads_;
};

class NQuadsParser {
 public:
  NQuadsParser(std::string_view text, std::optional<Term> default_graph)
      : text_(text), default_graph_(std::move(default_graph)) {}

  ParseOutcome run() {
    ParseOutcome outcome;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text_.size()) {
      auto end = text_.find('\n', start);
      if (end == std::string_view::npos) end = text_.size();
      ++line_no;
      line_ = text_.substr(start, end - start);
      if (!line_.empty() && line_.back() == '\r') line_.remove_suffix(1);
      pos_ = 0;
      try {
        parse_line(outcome);
      } catch (const ParseFailure& f) {
        outcome.diagnostics.push_back(
            Diagnostic{line_no, utf8::length(line_.substr(0, std::min(f.offset, line_.size()))) + 1,
                       f.message});
        outcome.quads.clear();
        return outcome;
      } catch (const Error& e) {
        outcome.diagnostics.push_back(Diagnostic{line_no, 1, e.what()});
        outcome.quads.clear();
        return outcome;
      }
      start = end + 1;
    }
    return outcome;
  }

 private:
  [[noreturn]] void fail(const std::string& m) const { throw ParseFailure{pos_, m}; }

  void skip_ws() {
    while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) ++pos_;
  }

  void parse_line(ParseOutcome& outcome) {
    skip_ws();
    if (pos_ >= line_.size() || line_[pos_] == '#') return;
    Term s = term();
    skip_ws();
    Term p = term();
    skip_ws();
    Term o = term();
    skip_ws();
    std::optional<Term> g;
    if (pos_ < line_.size() && line_[pos_] != '.') {
      g = term();
      skip_ws();
    }
    if (pos_ >= line_.size() || line_[pos_] != '.') fail("expected '.'");
    ++pos_;
    skip_ws();
    if (pos_ < line_.size() && line_[pos_] != '#') fail("unexpected content after '.'");
    if (!g) {
      if (!default_graph_) fail("missing graph label");
      g = default_graph_;
    }
    outcome.quads.emplace_back(std::move(s), std::move(p), std::move(o), std::move(*g));
  }

  char32_t hex(int digits) {
    char32_t v = 0;
    for (int i = 0; i < digits; ++i) {
      if (pos_ >= line_.size()) fail("truncated escape");
      char c = line_[pos_++];
      int d;
      if (c >= '0' && c <= '9') d = c - '0';
      else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
      else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
      else fail("invalid hex digit");
      v = v * 16 + static_cast<char32_t>(d);
    }
    return v;
  }

  Term term() {
    if (pos_ >= line_.size()) fail("unexpected end of line");
    char c = line_[pos_];
    if (c == '<') {
      auto close = line_.find('>', pos_);
      if (close == std::string_view::npos) fail("unterminated IRI");
      std::string v(line_.substr(pos_ + 1, close - pos_ - 1));
      pos_ = close + 1;
      return Term::iri(std::move(v));
    }
    if (c == '_' && pos_ + 1 < line_.size() && line_[pos_ + 1] == ':') {
      pos_ += 2;
      std::size_t start = pos_;
      while (pos_ < line_.size() && line_[pos_] != ' ' && line_[pos_] != '\t') ++pos_;
      return Term::skolem(std::string(line_.substr(start, pos_ - start)));
    }
    if (c == '"') {
      ++pos_;
      std::string lex;
      while (true) {
        if (pos_ >= line_.size()) fail("unterminated literal");
        char ch = line_[pos_++];
        if (ch == '"') break;
        if (ch == '\\') {
          if (pos_ >= line_.size()) fail("truncated escape");
          char e = line_[pos_++];
          switch (e) {
            case 't': lex.push_back('\t'); break;
            case 'b': lex.push_back('\b'); break;
            case 'n': lex.push_back('\n'); break;
            case 'r': lex.push_back('\r'); break;
            case 'f': lex.push_back('\f'); break;
            case '"': lex.push_back('"'); break;
            case '\'': lex.push_back('\''); break;
            case '\\': lex.push_back('\\'); break;
            case 'u': utf8::append(lex, hex(4)); break;
            case 'U': utf8::append(lex, hex(8)); break;
            default: fail("invalid escape");
          }
          continue;
        }
        lex.push_back(ch);
      }
      if (pos_ < line_.size() && line_[pos_] == '@') {
        std::size_t start = ++pos_;
        while (pos_ < line_.size() && line_[pos_] != ' ' && line_[pos_] != '\t') ++pos_;
        return Term::lang_literal(std::move(lex), std::string(line_.substr(start, pos_ - start)));
      }
      if (pos_ + 1 < line_.size() && line_[pos_] == '^' && line_[pos_ + 1] == '^') {
        pos_ += 2;
        if (pos_ >= line_.size() || line_[pos_] != '<') fail("expected datatype IRI");
        auto close = line_.find('>', pos_);
        if (close == std::string_view::npos) fail("unterminated datatype IRI");
        std::string dt(line_.substr(pos_ + 1, close - pos_ - 1));
        pos_ = close + 1;
        return Term::literal(std::move(lex), std::move(dt));
      }
      return Term::literal(std::move(lex));
    }
    fail("expected term");
  }

  std::string_view text_;
  std::string_view line_;
  std::size_t pos_ = 0;
  std::optional<Term> default_graph_;
};

}  // namespace detail

/// Parses the supported Turtle subset; every triple lands in target_graph.
/// Blank nodes become skolem nodes "doc<hash-of-text>:b<counter>".
inline ParseOutcome parse_turtle(std::string_view text, const Term& target_graph) {
  if (!utf8::valid(text)) {
    ParseOutcome bad;
    bad.diagnostics.push_back(Diagnostic{1, 1, "input is not valid UTF-8"});
    return bad;
  }
  return detail::TurtleParser(text, target_graph).run();
}

inline ParseOutcome parse_turtle(std::string_view text, const std::string& target_graph) {
  return parse_turtle(text, Term::iri(target_graph));
}

/// Parses N-Quads. Triples without a graph label take default_graph, or are
/// rejected when none is given.
inline ParseOutcome parse_nquads(std::string_view text,
                                 std::optional<Term> default_graph = std::nullopt) {
  if (!utf8::valid(text)) {
    ParseOutcome bad;
    bad.diagnostics.push_back(Diagnostic{1, 1, "input is not valid UTF-8"});
    return bad;
  }
  return detail::NQuadsParser(text, std::move(default_graph)).run();
}

/// Canonical form: distinct quads, one per LF-terminated line, sorted bytewise.
template <typename Range>
std::string serialize_nquads(const Range& quads) {
  std::set<std::string> lines;
  for (const Quad& q : quads) lines.insert(q.key());
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out.push_back('\n');
  }
  return out;
}

inline std::string serialize_nquads(const Dataset& ds) { return ds.to_nquads(); }

/// Loads a canonical snapshot into an empty dataset; throws on a corrupt file.
inline Dataset load_snapshot(std::string_view text) {
  auto outcome = parse_nquads(text);
  if (!outcome.ok())
    throw Error(ErrorCode::parse_error, "corrupt snapshot: " + outcome.diagnostics.front().to_string());
  Dataset ds;
  for (const auto& q : outcome.quads) ds.insert(q);
  return ds;
}

}  // namespace fluentkb::rdf
