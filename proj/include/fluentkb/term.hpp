#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

#include "fluentkb/error.hpp"
#include "fluentkb/vocab.hpp"

namespace fluentkb {

enum class TermKind : std::uint8_t { iri, literal, skolem };

namespace detail {

inline bool is_scheme_char(char c, bool first) {
  if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) return true;
  if (first) return false;
  return (c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.';
}

inline bool has_scheme(std::string_view iri) {
  auto colon = iri.find(':');
  if (colon == std::string_view::npos || colon == 0) return false;
  for (std::size_t i = 0; i < colon; ++i)
    if (!is_scheme_char(iri[i], i == 0)) return false;
  return true;
}

// Characters that cannot appear inside <...> in N-Quads.
inline bool is_forbidden_iri_char(unsigned char c) {
  if (c <= 0x20) return true;
  switch (c) {
    case '<': case '>': case '"': case '{': case '}':
    case '|': case '^': case '`': case '\\':
      return true;
    default:
      return false;
  }
}

inline void escape_literal(std::string& out, std::string_view lex) {
  for (char c : lex) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
}

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

}  // namespace detail

/// An RDF term: an absolute IRI, a literal, or a skolemized blank node.
///
/// Terms are immutable values. Every factory validates its input and throws
/// Error{invalid_term} on violation, so a constructed Term always satisfies
/// the invariants (absolute IRIs, language tag only on rdf:langString,
/// nonempty skolem ids).
class Term {
 public:
  Term() = default;

  static Term iri(std::string value) {
    if (value.starts_with(vocab::skolem_prefix))
      return skolem(value.substr(vocab::skolem_prefix.size()));
    if (!detail::has_scheme(value))
      throw Error(ErrorCode::invalid_term, "IRI is not absolute: '" + value + "'");
    for (unsigned char c : value)
      if (detail::is_forbidden_iri_char(c))
        throw Error(ErrorCode::invalid_term, "IRI contains a forbidden character: '" + value + "'");
    return Term(TermKind::iri, std::move(value), {}, {});
  }

  static Term literal(std::string lexical, std::string datatype = vocab::xsd_string) {
    if (datatype == vocab::rdf_lang_string)
      throw Error(ErrorCode::invalid_term, "rdf:langString literal requires a language tag");
    validate_datatype(datatype);
    return Term(TermKind::literal, std::move(lexical), std::move(datatype), {});
  }

  static Term lang_literal(std::string lexical, std::string language) {
    if (language.empty())
      throw Error(ErrorCode::invalid_term, "empty language tag");
    return Term(TermKind::literal, std::move(lexical), vocab::rdf_lang_string,
                detail::ascii_lower(language));
  }

  static Term skolem(std::string id) {
    if (id.empty()) throw Error(ErrorCode::invalid_term, "empty skolem node id");
    for (unsigned char c : id)
      if (detail::is_forbidden_iri_char(c))
        throw Error(ErrorCode::invalid_term, "skolem id contains a forbidden character: '" + id + "'");
    return Term(TermKind::skolem, std::move(id), {}, {});
  }

  TermKind kind() const noexcept { return kind_; }
  bool is_iri() const noexcept { return kind_ == TermKind::iri; }
  bool is_literal() const noexcept { return kind_ == TermKind::literal; }
  bool is_skolem() const noexcept { return kind_ == TermKind::skolem; }
  bool is_resource() const noexcept { return kind_ != TermKind::literal; }

  /// IRI string, lexical form, or skolem id depending on kind.
  const std::string& value() const noexcept { return value_; }
  const std::string& datatype() const noexcept { return datatype_; }
  const std::string& language() const noexcept { return language_; }

  /// Canonical N-Quads rendering; skolem nodes render under urn:skolem:.
  std::string to_nquads() const {
    std::string out;
    append_nquads(out);
    return out;
  }

  void append_nquads(std::string& out) const {
    switch (kind_) {
      case TermKind::iri:
        out.push_back('<');
        out += value_;
        out.push_back('>');
        break;
      case TermKind::skolem:
        out.push_back('<');
        out += vocab::skolem_prefix;
        out += value_;
        out.push_back('>');
        break;
      case TermKind::literal:
        out.push_back('"');
        detail::escape_literal(out, value_);
        out.push_back('"');
        if (!language_.empty()) {
          out.push_back('@');
          out += language_;
        } else if (datatype_ != vocab::xsd_string) {
          out += "^^<";
          out += datatype_;
          out.push_back('>');
        }
        break;
    }
  }

  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term&, const Term&) = default;

 private:
  Term(TermKind kind, std::string value, std::string datatype, std::string language)
      : kind_(kind), value_(std::move(value)), datatype_(std::move(datatype)),
        language_(std::move(language)) {}

  static void validate_datatype(const std::string& dt) {
    if (!detail::has_scheme(dt))
      throw Error(ErrorCode::invalid_term, "literal datatype is not an absolute IRI: '" + dt + "'");
  }

  TermKind kind_ = TermKind::iri;
  std::string value_;
  std::string datatype_;
  std::string language_;
};

inline Term iri(std::string value) { return Term::iri(std::move(value)); }
inline Term literal(std::string lexical) { return Term::literal(std::move(lexical)); }

/// One statement in a named graph.
class Quad {
 public:
  Quad(Term subject, Term predicate, Term object, Term graph)
      : subject_(std::move(subject)), predicate_(std::move(predicate)),
        object_(std::move(object)), graph_(std::move(graph)) {
    if (subject_.is_literal())
      throw Error(ErrorCode::invalid_quad, "quad subject must not be a literal: " + subject_.to_nquads());
    if (!predicate_.is_iri())
      throw Error(ErrorCode::invalid_quad, "quad predicate must be an IRI: " + predicate_.to_nquads());
    if (!graph_.is_iri())
      throw Error(ErrorCode::invalid_quad, "quad graph must be an IRI: " + graph_.to_nquads());
  }

  Quad(Term subject, Term predicate, Term object, const std::string& graph)
      : Quad(std::move(subject), std::move(predicate), std::move(object), Term::iri(graph)) {}

  const Term& subject() const noexcept { return subject_; }
  const Term& predicate() const noexcept { return predicate_; }
  const Term& object() const noexcept { return object_; }
  const Term& graph() const noexcept { return graph_; }

  /// Canonical N-Quads line without the trailing newline. Byte order of
  /// these keys is the dataset's iteration order.
  std::string key() const {
    std::string out;
    subject_.append_nquads(out);
    out.push_back(' ');
    predicate_.append_nquads(out);
    out.push_back(' ');
    object_.append_nquads(out);
    out.push_back(' ');
    graph_.append_nquads(out);
    out += " .";
    return out;
  }

  friend bool operator==(const Quad&, const Quad&) = default;

 private:
  Term subject_;
  Term predicate_;
  Term object_;
  Term graph_;
};

}  // namespace fluentkb
