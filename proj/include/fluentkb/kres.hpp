#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "fluentkb/error.hpp"
#include "fluentkb/format.hpp"
#include "fluentkb/hash.hpp"
#include "fluentkb/store.hpp"
#include "fluentkb/term.hpp"
#include "fluentkb/unicode.hpp"
#include "fluentkb/vocab.hpp"

namespace fluentkb::kres {

enum class ResourceKind { owl_ontology, skos_thesaurus, terminology };

inline const char* to_string(ResourceKind k) {
  switch (k) {
    case ResourceKind::owl_ontology: return "owl_ontology";
    case ResourceKind::skos_thesaurus: return "skos_thesaurus";
    case ResourceKind::terminology: return "terminology";
  }
  return "?";
}

/// Accepts the short CLI names (owl, skos) and the full names.
inline std::optional<ResourceKind> parse_kind(std::string_view s) {
  if (s == "owl" || s == "owl_ontology") return ResourceKind::owl_ontology;
  if (s == "skos" || s == "skos_thesaurus") return ResourceKind::skos_thesaurus;
  if (s == "terminology") return ResourceKind::terminology;
  return std::nullopt;
}

struct KnowledgeResource {
  Term id;
  ResourceKind kind;
  std::string label;
  std::size_t entity_count = 0;
};

struct Label {
  std::string text;
  std::string language;
  friend bool operator==(const Label&, const Label&) = default;
};

struct TermEntry {
  Term concept_iri;
  std::string lexical_form;
  std::string definition;
  std::vector<std::string> contexts_of_use;
  Term terminology;
};

struct KnowledgeEntity {
  Term iri;
  Term resource;
  std::vector<Label> labels;
  std::string kind;  // native class IRI
  std::optional<TermEntry> term;
};

enum class Relation { equivalent, subsumes, subsumed_by, related };

inline const char* to_string(Relation r) {
  switch (r) {
    case Relation::equivalent: return "equivalent";
    case Relation::subsumes: return "subsumes";
    case Relation::subsumed_by: return "subsumed_by";
    case Relation::related: return "related";
  }
  return "?";
}

inline std::optional<Relation> parse_relation(std::string_view s) {
  if (s == "equivalent") return Relation::equivalent;
  if (s == "subsumes") return Relation::subsumes;
  if (s == "subsumed_by") return Relation::subsumed_by;
  if (s == "related") return Relation::related;
  return std::nullopt;
}

struct Correspondence {
  Term entity1;
  Term entity2;
  Relation relation;
  double confidence;
};

enum class ClashKind { disjoint_types, different_but_equivalent, functional_conflict };

inline const char* to_string(ClashKind k) {
  switch (k) {
    case ClashKind::disjoint_types: return "disjoint_types";
    case ClashKind::different_but_equivalent: return "different_but_equivalent";
    case ClashKind::functional_conflict: return "functional_conflict";
  }
  return "?";
}

struct Clash {
  ClashKind kind;
  std::vector<Term> terms;  // the individual / classes / property involved
  std::string message;

  std::string key() const {
    std::string k = to_string(kind);
    for (const auto& t : terms) k += ' ' + t.to_nquads();
    return k;
  }
};

struct ImportReport {
  Term resource;
  std::size_t entity_count = 0;
  std::vector<Clash> clashes;
  bool accepted = false;
};

struct ImportOptions {
  bool replace = false;
  double alignment_trust = 0.8;
  std::optional<std::string> label;
};

// ---------------------------------------------------------------------------
// Vocabulary

namespace names {
inline const std::string knowledge_entity = vocab::sism("KnowledgeEntity");
inline const std::string knowledge_resource = vocab::sism("KnowledgeResource");
inline const std::string in_knowledge_resource = vocab::sism("inKnowledgeResource");
inline const std::string resource_kind = vocab::sism("resourceKind");
inline const std::string term_entry = vocab::sism("TermEntry");
inline const std::string terminology = vocab::sism("Terminology");
inline const std::string lexical_form = vocab::sism("lexicalForm");
inline const std::string definition = vocab::sism("definition");
inline const std::string context_of_use = vocab::sism("contextOfUse");
inline const std::string correspondence = vocab::sism("Correspondence");
}  // namespace names

/// The abstraction mapping for one resource kind, as stored in <sys:schema>.
inline std::vector<Quad> mapping_table(ResourceKind kind) {
  using namespace vocab;
  const Term sub_class = Term::iri(rdfs_sub_class_of);
  const Term sub_prop = Term::iri(rdfs_sub_property_of);
  const Term g = Term::iri(graph_schema);
  const Term ke = Term::iri(names::knowledge_entity);
  const Term kr = Term::iri(names::knowledge_resource);
  std::vector<Quad> out;
  switch (kind) {
    case ResourceKind::skos_thesaurus:
      out.emplace_back(Term::iri(skos("ConceptScheme")), sub_class, kr, g);
      out.emplace_back(Term::iri(skos("Concept")), sub_class, ke, g);
      out.emplace_back(Term::iri(skos("inScheme")), sub_prop, Term::iri(names::in_knowledge_resource), g);
      out.emplace_back(Term::iri(skos("Scheme")), sub_class, kr, g);
      out.emplace_back(Term::iri(skos("semanticRelation")), sub_prop, Term::iri(sism("semanticRelation")), g);
      break;
    case ResourceKind::owl_ontology:
      out.emplace_back(Term::iri(owl("Ontology")), sub_class, kr, g);
      out.emplace_back(Term::iri(owl("NamedIndividual")), sub_class, ke, g);
      out.emplace_back(Term::iri(owl("Class")), sub_class, ke, g);
      out.emplace_back(Term::iri(owl("ObjectProperty")), sub_class, ke, g);
      out.emplace_back(Term::iri(owl("DatatypeProperty")), sub_class, ke, g);
      break;
    case ResourceKind::terminology:
      out.emplace_back(Term::iri(names::terminology), sub_class, kr, g);
      out.emplace_back(Term::iri(names::term_entry), sub_class, ke, g);
      break;
  }
  return out;
}

/// Native classes whose instances become knowledge entities.
inline std::vector<std::string> entity_classes(ResourceKind kind) {
  using namespace vocab;
  switch (kind) {
    case ResourceKind::skos_thesaurus: return {skos("Concept")};
    case ResourceKind::owl_ontology:
      return {owl("Class"), owl("NamedIndividual"), owl("ObjectProperty"), owl("DatatypeProperty")};
    case ResourceKind::terminology: return {names::term_entry};
  }
  return {};
}

inline std::vector<std::string> container_classes(ResourceKind kind) {
  using namespace vocab;
  switch (kind) {
    case ResourceKind::skos_thesaurus: return {skos("ConceptScheme"), skos("Scheme")};
    case ResourceKind::owl_ontology: return {owl("Ontology")};
    case ResourceKind::terminology: return {names::terminology};
  }
  return {};
}

inline const std::vector<std::string>& label_properties() {
  static const std::vector<std::string> v = {vocab::rdfs_label, vocab::skos("prefLabel"), vocab::skos("altLabel"),
                                             names::lexical_form};
  return v;
}

// ---------------------------------------------------------------------------
// URI minting

/// resource + "/concept/" + slug, where slug is the NFC-normalized, lowercased
/// lexical form with surrounding whitespace trimmed, inner whitespace runs
/// replaced by '-', and every other byte outside [a-z0-9] percent-encoded
/// (a literal '-' becomes %2D so that "a-b" and "a b" stay distinct).
inline Term mint_uri(std::string_view lexical, const Term& resource) {
  if (!resource.is_iri()) throw Error(ErrorCode::invalid_argument, "resource must be an IRI");
  std::string lowered = unicode::lower(lexical);
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(lowered.data(), static_cast<int32_t>(lowered.size())));
  std::string slug;
  bool pending_space = false;
  static constexpr char hex[] = "0123456789ABCDEF";
  for (int32_t i = 0; i < u.length();) {
    UChar32 c = u.char32At(i);
    i += U16_LENGTH(c);
    if (u_isUWhiteSpace(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !slug.empty()) slug.push_back('-');
    pending_space = false;
    std::string bytes;
    icu::UnicodeString(c).toUTF8String(bytes);
    for (unsigned char b : bytes) {
      if ((b >= 'a' && b <= 'z') || (b >= '0' && b <= '9')) {
        slug.push_back(static_cast<char>(b));
      } else {
        slug.push_back('%');
        slug.push_back(hex[b >> 4]);
        slug.push_back(hex[b & 0xf]);
      }
    }
  }
  if (slug.empty()) throw Error(ErrorCode::invalid_argument, "empty lexical form");
  return Term::iri(resource.value() + "/concept/" + slug);
}

// ---------------------------------------------------------------------------
// Reading

inline std::optional<Term> resource_of(const Dataset& ds, const Term& entity) {
  // The membership quad lives in the resource's own graph; inferred copies elsewhere are ignored.
  for (const auto& q : ds.match(entity, Term::iri(names::in_knowledge_resource), std::nullopt))
    if (q.object().is_iri() && q.object().value() == q.graph().value()) return q.object();
  return std::nullopt;
}

inline std::optional<KnowledgeResource> find_resource(const Dataset& ds, const Term& id) {
  if (!id.is_iri()) return std::nullopt;
  auto kinds = ds.match(id, Term::iri(names::resource_kind), std::nullopt, id);
  if (kinds.empty()) return std::nullopt;
  auto kind = parse_kind(kinds.front().object().value());
  if (!kind) return std::nullopt;
  KnowledgeResource r{id, *kind, id.value(), 0};
  auto labels = ds.match(id, Term::iri(vocab::rdfs_label), std::nullopt, id);
  if (!labels.empty()) r.label = labels.front().object().value();
  r.entity_count = ds.match(std::nullopt, Term::iri(names::in_knowledge_resource), id, id).size();
  return r;
}

/// Registered resources, sorted by id.
inline std::vector<KnowledgeResource> list_resources(const Dataset& ds) {
  std::vector<KnowledgeResource> out;
  for (const auto& q : ds.match(std::nullopt, Term::iri(names::resource_kind), std::nullopt))
    if (q.graph() == q.subject())
      if (auto r = find_resource(ds, q.subject())) out.push_back(std::move(*r));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id.value() < b.id.value(); });
  return out;
}

inline std::optional<TermEntry> term_entry(const Dataset& ds, const Term& concept_iri) {
  if (!ds.contains_triple(concept_iri, Term::iri(vocab::rdf_type), Term::iri(names::term_entry))) return std::nullopt;
  TermEntry e{concept_iri, {}, {}, {}, Term()};
  auto first = [&](const std::string& p) -> std::string {
    auto f = ds.match(concept_iri, Term::iri(p), std::nullopt);
    return f.empty() ? std::string() : f.front().object().value();
  };
  e.lexical_form = first(names::lexical_form);
  e.definition = first(names::definition);
  std::set<std::string> contexts;
  for (const auto& q : ds.match(concept_iri, Term::iri(names::context_of_use), std::nullopt))
    if (q.object().is_literal()) contexts.insert(q.object().value());
  e.contexts_of_use.assign(contexts.begin(), contexts.end());
  if (auto r = resource_of(ds, concept_iri)) e.terminology = *r;
  return e;
}

inline std::optional<KnowledgeEntity> entity(const Dataset& ds, const Term& iri) {
  auto resource = resource_of(ds, iri);
  if (!resource) return std::nullopt;
  KnowledgeEntity e{iri, *resource, {}, names::knowledge_entity, std::nullopt};
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& p : label_properties())
    for (const auto& q : ds.match(iri, Term::iri(p), std::nullopt))
      if (q.object().is_literal() && seen.emplace(q.object().value(), q.object().language()).second)
        e.labels.push_back(Label{q.object().value(), q.object().language()});
  auto kinds = ds.match(*resource, Term::iri(names::resource_kind), std::nullopt);
  if (auto kind = kinds.empty() ? std::nullopt : parse_kind(kinds.front().object().value())) {
    for (const auto& c : entity_classes(*kind))
      if (ds.contains_triple(iri, Term::iri(vocab::rdf_type), Term::iri(c))) {
        e.kind = c;
        break;
      }
  }
  e.term = term_entry(ds, iri);
  return e;
}

/// Entities of one resource, sorted by IRI.
inline std::vector<KnowledgeEntity> resource_entities(const Dataset& ds, const Term& resource) {
  std::vector<KnowledgeEntity> out;
  for (const auto& q : ds.match(std::nullopt, Term::iri(names::in_knowledge_resource), resource))
    if (auto e = entity(ds, q.subject()))
      if (e->resource == resource) out.push_back(std::move(*e));
  return out;
}

/// Case-insensitive exact match on labels and term lexical forms across all
/// resources, sorted by resource id then entity IRI.
inline std::vector<KnowledgeEntity> find_entities(const Dataset& ds, std::string_view lexical) {
  std::vector<KnowledgeEntity> out;
  if (lexical.empty()) return out;
  std::string needle = unicode::fold(lexical);
  std::set<std::string> seen;
  for (const auto& p : label_properties()) {
    for (const auto& q : ds.match(std::nullopt, Term::iri(p), std::nullopt)) {
      if (!q.object().is_literal() || unicode::fold(q.object().value()) != needle) continue;
      if (!seen.insert(q.subject().to_nquads()).second) continue;
      if (auto e = entity(ds, q.subject())) out.push_back(std::move(*e));
    }
  }
  std::sort(out.begin(), out.end(), [](const KnowledgeEntity& a, const KnowledgeEntity& b) {
    if (a.resource.value() != b.resource.value()) return a.resource.value() < b.resource.value();
    return a.iri.to_nquads() < b.iri.to_nquads();
  });
  return out;
}

/// All term entries, optionally restricted to some terminologies.
inline std::vector<TermEntry> term_entries(const Dataset& ds, const std::vector<Term>& terminologies = {}) {
  std::vector<TermEntry> out;
  for (const auto& q : ds.match(std::nullopt, Term::iri(vocab::rdf_type), Term::iri(names::term_entry))) {
    auto e = term_entry(ds, q.subject());
    if (!e || e->lexical_form.empty()) continue;
    if (!terminologies.empty() &&
        std::find(terminologies.begin(), terminologies.end(), e->terminology) == terminologies.end())
      continue;
    if (std::none_of(out.begin(), out.end(), [&](const TermEntry& x) { return x.concept_iri == e->concept_iri; }))
      out.push_back(std::move(*e));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Alignments

inline Term correspondence_node(const Term& e1, const Term& e2, Relation r) {
  return Term::skolem("corr-" + key_hash({e1.to_nquads(), e2.to_nquads(), to_string(r)}));
}

/// Correspondences stored in <sys:alignments> of ds, sorted by node.
inline std::vector<Correspondence> correspondences(const Dataset& ds) {
  std::vector<Correspondence> out;
  const Term g = Term::iri(vocab::graph_alignments);
  for (const auto& typing :
       ds.match(std::nullopt, Term::iri(vocab::rdf_type), Term::iri(names::correspondence), g)) {
    const Term& node = typing.subject();
    auto get = [&](const char* p) -> std::optional<Term> {
      auto f = ds.match(node, Term::iri(vocab::sism(p)), std::nullopt, g);
      if (f.empty()) return std::nullopt;
      return f.front().object();
    };
    auto e1 = get("entity1"), e2 = get("entity2"), rel = get("relation"), conf = get("confidence");
    if (!e1 || !e2 || !rel || !conf) continue;
    auto r = parse_relation(rel->value());
    auto c = parse_double(conf->value());
    if (!r || !c) continue;
    out.push_back(Correspondence{*e1, *e2, *r, *c});
  }
  return out;
}

/// Stores or updates a correspondence. Returns true when newly stored, false
/// when an existing (entity1, entity2, relation) had its confidence replaced.
inline bool add_correspondence(Dataset& ds, const Correspondence& c) {
  if (c.entity1 == c.entity2)
    throw Error(ErrorCode::invalid_argument, "correspondence relates " + c.entity1.to_nquads() + " to itself");
  if (!(c.confidence >= 0.0 && c.confidence <= 1.0))
    throw Error(ErrorCode::invalid_argument, "confidence must be in [0, 1]");
  for (const auto* e : {&c.entity1, &c.entity2})
    if (!resource_of(ds, *e)) throw Error(ErrorCode::unknown_entity, "unknown entity " + e->to_nquads());
  const Term g = Term::iri(vocab::graph_alignments);
  Term node = correspondence_node(c.entity1, c.entity2, c.relation);
  const Term conf_p = Term::iri(vocab::sism("confidence"));
  auto existing = ds.match(node, conf_p, std::nullopt, g);
  for (const auto& q : existing) ds.erase(q);
  ds.insert(Quad(node, Term::iri(vocab::rdf_type), Term::iri(names::correspondence), g));
  ds.insert(Quad(node, Term::iri(vocab::sism("entity1")), c.entity1, g));
  ds.insert(Quad(node, Term::iri(vocab::sism("entity2")), c.entity2, g));
  ds.insert(Quad(node, Term::iri(vocab::sism("relation")), Term::literal(to_string(c.relation)), g));
  ds.insert(Quad(node, conf_p, Term::literal(format_double(c.confidence), vocab::xsd_double), g));
  return existing.empty();
}

/// Parses "entity1,entity2,relation,confidence" rows; a header row is skipped.
inline std::vector<Correspondence> parse_alignment_csv(std::string_view text) {
  std::vector<Correspondence> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    auto b = s.find_first_not_of(" \t\r\"");
    auto e = s.find_last_not_of(" \t\r\"");
    if (b == std::string::npos) return std::string();
    s = s.substr(b, e - b + 1);
    if (s.size() >= 2 && s.front() == '<' && s.back() == '>') s = s.substr(1, s.size() - 2);
    return s;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line.starts_with('#')) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(trim(col));
    if (line_no == 1 && !cols.empty() && cols[0] == "entity1") continue;
    if (cols.size() != 4)
      throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": expected 4 columns");
    auto rel = parse_relation(cols[2]);
    auto conf = parse_double(cols[3]);
    if (!rel) throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": unknown relation '" + cols[2] + "'");
    if (!conf) throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": bad confidence '" + cols[3] + "'");
    out.push_back(Correspondence{Term::iri(cols[0]), Term::iri(cols[1]), *rel, *conf});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Consistency

struct ConsistencyOptions {
  double alignment_trust = 0.8;
};

namespace detail {

class UnionFind {
 public:
  std::string find(const std::string& x) {
    auto it = parent_.find(x);
    if (it == parent_.end() || it->second == x) return x;
    std::string root = find(it->second);
    parent_[x] = root;
    return root;
  }
  void unite(const std::string& a, const std::string& b) {
    auto ra = find(a), rb = find(b);
    if (ra == rb) return;
    if (rb < ra) std::swap(ra, rb);
    parent_[rb] = ra;
  }

 private:
  std::map<std::string, std::string> parent_;
};

}  // namespace detail

/// Every clash in a dataset: (a) an individual typed into two classes that
/// are disjoint under the subclass/equivalence/alignment closure, (b) owl:differentFrom
/// entities that are equivalent under owl:sameAs or trusted alignments, (c) a
/// functional property with two distinct literal values on one subject.
inline std::vector<Clash> find_clashes(const Dataset& ds, ConsistencyOptions options = {}) {
  using namespace vocab;
  std::map<std::string, std::set<std::string>> supers;  // direct subclass edges
  std::map<std::string, Term> terms;
  auto remember = [&](const Term& t) {
    auto k = t.to_nquads();
    terms.emplace(k, t);
    return k;
  };
  detail::UnionFind same;

  for (const auto& q : ds.match(std::nullopt, Term::iri(rdfs_sub_class_of), std::nullopt))
    supers[remember(q.subject())].insert(remember(q.object()));
  for (const auto& q : ds.match(std::nullopt, Term::iri(owl("equivalentClass")), std::nullopt)) {
    auto a = remember(q.subject()), b = remember(q.object());
    supers[a].insert(b);
    supers[b].insert(a);
  }
  for (const auto& q : ds.match(std::nullopt, Term::iri(owl("sameAs")), std::nullopt))
    same.unite(remember(q.subject()), remember(q.object()));
  for (const auto& c : correspondences(ds)) {
    if (c.confidence < options.alignment_trust) continue;
    auto a = remember(c.entity1), b = remember(c.entity2);
    switch (c.relation) {
      case Relation::equivalent:
        supers[a].insert(b);
        supers[b].insert(a);
        same.unite(a, b);
        break;
      case Relation::subsumes: supers[b].insert(a); break;
      case Relation::subsumed_by: supers[a].insert(b); break;
      case Relation::related: break;
    }
  }

  auto closure = [&](const std::set<std::string>& start) {
    std::set<std::string> out = start;
    std::vector<std::string> stack(start.begin(), start.end());
    while (!stack.empty()) {
      auto c = stack.back();
      stack.pop_back();
      auto it = supers.find(c);
      if (it == supers.end()) continue;
      for (const auto& d : it->second)
        if (out.insert(d).second) stack.push_back(d);
    }
    return out;
  };

  std::vector<Clash> out;
  std::set<std::string> keys;
  auto report = [&](Clash c) {
    if (keys.insert(c.key()).second) out.push_back(std::move(c));
  };

  // (a) disjoint types
  std::map<std::string, std::set<std::string>> group_types;
  std::map<std::string, std::set<std::string>> direct_types;
  for (const auto& q : ds.match(std::nullopt, Term::iri(rdf_type), std::nullopt)) {
    auto x = remember(q.subject());
    direct_types[x].insert(remember(q.object()));
  }
  for (const auto& [x, types] : direct_types) group_types[same.find(x)].insert(types.begin(), types.end());
  std::vector<std::pair<std::string, std::string>> disjoint;
  for (const auto& q : ds.match(std::nullopt, Term::iri(owl("disjointWith")), std::nullopt)) {
    auto a = remember(q.subject()), b = remember(q.object());
    disjoint.emplace_back(std::min(a, b), std::max(a, b));
  }
  if (!disjoint.empty()) {
    for (const auto& [x, types] : direct_types) {
      auto all = closure(group_types[same.find(x)]);
      for (const auto& [a, b] : disjoint) {
        if (all.count(a) && all.count(b))
          report(Clash{ClashKind::disjoint_types,
                       {terms.at(x), terms.at(a), terms.at(b)},
                       x + " is an instance of disjoint classes " + a + " and " + b});
      }
    }
  }

  // (b) differentFrom vs equivalence
  for (const auto& q : ds.match(std::nullopt, Term::iri(owl("differentFrom")), std::nullopt)) {
    auto a = remember(q.subject()), b = remember(q.object());
    if (same.find(a) == same.find(b)) {
      auto lo = std::min(a, b), hi = std::max(a, b);
      report(Clash{ClashKind::different_but_equivalent,
                   {terms.at(lo), terms.at(hi)},
                   lo + " and " + hi + " are declared different but aligned as equivalent"});
    }
  }

  // (c) functional properties
  for (const auto& fq : ds.match(std::nullopt, Term::iri(rdf_type), Term::iri(owl("FunctionalProperty")))) {
    const Term& p = fq.subject();
    if (!p.is_iri()) continue;
    std::map<std::string, std::set<std::string>> values;
    for (const auto& q : ds.match(std::nullopt, p, std::nullopt))
      if (q.object().is_literal()) values[remember(q.subject())].insert(q.object().to_nquads());
    for (const auto& [s, vals] : values) {
      if (vals.size() < 2) continue;
      std::string listed;
      for (const auto& v : vals) listed += (listed.empty() ? "" : ", ") + v;
      report(Clash{ClashKind::functional_conflict,
                   {terms.at(s), p},
                   "functional property " + p.to_nquads() + " has values " + listed + " on " + s});
    }
  }
  std::sort(out.begin(), out.end(), [](const Clash& a, const Clash& b) { return a.key() < b.key(); });
  return out;
}

/// Clashes introduced by adding candidate to ds: those of ds ∪ candidate
/// that ds alone does not have. An empty candidate set yields none.
inline std::vector<Clash> check_consistency(const Dataset& ds, const std::vector<Quad>& candidate,
                                            ConsistencyOptions options = {}) {
  if (candidate.empty()) return {};
  Dataset merged = ds;
  for (const auto& q : candidate) merged.insert(q);
  auto before = find_clashes(ds, options);
  std::set<std::string> known;
  for (const auto& c : before) known.insert(c.key());
  std::vector<Clash> out;
  for (auto& c : find_clashes(merged, options))
    if (!known.count(c.key())) out.push_back(std::move(c));
  return out;
}

// ---------------------------------------------------------------------------
// Import

namespace detail {

inline Term rename(const Term& t, const std::map<std::string, Term>& renames) {
  if (!t.is_skolem()) return t;
  auto it = renames.find(t.value());
  return it == renames.end() ? t : it->second;
}

}  // namespace detail

/// Imports parsed resource quads as knowledge resource `id`.
///
/// Blank term entries get concept IRIs minted from their lexical form; every
/// native entity is typed sism:KnowledgeEntity and linked to the resource
/// with sism:inKnowledgeResource; the kind's mapping table goes to
/// <sys:schema>. The import is atomic: when the consistency check reports
/// clashes the dataset is left untouched and accepted is false.
inline ImportReport import_resource(Dataset& ds, const std::vector<Quad>& parsed, ResourceKind kind, const Term& id,
                                    ImportOptions options = {}) {
  using namespace vocab;
  if (!id.is_iri()) throw Error(ErrorCode::invalid_argument, "resource id must be an IRI");
  bool exists = !ds.match(id, Term::iri(names::resource_kind), std::nullopt).empty();
  if (exists && !options.replace)
    throw Error(ErrorCode::duplicate_resource, "resource " + id.to_nquads() + " is already registered");

  Dataset work = ds;
  if (exists) work.remove_graph(id);

  const Term type = Term::iri(rdf_type);

  // Step 1: RDF version of the resource.
  std::map<std::string, Term> renames;
  if (kind == ResourceKind::terminology) {
    for (const auto& q : parsed) {
      if (q.predicate() != type || q.object() != Term::iri(names::term_entry) || !q.subject().is_skolem()) continue;
      std::optional<std::string> lexical;
      for (const auto& l : parsed)
        if (l.subject() == q.subject() && l.predicate() == Term::iri(names::lexical_form) && l.object().is_literal()) {
          lexical = l.object().value();
          break;
        }
      if (!lexical)
        throw Error(ErrorCode::invalid_argument, "term entry " + q.subject().to_nquads() + " has no sism:lexicalForm");
      renames.emplace(q.subject().value(), mint_uri(*lexical, id));
    }
  }
  std::vector<Quad> candidate;
  for (const auto& q : parsed)
    candidate.emplace_back(detail::rename(q.subject(), renames), q.predicate(), detail::rename(q.object(), renames), id);

  std::set<std::string> entity_keys;
  std::vector<Term> entities;
  std::vector<Term> containers;
  auto classes = entity_classes(kind);
  auto cont_classes = container_classes(kind);
  for (const auto& q : candidate) {
    if (q.predicate() != type || !q.object().is_iri()) continue;
    const auto& cls = q.object().value();
    if (std::find(classes.begin(), classes.end(), cls) != classes.end()) {
      if (entity_keys.insert(q.subject().to_nquads()).second) entities.push_back(q.subject());
    } else if (std::find(cont_classes.begin(), cont_classes.end(), cls) != cont_classes.end()) {
      containers.push_back(q.subject());
    }
  }
  for (const auto& e : entities) {
    if (auto owner = resource_of(work, e); owner && *owner != id)
      throw Error(ErrorCode::invalid_argument,
                  "entity " + e.to_nquads() + " already belongs to resource " + owner->to_nquads());
  }

  const Term ke = Term::iri(names::knowledge_entity);
  const Term kr = Term::iri(names::knowledge_resource);
  const Term member = Term::iri(names::in_knowledge_resource);
  for (const auto& e : entities) {
    candidate.emplace_back(e, type, ke, id);
    candidate.emplace_back(e, member, id, id);
  }
  for (const auto& c : containers) candidate.emplace_back(c, type, kr, id);
  candidate.emplace_back(id, type, kr, id);
  candidate.emplace_back(id, Term::iri(names::resource_kind), Term::literal(to_string(kind)), id);
  std::string label = options.label.value_or(std::string());
  if (label.empty()) {
    for (const auto& c : containers) {
      for (const auto& q : candidate)
        if (q.subject() == c && q.object().is_literal() &&
            (q.predicate().value() == rdfs_label || q.predicate().value() == skos("prefLabel"))) {
          label = q.object().value();
          break;
        }
      if (!label.empty()) break;
    }
  }
  if (!label.empty()) candidate.emplace_back(id, Term::iri(rdfs_label), Term::literal(label), id);
  for (auto& q : mapping_table(kind)) candidate.push_back(std::move(q));

  // Step 3 before step 2, so a rejected import never touches the store.
  ImportReport report{id, entities.size(), {}, false};
  report.clashes = check_consistency(work, candidate, ConsistencyOptions{options.alignment_trust});
  if (!report.clashes.empty()) return report;

  for (const auto& q : candidate) work.insert(q);
  ds = std::move(work);
  report.accepted = true;
  return report;
}

}  // namespace fluentkb::kres
