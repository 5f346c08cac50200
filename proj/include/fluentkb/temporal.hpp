#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fluentkb/error.hpp"
#include "fluentkb/hash.hpp"
#include "fluentkb/store.hpp"
#include "fluentkb/term.hpp"
#include "fluentkb/vocab.hpp"

namespace fluentkb::temporal {

/// A day, or one of the two sentinels bounding the considered period.
/// START < every date < END.
class Instant {
 public:
  enum class Kind : std::uint8_t { start = 0, date = 1, end = 2 };

  static constexpr Instant start() { return Instant(Kind::start, 0); }
  static constexpr Instant end() { return Instant(Kind::end, 0); }

  static Instant from_ymd(int y, unsigned m, unsigned d) {
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok())
      throw Error(ErrorCode::invalid_argument, "invalid calendar date " + std::to_string(y) + "-" +
                                                   std::to_string(m) + "-" + std::to_string(d));
    return Instant(Kind::date, std::chrono::sys_days{ymd}.time_since_epoch().count());
  }

  static constexpr Instant from_days(std::int32_t days_since_epoch) {
    return Instant(Kind::date, days_since_epoch);
  }

  /// Parses "YYYY-MM-DD"; returns nullopt on any malformed input.
  static std::optional<Instant> parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    auto ok = [](std::string_view s, auto& out) {
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
      return ec == std::errc() && p == s.data() + s.size();
    };
    if (!ok(text.substr(0, 4), y) || !ok(text.substr(5, 2), m) || !ok(text.substr(8, 2), d))
      return std::nullopt;
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) return std::nullopt;
    return Instant(Kind::date, std::chrono::sys_days{ymd}.time_since_epoch().count());
  }

  /// Parses a year ("1857"); nullopt if malformed.
  static std::optional<int> parse_year(std::string_view text) {
    if (text.size() != 4) return std::nullopt;
    int y = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), y);
    if (ec != std::errc() || p != text.data() + text.size()) return std::nullopt;
    return y;
  }

  Kind kind() const noexcept { return kind_; }
  bool is_date() const noexcept { return kind_ == Kind::date; }
  std::int32_t days() const noexcept { return days_; }

  std::chrono::year_month_day ymd() const {
    return std::chrono::year_month_day{std::chrono::sys_days{std::chrono::days{days_}}};
  }

  /// "YYYY-MM-DD", "START" or "END".
  std::string to_string() const {
    if (kind_ == Kind::start) return "START";
    if (kind_ == Kind::end) return "END";
    auto d = ymd();
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
  }

  friend constexpr bool operator==(const Instant&, const Instant&) = default;
  friend constexpr std::strong_ordering operator<=>(const Instant& a, const Instant& b) {
    if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
    return a.days_ <=> b.days_;
  }

 private:
  constexpr Instant(Kind kind, std::int32_t days) : kind_(kind), days_(days) {}

  Kind kind_;
  std::int32_t days_;
};

/// Closed interval of days, begin <= end.
class Interval {
 public:
  Interval(Instant begin, Instant end) : begin_(begin), end_(end) {
    if (end_ < begin_)
      throw Error(ErrorCode::invalid_interval,
                  "interval begin " + begin_.to_string() + " is after end " + end_.to_string());
  }

  /// Jan 1 .. Dec 31 of the given year.
  static Interval year(int y) { return Interval(Instant::from_ymd(y, 1, 1), Instant::from_ymd(y, 12, 31)); }

  Instant begin() const noexcept { return begin_; }
  Instant end() const noexcept { return end_; }

  bool contains(Instant t) const noexcept { return begin_ <= t && t <= end_; }

  std::string to_string() const { return "[" + begin_.to_string() + ", " + end_.to_string() + "]"; }

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  Instant begin_;
  Instant end_;
};

enum class AllenRelation : std::uint8_t {
  before,
  meets,
  overlaps,
  starts,
  during,
  finishes,
  equals,
  finished_by,
  contains,
  started_by,
  overlapped_by,
  met_by,
  after,
};

inline constexpr std::array<AllenRelation, 13> all_allen_relations = {
    AllenRelation::before,      AllenRelation::meets,         AllenRelation::overlaps,
    AllenRelation::starts,      AllenRelation::during,        AllenRelation::finishes,
    AllenRelation::equals,      AllenRelation::finished_by,   AllenRelation::contains,
    AllenRelation::started_by,  AllenRelation::overlapped_by, AllenRelation::met_by,
    AllenRelation::after,
};

inline const char* to_string(AllenRelation r) {
  switch (r) {
    case AllenRelation::before: return "before";
    case AllenRelation::meets: return "meets";
    case AllenRelation::overlaps: return "overlaps";
    case AllenRelation::starts: return "starts";
    case AllenRelation::during: return "during";
    case AllenRelation::finishes: return "finishes";
    case AllenRelation::equals: return "equals";
    case AllenRelation::finished_by: return "finished_by";
    case AllenRelation::contains: return "contains";
    case AllenRelation::started_by: return "started_by";
    case AllenRelation::overlapped_by: return "overlapped_by";
    case AllenRelation::met_by: return "met_by";
    case AllenRelation::after: return "after";
  }
  return "?";
}

/// Allen relation of a to b, comparing endpoints at day granularity.
///
/// Single-day intervals are points: a point sharing an endpoint with a
/// longer interval starts or finishes it rather than meeting it, so that
/// exactly one relation holds for every pair.
inline AllenRelation interval_compare(const Interval& a, const Interval& b) {
  const Instant a1 = a.begin(), a2 = a.end(), b1 = b.begin(), b2 = b.end();
  if (a1 == b1 && a2 == b2) return AllenRelation::equals;
  if (a2 < b1) return AllenRelation::before;
  if (b2 < a1) return AllenRelation::after;
  if (a1 == b1) return a2 < b2 ? AllenRelation::starts : AllenRelation::started_by;
  if (a2 == b2) return a1 > b1 ? AllenRelation::finishes : AllenRelation::finished_by;
  // Endpoints now differ pairwise except possibly a2 == b1 or b2 == a1.
  if (a2 == b1) return AllenRelation::meets;
  if (b2 == a1) return AllenRelation::met_by;
  if (b1 < a1 && a2 < b2) return AllenRelation::during;
  if (a1 < b1 && b2 < a2) return AllenRelation::contains;
  return a1 < b1 ? AllenRelation::overlaps : AllenRelation::overlapped_by;
}

/// True iff candidate lies within existing (equality included).
inline bool subsumes(const Interval& existing, const Interval& candidate) {
  return existing.begin() <= candidate.begin() && candidate.end() <= existing.end();
}

/// True iff the two intervals share at least one day.
inline bool intersects(const Interval& a, const Interval& b) {
  return a.begin() <= b.end() && b.begin() <= a.end();
}

// ---------------------------------------------------------------------------
// Terms <-> instants and intervals

inline Term start_term() { return Term::iri(vocab::sism("start-of-considered-period")); }
inline Term end_term() { return Term::iri(vocab::sism("end-of-considered-period")); }

inline Term to_term(Instant t) {
  switch (t.kind()) {
    case Instant::Kind::start: return start_term();
    case Instant::Kind::end: return end_term();
    case Instant::Kind::date: break;
  }
  return Term::literal(t.to_string(), vocab::xsd_date);
}

namespace detail {

inline const std::string& in_xsd_date() {
  static const std::string v = vocab::time("inXSDDate");
  return v;
}

inline std::optional<Term> first_object(const Dataset& ds, const Term& s, const std::string& p) {
  auto found = ds.match(s, Term::iri(p), std::nullopt);
  if (found.empty()) return std::nullopt;
  return found.front().object();
}

inline std::optional<Term> first_object_any(const Dataset& ds, const Term& s,
                                            std::initializer_list<std::string> preds) {
  for (const auto& p : preds)
    if (auto o = first_object(ds, s, p)) return o;
  return std::nullopt;
}

}  // namespace detail

/// Instant denoted by a term: an xsd:date (or dateTime) literal, an xsd:gYear
/// literal (its Jan 1), a sentinel IRI, or a node carrying time:inXSDDate.
inline std::optional<Instant> instant_of(const Term& t, const Dataset* ds = nullptr) {
  if (t.is_literal()) {
    const auto& dt = t.datatype();
    std::string_view lex = t.value();
    if (dt == vocab::xsd_date_time && lex.size() >= 10) return Instant::parse_date(lex.substr(0, 10));
    if (dt == vocab::xsd_g_year) {
      if (auto y = Instant::parse_year(lex)) return Instant::from_ymd(*y, 1, 1);
      return std::nullopt;
    }
    if (dt == vocab::xsd_date || dt == vocab::xsd_string) return Instant::parse_date(lex);
    return std::nullopt;
  }
  if (t == start_term()) return Instant::start();
  if (t == end_term()) return Instant::end();
  if (ds != nullptr) {
    if (auto d = detail::first_object(*ds, t, detail::in_xsd_date()); d && d->is_literal())
      return instant_of(*d, nullptr);
  }
  return std::nullopt;
}

/// Interval denoted by a term: a date literal (one day), a gYear literal (the
/// whole year), or a node with hasBeginning/hasEnd. A node with only one
/// endpoint denotes that single day (the year, for a gYear endpoint).
inline std::optional<Interval> interval_of(const Term& t, const Dataset& ds) {
  if (t.is_literal()) {
    if (t.datatype() == vocab::xsd_g_year) {
      if (auto y = Instant::parse_year(t.value())) return Interval::year(*y);
      return std::nullopt;
    }
    if (auto i = instant_of(t)) return Interval(*i, *i);
    return std::nullopt;
  }
  auto b = detail::first_object_any(ds, t, {vocab::time("hasBeginning"), vocab::sism("hasBeginning")});
  auto e = detail::first_object_any(ds, t, {vocab::time("hasEnd"), vocab::sism("hasEnd")});
  if (!b && !e) {
    if (auto i = instant_of(t, &ds)) return Interval(*i, *i);
    return std::nullopt;
  }
  if (b && !e) {
    if (b->is_literal() && b->datatype() == vocab::xsd_g_year) return interval_of(*b, ds);
    e = b;
  }
  if (e && !b) {
    if (e->is_literal() && e->datatype() == vocab::xsd_g_year) return interval_of(*e, ds);
    b = e;
  }
  auto bi = instant_of(*b, &ds);
  auto ei = instant_of(*e, &ds);
  if (!bi || !ei || *ei < *bi) return std::nullopt;
  return Interval(*bi, *ei);
}

// ---------------------------------------------------------------------------
// Fluent relations

/// Who produced a fluent: nullopt rule id means asserted directly.
struct Provenance {
  std::optional<std::string> rule_id;

  static Provenance asserted() { return {}; }
  static Provenance rule(std::string id) { return {std::move(id)}; }

  std::string to_string() const { return rule_id ? "rule:" + *rule_id : "asserted"; }
};

struct FluentRelation {
  Term node;
  Term subject;
  Term property;
  Term object;
  Interval during;
  Provenance provenance;
  std::optional<Term> initiated_by;
  std::optional<Term> terminated_by;
};

struct FluentSpec {
  Term subject;
  Term property;
  Term object;
  Interval during;
  Provenance provenance = Provenance::asserted();
  std::optional<Term> initiated_by = std::nullopt;
  std::optional<Term> terminated_by = std::nullopt;
};

struct AssertOutcome {
  enum class Status { inserted, blocked_subsumed };
  Status status;
  Term node;  // the new node, or the existing subsuming one

  bool inserted() const noexcept { return status == Status::inserted; }
};

inline const std::string& fluent_class() {
  static const std::string v = vocab::sism("FluentRelation");
  return v;
}
inline const std::string& during_property() {
  static const std::string v = vocab::sism("during");
  return v;
}

inline constexpr std::string_view fluent_node_prefix = "fluent-";

/// Nodes minted by the engine for fluents and their intervals.
inline bool is_generated_node(const Term& t) {
  return t.is_skolem() && (t.value().starts_with(fluent_node_prefix) || t.value().starts_with("iwt-"));
}

inline std::string fluent_id(const Term& s, const Term& p, const Term& o, const Interval& i) {
  return std::string(fluent_node_prefix) +
         key_hash({s.to_nquads(), p.to_nquads(), o.to_nquads(), i.begin().to_string(), i.end().to_string()});
}

/// Reads a FluentRelation rooted at node, or nullopt if the node is not a
/// well-formed fluent for (subject, property).
inline std::optional<FluentRelation> read_fluent(const Dataset& ds, const Term& node,
                                                 const Term& subject, const Term& property) {
  if (!node.is_resource()) return std::nullopt;
  if (!ds.contains_triple(node, Term::iri(vocab::rdf_type), Term::iri(fluent_class()))) return std::nullopt;
  auto objects = ds.match(node, property, std::nullopt);
  if (objects.empty()) return std::nullopt;
  auto interval_node = detail::first_object(ds, node, during_property());
  if (!interval_node) return std::nullopt;
  auto b = detail::first_object(ds, *interval_node, vocab::time("hasBeginning"));
  auto e = detail::first_object(ds, *interval_node, vocab::time("hasEnd"));
  Instant begin = b ? instant_of(*b, &ds).value_or(Instant::start()) : Instant::start();
  Instant end = e ? instant_of(*e, &ds).value_or(Instant::end()) : Instant::end();
  if (end < begin) return std::nullopt;
  Provenance prov;
  if (auto pv = detail::first_object(ds, node, vocab::sism("provenance")); pv && pv->is_literal()) {
    if (pv->value().starts_with("rule:")) prov = Provenance::rule(pv->value().substr(5));
  }
  return FluentRelation{node,
                        subject,
                        property,
                        objects.front().object(),
                        Interval(begin, end),
                        prov,
                        detail::first_object(ds, node, vocab::sism("initiatedBy")),
                        detail::first_object(ds, node, vocab::sism("terminatedBy"))};
}

/// All fluents relating subject and object through property.
inline std::vector<FluentRelation> fluents_of(const Dataset& ds, const Term& subject,
                                              const Term& property, const Term& object) {
  std::vector<FluentRelation> out;
  for (const auto& q : ds.match(subject, property, std::nullopt)) {
    const Term& node = q.object();
    if (!node.is_resource()) continue;
    if (!ds.contains_triple(node, property, object)) continue;
    if (!ds.contains_triple(node, Term::iri(vocab::rdf_type), Term::iri(fluent_class()))) continue;
    if (auto f = read_fluent(ds, node, subject, property)) {
      f->object = object;
      out.push_back(std::move(*f));
    }
  }
  return out;
}

/// Every fluent in the dataset, ordered by node.
inline std::vector<FluentRelation> all_fluents(const Dataset& ds) {
  std::vector<FluentRelation> out;
  for (const auto& typing : ds.match(std::nullopt, Term::iri(vocab::rdf_type), Term::iri(fluent_class()))) {
    const Term& node = typing.subject();
    // The subject links to the node through the fluent's own property.
    for (const auto& link : ds.match(std::nullopt, std::nullopt, node)) {
      if (link.predicate().value() == vocab::rdf_type) continue;
      if (auto f = read_fluent(ds, node, link.subject(), link.predicate())) {
        if (std::none_of(out.begin(), out.end(), [&](const FluentRelation& x) {
              return x.node == f->node && x.property == f->property && x.subject == f->subject;
            }))
          out.push_back(std::move(*f));
      }
    }
  }
  return out;
}

/// Inserts a fluent unless an existing fluent on the same (subject,
/// property, object) already covers its interval. Never retracts narrower
/// fluents. The node id is a function of (subject, property, object, during).
inline AssertOutcome assert_fluent(Dataset& ds, const FluentSpec& spec) {
  if (!spec.subject.is_resource())
    throw Error(ErrorCode::invalid_argument, "fluent subject must be an IRI or node");
  if (!spec.property.is_iri()) throw Error(ErrorCode::invalid_argument, "fluent property must be an IRI");
  for (const auto& existing : fluents_of(ds, spec.subject, spec.property, spec.object)) {
    if (subsumes(existing.during, spec.during))
      return AssertOutcome{AssertOutcome::Status::blocked_subsumed, existing.node};
  }
  std::string id = fluent_id(spec.subject, spec.property, spec.object, spec.during);
  Term node = Term::skolem(id);
  Term interval_node = Term::skolem(id + "-interval");
  Term g = Term::iri(vocab::graph_fluents);
  Term type = Term::iri(vocab::rdf_type);
  ds.insert(Quad(node, type, Term::iri(fluent_class()), g));
  ds.insert(Quad(spec.subject, spec.property, node, g));
  ds.insert(Quad(node, spec.property, spec.object, g));
  ds.insert(Quad(node, Term::iri(during_property()), interval_node, g));
  ds.insert(Quad(interval_node, type, Term::iri(vocab::time("Interval")), g));
  ds.insert(Quad(interval_node, Term::iri(vocab::time("hasBeginning")), to_term(spec.during.begin()), g));
  ds.insert(Quad(interval_node, Term::iri(vocab::time("hasEnd")), to_term(spec.during.end()), g));
  ds.insert(Quad(node, Term::iri(vocab::sism("provenance")), Term::literal(spec.provenance.to_string()), g));
  if (spec.initiated_by) ds.insert(Quad(node, Term::iri(vocab::sism("initiatedBy")), *spec.initiated_by, g));
  if (spec.terminated_by) ds.insert(Quad(node, Term::iri(vocab::sism("terminatedBy")), *spec.terminated_by, g));
  return AssertOutcome{AssertOutcome::Status::inserted, node};
}

/// True iff some fluent on (subject, property, object) covers t.
inline bool holds_at(const Dataset& ds, const Term& subject, const Term& property, const Term& object,
                     Instant t) {
  auto fs = fluents_of(ds, subject, property, object);
  return std::any_of(fs.begin(), fs.end(), [&](const FluentRelation& f) { return f.during.contains(t); });
}

}  // namespace fluentkb::temporal
