#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fluentkb/error.hpp"
#include "fluentkb/format.hpp"
#include "fluentkb/hash.hpp"
#include "fluentkb/kres.hpp"
#include "fluentkb/store.hpp"
#include "fluentkb/temporal.hpp"
#include "fluentkb/term.hpp"
#include "fluentkb/unicode.hpp"
#include "fluentkb/utf8.hpp"
#include "fluentkb/vocab.hpp"

namespace fluentkb::indexer {

struct Transcription {
  Term id;
  Term manuscript;
  std::string surface;
  std::string zone;
  long long sequence = 0;
  std::string text;
};

struct Token {
  std::size_t start = 0;  // scalar offsets into the text
  std::size_t end = 0;
  std::string surface;
  std::string folded;
};

struct Occurrence {
  Term transcription;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string surface;
};

enum class Status { proposed, accepted, rejected };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::proposed: return "proposed";
    case Status::accepted: return "accepted";
    case Status::rejected: return "rejected";
  }
  return "?";
}

inline std::optional<Status> parse_status(std::string_view s) {
  if (s == "proposed") return Status::proposed;
  if (s == "accepted") return Status::accepted;
  if (s == "rejected") return Status::rejected;
  return std::nullopt;
}

struct Association {
  Term id;
  Occurrence occurrence;
  Term concept_iri;
  double score = 0;
  Status status = Status::proposed;
  std::optional<std::string> decided_by;
};

/// Case-folded stopword set.
class Stopwords {
 public:
  Stopwords() = default;

  /// One token per line; blank lines and '#' comments are skipped.
  static Stopwords parse(std::string_view text) {
    Stopwords s;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
      auto b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos || line[b] == '#') continue;
      auto e = line.find_last_not_of(" \t\r");
      s.words_.insert(unicode::fold(std::string_view(line).substr(b, e - b + 1)));
    }
    return s;
  }

  static Stopwords from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_error, "cannot read stopword file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  /// The French list shipped under data/, when the build recorded its location.
  static Stopwords french() {
#ifdef FLUENTKB_DATA_DIR
    return from_file(std::string(FLUENTKB_DATA_DIR) + "/stopwords-fr.txt");
#else
    return {};
#endif
  }

  bool contains(std::string_view folded) const { return words_.count(std::string(folded)) > 0; }
  std::size_t size() const { return words_.size(); }

 private:
  std::set<std::string> words_;
};

struct IndexConfig {
  double theta = 0.35;
  double lambda = 0.3;
  std::size_t window = 5;
  Stopwords stopwords;
};

namespace names {
inline const std::string transcription = vocab::sism("Transcription");
inline const std::string of_manuscript = vocab::sism("ofManuscript");
inline const std::string surface = vocab::sism("surface");
inline const std::string zone = vocab::sism("zone");
inline const std::string sequence = vocab::sism("sequence");
inline const std::string text = vocab::sism("text");
inline const std::string association = vocab::sism("Association");
inline const std::string in_transcription = vocab::sism("inTranscription");
inline const std::string start = vocab::sism("start");
inline const std::string end = vocab::sism("end");
inline const std::string surface_form = vocab::sism("surfaceForm");
inline const std::string has_concept = vocab::sism("concept");
inline const std::string score = vocab::sism("score");
inline const std::string status = vocab::sism("status");
inline const std::string decided_by = vocab::sism("decidedBy");
inline const std::string author = vocab::sism("author");
inline const std::string uses = vocab::sism("uses");
inline const std::string writing_time = vocab::sism("writingTime");
inline const std::string inferred_writing_time = vocab::sism("inferredWritingTime");
}  // namespace names

// ---------------------------------------------------------------------------
// Transcriptions

namespace detail {

inline std::optional<Term> first_object(const Dataset& ds, const Term& s, const std::string& p) {
  auto f = ds.match(s, Term::iri(p), std::nullopt);
  if (f.empty()) return std::nullopt;
  return f.front().object();
}

inline std::string first_literal(const Dataset& ds, const Term& s, const std::string& p) {
  auto t = first_object(ds, s, p);
  return t && t->is_literal() ? t->value() : std::string();
}

inline Term integer(std::size_t v) { return Term::literal(std::to_string(v), vocab::xsd_integer); }

}  // namespace detail

inline std::optional<Transcription> transcription(const Dataset& ds, const Term& id) {
  const Term g = Term::iri(vocab::graph_documents);
  if (ds.match(id, Term::iri(vocab::rdf_type), Term::iri(names::transcription), g).empty()) return std::nullopt;
  Transcription t;
  t.id = id;
  t.manuscript = detail::first_object(ds, id, names::of_manuscript).value_or(Term());
  t.surface = detail::first_literal(ds, id, names::surface);
  t.zone = detail::first_literal(ds, id, names::zone);
  t.sequence = parse_integer(detail::first_literal(ds, id, names::sequence)).value_or(0);
  t.text = detail::first_literal(ds, id, names::text);
  return t;
}

/// All transcriptions, ordered by manuscript then sequence index.
inline std::vector<Transcription> transcriptions(const Dataset& ds) {
  std::vector<Transcription> out;
  for (const auto& q : ds.match(std::nullopt, Term::iri(vocab::rdf_type), Term::iri(names::transcription),
                                Term::iri(vocab::graph_documents)))
    if (auto t = transcription(ds, q.subject())) out.push_back(std::move(*t));
  std::sort(out.begin(), out.end(), [](const Transcription& a, const Transcription& b) {
    if (a.manuscript.value() != b.manuscript.value()) return a.manuscript.value() < b.manuscript.value();
    if (a.sequence != b.sequence) return a.sequence < b.sequence;
    return a.id.value() < b.id.value();
  });
  return out;
}

/// Stores a transcription in <sys:documents>, replacing one with the same id.
inline void store_transcription(Dataset& ds, const Transcription& t) {
  if (!t.id.is_iri() || !t.manuscript.is_iri())
    throw Error(ErrorCode::invalid_argument, "transcription and manuscript ids must be IRIs");
  if (!utf8::valid(t.text))
    throw Error(ErrorCode::invalid_argument, "transcription text is not valid UTF-8");
  for (const auto& other : transcriptions(ds))
    if (other.id != t.id && other.manuscript == t.manuscript && other.surface == t.surface && other.zone == t.zone)
      throw Error(ErrorCode::invalid_argument, "zone " + t.surface + "/" + t.zone + " of " +
                                                   t.manuscript.to_nquads() + " is already transcribed by " +
                                                   other.id.to_nquads());
  const Term g = Term::iri(vocab::graph_documents);
  for (const auto& q : ds.match(t.id, std::nullopt, std::nullopt, g)) ds.erase(q);
  ds.insert(Quad(t.id, Term::iri(vocab::rdf_type), Term::iri(names::transcription), g));
  ds.insert(Quad(t.id, Term::iri(names::of_manuscript), t.manuscript, g));
  ds.insert(Quad(t.id, Term::iri(names::surface), Term::literal(t.surface), g));
  ds.insert(Quad(t.id, Term::iri(names::zone), Term::literal(t.zone), g));
  ds.insert(Quad(t.id, Term::iri(names::sequence), Term::literal(std::to_string(t.sequence), vocab::xsd_integer), g));
  ds.insert(Quad(t.id, Term::iri(names::text), Term::literal(t.text), g));
}

/// Parses JSON Lines: {id, manuscript, surface, zone, seq, text} per line.
inline std::vector<Transcription> parse_transcriptions(std::string_view jsonl) {
  std::vector<Transcription> out;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fail = [&](const std::string& msg) {
      return Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": " + msg);
    };
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw fail(e.what());
    }
    try {
      Transcription t;
      t.id = Term::iri(j.at("id").get<std::string>());
      t.manuscript = Term::iri(j.at("manuscript").get<std::string>());
      t.surface = j.value("surface", std::string());
      t.zone = j.value("zone", std::string());
      t.sequence = j.value("seq", 0LL);
      t.text = j.at("text").get<std::string>();
      out.push_back(std::move(t));
    } catch (const nlohmann::json::exception& e) {
      throw fail(e.what());
    } catch (const Error& e) {
      throw fail(e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tokens and candidates

/// Unicode word tokens; surface keeps case, folded is NFC + case folded.
inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  for (auto& seg : unicode::words(text)) {
    Token t{seg.start, seg.end, std::move(seg.text), {}};
    t.folded = unicode::fold(t.surface);
    out.push_back(std::move(t));
  }
  return out;
}

struct Candidate {
  Occurrence occurrence;
  std::size_t first_token = 0;
  std::size_t last_token = 0;  // inclusive
  std::vector<kres::TermEntry> entries;  // sorted by concept IRI
};

/// Folded token sequence of a lexical form.
inline std::vector<std::string> lexical_key(std::string_view lexical) {
  std::vector<std::string> key;
  for (auto& t : tokenize(lexical)) key.push_back(std::move(t.folded));
  return key;
}

/// Longest-match scan of the text against every term entry's lexical form.
inline std::vector<Candidate> find_candidates(const Transcription& t, const std::vector<kres::TermEntry>& entries,
                                              const std::vector<Token>& tokens) {
  std::map<std::vector<std::string>, std::vector<kres::TermEntry>> lexicon;
  std::size_t longest = 0;
  for (const auto& e : entries) {
    auto key = lexical_key(e.lexical_form);
    if (key.empty()) continue;
    longest = std::max(longest, key.size());
    lexicon[std::move(key)].push_back(e);
  }
  for (auto& [key, list] : lexicon)
    std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) { return a.concept_iri.value() < b.concept_iri.value(); });

  std::vector<Candidate> out;
  for (std::size_t i = 0; i < tokens.size();) {
    std::size_t matched = 0;
    for (std::size_t len = std::min(longest, tokens.size() - i); len >= 1; --len) {
      std::vector<std::string> key;
      for (std::size_t k = i; k < i + len; ++k) key.push_back(tokens[k].folded);
      auto it = lexicon.find(key);
      if (it == lexicon.end()) continue;
      Candidate c;
      c.first_token = i;
      c.last_token = i + len - 1;
      c.occurrence = Occurrence{t.id, tokens[i].start, tokens[c.last_token].end,
                                utf8::slice(t.text, tokens[i].start, tokens[c.last_token].end)};
      c.entries = it->second;
      out.push_back(std::move(c));
      matched = len;
      break;
    }
    i += matched == 0 ? 1 : matched;
  }
  return out;
}

inline std::vector<Candidate> find_candidates(const Dataset& ds, const Transcription& t,
                                              const std::vector<Term>& terminologies = {}) {
  return find_candidates(t, kres::term_entries(ds, terminologies), tokenize(t.text));
}

// ---------------------------------------------------------------------------
// Scoring

using Bag = std::map<std::string, double>;

inline Bag content_bag(const std::vector<Token>& tokens, std::size_t from, std::size_t to, const Stopwords& stop) {
  Bag bag;
  for (std::size_t i = from; i < to && i < tokens.size(); ++i)
    if (!stop.contains(tokens[i].folded)) bag[tokens[i].folded] += 1.0;
  return bag;
}

inline double cosine(const Bag& a, const Bag& b) {
  double dot = 0, na = 0, nb = 0;
  for (const auto& [w, x] : a) {
    na += x * x;
    if (auto it = b.find(w); it != b.end()) dot += x * it->second;
  }
  for (const auto& [w, y] : b) nb += y * y;
  if (na == 0 || nb == 0) return 0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

/// Max cosine between the ±window content tokens around the occurrence
/// (matched tokens included) and each of the entry's contexts of use.
inline double context_similarity(const std::vector<Token>& tokens, std::size_t first_token, std::size_t last_token,
                                 const kres::TermEntry& entry, std::size_t window, const Stopwords& stop) {
  if (window < 1) throw Error(ErrorCode::invalid_argument, "context window must be at least 1");
  std::size_t from = first_token >= window ? first_token - window : 0;
  Bag around = content_bag(tokens, from, last_token + window + 1, stop);
  double best = 0;
  for (const auto& ctx : entry.contexts_of_use) {
    auto ctx_tokens = tokenize(ctx);
    best = std::max(best, cosine(around, content_bag(ctx_tokens, 0, ctx_tokens.size(), stop)));
  }
  return best;
}

/// Writing time of a manuscript: explicit first, inferred otherwise.
inline std::optional<temporal::Interval> writing_time(const Dataset& ds, const Term& manuscript) {
  for (const auto* p : {&names::writing_time, &names::inferred_writing_time})
    for (const auto& q : ds.match(manuscript, Term::iri(*p), std::nullopt))
      if (auto i = temporal::interval_of(q.object(), ds)) return i;
  return std::nullopt;
}

/// 1 when the manuscript's writing time overlaps a period in which one of
/// its authors uses the terminology, 0 when all known periods are disjoint
/// from it, 0.5 when the writing time or every usage period is unknown.
inline double temporal_factor(const Dataset& ds, const Term& manuscript, const Term& terminology) {
  auto written = writing_time(ds, manuscript);
  if (!written) return 0.5;
  bool known = false;
  for (const auto& a : ds.match(manuscript, Term::iri(names::author), std::nullopt)) {
    for (const auto& f : temporal::fluents_of(ds, a.object(), Term::iri(names::uses), terminology)) {
      known = true;
      if (temporal::intersects(f.during, *written)) return 1.0;
    }
  }
  return known ? 0.0 : 0.5;
}

inline double combine(double similarity, double tau, double lambda) {
  return std::clamp((1.0 - lambda) * similarity + lambda * tau, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Associations

inline Term association_id(const Term& transcription, std::size_t start, std::size_t end, const Term& concept_iri) {
  return Term::skolem("assoc-" + key_hash({transcription.to_nquads(), std::to_string(start), std::to_string(end),
                                           concept_iri.to_nquads()}));
}

inline std::optional<Association> association(const Dataset& ds, const Term& id) {
  const Term g = Term::iri(vocab::graph_index);
  if (ds.match(id, Term::iri(vocab::rdf_type), Term::iri(names::association), g).empty()) return std::nullopt;
  Association a;
  a.id = id;
  a.occurrence.transcription = detail::first_object(ds, id, names::in_transcription).value_or(Term());
  a.occurrence.start = static_cast<std::size_t>(parse_integer(detail::first_literal(ds, id, names::start)).value_or(0));
  a.occurrence.end = static_cast<std::size_t>(parse_integer(detail::first_literal(ds, id, names::end)).value_or(0));
  a.occurrence.surface = detail::first_literal(ds, id, names::surface_form);
  a.concept_iri = detail::first_object(ds, id, names::has_concept).value_or(Term());
  a.score = parse_double(detail::first_literal(ds, id, names::score)).value_or(0);
  a.status = parse_status(detail::first_literal(ds, id, names::status)).value_or(Status::proposed);
  if (auto d = detail::first_object(ds, id, names::decided_by)) a.decided_by = d->value();
  return a;
}

/// Transcription, then start offset, then score descending, then concept IRI.
inline bool association_order(const Association& a, const Association& b) {
  if (a.occurrence.transcription.value() != b.occurrence.transcription.value())
    return a.occurrence.transcription.value() < b.occurrence.transcription.value();
  if (a.occurrence.start != b.occurrence.start) return a.occurrence.start < b.occurrence.start;
  if (a.score != b.score) return a.score > b.score;
  return a.concept_iri.value() < b.concept_iri.value();
}

inline std::vector<Association> associations(const Dataset& ds, std::optional<Status> status = std::nullopt,
                                             std::optional<Term> transcription = std::nullopt) {
  std::vector<Association> out;
  for (const auto& q : ds.match(std::nullopt, Term::iri(vocab::rdf_type), Term::iri(names::association),
                                Term::iri(vocab::graph_index))) {
    auto a = association(ds, q.subject());
    if (!a) continue;
    if (status && a->status != *status) continue;
    if (transcription && a->occurrence.transcription != *transcription) continue;
    out.push_back(std::move(*a));
  }
  std::sort(out.begin(), out.end(), association_order);
  return out;
}

namespace detail {

inline void erase_association(Dataset& ds, const Term& id) {
  for (const auto& q : ds.match(id, std::nullopt, std::nullopt, Term::iri(vocab::graph_index))) ds.erase(q);
}

inline void write_association(Dataset& ds, const Association& a) {
  const Term g = Term::iri(vocab::graph_index);
  erase_association(ds, a.id);
  ds.insert(Quad(a.id, Term::iri(vocab::rdf_type), Term::iri(names::association), g));
  ds.insert(Quad(a.id, Term::iri(names::in_transcription), a.occurrence.transcription, g));
  ds.insert(Quad(a.id, Term::iri(names::start), integer(a.occurrence.start), g));
  ds.insert(Quad(a.id, Term::iri(names::end), integer(a.occurrence.end), g));
  ds.insert(Quad(a.id, Term::iri(names::surface_form), Term::literal(a.occurrence.surface), g));
  ds.insert(Quad(a.id, Term::iri(names::has_concept), a.concept_iri, g));
  ds.insert(Quad(a.id, Term::iri(names::score), Term::literal(format_double(a.score), vocab::xsd_double), g));
  ds.insert(Quad(a.id, Term::iri(names::status), Term::literal(to_string(a.status)), g));
  if (a.decided_by) ds.insert(Quad(a.id, Term::iri(names::decided_by), Term::literal(*a.decided_by), g));
}

}  // namespace detail

/// Scores every candidate sense of every occurrence, without touching ds.
inline std::vector<Association> score_transcription(const Dataset& ds, const Transcription& t,
                                                    const IndexConfig& config) {
  if (!(config.lambda >= 0 && config.lambda <= 1)) throw Error(ErrorCode::invalid_argument, "lambda must be in [0, 1]");
  auto tokens = tokenize(t.text);
  std::map<std::string, double> tau_cache;
  std::vector<Association> out;
  for (const auto& c : find_candidates(t, kres::term_entries(ds), tokens)) {
    for (const auto& e : c.entries) {
      double sim = context_similarity(tokens, c.first_token, c.last_token, e, config.window, config.stopwords);
      auto key = e.terminology.to_nquads();
      auto it = tau_cache.find(key);
      if (it == tau_cache.end()) it = tau_cache.emplace(key, temporal_factor(ds, t.manuscript, e.terminology)).first;
      Association a;
      a.id = association_id(t.id, c.occurrence.start, c.occurrence.end, e.concept_iri);
      a.occurrence = c.occurrence;
      a.concept_iri = e.concept_iri;
      a.score = combine(sim, it->second, config.lambda);
      out.push_back(std::move(a));
    }
  }
  std::sort(out.begin(), out.end(), association_order);
  return out;
}

/// Indexes one transcription: previous proposed associations are replaced,
/// decided ones are kept as they are. Returns the proposals scoring above theta.
inline std::vector<Association> index_transcription(Dataset& ds, const Term& transcription_id,
                                                    const IndexConfig& config) {
  if (!(config.theta >= 0 && config.theta <= 1)) throw Error(ErrorCode::invalid_argument, "theta must be in [0, 1]");
  auto t = transcription(ds, transcription_id);
  if (!t) throw Error(ErrorCode::unknown_entity, "unknown transcription " + transcription_id.to_nquads());
  auto scored = score_transcription(ds, *t, config);

  std::set<std::string> decided;
  for (const auto& a : associations(ds, std::nullopt, transcription_id)) {
    if (a.status == Status::proposed)
      detail::erase_association(ds, a.id);
    else
      decided.insert(a.id.value());
  }
  std::vector<Association> kept;
  for (auto& a : scored) {
    if (!(a.score > config.theta) || decided.count(a.id.value())) continue;
    detail::write_association(ds, a);
    kept.push_back(std::move(a));
  }
  return kept;
}

/// Indexes every transcription; returns the proposals in association order.
inline std::vector<Association> index_all(Dataset& ds, const IndexConfig& config) {
  std::vector<Association> out;
  for (const auto& t : transcriptions(ds)) {
    auto part = index_transcription(ds, t.id, config);
    out.insert(out.end(), part.begin(), part.end());
  }
  std::sort(out.begin(), out.end(), association_order);
  return out;
}

/// Records an expert verdict on a proposed association.
inline Association decide(Dataset& ds, const Term& id, Status verdict, std::string decider) {
  if (verdict == Status::proposed) throw Error(ErrorCode::invalid_argument, "verdict must be accepted or rejected");
  auto a = association(ds, id);
  if (!a) throw Error(ErrorCode::unknown_association, "unknown association " + id.to_nquads());
  if (a->status != Status::proposed)
    throw Error(ErrorCode::already_decided, "association " + id.to_nquads() + " is already " + to_string(a->status));
  a->status = verdict;
  a->decided_by = std::move(decider);
  detail::write_association(ds, *a);
  return *a;
}

}  // namespace fluentkb::indexer
