#pragma once

#include <random>
#include <string>
#include <vector>

#include "fluentkb/cli.hpp"
#include "fluentkb/indexer.hpp"
#include "fluentkb/kres.hpp"
#include "fluentkb/rdf_io.hpp"
#include "fluentkb/snapshot.hpp"
#include "fluentkb/store.hpp"

namespace fluentkb::testing {

inline std::string fixture(const std::string& name) { return std::string(FLUENTKB_FIXTURE_DIR) + "/" + name; }

inline std::string read_fixture(const std::string& name) { return snapshot::read_file(fixture(name)); }

inline std::vector<Quad> parse_fixture(const std::string& name, const Term& graph) {
  auto out = rdf::parse_turtle(read_fixture(name), graph);
  if (!out.ok()) throw Error(ErrorCode::parse_error, name + ":" + out.diagnostics.front().to_string());
  return out.quads;
}

/// Loads a data file the way the CLI `load` command does.
inline void load_data(Dataset& ds, const std::string& name) {
  std::size_t fluents = 0;
  auto rest = cli::detail::normalize_fluents(parse_fixture(name, Term::iri(vocab::graph_default_data)), ds, fluents);
  for (const auto& q : rest) ds.insert(q);
}

inline void import_fixture(Dataset& ds, const std::string& name, kres::ResourceKind kind, const std::string& id) {
  auto report = kres::import_resource(ds, parse_fixture(name, Term::iri(id)), kind, Term::iri(id));
  if (!report.accepted) throw Error(ErrorCode::import_rejected, "fixture import rejected: " + name);
}

/// Two terminologies defining "phonation", the dated manuscript and its transcription.
inline Dataset phonation_store() {
  Dataset ds;
  import_fixture(ds, "terminology-1891.ttl", kres::ResourceKind::terminology, "t:1891");
  import_fixture(ds, "terminology-1910.ttl", kres::ResourceKind::terminology, "t:1910");
  load_data(ds, "manuscripts.ttl");
  for (const auto& t : indexer::parse_transcriptions(read_fixture("transcriptions.jsonl")))
    indexer::store_transcription(ds, t);
  return ds;
}

inline Term ex(const std::string& local) { return Term::iri("http://example.org/saussure/" + local); }
inline Term sism(const std::string& local) { return Term::iri(vocab::sism(local)); }


/// Random well-formed quads over small vocabularies, so patterns hit often.
class QuadGenerator {
 public:
  explicit QuadGenerator(std::uint64_t seed) : rng_(seed) {}

  Term resource() {
    switch (pick(4)) {
      case 0: return Term::skolem("n" + std::to_string(pick(6)));
      default: return Term::iri("http://example.org/r" + std::to_string(pick(8)));
    }
  }

  Term predicate() { return Term::iri("http://example.org/p" + std::to_string(pick(4))); }

  Term graph() { return Term::iri(pick(2) == 0 ? "urn:g:a" : "urn:g:b"); }

  Term literal() {
    static const std::vector<std::string> pieces = {"a", "é", "phonation", " ", "\"", "\\", "\n", "\r", "\t",
                                                    "système", "日本", "😀", "<x>", "#", "1894"};
    std::string lex;
    for (std::size_t i = 0, n = pick(5); i < n; ++i) lex += pieces[pick(pieces.size())];
    switch (pick(4)) {
      case 0: return Term::lang_literal(lex, pick(2) == 0 ? "fr" : "en-GB");
      case 1: return Term::literal(lex, vocab::xsd_integer);
      default: return Term::literal(lex);
    }
  }

  Term object() { return pick(2) == 0 ? literal() : resource(); }

  Quad quad() { return Quad(resource(), predicate(), object(), graph()); }

  std::vector<Quad> quads(std::size_t n) {
    std::vector<Quad> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(quad());
    return out;
  }

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

 private:
  std::mt19937_64 rng_;
};

}  // namespace fluentkb::testing
