#include <gtest/gtest.h>

#include <cmath>

#include "fluentkb/indexer.hpp"
#include "support.hpp"

namespace fluentkb {
namespace {

using indexer::Status;
using testing::ex;

const Term kT1 = Term::iri("http://example.org/saussure/ms1/t1");
const Term k1891 = Term::iri("t:1891");
const Term k1910 = Term::iri("t:1910");

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::io_error;
}

indexer::IndexConfig default_config() {
  indexer::IndexConfig cfg;
  cfg.stopwords = indexer::Stopwords::french();
  return cfg;
}

// Cosine of two word sets, each word counted once, computed from first principles.
double set_cosine(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::size_t shared = 0;
  for (const auto& w : a) shared += b.count(w);
  return static_cast<double>(shared) / std::sqrt(static_cast<double>(a.size() * b.size()));
}

// The window around "phonation" in "la phonation des sons", without "la"/"des".
const std::set<std::string> kWindow = {"phonation", "sons"};
const std::set<std::string> kLaryngeal = {"phonation", "sons", "laryngés"};
const std::set<std::string> kPsychic = {"phonation", "acte", "psychique"};

TEST(Tokenize, Offsets) {
  auto tokens = indexer::tokenize("la phonation des sons");
  ASSERT_EQ(tokens.size(), 4u);
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (const auto& t : tokens) spans.emplace_back(t.start, t.end);
  EXPECT_EQ(spans, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 2}, {3, 12}, {13, 16}, {17, 21}}));
  EXPECT_EQ(tokens[1].surface, "phonation");
}

TEST(Tokenize, ApostropheSplitsElision) {
  auto tokens = indexer::tokenize("l'arbitraire du signe");
  ASSERT_EQ(tokens.size(), 4u);
  EXPECT_EQ(tokens[0].folded, "l");
  EXPECT_EQ(tokens[1].folded, "arbitraire");
  EXPECT_EQ(tokens[1].start, 2u);
}

TEST(Tokenize, ScalarOffsetsAndFolding) {
  auto tokens = indexer::tokenize("Système phonétique");
  ASSERT_EQ(tokens.size(), 2u);
  EXPECT_EQ(tokens[0].folded, "système");
  EXPECT_EQ(tokens[1].start, 8u);
  EXPECT_EQ(tokens[1].end, 18u);
}

TEST(Stopwords, FrenchList) {
  auto stop = indexer::Stopwords::french();
  EXPECT_GT(stop.size(), 100u);
  for (const char* w : {"la", "des", "comme", "l", "du"}) EXPECT_TRUE(stop.contains(w)) << w;
  for (const char* w : {"phonation", "sons", "acte", "psychique", "laryngés"}) EXPECT_FALSE(stop.contains(w)) << w;
}

TEST(Candidates, BothSensesOfPhonation) {
  Dataset ds = testing::phonation_store();
  auto t = indexer::transcription(ds, kT1);
  ASSERT_TRUE(t);
  auto cands = indexer::find_candidates(ds, *t);
  ASSERT_EQ(cands.size(), 1u);
  EXPECT_EQ(cands[0].occurrence.start, 3u);
  EXPECT_EQ(cands[0].occurrence.end, 12u);
  EXPECT_EQ(cands[0].occurrence.surface, "phonation");
  ASSERT_EQ(cands[0].entries.size(), 2u);
  EXPECT_EQ(cands[0].entries[0].terminology, k1891);
  EXPECT_EQ(cands[0].entries[1].terminology, k1910);
}

TEST(Candidates, MultiWordTermIsOneOccurrence) {
  Dataset ds = testing::phonation_store();
  indexer::Transcription t{ex("ms1/t2"), ex("ms1"), "f2r", "main", 2, "La Valeur linguistique du signe"};
  auto cands = indexer::find_candidates(ds, t);
  ASSERT_EQ(cands.size(), 1u);
  EXPECT_EQ(cands[0].occurrence.surface, "Valeur linguistique");
  EXPECT_EQ(cands[0].first_token, 1u);
  EXPECT_EQ(cands[0].last_token, 2u);
}

TEST(Similarity, CosinesAgainstHandComputation) {
  auto stop = indexer::Stopwords::french();
  auto tokens = indexer::tokenize("la phonation des sons");
  kres::TermEntry laryngeal{Term::iri("t:x/concept/a"), "phonation", "", {"phonation des sons laryngés"}, k1891};
  kres::TermEntry psychic{Term::iri("t:x/concept/b"), "phonation", "", {"phonation comme acte psychique"}, k1910};
  EXPECT_NEAR(indexer::context_similarity(tokens, 1, 1, laryngeal, 5, stop), set_cosine(kWindow, kLaryngeal), 1e-12);
  EXPECT_NEAR(indexer::context_similarity(tokens, 1, 1, psychic, 5, stop), set_cosine(kWindow, kPsychic), 1e-12);
  EXPECT_NEAR(set_cosine(kWindow, kLaryngeal), 0.816, 0.001);
  EXPECT_NEAR(set_cosine(kWindow, kPsychic), 0.408, 0.001);
  EXPECT_EQ(code_of([&] { indexer::context_similarity(tokens, 1, 1, psychic, 0, stop); }), ErrorCode::invalid_argument);
}

TEST(Similarity, WindowBounds) {
  auto stop = indexer::Stopwords{};
  auto tokens = indexer::tokenize("a b c d e f g h");
  kres::TermEntry e{Term::iri("t:x/concept/d"), "d", "", {"a h"}, k1891};
  EXPECT_EQ(indexer::context_similarity(tokens, 3, 3, e, 2, stop), 0.0);
  EXPECT_GT(indexer::context_similarity(tokens, 3, 3, e, 3, stop), 0.0);
}

TEST(TemporalFactor, Values) {
  Dataset ds = testing::phonation_store();
  EXPECT_EQ(indexer::temporal_factor(ds, ex("ms1"), k1891), 1.0);
  EXPECT_EQ(indexer::temporal_factor(ds, ex("ms1"), k1910), 0.0);
  EXPECT_EQ(indexer::temporal_factor(ds, ex("unknown"), k1891), 0.5);
  EXPECT_EQ(indexer::temporal_factor(ds, ex("ms1"), Term::iri("t:other")), 0.5);
}

TEST(Scoring, EraCorrectSenseWins) {
  Dataset ds = testing::phonation_store();
  auto t = indexer::transcription(ds, kT1);
  auto scored = indexer::score_transcription(ds, *t, default_config());
  ASSERT_EQ(scored.size(), 2u);
  const double lambda = 0.3;
  double correct = (1 - lambda) * set_cosine(kWindow, kLaryngeal) + lambda * 1.0;
  double wrong = (1 - lambda) * set_cosine(kWindow, kLaryngeal) + lambda * 0.0;
  EXPECT_EQ(scored[0].concept_iri, kres::mint_uri("phonation", k1891));
  EXPECT_NEAR(scored[0].score, correct, 1e-9);
  EXPECT_NEAR(scored[1].score, wrong, 1e-9);
  EXPECT_NEAR(scored[0].score, 0.871, 0.001);
  EXPECT_NEAR(scored[1].score, 0.571, 0.001);
}

TEST(Scoring, NoContextUnknownDate) {
  Dataset ds = testing::phonation_store();
  indexer::Transcription t{ex("ms5/t1"), ex("ms5"), "f1r", "main", 1, "son"};
  auto scored = indexer::score_transcription(ds, t, default_config());
  ASSERT_EQ(scored.size(), 1u);
  EXPECT_NEAR(scored[0].score, 0.3 * 0.5, 1e-12);
}

TEST(Indexing, ThresholdFilters) {
  Dataset ds = testing::phonation_store();
  auto cfg = default_config();
  cfg.theta = 0.6;
  auto kept = indexer::index_transcription(ds, kT1, cfg);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].concept_iri, kres::mint_uri("phonation", k1891));
  cfg.theta = 0.35;
  kept = indexer::index_transcription(ds, kT1, cfg);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_GT(kept[0].score, kept[1].score);
  auto stored = indexer::associations(ds);
  ASSERT_EQ(stored.size(), 2u);
  EXPECT_EQ(stored[0].status, Status::proposed);
  EXPECT_EQ(stored[0].occurrence.start, 3u);
  EXPECT_NEAR(stored[0].score, kept[0].score, 1e-12);
}

TEST(Indexing, UnknownTranscription) {
  Dataset ds = testing::phonation_store();
  EXPECT_EQ(code_of([&] { indexer::index_transcription(ds, ex("nope"), default_config()); }), ErrorCode::unknown_entity);
}

TEST(Decisions, AcceptThenReindex) {
  Dataset ds = testing::phonation_store();
  auto kept = indexer::index_transcription(ds, kT1, default_config());
  ASSERT_EQ(kept.size(), 2u);
  auto a1 = indexer::decide(ds, kept[0].id, Status::accepted, "expert");
  EXPECT_EQ(a1.status, Status::accepted);
  EXPECT_EQ(a1.decided_by, "expert");
  EXPECT_EQ(code_of([&] { indexer::decide(ds, kept[0].id, Status::rejected, "other"); }), ErrorCode::already_decided);
  EXPECT_EQ(code_of([&] { indexer::decide(ds, ex("none"), Status::rejected, "x"); }), ErrorCode::unknown_association);
  EXPECT_EQ(code_of([&] { indexer::decide(ds, kept[1].id, Status::proposed, "x"); }), ErrorCode::invalid_argument);

  auto before = indexer::association(ds, kept[0].id);
  auto again = indexer::index_transcription(ds, kT1, default_config());
  ASSERT_EQ(again.size(), 1u);
  EXPECT_EQ(again[0].id, kept[1].id);
  auto after = indexer::association(ds, kept[0].id);
  ASSERT_TRUE(after);
  EXPECT_EQ(after->status, Status::accepted);
  EXPECT_EQ(after->score, before->score);
  EXPECT_EQ(indexer::associations(ds, Status::accepted).size(), 1u);
  EXPECT_EQ(indexer::associations(ds, Status::proposed).size(), 1u);
}

TEST(Transcriptions, UniqueLocation) {
  Dataset ds = testing::phonation_store();
  indexer::Transcription dup{ex("ms1/t9"), ex("ms1"), "f1r", "main", 9, "x"};
  auto existing = indexer::transcription(ds, kT1);
  ASSERT_TRUE(existing);
  dup.surface = existing->surface;
  dup.zone = existing->zone;
  EXPECT_EQ(code_of([&] { indexer::store_transcription(ds, dup); }), ErrorCode::invalid_argument);
}

TEST(Transcriptions, JsonlParsing) {
  auto ts = indexer::parse_transcriptions(testing::read_fixture("transcriptions.jsonl"));
  ASSERT_EQ(ts.size(), 1u);
  EXPECT_EQ(ts[0].id, kT1);
  EXPECT_EQ(ts[0].manuscript, ex("ms1"));
  EXPECT_EQ(ts[0].text, "la phonation des sons");
  EXPECT_ANY_THROW(indexer::parse_transcriptions("{not json}\n"));
}

// Same inputs, same stored index.
TEST(IndexingProperty, Deterministic) {
  Dataset a = testing::phonation_store();
  Dataset b = testing::phonation_store();
  indexer::index_all(a, default_config());
  indexer::index_all(b, default_config());
  EXPECT_EQ(a.to_nquads(), b.to_nquads());
  indexer::index_all(a, default_config());
  EXPECT_EQ(a.to_nquads(), b.to_nquads());
}

// Every occurrence's offsets slice its surface form out of the text.
TEST(IndexingProperty, OffsetIntegrity) {
  Dataset ds = testing::phonation_store();
  std::mt19937_64 rng(11);
  const std::vector<std::string> words = {"la", "phonation", "des", "sons", "valeur", "linguistique", "l'acte",
                                          "Phonation", "son", "système", "psychique", "«", "»", ",", "—"};
  for (int i = 0; i < 60; ++i) {
    std::string text;
    for (std::size_t n = 1 + rng() % 12; n > 0; --n) text += words[rng() % words.size()] + (rng() % 4 ? " " : "  ");
    indexer::Transcription t{ex("gen/t" + std::to_string(i)), ex("ms1"), "g" + std::to_string(i), "main", i, text};
    indexer::store_transcription(ds, t);
    for (const auto& a : indexer::index_transcription(ds, t.id, default_config())) {
      EXPECT_EQ(utf8::slice(text, a.occurrence.start, a.occurrence.end), a.occurrence.surface);
      EXPECT_GT(a.score, 0.35);
      EXPECT_LE(a.score, 1.0);
    }
  }
}

}  // namespace
}  // namespace fluentkb
