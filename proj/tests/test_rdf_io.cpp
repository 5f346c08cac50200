#include <gtest/gtest.h>

#include <set>

#include "fluentkb/rdf_io.hpp"
#include "support.hpp"

using namespace fluentkb;
using fluentkb::testing::QuadGenerator;

namespace {

const Term kGraph = Term::iri("urn:g");

std::set<std::string> keys(const std::vector<Quad>& quads) {
  std::set<std::string> out;
  for (const auto& q : quads) out.insert(q.key());
  return out;
}

}  // namespace

TEST(Turtle, EmptyInput) {
  auto out = rdf::parse_turtle("", kGraph);
  EXPECT_TRUE(out.ok());
  EXPECT_TRUE(out.quads.empty());
}

TEST(Turtle, SkosMappingBlock) {
  const char* text = R"(@prefix skos: <http://www.w3.org/2004/02/skos/core#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
@prefix sism: <https://w3id.org/sism#> .
skos:ConceptScheme rdfs:subClassOf sism:KnowledgeResource .
skos:Concept rdfs:subClassOf sism:KnowledgeEntity .
skos:inScheme rdfs:subPropertyOf sism:inKnowledgeResource .
skos:Scheme rdfs:subClassOf sism:KnowledgeResource .
skos:semanticRelation rdfs:subPropertyOf sism:semanticRelation
.)";
  auto out = rdf::parse_turtle(text, kGraph);
  ASSERT_TRUE(out.ok()) << out.diagnostics.front().to_string();
  ASSERT_EQ(out.quads.size(), 5u);
  for (const auto& q : out.quads)
    EXPECT_TRUE(q.predicate().value() == vocab::rdfs_sub_class_of ||
                q.predicate().value() == vocab::rdfs_sub_property_of);
}

TEST(Turtle, AnonymousPropertyList) {
  auto out = rdf::parse_turtle(R"(:m :writingTime [ :hasBeginning "1894-01-04"^^xsd:date ] .)", kGraph);
  ASSERT_TRUE(out.ok());
  ASSERT_EQ(out.quads.size(), 2u);
  const Quad* first = nullptr;
  for (const auto& q : out.quads)
    if (q.predicate().value() == vocab::sism("writingTime")) first = &q;
  ASSERT_NE(first, nullptr);
  EXPECT_TRUE(first->object().is_skolem());
}

TEST(Turtle, ShorthandLiterals) {
  auto out = rdf::parse_turtle(R"(@prefix ex: <http://example.org/> .
ex:s ex:n 42 ; ex:d 1.5 ; ex:e 1e3 ; ex:b true ; ex:l "langue"@fr , "tongue"@en .)",
                               kGraph);
  ASSERT_TRUE(out.ok()) << out.diagnostics.front().to_string();
  auto k = keys(out.quads);
  EXPECT_TRUE(k.count("<http://example.org/s> <http://example.org/n> \"42\"^^<" + vocab::xsd_integer + "> <urn:g> ."));
  EXPECT_TRUE(k.count("<http://example.org/s> <http://example.org/d> \"1.5\"^^<" + vocab::xsd_decimal + "> <urn:g> ."));
  EXPECT_TRUE(k.count("<http://example.org/s> <http://example.org/e> \"1e3\"^^<" + vocab::xsd_double + "> <urn:g> ."));
  EXPECT_TRUE(k.count("<http://example.org/s> <http://example.org/b> \"true\"^^<" + vocab::xsd_boolean + "> <urn:g> ."));
  EXPECT_TRUE(k.count("<http://example.org/s> <http://example.org/l> \"langue\"@fr <urn:g> ."));
  EXPECT_EQ(out.quads.size(), 6u);
}

TEST(Turtle, BaseResolvesRelativeIris) {
  auto out = rdf::parse_turtle("@base <http://example.org/a/b> .\n<../c> <#p> <d> .", kGraph);
  ASSERT_TRUE(out.ok()) << out.diagnostics.front().to_string();
  ASSERT_EQ(out.quads.size(), 1u);
  EXPECT_EQ(out.quads[0].subject().value(), "http://example.org/c");
  EXPECT_EQ(out.quads[0].predicate().value(), "http://example.org/a/b#p");
  EXPECT_EQ(out.quads[0].object().value(), "http://example.org/a/d");
}

TEST(Turtle, RelativeIriWithoutBaseIsDiagnosed) {
  auto out = rdf::parse_turtle("<s> <http://example.org/p> <http://example.org/o> .", kGraph);
  ASSERT_FALSE(out.ok());
  EXPECT_EQ(out.diagnostics[0].line, 1u);
}

TEST(Turtle, CollectionsAreRejected) {
  auto out = rdf::parse_turtle("@prefix ex: <http://example.org/> .\nex:s ex:p ( ex:a ex:b ) .", kGraph);
  ASSERT_FALSE(out.ok());
  EXPECT_EQ(out.diagnostics[0].line, 2u);
}

TEST(Turtle, QuotedTriplesAreRejected) {
  auto out = rdf::parse_turtle("@prefix ex: <http://example.org/> .\n<< ex:a ex:b ex:c >> ex:p ex:o .", kGraph);
  EXPECT_FALSE(out.ok());
}

TEST(Turtle, SyntaxErrorCarriesLineAndColumn) {
  auto out = rdf::parse_turtle(fluentkb::testing::read_fixture("bad.ttl"), kGraph);
  ASSERT_FALSE(out.ok());
  EXPECT_EQ(out.diagnostics[0].line, 5u);
  EXPECT_EQ(out.diagnostics[0].column, 1u);
}

TEST(Turtle, DiagnosticsStayWithinInput) {
  const std::vector<std::string> broken = {"ex:a", "@prefix", "<http://x> <http://y>", "\"open", "[ :p",
                                           ":a :b :c ;;", "@base <rel> .", ":a :b \"x\"@ ."};
  for (const auto& text : broken) {
    auto out = rdf::parse_turtle(text, kGraph);
    ASSERT_FALSE(out.ok()) << text;
    const auto& d = out.diagnostics[0];
    EXPECT_GE(d.line, 1u);
    EXPECT_LE(d.line, 1u) << text;
    EXPECT_GE(d.column, 1u);
    EXPECT_LE(d.column, text.size() + 1) << text;
  }
}

TEST(Turtle, BlankNodeIdsAreDeterministic) {
  const char* text = "_:x :p [ :q 1 ] .";
  auto a = rdf::parse_turtle(text, kGraph);
  auto b = rdf::parse_turtle(text, kGraph);
  ASSERT_TRUE(a.ok());
  EXPECT_EQ(keys(a.quads), keys(b.quads));
  EXPECT_TRUE(a.quads[0].subject().value().starts_with("doc"));
  // A different document yields different node ids.
  auto c = rdf::parse_turtle("_:x :p [ :q 2 ] .", kGraph);
  EXPECT_NE(a.quads[0].subject().value().substr(0, 19), c.quads[0].subject().value().substr(0, 19));
}

TEST(Turtle, CommentsAndEscapes) {
  auto out = rdf::parse_turtle("# heading\n:a :b \"line\\nbreak \\\"q\\\" \\u00e9\" . # trailing\n", kGraph);
  ASSERT_TRUE(out.ok()) << out.diagnostics.front().to_string();
  ASSERT_EQ(out.quads.size(), 1u);
  EXPECT_EQ(out.quads[0].object().value(), "line\nbreak \"q\" é");
}

TEST(NQuads, EmptySetSerializesToEmptyText) {
  EXPECT_EQ(rdf::serialize_nquads(std::vector<Quad>{}), "");
}

TEST(NQuads, OneQuadIsOneLine) {
  std::vector<Quad> one{Quad(Term::iri("urn:s"), Term::iri("urn:p"), Term::literal("o"), kGraph)};
  EXPECT_EQ(rdf::serialize_nquads(one), "<urn:s> <urn:p> \"o\" <urn:g> .\n");
}

TEST(NQuads, SnapshotReloadIsByteIdentical) {
  Dataset ds = fluentkb::testing::phonation_store();
  std::string first = ds.to_nquads();
  Dataset reloaded = rdf::load_snapshot(first);
  EXPECT_EQ(reloaded.to_nquads(), first);
}

TEST(NQuads, CorruptSnapshotThrows) {
  EXPECT_THROW(rdf::load_snapshot("<urn:s> <urn:p> .\n"), Error);
}

// Property: parse(serialize(Q)) = Q on random quad sets of up to 100 quads.
TEST(NQuadsProperty, RoundTripIdentity) {
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    QuadGenerator gen(seed);
    auto quads = gen.quads(gen.pick(101));
    std::string text = rdf::serialize_nquads(quads);
    auto parsed = rdf::parse_nquads(text);
    ASSERT_TRUE(parsed.ok()) << "seed " << seed << ": " << parsed.diagnostics.front().to_string();
    ASSERT_EQ(keys(parsed.quads), keys(quads)) << "seed " << seed;
    ASSERT_EQ(rdf::serialize_nquads(parsed.quads), text);
  }
}
