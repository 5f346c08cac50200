#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <thread>

#include "fluentkb/api.hpp"
#include "fluentkb/rules.hpp"
#include "support.hpp"

namespace fluentkb {
namespace {

using api::Request;
using api::Response;
using api::json;

Dataset service_store() {
  Dataset ds = testing::phonation_store();
  kres::add_correspondence(ds, {kres::mint_uri("phonation", Term::iri("t:1891")),
                                kres::mint_uri("phonation", Term::iri("t:1910")), kres::Relation::related, 0.6});
  return ds;
}

api::ApiConfig quiet_config() {
  api::ApiConfig cfg;
  cfg.index.stopwords = indexer::Stopwords::french();
  return cfg;
}

Request get(std::string path, std::map<std::string, std::string> query = {}) {
  return Request{"GET", std::move(path), std::move(query), "", ""};
}

Request post(std::string path, std::string body) { return Request{"POST", std::move(path), {}, std::move(body), ""}; }

std::string digest(const api::Service& s) { return snapshot::digest(*s.dataset()); }

TEST(Api, Health) {
  api::Service s(service_store(), quiet_config());
  auto r = s.handle(get("/health"));
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body["status"], "ok");
  EXPECT_EQ(r.body["quads"].get<std::size_t>(), s.dataset()->size());
}

TEST(Api, Resources) {
  api::Service s(service_store(), quiet_config());
  auto r = s.handle(get("/resources"));
  ASSERT_EQ(r.status, 200);
  ASSERT_EQ(r.body.size(), 2u);
  EXPECT_EQ(r.body[0]["id"], "t:1891");
  EXPECT_EQ(r.body[0]["kind"], "terminology");
  EXPECT_EQ(r.body[0]["entity_count"], 2);
  auto entities = s.handle(get("/resources/t:1910/entities"));
  ASSERT_EQ(entities.status, 200);
  EXPECT_EQ(entities.body.size(), 2u);
  EXPECT_EQ(s.handle(get("/resources/t:9999/entities")).status, 404);
}

TEST(Api, ConceptLookup) {
  api::Service s(service_store(), quiet_config());
  auto r = s.handle(get("/concepts", {{"lexical", "Phonation"}}));
  ASSERT_EQ(r.status, 200);
  ASSERT_EQ(r.body.size(), 2u);
  EXPECT_EQ(r.body[0]["iri"], "t:1891/concept/phonation");
  EXPECT_EQ(r.body[1]["resource"], "t:1910");
  EXPECT_EQ(r.body[1]["term"]["contexts_of_use"].size(), 2u);
  EXPECT_EQ(s.handle(get("/concepts")).status, 422);

  auto detail = s.handle(get("/concepts/t:1891/concept/phonation"));
  ASSERT_EQ(detail.status, 200);
  ASSERT_EQ(detail.body["siblings"].size(), 1u);
  EXPECT_EQ(detail.body["siblings"][0]["iri"], "t:1910/concept/phonation");
  ASSERT_EQ(detail.body["correspondences"].size(), 1u);
  EXPECT_EQ(detail.body["correspondences"][0]["relation"], "related");
  EXPECT_EQ(s.handle(get("/concepts/t:1891/concept/nothing")).status, 404);
}

TEST(Api, UnknownRouteAndMethod) {
  api::Service s(service_store(), quiet_config());
  auto r = s.handle(get("/nowhere"));
  EXPECT_EQ(r.status, 404);
  EXPECT_EQ(r.body["code"], "not_found");
  EXPECT_EQ(s.handle(Request{"DELETE", "/resources", {}, "", ""}).status, 405);
}

TEST(Api, IndexDecideFlow) {
  api::Service s(service_store(), quiet_config());
  auto idx = s.handle(post("/actions/index", "{}"));
  ASSERT_EQ(idx.status, 200);
  ASSERT_EQ(idx.body["proposed"].size(), 2u);
  EXPECT_NEAR(idx.body["proposed"][0]["score"].get<double>(), 0.871, 0.001);

  auto listed = s.handle(get("/associations", {{"status", "proposed"}}));
  ASSERT_EQ(listed.status, 200);
  ASSERT_EQ(listed.body.size(), 2u);
  EXPECT_EQ(s.handle(get("/associations", {{"status", "proposed"}, {"limit", "1"}})).body.size(), 1u);
  EXPECT_EQ(s.handle(get("/associations", {{"offset", "5"}})).body.size(), 0u);
  EXPECT_EQ(s.handle(get("/associations", {{"status", "maybe"}})).status, 422);
  EXPECT_EQ(s.handle(get("/associations", {{"limit", "-1"}})).status, 422);

  std::string id = listed.body[0]["id"];
  auto ok = s.handle(post("/associations/" + id + "/decision", R"({"verdict":"accepted","decider":"expert"})"));
  ASSERT_EQ(ok.status, 200);
  EXPECT_EQ(ok.body["status"], "accepted");
  EXPECT_EQ(ok.body["decided_by"], "expert");
  auto again = s.handle(post("/associations/" + id + "/decision", R"({"verdict":"rejected","decider":"expert"})"));
  EXPECT_EQ(again.status, 409);
  EXPECT_EQ(again.body["code"], "already_decided");
  EXPECT_EQ(s.handle(post("/associations/urn:skolem:assoc-0/decision", R"({"verdict":"accepted","decider":"x"})")).status,
            404);
  EXPECT_EQ(s.handle(post("/associations/" + id + "/decision", R"({"verdict":"maybe","decider":"x"})")).status, 422);
  EXPECT_EQ(s.handle(post("/associations/" + id + "/decision", "not json")).status, 422);

  auto t = s.handle(get("/transcriptions/http://example.org/saussure/ms1/t1"));
  ASSERT_EQ(t.status, 200);
  EXPECT_EQ(t.body["text"], "la phonation des sons");
  EXPECT_EQ(t.body["associations"].size(), 2u);
}

TEST(Api, FailedMutationKeepsDigest) {
  api::Service s(service_store(), quiet_config());
  auto before = digest(s);
  EXPECT_EQ(s.handle(post("/actions/index", R"({"theta": 3})")).status, 422);
  EXPECT_EQ(s.handle(post("/actions/index", R"({"transcription": "http://example.org/none"})")).status, 404);
  EXPECT_EQ(digest(s), before);
}

TEST(Api, ReadsDoNotMutate) {
  api::Service s(service_store(), quiet_config());
  auto before = digest(s);
  for (const auto& path : {"/health", "/resources", "/associations", "/concepts/t:1891/concept/son",
                           "/manuscripts/http://example.org/saussure/ms2/timeline"})
    s.handle(get(path));
  s.handle(get("/concepts", {{"lexical", "son"}}));
  EXPECT_EQ(digest(s), before);
}

TEST(Api, ReadOnlyRejectsMutations) {
  auto cfg = quiet_config();
  cfg.read_only = true;
  api::Service s(service_store(), cfg);
  auto before = digest(s);
  auto r = s.handle(post("/actions/index", "{}"));
  EXPECT_EQ(r.status, 403);
  EXPECT_EQ(r.body["code"], "read_only");
  EXPECT_EQ(s.handle(post("/actions/saturate", "{}")).status, 403);
  EXPECT_EQ(s.handle(get("/resources")).status, 200);
  EXPECT_EQ(digest(s), before);
}

TEST(Api, BearerToken) {
  auto cfg = quiet_config();
  cfg.bearer_token = "secret";
  api::Service s(service_store(), cfg);
  EXPECT_EQ(s.handle(get("/health")).status, 401);
  auto req = get("/health");
  req.authorization = "Bearer secret";
  EXPECT_EQ(s.handle(req).status, 200);
}

TEST(Api, SaturateAndTimeline) {
  Dataset ds = service_store();
  testing::load_data(ds, "letter.ttl");
  rules::store_rules(ds, rules::compile_rules(testing::read_fixture("letters.rules")));
  api::Service s(std::move(ds), quiet_config());
  auto r = s.handle(post("/actions/saturate", "{}"));
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["new_fluents"], 1);
  EXPECT_EQ(r.body["manuscripts_dated"], 1);

  auto tl = s.handle(get("/manuscripts/http://example.org/saussure/ms2/timeline"));
  ASSERT_EQ(tl.status, 200);
  EXPECT_TRUE(tl.body["writing_time"].is_null());
  EXPECT_EQ(tl.body["inferred_writing_time"]["begin"], "1907-01-01");
  EXPECT_EQ(tl.body["inferred_writing_time"]["end"], "1908-06-30");
  ASSERT_EQ(tl.body["bounds"].size(), 2u);
  EXPECT_EQ(tl.body["bounds"][0]["provenance"][0], "asserted");

  auto ms1 = s.handle(get("/manuscripts/http://example.org/saussure/ms1/timeline"));
  EXPECT_EQ(ms1.body["writing_time"]["begin"], "1894-01-04");
  EXPECT_EQ(s.handle(get("/manuscripts/http://example.org/none/timeline")).status, 404);
}

TEST(Api, DerivedBoundCarriesRuleProvenance) {
  Dataset ds;
  testing::load_data(ds, "letter.ttl");
  auto rs = rules::compile_rules(
      "@prefix ex: <http://example.org/saussure/> .\n"
      "RULE letter-bound: WHEN ?m :writingTime ?wt . ?wt time:hasBeginning ?t THEN ?m :notBefore ?t .");
  rules::store_rules(ds, rs);
  rules::saturate(ds, rs);
  api::Service s(std::move(ds), quiet_config());
  auto tl = s.handle(get("/manuscripts/http://example.org/saussure/m1/timeline"));
  ASSERT_EQ(tl.status, 200);
  ASSERT_EQ(tl.body["bounds"].size(), 1u);
  EXPECT_EQ(tl.body["bounds"][0]["value"], "1894-01-04");
  EXPECT_EQ(tl.body["bounds"][0]["provenance"], json::array({"rule:letter-bound"}));
}

TEST(Api, MutationsPersistSnapshot) {
  auto dir = std::filesystem::temp_directory_path() / ("fluentkb-api-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  auto cfg = quiet_config();
  cfg.snapshot_path = (dir / "kb.nq").string();
  api::Service s(service_store(), cfg);
  ASSERT_EQ(s.handle(post("/actions/index", "{}")).status, 200);
  EXPECT_EQ(snapshot::digest(snapshot::load(cfg.snapshot_path)), digest(s));
  std::filesystem::remove_all(dir);
}

TEST(Api, ServesOverHttp) {
  auto cfg = quiet_config();
  cfg.cors_origin = "http://localhost:5173";
  api::Service s(service_store(), cfg);
  httplib::Server server;
  s.mount(server);
  int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/concepts?lexical=phonation");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "http://localhost:5173");
  EXPECT_EQ(json::parse(res->body).size(), 2u);

  auto encoded = client.Get("/concepts/t%3A1891%2Fconcept%2Fphonation");
  ASSERT_TRUE(encoded);
  EXPECT_EQ(encoded->status, 200);
  EXPECT_EQ(json::parse(encoded->body)["iri"], "t:1891/concept/phonation");

  auto posted = client.Post("/actions/index", "{}", "application/json");
  ASSERT_TRUE(posted);
  EXPECT_EQ(posted->status, 200);
  auto listed = client.Get("/associations?status=proposed");
  ASSERT_TRUE(listed);
  EXPECT_EQ(json::parse(listed->body).size(), 2u);

  auto options = client.Options("/associations");
  ASSERT_TRUE(options);
  EXPECT_EQ(options->status, 204);
  auto removed = client.Delete("/resources");
  ASSERT_TRUE(removed);
  EXPECT_EQ(removed->status, 405);

  server.stop();
  worker.join();
}

}  // namespace
}  // namespace fluentkb
