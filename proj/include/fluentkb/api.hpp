#pragma once

#include <algorithm>
#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <regex>
#include <set>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "fluentkb/error.hpp"
#include "fluentkb/format.hpp"
#include "fluentkb/indexer.hpp"
#include "fluentkb/kres.hpp"
#include "fluentkb/rules.hpp"
#include "fluentkb/snapshot.hpp"
#include "fluentkb/store.hpp"
#include "fluentkb/temporal.hpp"
#include "fluentkb/vocab.hpp"

namespace fluentkb::api {

using json = nlohmann::json;

struct ApiConfig {
  std::string bind_address = "127.0.0.1";
  int port = 7341;
  std::string snapshot_path;  // empty: mutations are not persisted
  bool read_only = false;
  std::optional<std::string> bearer_token;
  std::string cors_origin = "*";
  indexer::IndexConfig index;
  std::size_t max_rounds = 64;
};

struct Request {
  std::string method;
  std::string path;  // already percent-decoded
  std::map<std::string, std::string> query;
  std::string body;
  std::string authorization;
};

struct Response {
  int status = 200;
  json body;
};

// ---------------------------------------------------------------------------
// JSON views

inline std::string id_of(const Term& t) {
  return t.is_skolem() ? vocab::skolem_prefix + t.value() : t.value();
}

inline json to_json(const kres::KnowledgeResource& r) {
  return {{"id", r.id.value()}, {"kind", kres::to_string(r.kind)}, {"label", r.label},
          {"entity_count", r.entity_count}};
}

inline json to_json(const kres::TermEntry& e) {
  return {{"concept", id_of(e.concept_iri)},
          {"lexical_form", e.lexical_form},
          {"definition", e.definition},
          {"contexts_of_use", e.contexts_of_use},
          {"terminology", id_of(e.terminology)}};
}

inline json to_json(const kres::KnowledgeEntity& e) {
  json labels = json::array();
  for (const auto& l : e.labels) labels.push_back({{"text", l.text}, {"language", l.language}});
  json j = {{"iri", id_of(e.iri)}, {"resource", id_of(e.resource)}, {"kind", e.kind}, {"labels", labels}};
  j["term"] = e.term ? to_json(*e.term) : json(nullptr);
  return j;
}

inline json to_json(const indexer::Association& a) {
  return {{"id", id_of(a.id)},
          {"transcription", id_of(a.occurrence.transcription)},
          {"start", a.occurrence.start},
          {"end", a.occurrence.end},
          {"surface", a.occurrence.surface},
          {"concept", id_of(a.concept_iri)},
          {"score", a.score},
          {"status", indexer::to_string(a.status)},
          {"decided_by", a.decided_by ? json(*a.decided_by) : json(nullptr)}};
}

inline json to_json(const temporal::Interval& i) {
  return {{"begin", i.begin().to_string()}, {"end", i.end().to_string()}};
}

inline json to_json(const rules::SaturationReport& r) {
  return {{"rounds", r.rounds},
          {"new_static_triples", r.new_static_triples},
          {"new_fluents", r.new_fluents},
          {"blocked_fluents", r.blocked_fluents},
          {"diagnostics", r.diagnostics}};
}

inline int http_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::unknown_entity:
    case ErrorCode::unknown_association: return 404;
    case ErrorCode::already_decided:
    case ErrorCode::duplicate_resource: return 409;
    case ErrorCode::io_error: return 500;
    default: return 422;
  }
}

inline Response error_response(int status, std::string_view code, std::string_view message) {
  return Response{status, json{{"code", code}, {"message", message}}};
}

// ---------------------------------------------------------------------------
// Service

/// Request handling over an in-memory dataset.
///
/// Readers take the current snapshot pointer and never block on writers.
/// Mutations are serialized: each copies the dataset, applies the change,
/// persists it, and only then publishes the copy. A failed mutation leaves
/// both the published dataset and the snapshot file as they were.
class Service {
 public:
  Service(Dataset initial, ApiConfig config)
      : config_(std::move(config)), current_(std::make_shared<const Dataset>(std::move(initial))) {}

  const ApiConfig& config() const { return config_; }

  std::shared_ptr<const Dataset> dataset() const {
    std::shared_lock lock(swap_mutex_);
    return current_;
  }

  Response handle(const Request& req) const {
    try {
      if (config_.bearer_token && req.authorization != "Bearer " + *config_.bearer_token)
        return error_response(401, "unauthorized", "missing or invalid bearer token");
      return route(req);
    } catch (const Error& e) {
      return error_response(http_status(e.code()), to_string(e.code()), e.what());
    } catch (const json::exception& e) {
      return error_response(422, "invalid_payload", e.what());
    } catch (const std::exception& e) {
      return error_response(500, "internal", e.what());
    }
  }

  /// Registers every endpoint on an httplib server.
  void mount(httplib::Server& server) const {
    auto forward = [this](const httplib::Request& hreq, httplib::Response& hres) {
      Request req;
      req.method = hreq.method;
      req.path = hreq.path;
      for (const auto& [k, v] : hreq.params) req.query.emplace(k, v);
      req.body = hreq.body;
      req.authorization = hreq.get_header_value("Authorization");
      Response res = handle(req);
      hres.status = res.status;
      hres.set_content(res.body.dump(), "application/json; charset=utf-8");
    };
    server.set_default_headers({{"Access-Control-Allow-Origin", config_.cors_origin},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type, Authorization"}});
    server.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.Get(".*", forward);
    server.Post(".*", forward);
    server.Put(".*", forward);
    server.Patch(".*", forward);
    server.Delete(".*", forward);
  }

 private:
  using Match = std::smatch;

  Response route(const Request& req) const {
    static const std::regex entities_re("^/resources/(.+)/entities$");
    static const std::regex concept_re("^/concepts/(.+)$");
    static const std::regex transcription_re("^/transcriptions/(.+)$");
    static const std::regex decision_re("^/associations/(.+)/decision$");
    static const std::regex timeline_re("^/manuscripts/(.+)/timeline$");
    Match m;
    const std::string& p = req.path;
    if (req.method == "GET") {
      if (p == "/health") return health();
      if (p == "/resources") return resources();
      if (std::regex_match(p, m, entities_re)) return resource_entities(m[1].str());
      if (p == "/concepts") return concepts(req);
      if (std::regex_match(p, m, concept_re)) return concept_detail(m[1].str());
      if (std::regex_match(p, m, transcription_re)) return transcription(m[1].str());
      if (p == "/associations") return associations(req);
      if (std::regex_match(p, m, timeline_re)) return timeline(m[1].str());
    } else if (req.method == "POST") {
      if (std::regex_match(p, m, decision_re)) return decision(m[1].str(), req);
      if (p == "/actions/index") return index_action(req);
      if (p == "/actions/saturate") return saturate_action(req);
    } else {
      return error_response(405, "method_not_allowed", req.method + " is not supported");
    }
    return error_response(404, "not_found", "no endpoint " + req.method + " " + p);
  }

  static Term parse_id(const std::string& text) {
    try {
      return Term::iri(text);
    } catch (const Error& e) {
      throw Error(ErrorCode::invalid_argument, "invalid IRI in path: " + std::string(e.what()));
    }
  }

  static std::size_t query_size(const Request& req, const std::string& name, std::size_t fallback) {
    auto it = req.query.find(name);
    if (it == req.query.end()) return fallback;
    auto v = parse_integer(it->second);
    if (!v || *v < 0) throw Error(ErrorCode::invalid_argument, name + " must be a non-negative integer");
    return static_cast<std::size_t>(*v);
  }

  static json parse_body(const Request& req) {
    if (req.body.find_first_not_of(" \t\r\n") == std::string::npos) return json::object();
    json body = json::parse(req.body);
    if (!body.is_object()) throw Error(ErrorCode::invalid_argument, "request body must be a JSON object");
    return body;
  }

  Response health() const {
    auto ds = dataset();
    return {200, json{{"status", "ok"}, {"quads", ds->size()}, {"read_only", config_.read_only}}};
  }

  Response resources() const {
    auto ds = dataset();
    json out = json::array();
    for (const auto& r : kres::list_resources(*ds)) out.push_back(to_json(r));
    return {200, out};
  }

  Response resource_entities(const std::string& id) const {
    auto ds = dataset();
    Term resource = parse_id(id);
    if (!kres::find_resource(*ds, resource))
      throw Error(ErrorCode::unknown_entity, "unknown resource " + resource.to_nquads());
    json out = json::array();
    for (const auto& e : kres::resource_entities(*ds, resource)) out.push_back(to_json(e));
    return {200, out};
  }

  Response concepts(const Request& req) const {
    auto it = req.query.find("lexical");
    if (it == req.query.end() || it->second.empty())
      throw Error(ErrorCode::invalid_argument, "query parameter 'lexical' is required");
    auto ds = dataset();
    json out = json::array();
    for (const auto& e : kres::find_entities(*ds, it->second)) out.push_back(to_json(e));
    return {200, out};
  }

  Response concept_detail(const std::string& id) const {
    auto ds = dataset();
    Term iri = parse_id(id);
    auto e = kres::entity(*ds, iri);
    if (!e) throw Error(ErrorCode::unknown_entity, "unknown concept " + iri.to_nquads());
    json out = to_json(*e);
    // Same word in other resources, for cross-terminology navigation.
    json siblings = json::array();
    std::set<std::string> seen{id_of(iri)};
    for (const auto& l : e->labels)
      for (const auto& other : kres::find_entities(*ds, l.text))
        if (seen.insert(id_of(other.iri)).second) siblings.push_back(to_json(other));
    out["siblings"] = siblings;
    json corr = json::array();
    for (const auto& c : kres::correspondences(*ds))
      if (c.entity1 == iri || c.entity2 == iri)
        corr.push_back({{"entity1", id_of(c.entity1)},
                        {"entity2", id_of(c.entity2)},
                        {"relation", kres::to_string(c.relation)},
                        {"confidence", c.confidence}});
    out["correspondences"] = corr;
    return {200, out};
  }

  Response transcription(const std::string& id) const {
    auto ds = dataset();
    Term tid = parse_id(id);
    auto t = indexer::transcription(*ds, tid);
    if (!t) throw Error(ErrorCode::unknown_entity, "unknown transcription " + tid.to_nquads());
    json assoc = json::array();
    for (const auto& a : indexer::associations(*ds, std::nullopt, tid)) assoc.push_back(to_json(a));
    return {200, json{{"id", id_of(t->id)},
                      {"manuscript", id_of(t->manuscript)},
                      {"surface", t->surface},
                      {"zone", t->zone},
                      {"seq", t->sequence},
                      {"text", t->text},
                      {"associations", assoc}}};
  }

  Response associations(const Request& req) const {
    std::optional<indexer::Status> status;
    if (auto it = req.query.find("status"); it != req.query.end()) {
      status = indexer::parse_status(it->second);
      if (!status) throw Error(ErrorCode::invalid_argument, "unknown status '" + it->second + "'");
    }
    std::optional<Term> transcription;
    if (auto it = req.query.find("transcription"); it != req.query.end()) transcription = parse_id(it->second);
    std::size_t offset = query_size(req, "offset", 0);
    std::size_t limit = query_size(req, "limit", 100);
    auto ds = dataset();
    auto all = indexer::associations(*ds, status, transcription);
    json out = json::array();
    for (std::size_t i = offset; i < all.size() && i - offset < limit; ++i) out.push_back(to_json(all[i]));
    return {200, out};
  }

  Response timeline(const std::string& id) const {
    auto ds = dataset();
    Term m = parse_id(id);
    if (ds->match(m, std::nullopt, std::nullopt).empty())
      throw Error(ErrorCode::unknown_entity, "unknown manuscript " + m.to_nquads());
    auto stored = rules::stored_rules(*ds);
    json out{{"manuscript", id_of(m)}};

    json written = nullptr;
    for (const auto& q : ds->match(m, Term::iri(indexer::names::writing_time), std::nullopt))
      if (auto i = temporal::interval_of(q.object(), *ds)) {
        written = to_json(*i);
        break;
      }
    out["writing_time"] = written;

    json inferred = nullptr;
    for (const auto& q : ds->match(m, Term::iri(indexer::names::inferred_writing_time), std::nullopt))
      if (auto i = temporal::interval_of(q.object(), *ds)) {
        inferred = to_json(*i);
        inferred["provenance"] = "writing-time bounds";
        break;
      }
    out["inferred_writing_time"] = inferred;

    // Each bound with where it came from: asserted data or the rules deriving it.
    json bounds = json::array();
    const Term inferred_graph = Term::iri(vocab::graph_inferred);
    for (const char* prop : {"notBefore", "notAfter"}) {
      std::set<std::string> seen;
      for (const auto& q : ds->match(m, Term::iri(vocab::sism(prop)), std::nullopt)) {
        if (!seen.insert(q.object().to_nquads()).second) continue;
        auto instant = temporal::instant_of(q.object(), ds.get());
        auto copies = ds->match(m, q.predicate(), q.object());
        bool asserted = std::any_of(copies.begin(), copies.end(),
                                    [&](const Quad& x) { return x.graph() != inferred_graph; });
        json provenance = json::array();
        if (asserted) provenance.push_back("asserted");
        for (const auto& r : rules::explain(*ds, stored, m, q.predicate(), q.object()))
          provenance.push_back("rule:" + r);
        bounds.push_back({{"property", prop},
                          {"value", instant ? json(instant->to_string()) : json(q.object().value())},
                          {"provenance", provenance}});
      }
    }
    out["bounds"] = bounds;

    json fluents = json::array();
    for (const auto& f : temporal::all_fluents(*ds)) {
      if (f.subject != m && f.object != m) continue;
      fluents.push_back({{"node", id_of(f.node)},
                         {"subject", id_of(f.subject)},
                         {"property", f.property.value()},
                         {"object", f.object.is_literal() ? f.object.value() : id_of(f.object)},
                         {"during", to_json(f.during)},
                         {"provenance", f.provenance.to_string()}});
    }
    out["fluents"] = fluents;
    return {200, out};
  }

  template <typename Fn>
  Response mutate(Fn&& fn) const {
    if (config_.read_only) return error_response(403, "read_only", "the service is read-only");
    std::lock_guard writer(writer_mutex_);
    Dataset work = *dataset();
    json result = fn(work);
    if (!config_.snapshot_path.empty()) snapshot::save(work, config_.snapshot_path);
    auto next = std::make_shared<const Dataset>(std::move(work));
    {
      std::unique_lock lock(swap_mutex_);
      current_ = std::move(next);
    }
    return {200, result};
  }

  Response decision(const std::string& id, const Request& req) const {
    Term aid = parse_id(id);
    json body = parse_body(req);
    if (!body.contains("verdict") || !body["verdict"].is_string())
      throw Error(ErrorCode::invalid_argument, "field 'verdict' (accepted or rejected) is required");
    auto verdict = indexer::parse_status(body["verdict"].get<std::string>());
    if (!verdict || *verdict == indexer::Status::proposed)
      throw Error(ErrorCode::invalid_argument, "verdict must be 'accepted' or 'rejected'");
    std::string decider = body.value("decider", std::string());
    if (decider.empty()) throw Error(ErrorCode::invalid_argument, "field 'decider' is required");
    return mutate([&](Dataset& ds) { return to_json(indexer::decide(ds, aid, *verdict, decider)); });
  }

  Response index_action(const Request& req) const {
    json body = parse_body(req);
    indexer::IndexConfig cfg = config_.index;
    if (body.contains("theta")) cfg.theta = body["theta"].get<double>();
    if (body.contains("lambda")) cfg.lambda = body["lambda"].get<double>();
    std::optional<Term> target;
    if (body.contains("transcription") && !body["transcription"].is_null())
      target = parse_id(body["transcription"].get<std::string>());
    return mutate([&](Dataset& ds) {
      auto proposed = target ? indexer::index_transcription(ds, *target, cfg) : indexer::index_all(ds, cfg);
      json items = json::array();
      for (const auto& a : proposed) items.push_back(to_json(a));
      return json{{"proposed", items}};
    });
  }

  Response saturate_action(const Request& req) const {
    json body = parse_body(req);
    std::size_t max_rounds = body.value("max_rounds", config_.max_rounds);
    return mutate([&](Dataset& ds) {
      auto report = rules::saturate(ds, rules::stored_rules(ds), rules::SaturateOptions{max_rounds});
      auto dated = rules::infer_writing_times(ds);
      json out = to_json(report);
      out["manuscripts_dated"] = dated.dated.size();
      json contradictions = json::array();
      for (const auto& c : dated.contradictions)
        contradictions.push_back({{"manuscript", id_of(c.manuscript)},
                                  {"not_before", c.not_before.to_string()},
                                  {"not_after", c.not_after.to_string()}});
      out["contradictions"] = contradictions;
      return out;
    });
  }

  ApiConfig config_;
  mutable std::mutex writer_mutex_;
  mutable std::shared_mutex swap_mutex_;
  mutable std::shared_ptr<const Dataset> current_;
};

/// Loads the snapshot and serves until stop() is called on the returned
/// server from another thread. Returns false if the port cannot be bound.
inline bool serve(Service& service, httplib::Server& server) {
  service.mount(server);
  return server.listen(service.config().bind_address, service.config().port);
}

}  // namespace fluentkb::api
