#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <csignal>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <CLI11.hpp>

#include "fluentkb/api.hpp"
#include "fluentkb/error.hpp"
#include "fluentkb/indexer.hpp"
#include "fluentkb/kres.hpp"
#include "fluentkb/rdf_io.hpp"
#include "fluentkb/rules.hpp"
#include "fluentkb/snapshot.hpp"
#include "fluentkb/store.hpp"
#include "fluentkb/temporal.hpp"
#include "fluentkb/vocab.hpp"

namespace fluentkb::cli {

enum ExitCode : int { ok = 0, operational = 1, usage = 2 };

/// Exclusive advisory lock on "<db>.lock", held for the object's lifetime.
class DbLock {
 public:
  explicit DbLock(const std::string& db) : path_(db + ".lock") {
    fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(ErrorCode::io_error, "cannot open lock file " + path_);
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      throw Error(ErrorCode::io_error, "database " + db + " is locked by another process");
    }
  }
  DbLock(const DbLock&) = delete;
  DbLock& operator=(const DbLock&) = delete;
  ~DbLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }

 private:
  std::string path_;
  int fd_ = -1;
};

// ---------------------------------------------------------------------------
// Query patterns

namespace detail {

inline std::vector<std::string> split_pattern(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      cur.push_back(c);
      if (c == '\\' && i + 1 < text.size()) cur.push_back(text[++i]);
      else if (c == '"') quoted = false;
    } else if (c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
    } else {
      if (c == '"') quoted = true;
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

inline std::optional<Term> parse_pattern_term(const std::string& tok) {
  if (tok == "?") return std::nullopt;
  if (tok == "a") return Term::iri(vocab::rdf_type);
  if (tok.size() >= 2 && tok.front() == '<' && tok.back() == '>') return Term::iri(tok.substr(1, tok.size() - 2));
  if (tok.starts_with("_:")) return Term::skolem(tok.substr(2));
  if (tok.starts_with("\"")) {
    auto close = tok.rfind('"');
    if (close == 0) throw Error(ErrorCode::invalid_argument, "unterminated literal " + tok);
    std::string lex;
    for (std::size_t i = 1; i < close; ++i) {
      if (tok[i] == '\\' && i + 1 < close) ++i;
      lex.push_back(tok[i]);
    }
    std::string rest = tok.substr(close + 1);
    if (rest.empty()) return Term::literal(lex);
    if (rest.starts_with("@")) return Term::lang_literal(lex, rest.substr(1));
    if (rest.starts_with("^^")) {
      auto dt = parse_pattern_term(rest.substr(2));
      if (!dt || !dt->is_iri()) throw Error(ErrorCode::invalid_argument, "bad datatype in " + tok);
      return Term::literal(lex, dt->value());
    }
    throw Error(ErrorCode::invalid_argument, "bad literal " + tok);
  }
  auto colon = tok.find(':');
  if (colon != std::string::npos) {
    auto prefixes = rdf::default_prefixes();
    if (auto it = prefixes.find(tok.substr(0, colon)); it != prefixes.end())
      return Term::iri(it->second + tok.substr(colon + 1));
    return Term::iri(tok);
  }
  throw Error(ErrorCode::invalid_argument, "cannot read pattern term '" + tok + "'");
}

inline bool is_fluent_node(const Dataset& ds, const Term& t) {
  return t.is_resource() &&
         ds.contains_triple(t, Term::iri(vocab::rdf_type), Term::iri(temporal::fluent_class()));
}

inline void print_fluent(std::ostream& out, const temporal::FluentRelation& f) {
  out << "fluent " << f.node.to_nquads() << "\n"
      << "  subject    " << f.subject.to_nquads() << "\n"
      << "  property   " << f.property.to_nquads() << "\n"
      << "  object     " << f.object.to_nquads() << "\n"
      << "  during     [" << f.during.begin().to_string() << ", " << f.during.end().to_string() << "]\n"
      << "  provenance " << f.provenance.to_string() << "\n";
}

/// Turns reified fluents written by hand in a data file (any node typed
/// sism:FluentRelation) into canonical fluents; returns the other quads.
inline std::vector<Quad> normalize_fluents(const std::vector<Quad>& parsed, Dataset& ds, std::size_t& fluents) {
  Dataset scratch;
  for (const auto& q : parsed) scratch.insert(q);
  std::set<std::string> consumed;
  for (const auto& f : temporal::all_fluents(scratch)) {
    temporal::assert_fluent(ds, temporal::FluentSpec{f.subject, f.property, f.object, f.during,
                                                     f.provenance, f.initiated_by, f.terminated_by});
    ++fluents;
    consumed.insert(f.node.to_nquads());
    for (const auto& q : scratch.match(f.node, Term::iri(temporal::during_property()), std::nullopt))
      if (q.object().is_skolem()) consumed.insert(q.object().to_nquads());
  }
  std::vector<Quad> rest;
  for (const auto& q : parsed) {
    if (consumed.count(q.subject().to_nquads()) || consumed.count(q.object().to_nquads())) continue;
    rest.push_back(q);
  }
  return rest;
}

inline std::atomic<httplib::Server*> active_server{nullptr};

inline void stop_server(int) {
  if (auto* s = active_server.load()) s->stop();
}

inline std::string describe(const kres::Clash& c) { return std::string(kres::to_string(c.kind)) + ": " + c.message; }

}  // namespace detail

// ---------------------------------------------------------------------------

/// Runs one command line (without the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"fluentkb: knowledge base for dated manuscripts, terminologies and fluents", "fluentkb"};
  app.require_subcommand(1);
  std::string db;
  if (const char* env = std::getenv("FLUENTKB_DB")) db = env;
  app.add_option("--db", db, "snapshot file (default: $FLUENTKB_DB)");

  std::string kind, id, file, label;
  bool replace = false;
  auto* import_cmd = app.add_subcommand("import", "import a knowledge resource (Turtle)");
  import_cmd->add_option("--kind", kind, "owl | skos | terminology")->required();
  import_cmd->add_option("--id", id, "resource IRI")->required();
  import_cmd->add_option("--label", label, "display label");
  import_cmd->add_flag("--replace", replace, "replace an already registered resource");
  import_cmd->add_option("file", file, "resource file")->required();

  std::string graph = vocab::graph_default_data;
  auto* load_cmd = app.add_subcommand("load", "load data (Turtle, or N-Quads for .nq files)");
  load_cmd->add_option("--graph", graph, "target graph for Turtle data");
  load_cmd->add_option("file", file, "data file")->required();

  auto* align_cmd = app.add_subcommand("align", "store correspondences from a CSV file");
  align_cmd->add_option("file", file, "entity1,entity2,relation,confidence rows")->required();

  double theta = 0.35, lambda = 0.3;
  std::size_t window = 5;
  std::string transcriptions_file, stopwords_file;
  auto* index_cmd = app.add_subcommand("index", "propose word-concept associations");
  index_cmd->add_option("--theta", theta, "keep scores strictly above this")->check(CLI::Range(0.0, 1.0));
  index_cmd->add_option("--lambda", lambda, "weight of the temporal factor")->check(CLI::Range(0.0, 1.0));
  index_cmd->add_option("--window", window, "context window in tokens")->check(CLI::PositiveNumber);
  index_cmd->add_option("--transcriptions", transcriptions_file, "JSON Lines transcriptions to load first");
  index_cmd->add_option("--stopwords", stopwords_file, "stopword file, one token per line");

  std::string rules_file;
  std::size_t max_rounds = 64;
  auto* infer_cmd = app.add_subcommand("infer", "saturate rules and infer writing times");
  infer_cmd->add_option("--rules", rules_file, "rule file");
  infer_cmd->add_option("--max-rounds", max_rounds, "round cap")->check(CLI::PositiveNumber);

  std::string pattern;
  auto* query_cmd = app.add_subcommand("query", "print quads matching \"S P O G\" (? is a wildcard)");
  query_cmd->add_option("pattern", pattern, "four terms")->required();

  auto* check_cmd = app.add_subcommand("check", "report consistency clashes");

  std::string out_file;
  auto* export_cmd = app.add_subcommand("export", "write the store as canonical N-Quads");
  export_cmd->add_option("out", out_file, "output .nq file")->required();

  int port = 7341;
  std::string bind = "127.0.0.1", token;
  bool read_only = false;
  auto* serve_cmd = app.add_subcommand("serve", "serve the HTTP API");
  serve_cmd->add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535));
  serve_cmd->add_option("--bind", bind, "bind address");
  serve_cmd->add_option("--token", token, "require this bearer token");
  serve_cmd->add_flag("--read-only", read_only, "refuse mutations");
  serve_cmd->add_option("--stopwords", stopwords_file, "stopword file for POST /actions/index");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? ok : usage;
  }
  if (db.empty()) {
    err << "error: no database: pass --db PATH or set FLUENTKB_DB\n" << app.help();
    return usage;
  }
  std::optional<kres::ResourceKind> resource_kind;
  if (import_cmd->parsed()) {
    resource_kind = kres::parse_kind(kind);
    if (!resource_kind) {
      err << "error: unknown kind '" << kind << "' (expected owl, skos or terminology)\n";
      return usage;
    }
  }

  try {
    DbLock lock(db);
    Dataset ds = snapshot::load(db);

    if (import_cmd->parsed()) {
      auto parsed = rdf::parse_turtle(snapshot::read_file(file), Term::iri(id));
      if (!parsed.ok()) {
        for (const auto& d : parsed.diagnostics) err << file << ":" << d.to_string() << "\n";
        return operational;
      }
      kres::ImportOptions options;
      options.replace = replace;
      if (!label.empty()) options.label = label;
      auto report = kres::import_resource(ds, parsed.quads, *resource_kind, Term::iri(id), options);
      if (!report.accepted) {
        err << "import of " << id << " rejected: " << report.clashes.size() << " clash(es)\n";
        for (const auto& c : report.clashes) err << "  " << detail::describe(c) << "\n";
        return operational;
      }
      snapshot::save(ds, db);
      out << "imported " << id << " (" << kres::to_string(*resource_kind) << "): " << report.entity_count
          << " entities\n";
      return ok;
    }

    if (load_cmd->parsed()) {
      std::string text = snapshot::read_file(file);
      auto parsed = file.ends_with(".nq") ? rdf::parse_nquads(text, Term::iri(graph))
                                          : rdf::parse_turtle(text, Term::iri(graph));
      if (!parsed.ok()) {
        for (const auto& d : parsed.diagnostics) err << file << ":" << d.to_string() << "\n";
        return operational;
      }
      std::size_t fluents = 0;
      auto rest = detail::normalize_fluents(parsed.quads, ds, fluents);
      std::size_t added = 0;
      for (const auto& q : rest) added += ds.insert(q) ? 1 : 0;
      snapshot::save(ds, db);
      out << "loaded " << added << " quads and " << fluents << " fluents from " << file << "\n";
      return ok;
    }

    if (align_cmd->parsed()) {
      auto rows = kres::parse_alignment_csv(snapshot::read_file(file));
      std::size_t stored = 0, updated = 0;
      for (const auto& c : rows) (kres::add_correspondence(ds, c) ? stored : updated)++;
      snapshot::save(ds, db);
      out << "stored " << stored << " correspondences, updated " << updated << "\n";
      return ok;
    }

    if (index_cmd->parsed()) {
      if (!transcriptions_file.empty())
        for (const auto& t : indexer::parse_transcriptions(snapshot::read_file(transcriptions_file)))
          indexer::store_transcription(ds, t);
      indexer::IndexConfig cfg;
      cfg.theta = theta;
      cfg.lambda = lambda;
      cfg.window = window;
      cfg.stopwords = stopwords_file.empty() ? indexer::Stopwords::french()
                                             : indexer::Stopwords::from_file(stopwords_file);
      auto proposed = indexer::index_all(ds, cfg);
      snapshot::save(ds, db);
      for (const auto& a : proposed)
        out << format_double(std::round(a.score * 1000) / 1000) << "\t" << a.concept_iri.value() << "\t\""
            << a.occurrence.surface << "\" [" << a.occurrence.start << "," << a.occurrence.end << ")\t"
            << a.occurrence.transcription.value() << "\n";
      out << "proposed associations: " << proposed.size() << "\n";
      return ok;
    }

    if (infer_cmd->parsed()) {
      if (!rules_file.empty()) rules::store_rules(ds, rules::compile_rules(snapshot::read_file(rules_file)));
      auto report = rules::saturate(ds, rules::stored_rules(ds), rules::SaturateOptions{max_rounds});
      auto dated = rules::infer_writing_times(ds);
      snapshot::save(ds, db);
      out << "rounds: " << report.rounds << "\n"
          << "new static triples: " << report.new_static_triples << "\n"
          << "new fluents: " << report.new_fluents << "\n"
          << "blocked fluents: " << report.blocked_fluents << "\n"
          << "manuscripts dated: " << dated.dated.size() << "\n";
      for (const auto& d : report.diagnostics) err << "warning: " << d << "\n";
      for (const auto& c : dated.contradictions)
        err << "warning: contradictory writing-time bounds on " << c.manuscript.to_nquads() << ": not before "
            << c.not_before.to_string() << ", not after " << c.not_after.to_string() << "\n";
      return ok;
    }

    if (query_cmd->parsed()) {
      auto tokens = detail::split_pattern(pattern);
      if (tokens.size() != 4) {
        err << "error: query needs four terms \"S P O G\", got " << tokens.size() << "\n";
        return usage;
      }
      QuadPattern qp{detail::parse_pattern_term(tokens[0]), detail::parse_pattern_term(tokens[1]),
                     detail::parse_pattern_term(tokens[2]), detail::parse_pattern_term(tokens[3])};
      std::set<std::string> shown;
      std::size_t quads = 0, fluents = 0;
      for (const auto& q : ds.match(qp)) {
        std::optional<Term> node;
        if (detail::is_fluent_node(ds, q.object())) node = q.object();
        else if (detail::is_fluent_node(ds, q.subject())) node = q.subject();
        if (node && q.predicate().value() != vocab::rdf_type) {
          if (!shown.insert(node->to_nquads()).second) continue;
          for (const auto& f : temporal::all_fluents(ds))
            if (f.node == *node) {
              detail::print_fluent(out, f);
              ++fluents;
            }
          continue;
        }
        out << q.key() << "\n";
        ++quads;
      }
      out << "# " << quads << " quads, " << fluents << " fluents\n";
      return ok;
    }

    if (check_cmd->parsed()) {
      auto clashes = kres::find_clashes(ds);
      for (const auto& c : clashes) out << detail::describe(c) << "\n";
      out << "clashes: " << clashes.size() << "\n";
      return ok;
    }

    if (export_cmd->parsed()) {
      snapshot::write_file_atomic(out_file, ds.to_nquads());
      out << "exported " << ds.size() << " quads to " << out_file << "\n";
      return ok;
    }

    if (serve_cmd->parsed()) {
      api::ApiConfig config;
      config.bind_address = bind;
      config.port = port;
      config.snapshot_path = db;
      config.read_only = read_only;
      if (!token.empty()) config.bearer_token = token;
      config.index.stopwords = stopwords_file.empty() ? indexer::Stopwords::french()
                                                      : indexer::Stopwords::from_file(stopwords_file);
      api::Service service(std::move(ds), config);
      httplib::Server server;
      detail::active_server = &server;
      auto previous_int = std::signal(SIGINT, detail::stop_server);
      auto previous_term = std::signal(SIGTERM, detail::stop_server);
      out << "serving on http://" << bind << ":" << port << std::endl;
      bool listened = api::serve(service, server);
      std::signal(SIGINT, previous_int);
      std::signal(SIGTERM, previous_term);
      detail::active_server = nullptr;
      if (!listened) {
        err << "error: cannot listen on " << bind << ":" << port << "\n";
        return operational;
      }
      return ok;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return operational;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return operational;
  }
  return usage;
}

}  // namespace fluentkb::cli
