#pragma once

// Random rule sets and fact sets for the saturation properties.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "fluentkb/rules.hpp"
#include "fluentkb/store.hpp"
#include "fluentkb/temporal.hpp"
#include "oracles.hpp"

namespace fluentkb::testing {

inline const std::string kNs = "http://example.org/gen/";

inline std::string gen_iri(const std::string& local) { return kNs + local; }

struct RandomProgram {
  std::vector<Quad> facts;
  std::vector<std::string> static_rules;  // DSL text, one rule each
  std::vector<std::string> fluent_rules;
  std::vector<std::string> entities;
  std::vector<std::string> fluent_properties;
  std::vector<temporal::Instant> dates;

  std::string text(const std::vector<std::size_t>& order) const {
    std::vector<std::string> all = static_rules;
    all.insert(all.end(), fluent_rules.begin(), fluent_rules.end());
    std::string out;
    for (auto i : order) out += all[i] + "\n";
    return out;
  }

  std::size_t rule_count() const { return static_rules.size() + fluent_rules.size(); }
};

/// At most 10 rules, 50 facts and 8 distinct dates.
inline RandomProgram random_program(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  RandomProgram p;
  for (int i = 0; i < 6; ++i) p.entities.push_back(gen_iri("e" + std::to_string(i)));
  const std::vector<std::string> preds = {gen_iri("p0"), gen_iri("p1"), gen_iri("p2"), gen_iri("p3")};
  const std::vector<std::string> date_preds = {gen_iri("d0"), gen_iri("d1")};
  p.fluent_properties = {gen_iri("f0"), gen_iri("f1")};

  std::size_t n_dates = 1 + pick(8);
  std::set<temporal::Instant> dates;
  while (dates.size() < n_dates)
    dates.insert(temporal::Instant::from_ymd(1850 + static_cast<int>(pick(60)), 1 + static_cast<unsigned>(pick(12)), 1));
  p.dates.assign(dates.begin(), dates.end());

  const Term g = Term::iri(vocab::graph_default_data);
  std::size_t n_facts = 1 + pick(50);
  for (std::size_t i = 0; i < n_facts; ++i) {
    Term s = Term::iri(p.entities[pick(p.entities.size())]);
    if (pick(3) == 0) {
      const auto& d = p.dates[pick(p.dates.size())];
      p.facts.emplace_back(s, Term::iri(date_preds[pick(2)]), temporal::to_term(d), g);
    } else {
      p.facts.emplace_back(s, Term::iri(preds[pick(preds.size())]), Term::iri(p.entities[pick(p.entities.size())]), g);
    }
  }

  auto iri = [](const std::string& s) { return "<" + s + ">"; };
  std::size_t n_rules = 1 + pick(10);
  for (std::size_t r = 0; r < n_rules; ++r) {
    std::string id = "r" + std::to_string(r);
    bool fluent = pick(2) == 0;
    std::string body = "?x " + iri(preds[pick(preds.size())]) + " ?y";
    if (pick(2) == 0) body += " . ?y " + iri(preds[pick(preds.size())]) + " ?z";
    if (!fluent) {
      const char* obj = body.find("?z") != std::string::npos && pick(2) == 0 ? "?z" : "?y";
      p.static_rules.push_back("RULE " + id + ": WHEN " + body + " THEN ?x " + iri(preds[pick(preds.size())]) + " " +
                               obj + " .");
      continue;
    }
    body += " . ?x " + iri(date_preds[pick(2)]) + " ?t1";
    bool second_date = pick(2) == 0;
    if (second_date) body += " . ?y " + iri(date_preds[pick(2)]) + " ?t2";
    std::string cond;
    if (second_date && pick(2) == 0) cond = " IF ?t1 <= ?t2";
    std::string begin = pick(4) == 0 ? "START" : "?t1";
    std::string end;
    switch (pick(3)) {
      case 0: end = "END"; break;
      case 1: end = second_date ? "?t2" : "END"; break;
      default: end = p.dates[pick(p.dates.size())].to_string(); break;
    }
    p.fluent_rules.push_back("RULE " + id + ": WHEN " + body + cond + " THEN FLUENT ?x " +
                             iri(p.fluent_properties[pick(2)]) + " ?y DURING [" + begin + ", " + end + "] .");
  }
  return p;
}

/// holds_at for every (entity, fluent property, entity, probe instant).
inline std::vector<bool> probe_matrix(const Dataset& ds, const RandomProgram& p) {
  std::vector<temporal::Instant> probes = {temporal::Instant::start(), temporal::Instant::end()};
  for (const auto& d : p.dates) {
    probes.push_back(d);
    probes.push_back(temporal::Instant::from_days(d.days() - 1));
    probes.push_back(temporal::Instant::from_days(d.days() + 1));
  }
  std::vector<bool> out;
  for (const auto& s : p.entities)
    for (const auto& f : p.fluent_properties)
      for (const auto& o : p.entities)
        for (const auto& t : probes) out.push_back(temporal::holds_at(ds, Term::iri(s), Term::iri(f), Term::iri(o), t));
  return out;
}

/// The built-in schema rules, restated for the reference closure.
inline std::vector<oracle::SimpleRule> schema_rules_reference() {
  const std::string sc = vocab::rdfs_sub_class_of, sp = vocab::rdfs_sub_property_of, type = vocab::rdf_type;
  return {
      {{{"?a", sc, "?b"}, {"?b", sc, "?c"}}, {{"?a", sc, "?c"}}},
      {{{"?x", type, "?c"}, {"?c", sc, "?d"}}, {{"?x", type, "?d"}}},
      {{{"?p", sp, "?q"}, {"?q", sp, "?r"}}, {{"?p", sp, "?r"}}},
      {{{"?x", "?p", "?y"}, {"?p", sp, "?q"}}, {{"?x", "?q", "?y"}}},
  };
}

struct StaticInstance {
  std::vector<Quad> facts;
  std::string rules_text;
  std::vector<oracle::SimpleRule> reference_rules;
};

/// Up to 100 triples over a few predicates plus rdf:type, rdfs:subClassOf
/// and rdfs:subPropertyOf, and up to 6 static rules mirrored for the oracle.
inline StaticInstance random_static_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  StaticInstance inst;
  std::vector<std::string> nodes, classes, preds;
  for (int i = 0; i < 6; ++i) nodes.push_back(gen_iri("n" + std::to_string(i)));
  for (int i = 0; i < 4; ++i) classes.push_back(gen_iri("C" + std::to_string(i)));
  for (int i = 0; i < 4; ++i) preds.push_back(gen_iri("q" + std::to_string(i)));
  const Term g = Term::iri(vocab::graph_default_data);
  std::size_t n = 1 + pick(100);
  for (std::size_t i = 0; i < n; ++i) {
    switch (pick(5)) {
      case 0:
        inst.facts.emplace_back(Term::iri(nodes[pick(6)]), Term::iri(vocab::rdf_type), Term::iri(classes[pick(4)]), g);
        break;
      case 1:
        inst.facts.emplace_back(Term::iri(classes[pick(4)]), Term::iri(vocab::rdfs_sub_class_of),
                                Term::iri(classes[pick(4)]), g);
        break;
      case 2:
        inst.facts.emplace_back(Term::iri(preds[pick(4)]), Term::iri(vocab::rdfs_sub_property_of),
                                Term::iri(preds[pick(4)]), g);
        break;
      default:
        inst.facts.emplace_back(Term::iri(nodes[pick(6)]), Term::iri(preds[pick(4)]), Term::iri(nodes[pick(6)]), g);
        break;
    }
  }
  inst.reference_rules = schema_rules_reference();
  std::size_t n_rules = pick(7);
  for (std::size_t r = 0; r < n_rules; ++r) {
    oracle::SimpleRule ref;
    std::string a = preds[pick(4)], b = preds[pick(4)], h = preds[pick(4)];
    std::string text = "RULE s" + std::to_string(r) + ": WHEN ?x <" + a + "> ?y";
    ref.body.emplace_back("?x", a, "?y");
    bool chain = pick(2) == 0;
    if (chain) {
      text += " . ?y <" + b + "> ?z";
      ref.body.emplace_back("?y", b, "?z");
    }
    switch (pick(3)) {
      case 0:
        text += " THEN ?y <" + h + "> ?x .";
        ref.head.emplace_back("?y", h, "?x");
        break;
      case 1: {
        const std::string& c = classes[pick(4)];
        text += " THEN ?x a <" + c + "> .";
        ref.head.emplace_back("?x", vocab::rdf_type, c);
        break;
      }
      default: {
        std::string o = chain ? "?z" : "?y";
        text += " THEN ?x <" + h + "> " + o + " .";
        ref.head.emplace_back("?x", h, o);
        break;
      }
    }
    inst.rules_text += text + "\n";
    inst.reference_rules.push_back(std::move(ref));
  }
  return inst;
}

inline std::set<oracle::Triple> triples_of(const Dataset& ds) {
  std::set<oracle::Triple> out;
  ds.for_each([&](const Quad& q) { out.emplace(q.subject().value(), q.predicate().value(), q.object().value()); });
  return out;
}

}  // namespace fluentkb::testing
