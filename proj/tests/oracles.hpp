#pragma once

// Reference implementations the engine is checked against. They are kept
// deliberately naive and share no code with the library beyond data types.

#include <array>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "fluentkb/temporal.hpp"

namespace fluentkb::oracle {

using temporal::AllenRelation;
using temporal::Instant;
using temporal::Interval;

/// Textbook endpoint definitions of the 13 relations. "meets" and "met_by"
/// additionally require both intervals to span more than one day; a
/// single-day interval touching an endpoint is a start or finish instead.
inline std::vector<AllenRelation> allen_relations_holding(const Interval& a, const Interval& b) {
  const Instant a1 = a.begin(), a2 = a.end(), b1 = b.begin(), b2 = b.end();
  const bool proper = a1 < a2 && b1 < b2;
  std::vector<AllenRelation> out;
  auto add = [&](bool cond, AllenRelation r) {
    if (cond) out.push_back(r);
  };
  add(a2 < b1, AllenRelation::before);
  add(b2 < a1, AllenRelation::after);
  add(proper && a2 == b1, AllenRelation::meets);
  add(proper && b2 == a1, AllenRelation::met_by);
  add(a1 < b1 && b1 < a2 && a2 < b2, AllenRelation::overlaps);
  add(b1 < a1 && a1 < b2 && b2 < a2, AllenRelation::overlapped_by);
  add(a1 == b1 && a2 < b2, AllenRelation::starts);
  add(a1 == b1 && b2 < a2, AllenRelation::started_by);
  add(b1 < a1 && a2 < b2, AllenRelation::during);
  add(a1 < b1 && b2 < a2, AllenRelation::contains);
  add(a2 == b2 && b1 < a1, AllenRelation::finishes);
  add(a2 == b2 && a1 < b1, AllenRelation::finished_by);
  add(a1 == b1 && a2 == b2, AllenRelation::equals);
  return out;
}

/// Every interval over the given instants (begin <= end).
inline std::vector<Interval> all_intervals(const std::vector<Instant>& points) {
  std::vector<Interval> out;
  for (const auto& b : points)
    for (const auto& e : points)
      if (!(e < b)) out.emplace_back(b, e);
  return out;
}

using Triple = std::tuple<std::string, std::string, std::string>;

/// A static rule over plain strings: body atoms and head atoms whose
/// positions are variables ("?x") or constants.
struct SimpleRule {
  std::vector<Triple> body;
  std::vector<Triple> head;
};

namespace detail {

inline bool is_var(const std::string& s) { return !s.empty() && s[0] == '?'; }

inline bool bind(const std::string& slot, const std::string& value, std::map<std::string, std::string>& b) {
  if (!is_var(slot)) return slot == value;
  auto it = b.find(slot);
  if (it == b.end()) {
    b.emplace(slot, value);
    return true;
  }
  return it->second == value;
}

inline void enumerate(const std::vector<Triple>& body, std::size_t i, const std::set<Triple>& facts,
                      std::map<std::string, std::string>& b, std::vector<std::map<std::string, std::string>>& out) {
  if (i == body.size()) {
    out.push_back(b);
    return;
  }
  for (const auto& f : facts) {
    auto saved = b;
    if (bind(std::get<0>(body[i]), std::get<0>(f), b) && bind(std::get<1>(body[i]), std::get<1>(f), b) &&
        bind(std::get<2>(body[i]), std::get<2>(f), b))
      enumerate(body, i + 1, facts, b, out);
    b = saved;
  }
}

inline std::string subst(const std::string& slot, const std::map<std::string, std::string>& b) {
  return is_var(slot) ? b.at(slot) : slot;
}

}  // namespace detail

/// Least fixpoint by repeating "apply every rule to every fact
/// combination" until nothing changes.
inline std::set<Triple> closure(std::set<Triple> facts, const std::vector<SimpleRule>& rules) {
  while (true) {
    std::set<Triple> next = facts;
    for (const auto& r : rules) {
      std::vector<std::map<std::string, std::string>> bindings;
      std::map<std::string, std::string> b;
      detail::enumerate(r.body, 0, facts, b, bindings);
      for (const auto& m : bindings)
        for (const auto& h : r.head)
          next.emplace(detail::subst(std::get<0>(h), m), detail::subst(std::get<1>(h), m),
                       detail::subst(std::get<2>(h), m));
    }
    if (next.size() == facts.size()) return facts;
    facts = std::move(next);
  }
}

}  // namespace fluentkb::oracle
