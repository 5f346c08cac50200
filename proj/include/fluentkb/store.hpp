#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fluentkb/term.hpp"

namespace fluentkb {

/// Each bound position must match exactly; std::nullopt is a wildcard.
struct QuadPattern {
  std::optional<Term> subject;
  std::optional<Term> predicate;
  std::optional<Term> object;
  std::optional<Term> graph;

  bool matches(const Quad& q) const {
    return (!subject || *subject == q.subject()) &&
           (!predicate || *predicate == q.predicate()) &&
           (!object || *object == q.object()) &&
           (!graph || *graph == q.graph());
  }
};

/// In-memory quad store with set semantics.
///
/// Quads are keyed by their canonical N-Quads line, so iteration and every
/// match() result are sorted bytewise by that line. Secondary indexes cover
/// graph, subject, predicate, object, (subject, predicate) and
/// (predicate, object).
///
/// Not internally synchronized: callers provide the single-writer /
/// multiple-reader discipline.
class Dataset {
 public:
  Dataset() = default;
  Dataset(const Dataset& other) { *this = other; }
  Dataset& operator=(const Dataset& other) {
    if (this == &other) return *this;
    clear();
    for (const auto& [key, q] : other.quads_) insert(q);
    return *this;
  }
  Dataset(Dataset&&) noexcept = default;
  Dataset& operator=(Dataset&&) noexcept = default;

  /// Returns true iff the quad was not present.
  bool insert(const Quad& q) {
    auto [it, inserted] = quads_.emplace(q.key(), q);
    if (!inserted) return false;
    index_add(it);
    return true;
  }

  /// Removes one quad; returns true iff it was present.
  bool erase(const Quad& q) {
    auto it = quads_.find(q.key());
    if (it == quads_.end()) return false;
    index_remove(it);
    quads_.erase(it);
    return true;
  }

  bool contains(const Quad& q) const { return quads_.count(q.key()) != 0; }

  /// True iff (s, p, o) is present in any graph.
  bool contains_triple(const Term& s, const Term& p, const Term& o) const {
    auto it = by_sp_.find(pair_key(s.to_nquads(), p.to_nquads()));
    if (it == by_sp_.end()) return false;
    std::string prefix = s.to_nquads() + " " + p.to_nquads() + " " + o.to_nquads() + " ";
    auto lb = it->second.lower_bound(prefix);
    return lb != it->second.end() && lb->starts_with(prefix);
  }

  std::size_t size() const noexcept { return quads_.size(); }
  bool empty() const noexcept { return quads_.empty(); }

  void clear() {
    quads_.clear();
    by_graph_.clear();
    by_subject_.clear();
    by_predicate_.clear();
    by_object_.clear();
    by_sp_.clear();
    by_po_.clear();
  }

  /// All quads matching the pattern, in canonical order.
  std::vector<Quad> match(const QuadPattern& pattern) const {
    std::vector<Quad> out;
    for_each_match(pattern, [&](const Quad& q) { out.push_back(q); });
    return out;
  }

  std::vector<Quad> match(const std::optional<Term>& s, const std::optional<Term>& p,
                          const std::optional<Term>& o,
                          const std::optional<Term>& g = std::nullopt) const {
    return match(QuadPattern{s, p, o, g});
  }

  template <typename Fn>
  void for_each_match(const QuadPattern& pattern, Fn&& fn) const {
    const KeySet* candidates = pick_index(pattern);
    if (candidates == nullptr) {
      if (has_any_bound(pattern)) return;  // a bound position has no entries
      for (const auto& [key, q] : quads_) fn(q);
      return;
    }
    if (candidates == &all_marker_) {
      for (const auto& [key, q] : quads_)
        if (pattern.matches(q)) fn(q);
      return;
    }
    for (auto key : *candidates) {
      const Quad& q = quads_.find(std::string(key))->second;
      if (pattern.matches(q)) fn(q);
    }
  }

  /// Removes every quad of graph g; returns the number removed.
  std::size_t remove_graph(const Term& g) {
    auto it = by_graph_.find(g.to_nquads());
    if (it == by_graph_.end()) return 0;
    std::vector<std::string> keys(it->second.begin(), it->second.end());
    for (const auto& k : keys) {
      auto qit = quads_.find(k);
      index_remove(qit);
      quads_.erase(qit);
    }
    return keys.size();
  }

  std::size_t remove_graph(const std::string& g) { return remove_graph(Term::iri(g)); }

  std::size_t graph_size(const Term& g) const {
    auto it = by_graph_.find(g.to_nquads());
    return it == by_graph_.end() ? 0 : it->second.size();
  }

  /// Every quad in canonical order.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (const auto& [key, q] : quads_) fn(q);
  }

  std::vector<Quad> quads() const {
    std::vector<Quad> out;
    out.reserve(quads_.size());
    for (const auto& [key, q] : quads_) out.push_back(q);
    return out;
  }

  /// Canonical snapshot: sorted N-Quads lines, LF terminated.
  std::string to_nquads() const {
    std::string out;
    for (const auto& [key, q] : quads_) {
      out += key;
      out.push_back('\n');
    }
    return out;
  }

 private:
  using QuadMap = std::map<std::string, Quad, std::less<>>;
  using KeySet = std::set<std::string_view>;
  using Index = std::unordered_map<std::string, KeySet>;

  static std::string pair_key(const std::string& a, const std::string& b) {
    return a + '\x1f' + b;
  }

  static bool has_any_bound(const QuadPattern& p) {
    return p.subject || p.predicate || p.object || p.graph;
  }

  void index_add(QuadMap::iterator it) {
    std::string_view key = it->first;
    const Quad& q = it->second;
    auto s = q.subject().to_nquads();
    auto p = q.predicate().to_nquads();
    auto o = q.object().to_nquads();
    by_graph_[q.graph().to_nquads()].insert(key);
    by_subject_[s].insert(key);
    by_predicate_[p].insert(key);
    by_object_[o].insert(key);
    by_sp_[pair_key(s, p)].insert(key);
    by_po_[pair_key(p, o)].insert(key);
  }

  static void drop(Index& index, const std::string& k, std::string_view key) {
    auto it = index.find(k);
    if (it == index.end()) return;
    it->second.erase(key);
    if (it->second.empty()) index.erase(it);
  }

  void index_remove(QuadMap::iterator it) {
    std::string_view key = it->first;
    const Quad& q = it->second;
    auto s = q.subject().to_nquads();
    auto p = q.predicate().to_nquads();
    auto o = q.object().to_nquads();
    drop(by_graph_, q.graph().to_nquads(), key);
    drop(by_subject_, s, key);
    drop(by_predicate_, p, key);
    drop(by_object_, o, key);
    drop(by_sp_, pair_key(s, p), key);
    drop(by_po_, pair_key(p, o), key);
  }

  // Smallest applicable index; nullptr when some bound position has no
  // entries at all, &all_marker_ when nothing is bound.
  const KeySet* pick_index(const QuadPattern& p) const {
    if (!has_any_bound(p)) return nullptr;
    const KeySet* best = &all_marker_;
    std::size_t best_size = quads_.size() + 1;
    bool missing = false;
    auto consider = [&](const Index& index, const std::string& k) {
      auto it = index.find(k);
      if (it == index.end()) {
        missing = true;
        return;
      }
      if (it->second.size() < best_size) {
        best = &it->second;
        best_size = it->second.size();
      }
    };
    std::string s = p.subject ? p.subject->to_nquads() : std::string();
    std::string pr = p.predicate ? p.predicate->to_nquads() : std::string();
    std::string o = p.object ? p.object->to_nquads() : std::string();
    if (p.subject && p.predicate) consider(by_sp_, pair_key(s, pr));
    if (p.predicate && p.object) consider(by_po_, pair_key(pr, o));
    if (p.subject) consider(by_subject_, s);
    if (p.predicate) consider(by_predicate_, pr);
    if (p.object) consider(by_object_, o);
    if (p.graph) consider(by_graph_, p.graph->to_nquads());
    if (missing) return nullptr;
    return best;
  }

  QuadMap quads_;
  Index by_graph_;
  Index by_subject_;
  Index by_predicate_;
  Index by_object_;
  Index by_sp_;
  Index by_po_;
  KeySet all_marker_;
};

}  // namespace fluentkb
