#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "prsp/error.hpp"
#include "prsp/graph.hpp"
#include "prsp/query.hpp"
#include "prsp/solution.hpp"

namespace prsp {

// ---------------------------------------------------------------------------
// Pattern matching machinery
// ---------------------------------------------------------------------------

namespace detail {

/// Mutable variable-binding stack used during join evaluation. Bindings are
/// pushed as patterns match and rewound on backtrack; lookup is a linear scan
/// (pattern variable counts are tiny).
class BindingFrame {
 public:
  const Term* lookup(const std::string& var) const {
    for (auto it = stack_.rbegin(); it != stack_.rend(); ++it)
      if (*it->first == var) return it->second;
    return nullptr;
  }

  std::size_t mark() const noexcept { return stack_.size(); }
  void rewind(std::size_t mark) { stack_.resize(mark); }

  void push(const std::string& var, const Term& value) {
    stack_.emplace_back(&var, &value);
  }

  SolutionMapping to_mapping() const {
    SolutionMapping m;
    for (const auto& [var, term] : stack_) m.bindings.emplace(*var, *term);
    return m;
  }

 private:
  std::vector<std::pair<const std::string*, const Term*>> stack_;
};

/// Tries to unify one pattern slot with a term under the current bindings.
inline bool match_slot(const PatternTerm& slot, const Term& value,
                       BindingFrame& frame) {
  if (!is_variable(slot)) return as_term(slot) == value;
  const std::string& var = as_variable(slot).name();
  if (const Term* bound = frame.lookup(var)) return *bound == value;
  frame.push(var, value);
  return true;
}

/// Matches a whole pattern against a triple; on failure the caller must
/// rewind to its own mark.
inline bool match_pattern(const TriplePattern& p, const Triple& t,
                          BindingFrame& frame) {
  return match_slot(p.predicate, t.predicate(), frame) &&
         match_slot(p.subject, t.subject(), frame) &&
         match_slot(p.object, t.object(), frame);
}

}  // namespace detail

/// Evaluates a BGP against a graph by iterated joins of per-pattern match
/// sets, taking the patterns strictly left to right with a full scan per
/// pattern. Returns full (unprojected) solution mappings.
inline std::vector<SolutionMapping> eval_bgp(const Graph& graph,
                                             const Bgp& bgp) {
  if (bgp.patterns.empty())
    fail(Errc::SyntaxError, "cannot evaluate an empty graph pattern");
  std::vector<Triple> triples(graph.begin(), graph.end());
  std::vector<SolutionMapping> results;
  detail::BindingFrame frame;

  auto recurse = [&](auto&& self, std::size_t level) -> void {
    if (level == bgp.patterns.size()) {
      results.push_back(frame.to_mapping());
      return;
    }
    for (const Triple& t : triples) {
      std::size_t mark = frame.mark();
      if (detail::match_pattern(bgp.patterns[level], t, frame))
        self(self, level + 1);
      frame.rewind(mark);
    }
  };
  recurse(recurse, 0);
  return results;
}

// ---------------------------------------------------------------------------
// Plugin interface
// ---------------------------------------------------------------------------

/// Unified interface every SPARQL engine implements. Instances are
/// single-threaded; after load(G), execute depends only on G and the query.
class EnginePlugin {
 public:
  virtual ~EnginePlugin() = default;

  virtual void load(const Graph& graph) = 0;
  virtual SolutionSet execute(const SparqlQuery& query) = 0;
  virtual std::string name() const = 0;
  virtual void reset() = 0;
};

// ---------------------------------------------------------------------------
// Reference engine: term-indexed, greedy join order
// ---------------------------------------------------------------------------

class ReferenceEngine final : public EnginePlugin {
 public:
  void load(const Graph& graph) override {
    reset();
    triples_.assign(graph.begin(), graph.end());
    for (std::size_t i = 0; i < triples_.size(); ++i) {
      by_subject_[triples_[i].subject()].push_back(i);
      by_predicate_[triples_[i].predicate()].push_back(i);
      by_object_[triples_[i].object()].push_back(i);
    }
    loaded_ = true;
  }

  SolutionSet execute(const SparqlQuery& query) override {
    if (!loaded_)
      fail(Errc::EngineNotLoaded, "execute called before load");
    std::vector<std::size_t> order = join_order(query.bgp);
    std::vector<SolutionMapping> rows;
    detail::BindingFrame frame;
    join(query.bgp, order, 0, frame, rows);
    return project(rows, query.effective_projection(), query.distinct);
  }

  std::string name() const override { return "reference"; }

  void reset() override {
    triples_.clear();
    by_subject_.clear();
    by_predicate_.clear();
    by_object_.clear();
    loaded_ = false;
  }

 private:
  using Index = std::unordered_map<Term, std::vector<std::size_t>, TermHash>;

  std::size_t index_count(const Index& idx, const Term& t) const {
    auto it = idx.find(t);
    return it == idx.end() ? 0 : it->second.size();
  }

  /// Static selectivity estimate: the smallest index bucket over the
  /// pattern's constant slots, or the full graph for all-variable patterns.
  std::size_t estimate(const TriplePattern& p) const {
    std::size_t est = triples_.size();
    if (!is_variable(p.subject))
      est = std::min(est, index_count(by_subject_, as_term(p.subject)));
    if (!is_variable(p.predicate))
      est = std::min(est, index_count(by_predicate_, as_term(p.predicate)));
    if (!is_variable(p.object))
      est = std::min(est, index_count(by_object_, as_term(p.object)));
    return est;
  }

  /// Greedy order: most selective pattern first, ties broken by position.
  std::vector<std::size_t> join_order(const Bgp& bgp) const {
    std::vector<std::size_t> order(bgp.patterns.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return estimate(bgp.patterns[a]) <
                              estimate(bgp.patterns[b]);
                     });
    return order;
  }

  /// Concrete term for a slot under current bindings, if any.
  const Term* concrete(const PatternTerm& slot,
                       const detail::BindingFrame& frame) const {
    if (!is_variable(slot)) return &as_term(slot);
    return frame.lookup(as_variable(slot).name());
  }

  void join(const Bgp& bgp, const std::vector<std::size_t>& order,
            std::size_t level, detail::BindingFrame& frame,
            std::vector<SolutionMapping>& rows) const {
    if (level == order.size()) {
      rows.push_back(frame.to_mapping());
      return;
    }
    const TriplePattern& p = bgp.patterns[order[level]];

    // Pick the smallest index bucket among slots that are concrete under the
    // current bindings; fall back to a full scan for all-variable patterns.
    const std::vector<std::size_t>* bucket = nullptr;
    std::size_t best = triples_.size() + 1;
    auto consider = [&](const Index& idx, const Term* t) {
      if (!t) return;
      auto it = idx.find(*t);
      std::size_t n = it == idx.end() ? 0 : it->second.size();
      if (n < best) {
        best = n;
        bucket = it == idx.end() ? &kEmpty : &it->second;
      }
    };
    consider(by_subject_, concrete(p.subject, frame));
    consider(by_predicate_, concrete(p.predicate, frame));
    consider(by_object_, concrete(p.object, frame));

    auto try_triple = [&](const Triple& t) {
      std::size_t mark = frame.mark();
      if (detail::match_pattern(p, t, frame)) join(bgp, order, level + 1, frame, rows);
      frame.rewind(mark);
    };
    if (bucket) {
      for (std::size_t i : *bucket) try_triple(triples_[i]);
    } else {
      for (const Triple& t : triples_) try_triple(t);
    }
  }

  static inline const std::vector<std::size_t> kEmpty{};

  std::vector<Triple> triples_;
  Index by_subject_;
  Index by_predicate_;
  Index by_object_;
  bool loaded_ = false;
};

// ---------------------------------------------------------------------------
// Brute-force oracle engine
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kDefaultOracleBudget = 1'000'000'000ULL;

/// Exhaustive evaluator: enumerates assignments of patterns to graph triples
/// in the written pattern order, filtering for consistency. Every
/// pattern-triple attempt counts against the budget; exceeding it raises
/// OracleTooLarge. Ground truth for grading, not built for speed.
class OracleEngine final : public EnginePlugin {
 public:
  explicit OracleEngine(std::uint64_t budget = kDefaultOracleBudget)
      : budget_(budget) {}

  void load(const Graph& graph) override {
    triples_.assign(graph.begin(), graph.end());
    loaded_ = true;
  }

  SolutionSet execute(const SparqlQuery& query) override {
    if (!loaded_)
      fail(Errc::EngineNotLoaded, "execute called before load");
    checks_ = 0;
    std::vector<SolutionMapping> rows;
    detail::BindingFrame frame;
    enumerate(query.bgp, 0, frame, rows);
    return project(rows, query.effective_projection(), query.distinct);
  }

  std::string name() const override { return "oracle"; }

  void reset() override {
    triples_.clear();
    loaded_ = false;
  }

  std::uint64_t checks_performed() const noexcept { return checks_; }

 private:
  void enumerate(const Bgp& bgp, std::size_t level,
                 detail::BindingFrame& frame,
                 std::vector<SolutionMapping>& rows) {
    if (level == bgp.patterns.size()) {
      rows.push_back(frame.to_mapping());
      return;
    }
    for (const Triple& t : triples_) {
      if (++checks_ > budget_)
        fail(Errc::OracleTooLarge,
             "candidate checks exceed budget of " + std::to_string(budget_));
      std::size_t mark = frame.mark();
      if (detail::match_pattern(bgp.patterns[level], t, frame))
        enumerate(bgp, level + 1, frame, rows);
      frame.rewind(mark);
    }
  }

  std::vector<Triple> triples_;
  std::uint64_t budget_;
  std::uint64_t checks_ = 0;
  bool loaded_ = false;
};

inline std::unique_ptr<EnginePlugin> reference_engine() {
  return std::make_unique<ReferenceEngine>();
}

inline std::unique_ptr<EnginePlugin> oracle_engine(
    std::uint64_t budget = kDefaultOracleBudget) {
  return std::make_unique<OracleEngine>(budget);
}

}  // namespace prsp
