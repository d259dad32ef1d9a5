#pragma once

// Shared random-instance generators and independent oracles for the test
// suites. Everything here deliberately avoids the library's evaluation
// machinery: window membership is a naive linear filter, BGP answers come
// from a full |G|^k assignment enumeration, so the tests check the library
// against genuinely separate code paths.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "prsp/engine.hpp"
#include "prsp/graph.hpp"
#include "prsp/query.hpp"
#include "prsp/solution.hpp"
#include "prsp/stream.hpp"
#include "prsp/term.hpp"

namespace prsp_test {

/// Deterministic rng independent of distribution implementations.
struct Rng {
  explicit Rng(std::uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next() {
    // splitmix64
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform-ish integer in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  bool chance(int percent) { return between(1, 100) <= percent; }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(between(0, static_cast<std::int64_t>(v.size()) - 1))];
  }

  std::uint64_t state;
};

/// Small sensor-flavored vocabulary to draw test data from.
struct Vocab {
  std::vector<prsp::Term> subjects;
  std::vector<prsp::Term> predicates;
  std::vector<prsp::Term> objects;  // IRIs, literals, blanks

  static Vocab make(Rng& rng, int n_subjects = 12, int n_predicates = 4,
                    int n_objects = 10) {
    Vocab v;
    for (int i = 0; i < n_subjects; ++i)
      v.subjects.push_back(
          prsp::Term::iri("http://test/e" + std::to_string(i)));
    for (int i = 0; i < n_predicates; ++i)
      v.predicates.push_back(
          prsp::Term::iri("http://test/p" + std::to_string(i)));
    for (int i = 0; i < n_objects; ++i) {
      switch (rng.between(0, 3)) {
        case 0:
          v.objects.push_back(
              prsp::Term::iri("http://test/o" + std::to_string(i)));
          break;
        case 1:
          v.objects.push_back(prsp::Term::literal(std::to_string(i)));
          break;
        case 2:
          v.objects.push_back(prsp::Term::typed_literal(
              std::to_string(i) + ".0", "http://www.w3.org/2001/XMLSchema#double"));
          break;
        default:
          v.objects.push_back(prsp::Term::blank("b" + std::to_string(i)));
          break;
      }
    }
    // subjects are also valid objects
    v.objects.push_back(v.subjects.front());
    return v;
  }
};

inline prsp::Triple random_triple(Rng& rng, const Vocab& v) {
  return prsp::Triple(rng.pick(v.subjects), rng.pick(v.predicates),
                      rng.pick(v.objects));
}

inline std::vector<prsp::Triple> random_triples(Rng& rng, const Vocab& v,
                                                std::int64_t n) {
  std::vector<prsp::Triple> out;
  for (std::int64_t i = 0; i < n; ++i) out.push_back(random_triple(rng, v));
  return out;
}

inline prsp::Graph random_graph(Rng& rng, const Vocab& v, std::int64_t n) {
  return prsp::graph_from(random_triples(rng, v, n));
}

/// Non-decreasing random timestamps over [0, horizon].
inline prsp::RdfStream random_stream(Rng& rng, const Vocab& v, std::int64_t n,
                                     std::int64_t horizon) {
  std::vector<std::int64_t> ts;
  for (std::int64_t i = 0; i < n; ++i) ts.push_back(rng.between(0, horizon));
  std::sort(ts.begin(), ts.end());
  prsp::RdfStream s;
  for (std::int64_t t : ts)
    s.push_back(prsp::TimestampedTriple(random_triple(rng, v), t));
  return s;
}

/// Random BGP whose patterns stay join-connected through shared variables:
/// every pattern after the first reuses at least one variable already seen,
/// so evaluation cost cannot degenerate into a cross product. Predicates are
/// constants (the realistic query shape) unless var predicates are allowed.
inline prsp::Bgp random_bgp(Rng& rng, const Vocab& v, int max_patterns,
                            bool allow_var_predicates = false) {
  int k = static_cast<int>(rng.between(1, max_patterns));
  std::vector<std::string> var_names{"a", "b", "c", "d", "e", "f"};
  std::vector<std::string> seen;  // variables used by earlier patterns
  prsp::Bgp bgp;
  for (int i = 0; i < k; ++i) {
    std::vector<std::string> mine;
    auto variable = [&]() -> prsp::PatternTerm {
      std::string name;
      if (!seen.empty() && rng.chance(60)) {
        name = rng.pick(seen);
      } else {
        name = rng.pick(var_names);
      }
      if (std::find(mine.begin(), mine.end(), name) == mine.end())
        mine.push_back(name);
      return prsp::Variable(name);
    };
    prsp::PatternTerm s =
        rng.chance(65) ? variable() : prsp::PatternTerm(rng.pick(v.subjects));
    prsp::PatternTerm p =
        (allow_var_predicates && rng.chance(15))
            ? variable()
            : prsp::PatternTerm(rng.pick(v.predicates));
    prsp::PatternTerm o =
        rng.chance(55) ? variable() : prsp::PatternTerm(rng.pick(v.objects));

    bool connected = seen.empty();
    for (const auto& name : mine)
      if (std::find(seen.begin(), seen.end(), name) != seen.end())
        connected = true;
    if (!connected) {
      // force a join with what came before
      std::string link = rng.pick(seen);
      s = prsp::Variable(link);
      if (std::find(mine.begin(), mine.end(), link) == mine.end())
        mine.push_back(link);
    }
    for (const auto& name : mine)
      if (std::find(seen.begin(), seen.end(), name) == seen.end())
        seen.push_back(name);
    bgp.patterns.emplace_back(std::move(s), std::move(p), std::move(o));
  }
  return bgp;
}

inline prsp::SparqlQuery random_query(Rng& rng, prsp::Bgp bgp) {
  prsp::SparqlQuery q;
  q.bgp = std::move(bgp);
  q.distinct = rng.chance(30);
  auto vars = q.bgp.variables();
  if (vars.empty() || rng.chance(25)) {
    q.select_all = true;
    return q;
  }
  // nonempty random subset, original order
  for (const auto& v : vars)
    if (rng.chance(70)) q.projection.push_back(v);
  if (q.projection.empty()) q.projection.push_back(rng.pick(vars));
  return q;
}

// ---------------------------------------------------------------------------
// Independent oracles
// ---------------------------------------------------------------------------

/// Naive window filter: linear scan, inclusive close, manual de-dup.
inline std::vector<prsp::Triple> naive_window_filter(
    const prsp::RdfStream& stream, std::int64_t open_t, std::int64_t close_t) {
  std::vector<prsp::Triple> out;
  for (const auto& item : stream) {
    if (item.timestamp_ms > open_t && item.timestamp_ms <= close_t) {
      if (std::find(out.begin(), out.end(), item.triple) == out.end())
        out.push_back(item.triple);
    }
  }
  return out;
}

/// Full |G|^k assignment enumeration with a from-scratch consistency check.
inline std::vector<prsp::SolutionMapping> raw_assignment_oracle(
    const prsp::Graph& graph, const prsp::Bgp& bgp) {
  std::vector<prsp::Triple> triples(graph.begin(), graph.end());
  std::vector<prsp::SolutionMapping> results;
  if (triples.empty()) return results;
  std::size_t k = bgp.patterns.size();
  std::vector<std::size_t> idx(k, 0);

  auto unify_slot = [](const prsp::PatternTerm& slot, const prsp::Term& value,
                       std::map<std::string, prsp::Term>& m) {
    if (!prsp::is_variable(slot)) return prsp::as_term(slot) == value;
    auto [it, inserted] =
        m.emplace(prsp::as_variable(slot).name(), value);
    return inserted || it->second == value;
  };

  while (true) {
    std::map<std::string, prsp::Term> m;
    bool ok = true;
    for (std::size_t i = 0; ok && i < k; ++i) {
      const prsp::Triple& t = triples[idx[i]];
      const prsp::TriplePattern& p = bgp.patterns[i];
      ok = unify_slot(p.subject, t.subject(), m) &&
           unify_slot(p.predicate, t.predicate(), m) &&
           unify_slot(p.object, t.object(), m);
    }
    if (ok) results.push_back(prsp::SolutionMapping{std::move(m)});

    // odometer
    std::size_t pos = 0;
    while (pos < k) {
      if (++idx[pos] < triples.size()) break;
      idx[pos] = 0;
      ++pos;
    }
    if (pos == k) return results;
  }
}

inline std::vector<prsp::SolutionMapping> sorted_rows(
    std::vector<prsp::SolutionMapping> rows) {
  std::sort(rows.begin(), rows.end());
  return rows;
}

inline bool same_bag(const std::vector<prsp::SolutionMapping>& a,
                     const std::vector<prsp::SolutionMapping>& b) {
  return sorted_rows(a) == sorted_rows(b);
}

/// Multiset inclusion a <= b.
inline bool bag_subset(const std::vector<prsp::SolutionMapping>& a,
                       const std::vector<prsp::SolutionMapping>& b) {
  std::map<prsp::SolutionMapping, std::int64_t> count;
  for (const auto& r : b) ++count[r];
  for (const auto& r : a)
    if (--count[r] < 0) return false;
  return true;
}

}  // namespace prsp_test
