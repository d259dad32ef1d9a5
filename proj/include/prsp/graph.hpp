#pragma once

#include <set>
#include <utility>
#include <vector>

#include "prsp/term.hpp"

namespace prsp {

/// A duplicate-free set of triples. Inserting an existing triple is a no-op.
/// Iteration order is the total order on Triple, so serializations of the
/// same graph are byte-identical.
class Graph {
 public:
  using const_iterator = std::set<Triple>::const_iterator;

  Graph() = default;
  explicit Graph(std::set<Triple> triples) : triples_(std::move(triples)) {}

  /// Returns true when the triple was new.
  bool insert(Triple t) { return triples_.insert(std::move(t)).second; }

  bool contains(const Triple& t) const { return triples_.count(t) != 0; }

  /// Set union, in place.
  void merge(const Graph& other) {
    triples_.insert(other.begin(), other.end());
  }

  std::size_t size() const noexcept { return triples_.size(); }
  bool empty() const noexcept { return triples_.empty(); }

  const_iterator begin() const noexcept { return triples_.begin(); }
  const_iterator end() const noexcept { return triples_.end(); }

  bool operator==(const Graph&) const = default;

 private:
  std::set<Triple> triples_;
};

template <typename Iter>
Graph graph_from(Iter first, Iter last) {
  Graph g;
  for (; first != last; ++first) g.insert(*first);
  return g;
}

inline Graph graph_from(const std::vector<Triple>& triples) {
  return graph_from(triples.begin(), triples.end());
}

}  // namespace prsp
