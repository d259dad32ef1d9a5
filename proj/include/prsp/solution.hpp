#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "prsp/error.hpp"
#include "prsp/ntriples.hpp"
#include "prsp/query.hpp"
#include "prsp/term.hpp"

namespace prsp {

/// A solution mapping: variable name (without `?`) -> bound term.
struct SolutionMapping {
  std::map<std::string, Term> bindings;

  const Term* find(const std::string& var) const {
    auto it = bindings.find(var);
    return it == bindings.end() ? nullptr : &it->second;
  }

  bool operator==(const SolutionMapping&) const = default;
  auto operator<=>(const SolutionMapping&) const = default;
};

/// A bag of solution mappings under a declared projection. Rows keep their
/// production order; comparisons are order-insensitive.
struct SolutionSet {
  std::vector<std::string> variables;
  std::vector<SolutionMapping> rows;

  /// Bag equality: same variable list, same rows up to reordering.
  bool bag_equal(const SolutionSet& other) const {
    if (variables != other.variables) return false;
    if (rows.size() != other.rows.size()) return false;
    auto a = rows, b = other.rows;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
  }
};

/// Restriction of each row to `vars`; duplicates collapse when distinct.
inline SolutionSet project(const std::vector<SolutionMapping>& rows,
                           const std::vector<Variable>& vars, bool distinct) {
  SolutionSet out;
  out.variables.reserve(vars.size());
  for (const auto& v : vars) out.variables.push_back(v.name());
  out.rows.reserve(rows.size());
  for (const auto& row : rows) {
    SolutionMapping m;
    for (const auto& v : vars) {
      if (const Term* t = row.find(v.name())) m.bindings.emplace(v.name(), *t);
    }
    out.rows.push_back(std::move(m));
  }
  if (distinct) {
    std::sort(out.rows.begin(), out.rows.end());
    out.rows.erase(std::unique(out.rows.begin(), out.rows.end()),
                   out.rows.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Result TSV: header of variable names, then one row per solution with terms
// in N-Triples syntax. The exchange format of the external-engine adapter and
// of the CLI result output.
// ---------------------------------------------------------------------------

/// Sort key used for canonical result output: the serialized terms in
/// declared variable order.
inline std::string result_row_key(const SolutionMapping& row,
                                  const std::vector<std::string>& variables) {
  std::string key;
  for (const auto& v : variables) {
    if (const Term* t = row.find(v)) key += serialize_term(*t);
    key += '\t';
  }
  return key;
}

inline void write_result_tsv(std::ostream& out, const SolutionSet& s,
                             bool sort_rows = true) {
  for (std::size_t i = 0; i < s.variables.size(); ++i) {
    if (i) out << '\t';
    out << s.variables[i];
  }
  out << '\n';
  std::vector<const SolutionMapping*> ordered;
  ordered.reserve(s.rows.size());
  for (const auto& r : s.rows) ordered.push_back(&r);
  if (sort_rows) {
    std::stable_sort(ordered.begin(), ordered.end(),
                     [&](const SolutionMapping* a, const SolutionMapping* b) {
                       return result_row_key(*a, s.variables) <
                              result_row_key(*b, s.variables);
                     });
  }
  for (const SolutionMapping* row : ordered) {
    for (std::size_t i = 0; i < s.variables.size(); ++i) {
      if (i) out << '\t';
      if (const Term* t = row->find(s.variables[i])) out << serialize_term(*t);
    }
    out << '\n';
  }
}

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

inline SolutionSet parse_result_tsv(std::istream& in) {
  SolutionSet s;
  std::string line;
  if (!std::getline(in, line))
    fail(Errc::EngineError, "empty result: missing TSV header");
  line = detail::chomp(std::move(line));
  if (!line.empty()) s.variables = split_tabs(line);
  while (std::getline(in, line)) {
    line = detail::chomp(std::move(line));
    if (line.empty()) continue;
    auto cells = split_tabs(line);
    if (cells.size() != s.variables.size())
      fail(Errc::EngineError, "result row has " + std::to_string(cells.size()) +
                                  " cells, header has " +
                                  std::to_string(s.variables.size()));
    SolutionMapping row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i].empty()) continue;  // unbound
      row.bindings.emplace(s.variables[i], parse_term(cells[i]));
    }
    s.rows.push_back(std::move(row));
  }
  return s;
}

inline SolutionSet parse_result_tsv(const std::string& text) {
  std::istringstream in(text);
  return parse_result_tsv(in);
}

}  // namespace prsp
