#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "prsp/error.hpp"
#include "prsp/ntriples.hpp"
#include "prsp/term.hpp"

namespace prsp {

/// A SPARQL variable, stored without the leading `?`.
class Variable {
 public:
  explicit Variable(std::string name) : name_(std::move(name)) {
    auto alpha = [](char c) {
      return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
    };
    auto alnum = [&](char c) { return alpha(c) || (c >= '0' && c <= '9'); };
    bool ok = !name_.empty() && alpha(name_[0]);
    for (std::size_t i = 1; ok && i < name_.size(); ++i) ok = alnum(name_[i]);
    if (!ok) fail(Errc::SyntaxError, "invalid variable name: ?" + name_);
  }

  const std::string& name() const noexcept { return name_; }

  bool operator==(const Variable&) const = default;
  auto operator<=>(const Variable&) const = default;

 private:
  std::string name_;
};

/// A triple-pattern slot: either a variable or a constant term.
using PatternTerm = std::variant<Variable, Term>;

inline bool is_variable(const PatternTerm& p) {
  return std::holds_alternative<Variable>(p);
}
inline const Variable& as_variable(const PatternTerm& p) {
  return std::get<Variable>(p);
}
inline const Term& as_term(const PatternTerm& p) { return std::get<Term>(p); }

inline std::string serialize_pattern_term(const PatternTerm& p) {
  if (is_variable(p)) return "?" + as_variable(p).name();
  return serialize_term(as_term(p));
}

struct TriplePattern {
  TriplePattern(PatternTerm s, PatternTerm p, PatternTerm o)
      : subject(std::move(s)), predicate(std::move(p)), object(std::move(o)) {
    if (!is_variable(subject) && as_term(subject).is_literal())
      fail(Errc::SyntaxError, "literal in subject position");
    if (!is_variable(predicate) && !as_term(predicate).is_iri())
      fail(Errc::SyntaxError, "predicate must be an IRI or a variable");
  }

  PatternTerm subject;
  PatternTerm predicate;
  PatternTerm object;

  bool operator==(const TriplePattern&) const = default;

  template <typename Fn>
  void for_each_variable(Fn&& fn) const {
    if (is_variable(subject)) fn(as_variable(subject));
    if (is_variable(predicate)) fn(as_variable(predicate));
    if (is_variable(object)) fn(as_variable(object));
  }
};

inline std::string serialize_pattern(const TriplePattern& p) {
  return serialize_pattern_term(p.subject) + " " +
         serialize_pattern_term(p.predicate) + " " +
         serialize_pattern_term(p.object);
}

/// A basic graph pattern: an ordered conjunction of triple patterns.
struct Bgp {
  std::vector<TriplePattern> patterns;

  bool operator==(const Bgp&) const = default;

  /// All variables, in order of first occurrence.
  std::vector<Variable> variables() const {
    std::vector<Variable> vars;
    auto add = [&](const Variable& v) {
      if (std::find(vars.begin(), vars.end(), v) == vars.end())
        vars.push_back(v);
    };
    for (const auto& p : patterns) p.for_each_variable(add);
    return vars;
  }

  bool binds(const Variable& v) const {
    for (const auto& p : patterns) {
      bool found = false;
      p.for_each_variable([&](const Variable& x) { found |= (x == v); });
      if (found) return true;
    }
    return false;
  }
};

/// A SELECT query over a single BGP.
struct SparqlQuery {
  std::vector<Variable> projection;  // empty when select_all
  bool select_all = false;
  bool distinct = false;
  Bgp bgp;

  bool operator==(const SparqlQuery&) const = default;

  /// Projection as executed: the explicit list, or every BGP variable for `*`.
  std::vector<Variable> effective_projection() const {
    return select_all ? bgp.variables() : projection;
  }

  void validate() const {
    if (bgp.patterns.empty())
      fail(Errc::SyntaxError, "query has an empty graph pattern");
    for (const auto& v : projection)
      if (!bgp.binds(v))
        fail(Errc::UnboundProjection,
             "projected variable ?" + v.name() + " not bound in the pattern");
  }
};

/// Time-based window operator: window length and slide distance, both in ms.
struct WindowSpec {
  WindowSpec(std::int64_t range, std::int64_t step)
      : range_ms(range), step_ms(step) {
    if (range_ms <= 0)
      fail(Errc::ZeroDuration, "window RANGE must be positive");
    if (step_ms <= 0) fail(Errc::ZeroDuration, "window STEP must be positive");
  }

  std::int64_t range_ms;
  std::int64_t step_ms;

  bool tumbling() const noexcept { return range_ms == step_ms; }

  bool operator==(const WindowSpec&) const = default;
};

struct StreamBinding {
  std::string stream_iri;
  WindowSpec window;

  bool operator==(const StreamBinding&) const = default;
};

/// A parsed continuous query: registered name, windowed stream bindings,
/// optional static graphs, and the embedded SPARQL query.
struct ContinuousQuery {
  std::string name;
  std::vector<StreamBinding> streams;
  std::vector<std::string> static_graphs;
  SparqlQuery sparql;

  bool operator==(const ContinuousQuery&) const = default;

  void validate() const {
    if (name.empty()) fail(Errc::SyntaxError, "empty query name");
    if (streams.empty())
      fail(Errc::NoStreamClause, "query binds no stream (FROM STREAM missing)");
    for (std::size_t i = 0; i < streams.size(); ++i)
      for (std::size_t j = i + 1; j < streams.size(); ++j)
        if (streams[i].stream_iri == streams[j].stream_iri)
          fail(Errc::SyntaxError,
               "duplicate stream IRI <" + streams[i].stream_iri + ">");
    sparql.validate();
  }
};

// ---------------------------------------------------------------------------
// Rewriting: continuous query -> (pure SPARQL query, window operators)
// ---------------------------------------------------------------------------

struct RewriteResult {
  SparqlQuery query;
  std::vector<StreamBinding> windows;
  std::vector<std::string> static_graphs;
};

/// Splits a continuous query into an executable SPARQL query and the window
/// operator of each bound stream. Lossless up to the registered name.
inline RewriteResult rewrite(const ContinuousQuery& q) {
  return RewriteResult{q.sparql, q.streams, q.static_graphs};
}

/// Inverse of rewrite, for a given registered name.
inline ContinuousQuery assemble(std::string name, const RewriteResult& r) {
  return ContinuousQuery{std::move(name), r.windows, r.static_graphs, r.query};
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline std::string serialize_select_clause(const SparqlQuery& q) {
  std::string out = "SELECT ";
  if (q.distinct) out += "DISTINCT ";
  if (q.select_all) {
    out += "*";
  } else {
    for (std::size_t i = 0; i < q.projection.size(); ++i) {
      if (i) out += ' ';
      out += '?' + q.projection[i].name();
    }
  }
  return out;
}

inline std::string serialize_where_clause(const Bgp& bgp) {
  std::string out = "WHERE { ";
  for (const auto& p : bgp.patterns) out += serialize_pattern(p) + " . ";
  out += '}';
  return out;
}

/// Standard `SELECT [DISTINCT] <vars> WHERE { ... }` text, one line.
inline std::string serialize_sparql(const SparqlQuery& q) {
  return serialize_select_clause(q) + " " + serialize_where_clause(q.bgp);
}

/// Full C-SPARQL text; durations are written canonically in ms.
inline std::string serialize_csparql(const ContinuousQuery& q) {
  std::string out = "REGISTER QUERY " + q.name + " AS\n";
  out += serialize_select_clause(q.sparql) + "\n";
  for (const auto& s : q.streams) {
    out += "FROM STREAM <" + s.stream_iri + "> [ RANGE " +
           std::to_string(s.window.range_ms) + "ms STEP " +
           std::to_string(s.window.step_ms) + "ms ]\n";
  }
  for (const auto& g : q.static_graphs) out += "FROM <" + g + ">\n";
  out += serialize_where_clause(q.sparql.bgp) + "\n";
  return out;
}

}  // namespace prsp
