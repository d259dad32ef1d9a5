#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>

#include "prsp/error.hpp"

namespace prsp {

enum class TermKind : std::uint8_t { Iri, Literal, BlankNode };

/// An RDF term: IRI, literal (plain, typed or language-tagged) or blank node.
/// Immutable after construction; construction validates the term invariants.
class Term {
 public:
  static Term iri(std::string value) {
    check_iri(value);
    return Term(TermKind::Iri, std::move(value), {}, {});
  }

  static Term literal(std::string lexical) {
    return Term(TermKind::Literal, std::move(lexical), {}, {});
  }

  static Term typed_literal(std::string lexical, std::string datatype_iri) {
    check_iri(datatype_iri);
    return Term(TermKind::Literal, std::move(lexical), std::move(datatype_iri), {});
  }

  static Term lang_literal(std::string lexical, std::string lang) {
    check_lang(lang);
    return Term(TermKind::Literal, std::move(lexical), {}, std::move(lang));
  }

  static Term blank(std::string label) {
    check_blank_label(label);
    return Term(TermKind::BlankNode, std::move(label), {}, {});
  }

  TermKind kind() const noexcept { return kind_; }
  bool is_iri() const noexcept { return kind_ == TermKind::Iri; }
  bool is_literal() const noexcept { return kind_ == TermKind::Literal; }
  bool is_blank() const noexcept { return kind_ == TermKind::BlankNode; }

  /// IRI string, literal lexical form, or blank node label.
  const std::string& value() const noexcept { return value_; }
  /// Datatype IRI of a typed literal; empty otherwise.
  const std::string& datatype() const noexcept { return datatype_; }
  /// Language tag of a tagged literal; empty otherwise.
  const std::string& language() const noexcept { return lang_; }

  bool operator==(const Term&) const = default;
  auto operator<=>(const Term&) const = default;

 private:
  Term(TermKind kind, std::string value, std::string datatype, std::string lang)
      : kind_(kind),
        value_(std::move(value)),
        datatype_(std::move(datatype)),
        lang_(std::move(lang)) {}

  static void check_iri(const std::string& v) {
    if (v.empty()) fail(Errc::InvalidTerm, "empty IRI");
    for (char c : v) {
      if (c == '<' || c == '>')
        fail(Errc::InvalidTerm, "IRI contains angle bracket: " + v);
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r')
        fail(Errc::InvalidTerm, "IRI contains whitespace: " + v);
    }
  }

  static void check_blank_label(const std::string& v) {
    auto alpha = [](char c) {
      return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
    };
    auto alnum = [&](char c) { return alpha(c) || (c >= '0' && c <= '9'); };
    bool ok = !v.empty() && alpha(v[0]);
    for (std::size_t i = 1; ok && i < v.size(); ++i) ok = alnum(v[i]);
    if (!ok) fail(Errc::InvalidTerm, "invalid blank node label: " + v);
  }

  static void check_lang(const std::string& v) {
    // [A-Za-z]+ ('-' [A-Za-z0-9]+)*
    auto alpha = [](char c) {
      return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
    };
    auto alnum = [&](char c) { return alpha(c) || (c >= '0' && c <= '9'); };
    bool ok = !v.empty();
    std::size_t i = 0;
    while (ok && i < v.size() && v[i] != '-') {
      ok = alpha(v[i]);
      ++i;
    }
    ok = ok && i > 0;
    while (ok && i < v.size()) {
      ok = v[i] == '-';
      std::size_t seg = 0;
      for (++i; ok && i < v.size() && v[i] != '-'; ++i, ++seg) ok = alnum(v[i]);
      ok = ok && seg > 0;  // no empty subtags
    }
    if (!ok) fail(Errc::InvalidTerm, "invalid language tag: " + v);
  }

  TermKind kind_;
  std::string value_;
  std::string datatype_;
  std::string lang_;
};

/// An RDF triple. Subjects are IRIs or blank nodes, predicates IRIs only.
class Triple {
 public:
  Triple(Term subject, Term predicate, Term object)
      : subject_(std::move(subject)),
        predicate_(std::move(predicate)),
        object_(std::move(object)) {
    if (subject_.is_literal())
      fail(Errc::InvalidTerm, "triple subject must not be a literal");
    if (!predicate_.is_iri())
      fail(Errc::InvalidTerm, "triple predicate must be an IRI");
  }

  const Term& subject() const noexcept { return subject_; }
  const Term& predicate() const noexcept { return predicate_; }
  const Term& object() const noexcept { return object_; }

  bool operator==(const Triple&) const = default;
  auto operator<=>(const Triple&) const = default;

 private:
  Term subject_;
  Term predicate_;
  Term object_;
};

/// One stream element: an RDF triple plus its arrival timestamp in
/// milliseconds since epoch.
struct TimestampedTriple {
  TimestampedTriple(Triple t, std::int64_t ts)
      : triple(std::move(t)), timestamp_ms(ts) {
    if (timestamp_ms < 0)
      fail(Errc::MalformedTimestamp,
           "negative timestamp: " + std::to_string(timestamp_ms));
  }

  Triple triple;
  std::int64_t timestamp_ms;

  bool operator==(const TimestampedTriple&) const = default;
};

inline std::size_t hash_combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

struct TermHash {
  std::size_t operator()(const Term& t) const {
    std::size_t h = std::hash<int>()(static_cast<int>(t.kind()));
    h = hash_combine(h, std::hash<std::string>()(t.value()));
    if (!t.datatype().empty())
      h = hash_combine(h, std::hash<std::string>()(t.datatype()));
    if (!t.language().empty())
      h = hash_combine(h, std::hash<std::string>()(t.language()));
    return h;
  }
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const {
    TermHash th;
    return hash_combine(hash_combine(th(t.subject()), th(t.predicate())),
                        th(t.object()));
  }
};

}  // namespace prsp
