#pragma once

#include <cctype>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "prsp/error.hpp"
#include "prsp/ntriples.hpp"
#include "prsp/query.hpp"

namespace prsp {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace detail {

enum class TokKind {
  Name,      // bare identifier (keyword or plain IRI shorthand)
  Var,       // ?name
  IriRef,    // <...>
  LiteralT,  // quoted literal, possibly tagged/typed
  Blank,     // _:label
  Integer,   // digits
  Duration,  // digits immediately followed by a unit
  LBracket,
  RBracket,
  LBrace,
  RBrace,
  Dot,
  Star,
  End,
};

struct Token {
  TokKind kind;
  std::string text;           // raw spelling (Name, Var names, units...)
  std::uint64_t number = 0;   // Integer / Duration numeric part
  std::int64_t duration_ms = 0;
  std::optional<Term> term;   // IriRef / LiteralT / Blank
  std::size_t line = 1, col = 1;
};

inline bool name_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}
inline bool name_char(char c) {
  return name_start(c) || (c >= '0' && c <= '9');
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> toks;
    while (true) {
      skip_space();
      Token t = next();
      bool end = t.kind == TokKind::End;
      toks.push_back(std::move(t));
      if (end) return toks;
    }
  }

 private:
  [[noreturn]] void err(const std::string& what) const {
    fail(Errc::SyntaxError, "at " + std::to_string(line_) + ":" +
                                std::to_string(col_) + ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++col_;
        ++pos_;
      } else {
        break;
      }
    }
  }

  void advance(std::size_t n) {
    col_ += n;
    pos_ += n;
  }

  Token tok(TokKind k, std::size_t line, std::size_t col) {
    Token t;
    t.kind = k;
    t.line = line;
    t.col = col;
    return t;
  }

  Token next() {
    if (pos_ >= text_.size()) return tok(TokKind::End, line_, col_);
    std::size_t line = line_, col = col_;
    char c = text_[pos_];

    switch (c) {
      case '[': advance(1); return tok(TokKind::LBracket, line, col);
      case ']': advance(1); return tok(TokKind::RBracket, line, col);
      case '{': advance(1); return tok(TokKind::LBrace, line, col);
      case '}': advance(1); return tok(TokKind::RBrace, line, col);
      case '.': advance(1); return tok(TokKind::Dot, line, col);
      case '*': advance(1); return tok(TokKind::Star, line, col);
      default: break;
    }

    if (c == '?') {
      std::size_t start = pos_ + 1;
      std::size_t end = start;
      while (end < text_.size() && name_char(text_[end])) ++end;
      if (end == start) err("expected variable name after '?'");
      Token t = tok(TokKind::Var, line, col);
      t.text = std::string(text_.substr(start, end - start));
      advance(end - pos_);
      return t;
    }

    if (c == '<') {
      std::size_t p = pos_;
      Token t = tok(TokKind::IriRef, line, col);
      try {
        t.term = Term::iri(parse_iriref_body(text_, p));
      } catch (const Error&) {
        err("malformed IRI");
      }
      advance(p - pos_);
      return t;
    }

    if (c == '"') {
      std::size_t p = pos_;
      Token t = tok(TokKind::LiteralT, line, col);
      try {
        std::string lex = parse_quoted(text_, p);
        if (p < text_.size() && text_[p] == '@') {
          t.term = Term::lang_literal(std::move(lex), parse_lang_tag(text_, p));
        } else if (p + 1 < text_.size() && text_[p] == '^' &&
                   text_[p + 1] == '^') {
          p += 2;
          if (p >= text_.size() || text_[p] != '<')
            err("expected datatype IRI after '^^'");
          t.term =
              Term::typed_literal(std::move(lex), parse_iriref_body(text_, p));
        } else {
          t.term = Term::literal(std::move(lex));
        }
      } catch (const Error&) {
        err("malformed literal");
      }
      advance(p - pos_);
      return t;
    }

    if (c == '_') {
      if (pos_ + 1 < text_.size() && text_[pos_ + 1] == ':') {
        std::size_t p = pos_;
        Token t = tok(TokKind::Blank, line, col);
        try {
          t.term = Term::blank(parse_blank_label(text_, p));
        } catch (const Error&) {
          err("malformed blank node label");
        }
        advance(p - pos_);
        return t;
      }
      // fall through: '_' starts a bare name
    }

    if (c >= '0' && c <= '9') {
      std::size_t end = pos_;
      std::uint64_t v = 0;
      while (end < text_.size() && text_[end] >= '0' && text_[end] <= '9') {
        std::uint64_t d = static_cast<std::uint64_t>(text_[end] - '0');
        if (v > (std::numeric_limits<std::uint64_t>::max() - d) / 10)
          err("integer too large");
        v = v * 10 + d;
        ++end;
      }
      std::size_t unit_start = end;
      while (end < text_.size() && name_start(text_[end])) ++end;
      if (end == unit_start) {
        Token t = tok(TokKind::Integer, line, col);
        t.number = v;
        advance(end - pos_);
        return t;
      }
      std::string unit(text_.substr(unit_start, end - unit_start));
      std::string lower;
      for (char u : unit) lower += static_cast<char>(std::tolower(u));
      std::int64_t mult;
      if (lower == "ms") mult = 1;
      else if (lower == "s") mult = 1000;
      else if (lower == "m") mult = 60'000;
      else if (lower == "h") mult = 3'600'000;
      else
        fail(Errc::UnknownTimeUnit, "at " + std::to_string(line) + ":" +
                                        std::to_string(col) +
                                        ": unknown time unit '" + unit + "'");
      if (v > static_cast<std::uint64_t>(
                  std::numeric_limits<std::int64_t>::max() / mult))
        err("duration overflows the millisecond range");
      Token t = tok(TokKind::Duration, line, col);
      t.number = v;
      t.text = lower;
      t.duration_ms = static_cast<std::int64_t>(v) * mult;
      advance(end - pos_);
      return t;
    }

    if (name_start(c)) {
      std::size_t end = pos_;
      while (end < text_.size() && name_char(text_[end])) ++end;
      Token t = tok(TokKind::Name, line, col);
      t.text = std::string(text_.substr(pos_, end - pos_));
      advance(end - pos_);
      return t;
    }

    err(std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1, col_ = 1;
};

inline std::string upper(const std::string& s) {
  std::string out;
  for (char c : s) out += static_cast<char>(std::toupper(c));
  return out;
}

// ---------------------------------------------------------------------------
// Recursive-descent parser
// ---------------------------------------------------------------------------

class QueryParser {
 public:
  explicit QueryParser(std::string_view text) : toks_(Lexer(text).run()) {}

  ContinuousQuery parse_continuous() {
    expect_keyword("REGISTER");
    expect_keyword("QUERY");
    ContinuousQuery q;
    q.name = expect_name("query name");
    expect_keyword("AS");
    q.sparql = parse_select_clause();
    while (is_keyword(peek(), "FROM")) {
      ++i_;
      if (is_keyword(peek(), "STREAM")) {
        ++i_;
        std::string iri = expect_iri_or_name("stream IRI");
        expect(TokKind::LBracket, "'['");
        expect_keyword("RANGE");
        std::int64_t range = expect_duration("RANGE");
        std::int64_t step;
        if (is_keyword(peek(), "TUMBLING")) {
          ++i_;
          step = range;
        } else {
          expect_keyword("STEP");
          step = expect_duration("STEP");
        }
        expect(TokKind::RBracket, "']'");
        q.streams.push_back(StreamBinding{std::move(iri), WindowSpec(range, step)});
      } else {
        q.static_graphs.push_back(expect_iri_or_name("static graph IRI"));
      }
    }
    q.sparql.bgp = parse_where_clause();
    expect(TokKind::End, "end of query");
    q.validate();
    return q;
  }

  SparqlQuery parse_plain() {
    SparqlQuery q = parse_select_clause();
    q.bgp = parse_where_clause();
    expect(TokKind::End, "end of query");
    q.validate();
    return q;
  }

 private:
  const Token& peek() const { return toks_[i_]; }

  [[noreturn]] void err_at(const Token& t, const std::string& expected) const {
    std::string found;
    switch (t.kind) {
      case TokKind::End: found = "end of input"; break;
      case TokKind::Name: found = "'" + t.text + "'"; break;
      case TokKind::Var: found = "?" + t.text; break;
      default: found = "token"; break;
    }
    if (t.term) found = "'" + serialize_term(*t.term) + "'";
    if (t.kind == TokKind::Integer) found = std::to_string(t.number);
    fail(Errc::SyntaxError, "at " + std::to_string(t.line) + ":" +
                                std::to_string(t.col) + ": expected " +
                                expected + ", found " + found);
  }

  static bool is_keyword(const Token& t, const char* kw) {
    return t.kind == TokKind::Name && upper(t.text) == kw;
  }

  void expect_keyword(const char* kw) {
    if (!is_keyword(peek(), kw)) err_at(peek(), std::string("'") + kw + "'");
    ++i_;
  }

  const Token& expect(TokKind k, const std::string& what) {
    if (peek().kind != k) err_at(peek(), what);
    return toks_[i_++];
  }

  std::string expect_name(const std::string& what) {
    if (peek().kind != TokKind::Name) err_at(peek(), what);
    return toks_[i_++].text;
  }

  std::string expect_iri_or_name(const std::string& what) {
    const Token& t = peek();
    if (t.kind == TokKind::IriRef) {
      ++i_;
      return t.term->value();
    }
    if (t.kind == TokKind::Name) {
      ++i_;
      return t.text;
    }
    err_at(t, what);
  }

  std::int64_t expect_duration(const char* clause) {
    const Token& t = peek();
    if (t.kind == TokKind::Integer)
      err_at(t, std::string("duration with unit after ") + clause +
                    " (e.g. 5s)");
    if (t.kind != TokKind::Duration)
      err_at(t, std::string("duration after ") + clause);
    ++i_;
    if (t.duration_ms == 0)
      fail(Errc::ZeroDuration, std::string(clause) + " duration is zero");
    return t.duration_ms;
  }

  SparqlQuery parse_select_clause() {
    expect_keyword("SELECT");
    SparqlQuery q;
    if (is_keyword(peek(), "DISTINCT")) {
      ++i_;
      q.distinct = true;
    }
    if (peek().kind == TokKind::Star) {
      ++i_;
      q.select_all = true;
      return q;
    }
    while (peek().kind == TokKind::Var) {
      q.projection.emplace_back(toks_[i_++].text);
    }
    if (q.projection.empty()) err_at(peek(), "'*' or at least one ?variable");
    return q;
  }

  PatternTerm parse_pattern_term() {
    const Token& t = peek();
    switch (t.kind) {
      case TokKind::Var:
        ++i_;
        return Variable(t.text);
      case TokKind::IriRef:
      case TokKind::LiteralT:
      case TokKind::Blank:
        ++i_;
        return *t.term;
      case TokKind::Name: {
        // Bare names double as IRI shorthand inside patterns and FROM
        // clauses, matching the common display form of C-SPARQL examples.
        ++i_;
        return Term::iri(t.text);
      }
      default:
        err_at(t, "a variable, IRI or literal");
    }
  }

  Bgp parse_where_clause() {
    expect_keyword("WHERE");
    expect(TokKind::LBrace, "'{'");
    Bgp bgp;
    while (peek().kind != TokKind::RBrace) {
      PatternTerm s = parse_pattern_term();
      PatternTerm p = parse_pattern_term();
      PatternTerm o = parse_pattern_term();
      bgp.patterns.emplace_back(std::move(s), std::move(p), std::move(o));
      if (peek().kind == TokKind::Dot) {
        ++i_;
        continue;
      }
      break;  // separator omitted: next token must close the block
    }
    expect(TokKind::RBrace, "'}'");
    if (bgp.patterns.empty()) err_at(peek(), "at least one triple pattern");
    return bgp;
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

}  // namespace detail

/// Parses C-SPARQL continuous-query text into its decomposition.
inline ContinuousQuery parse_csparql(std::string_view text) {
  return detail::QueryParser(text).parse_continuous();
}

/// Parses the plain SPARQL subset emitted by serialize_sparql.
inline SparqlQuery parse_sparql(std::string_view text) {
  return detail::QueryParser(text).parse_plain();
}

/// Parses a standalone duration (`<integer>(ms|s|m|h)`), the same grammar the
/// query language uses. Shared by CLI flags.
inline std::int64_t parse_duration(std::string_view text) {
  auto toks = detail::Lexer(text).run();
  if (toks.size() != 2 || toks[0].kind != detail::TokKind::Duration) {
    if (!toks.empty() && toks[0].kind == detail::TokKind::Integer)
      fail(Errc::SyntaxError,
           "duration needs a unit (ms, s, m, h): " + std::string(text));
    fail(Errc::SyntaxError, "invalid duration: " + std::string(text));
  }
  if (toks[0].duration_ms == 0)
    fail(Errc::ZeroDuration, "duration is zero: " + std::string(text));
  return toks[0].duration_ms;
}

}  // namespace prsp
