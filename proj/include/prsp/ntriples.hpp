#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "prsp/error.hpp"
#include "prsp/graph.hpp"
#include "prsp/stream.hpp"
#include "prsp/term.hpp"

namespace prsp {

// ---------------------------------------------------------------------------
// Serialization (canonical N-Triples subset)
// ---------------------------------------------------------------------------

namespace detail {

inline void append_escaped(std::string& out, const std::string& lexical) {
  for (char c : lexical) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
}

}  // namespace detail

inline std::string serialize_term(const Term& t) {
  std::string out;
  switch (t.kind()) {
    case TermKind::Iri:
      out += '<';
      out += t.value();
      out += '>';
      break;
    case TermKind::BlankNode:
      out += "_:";
      out += t.value();
      break;
    case TermKind::Literal:
      out += '"';
      detail::append_escaped(out, t.value());
      out += '"';
      if (!t.language().empty()) {
        out += '@';
        out += t.language();
      } else if (!t.datatype().empty()) {
        out += "^^<";
        out += t.datatype();
        out += '>';
      }
      break;
  }
  return out;
}

inline std::string serialize_triple(const Triple& t) {
  return serialize_term(t.subject()) + " " + serialize_term(t.predicate()) +
         " " + serialize_term(t.object()) + " .";
}

/// One TNT record: `<timestamp_ms>` TAB `<N-Triples statement>`.
inline std::string serialize_tnt(const TimestampedTriple& item) {
  return std::to_string(item.timestamp_ms) + "\t" +
         serialize_triple(item.triple);
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

inline void skip_ws(std::string_view s, std::size_t& pos) {
  while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
}

[[noreturn]] inline void bad_triple(const std::string& what, std::size_t pos) {
  fail(Errc::MalformedTriple, what + " at offset " + std::to_string(pos));
}

inline void append_codepoint(std::string& out, std::uint32_t cp,
                             std::size_t pos) {
  if (cp <= 0x7f) {
    out += static_cast<char>(cp);
  } else if (cp <= 0x7ff) {
    out += static_cast<char>(0xc0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  } else if (cp <= 0xffff) {
    out += static_cast<char>(0xe0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  } else if (cp <= 0x10ffff) {
    out += static_cast<char>(0xf0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3f));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  } else {
    bad_triple("unicode escape out of range", pos);
  }
}

inline std::uint32_t parse_hex(std::string_view s, std::size_t& pos,
                               int digits) {
  std::uint32_t v = 0;
  for (int i = 0; i < digits; ++i, ++pos) {
    if (pos >= s.size()) bad_triple("truncated unicode escape", pos);
    char c = s[pos];
    v <<= 4;
    if (c >= '0' && c <= '9') v |= static_cast<std::uint32_t>(c - '0');
    else if (c >= 'a' && c <= 'f') v |= static_cast<std::uint32_t>(c - 'a' + 10);
    else if (c >= 'A' && c <= 'F') v |= static_cast<std::uint32_t>(c - 'A' + 10);
    else bad_triple("invalid unicode escape digit", pos);
  }
  return v;
}

/// Parses the quoted part of a literal starting at the opening quote.
inline std::string parse_quoted(std::string_view s, std::size_t& pos) {
  if (pos >= s.size() || s[pos] != '"') bad_triple("expected '\"'", pos);
  ++pos;
  std::string out;
  while (true) {
    if (pos >= s.size()) bad_triple("unterminated literal", pos);
    char c = s[pos];
    if (c == '"') {
      ++pos;
      return out;
    }
    if (c == '\\') {
      ++pos;
      if (pos >= s.size()) bad_triple("truncated escape", pos);
      char e = s[pos];
      ++pos;
      switch (e) {
        case 't': out += '\t'; break;
        case 'b': out += '\b'; break;
        case 'n': out += '\n'; break;
        case 'r': out += '\r'; break;
        case 'f': out += '\f'; break;
        case '"': out += '"'; break;
        case '\'': out += '\''; break;
        case '\\': out += '\\'; break;
        case 'u': append_codepoint(out, parse_hex(s, pos, 4), pos); break;
        case 'U': append_codepoint(out, parse_hex(s, pos, 8), pos); break;
        default: bad_triple(std::string("invalid escape '\\") + e + "'", pos);
      }
      continue;
    }
    out += c;
    ++pos;
  }
}

inline std::string parse_iriref_body(std::string_view s, std::size_t& pos) {
  // caller consumed nothing; s[pos] == '<'
  std::size_t start = ++pos;
  while (pos < s.size() && s[pos] != '>') {
    if (s[pos] == '<') bad_triple("'<' inside IRI", pos);
    ++pos;
  }
  if (pos >= s.size()) bad_triple("unterminated IRI", pos);
  std::string body(s.substr(start, pos - start));
  ++pos;  // consume '>'
  return body;
}

inline std::string parse_blank_label(std::string_view s, std::size_t& pos) {
  // s[pos] == '_'
  if (pos + 1 >= s.size() || s[pos + 1] != ':')
    bad_triple("expected '_:'", pos);
  pos += 2;
  std::size_t start = pos;
  auto alpha = [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
  };
  auto alnum = [&](char c) { return alpha(c) || (c >= '0' && c <= '9'); };
  if (pos >= s.size() || !alpha(s[pos])) bad_triple("invalid blank label", pos);
  ++pos;
  while (pos < s.size() && alnum(s[pos])) ++pos;
  return std::string(s.substr(start, pos - start));
}

inline std::string parse_lang_tag(std::string_view s, std::size_t& pos) {
  // s[pos] == '@'
  ++pos;
  std::size_t start = pos;
  auto ok = [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
           (c >= '0' && c <= '9') || c == '-';
  };
  while (pos < s.size() && ok(s[pos])) ++pos;
  if (pos == start) bad_triple("empty language tag", pos);
  return std::string(s.substr(start, pos - start));
}

/// Parses one N-Triples term starting at `pos` (no leading whitespace).
inline Term parse_nt_term(std::string_view s, std::size_t& pos) {
  if (pos >= s.size()) bad_triple("expected term", pos);
  std::size_t at = pos;
  try {
    switch (s[pos]) {
      case '<':
        return Term::iri(parse_iriref_body(s, pos));
      case '_':
        return Term::blank(parse_blank_label(s, pos));
      case '"': {
        std::string lex = parse_quoted(s, pos);
        if (pos < s.size() && s[pos] == '@')
          return Term::lang_literal(std::move(lex), parse_lang_tag(s, pos));
        if (pos + 1 < s.size() && s[pos] == '^' && s[pos + 1] == '^') {
          pos += 2;
          if (pos >= s.size() || s[pos] != '<')
            bad_triple("expected datatype IRI", pos);
          return Term::typed_literal(std::move(lex),
                                     parse_iriref_body(s, pos));
        }
        return Term::literal(std::move(lex));
      }
      default:
        bad_triple(std::string("unexpected character '") + s[pos] + "'", pos);
    }
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidTerm)
      fail(Errc::MalformedTriple,
           e.detail() + " at offset " + std::to_string(at));
    throw;
  }
}

}  // namespace detail

/// Parses one N-Triples statement `subject predicate object .`
inline Triple parse_triple(std::string_view text) {
  std::size_t pos = 0;
  detail::skip_ws(text, pos);
  Term s = detail::parse_nt_term(text, pos);
  detail::skip_ws(text, pos);
  Term p = detail::parse_nt_term(text, pos);
  detail::skip_ws(text, pos);
  Term o = detail::parse_nt_term(text, pos);
  detail::skip_ws(text, pos);
  if (pos >= text.size() || text[pos] != '.')
    detail::bad_triple("expected '.'", pos);
  ++pos;
  detail::skip_ws(text, pos);
  if (pos != text.size())
    detail::bad_triple("trailing characters after '.'", pos);
  try {
    return Triple(std::move(s), std::move(p), std::move(o));
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidTerm) fail(Errc::MalformedTriple, e.detail());
    throw;
  }
}

/// Parses a single term in N-Triples syntax (used by the result TSV format).
inline Term parse_term(std::string_view text) {
  std::size_t pos = 0;
  Term t = detail::parse_nt_term(text, pos);
  if (pos != text.size()) detail::bad_triple("trailing characters", pos);
  return t;
}

/// Parses one TNT line: `<timestamp_ms>` TAB `<N-Triples statement>`.
inline TimestampedTriple parse_tnt_line(std::string_view line) {
  std::size_t tab = line.find('\t');
  if (tab == std::string_view::npos)
    fail(Errc::MissingTab, "no TAB separator in TNT record");
  std::string_view ts_part = line.substr(0, tab);
  if (ts_part.empty())
    fail(Errc::MalformedTimestamp, "empty timestamp field");
  if (ts_part[0] == '-')
    fail(Errc::MalformedTimestamp,
         "negative timestamp: " + std::string(ts_part));
  std::int64_t ts = 0;
  auto [end, ec] =
      std::from_chars(ts_part.data(), ts_part.data() + ts_part.size(), ts);
  if (ec != std::errc() || end != ts_part.data() + ts_part.size())
    fail(Errc::MalformedTimestamp,
         "non-integer timestamp: " + std::string(ts_part));
  return TimestampedTriple(parse_triple(line.substr(tab + 1)), ts);
}

namespace detail {

inline bool skippable_line(const std::string& line) {
  if (line.empty() || line[0] == '#') return true;
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

inline std::string chomp(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace detail

/// Reads a whole TNT stream. Blank lines and lines starting with `#` are
/// skipped; errors carry the 1-based line number.
inline RdfStream read_tnt(std::istream& in) {
  RdfStream stream;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = detail::chomp(std::move(line));
    if (detail::skippable_line(line)) continue;
    try {
      stream.push_back(parse_tnt_line(line));
    } catch (const Error& e) {
      fail(e.code(), "line " + std::to_string(lineno) + ": " + e.detail());
    }
  }
  return stream;
}

inline RdfStream read_tnt_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open " + path);
  return read_tnt(in);
}

inline void write_tnt(std::ostream& out, const RdfStream& stream) {
  for (const auto& item : stream) out << serialize_tnt(item) << '\n';
}

/// Reads a plain N-Triples graph (no timestamps), as exchanged with external
/// engine adapters.
inline Graph read_ntriples(std::istream& in) {
  Graph g;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = detail::chomp(std::move(line));
    if (detail::skippable_line(line)) continue;
    try {
      g.insert(parse_triple(line));
    } catch (const Error& e) {
      fail(e.code(), "line " + std::to_string(lineno) + ": " + e.detail());
    }
  }
  return g;
}

inline Graph read_ntriples_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open " + path);
  return read_ntriples(in);
}

inline void write_ntriples(std::ostream& out, const Graph& g) {
  for (const auto& t : g) out << serialize_triple(t) << '\n';
}

}  // namespace prsp
