#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace prsp {

/// Stable error codes used across the library. The CLI maps these to exit
/// codes and prints them as `error: <code>: <detail>`.
enum class Errc {
  // rdf-model / TNT ingestion
  MalformedTimestamp,
  MalformedTriple,
  MissingTab,
  InvalidTerm,
  OutOfOrderItem,

  // query frontend
  SyntaxError,
  UnknownTimeUnit,
  ZeroDuration,
  UnboundProjection,
  NoStreamClause,

  // runtime
  DuplicateRegistration,
  UnknownStream,
  UnknownStaticGraph,
  InvalidState,

  // engines
  EngineNotLoaded,
  EngineError,
  OracleTooLarge,

  // bench
  VariableMismatch,

  IoError,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::MalformedTimestamp: return "MalformedTimestamp";
    case Errc::MalformedTriple: return "MalformedTriple";
    case Errc::MissingTab: return "MissingTab";
    case Errc::InvalidTerm: return "InvalidTerm";
    case Errc::OutOfOrderItem: return "OutOfOrderItem";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UnknownTimeUnit: return "UnknownTimeUnit";
    case Errc::ZeroDuration: return "ZeroDuration";
    case Errc::UnboundProjection: return "UnboundProjection";
    case Errc::NoStreamClause: return "NoStreamClause";
    case Errc::DuplicateRegistration: return "DuplicateRegistration";
    case Errc::UnknownStream: return "UnknownStream";
    case Errc::UnknownStaticGraph: return "UnknownStaticGraph";
    case Errc::InvalidState: return "InvalidState";
    case Errc::EngineNotLoaded: return "EngineNotLoaded";
    case Errc::EngineError: return "EngineError";
    case Errc::OracleTooLarge: return "OracleTooLarge";
    case Errc::VariableMismatch: return "VariableMismatch";
    case Errc::IoError: return "IoError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

[[noreturn]] inline void fail(Errc code, std::string detail) {
  throw Error(code, std::move(detail));
}

}  // namespace prsp
