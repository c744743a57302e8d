// Source positions and the error type shared by the whole toolchain.
//
// Every user-facing failure is a SillError carrying a stable machine-readable
// code (used by tests and by the CLI's JSON reports) plus a human message and,
// when available, the source span that triggered it.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sill {

struct SourceSpan {
  uint32_t line = 0; // 1-based; 0 means "no location"
  uint32_t col = 0;
  std::string file;

  bool valid() const { return line != 0; }
  std::string to_string() const;
};

enum class Errc {
  // syntax
  ParseError,
  DanglingReference,
  NonContractive,
  DuplicateDefinition,
  DuplicateLabel,
  DuplicateSkeletonVariable,
  // types
  TypeMismatch,
  PotentialUnderflow,
  LinearityViolation,
  UnknownAnnotation, // a `?` site reached a phase that needs concrete values
  Infeasible,        // annotation inference constraints unsatisfiable
  // skeleton
  CompatError,
  FiniteInputViolation,
  BudgetRequired,
  DomainTooLarge,
  // semantics
  StuckConfiguration,
  BudgetExceeded,
  // solve
  SolverError,
  BackendUnavailable,
  MissingAssignment,
  // cli / misc
  UsageError,
  IoError,
  Internal,
};

const char* errc_name(Errc c);

class SillError : public std::runtime_error {
public:
  SillError(Errc code, std::string msg, SourceSpan span = {})
      : std::runtime_error(format(code, msg, span)), code_(code),
        msg_(std::move(msg)), span_(std::move(span)) {}

  Errc code() const { return code_; }
  const std::string& message() const { return msg_; }
  const SourceSpan& span() const { return span_; }

private:
  static std::string format(Errc code, const std::string& msg,
                            const SourceSpan& span);
  Errc code_;
  std::string msg_;
  SourceSpan span_;
};

[[noreturn]] inline void fail(Errc code, std::string msg, SourceSpan span = {}) {
  throw SillError(code, std::move(msg), std::move(span));
}

} // namespace sill
