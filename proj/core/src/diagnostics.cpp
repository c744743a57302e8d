#include "sill/diagnostics.hpp"

namespace sill {

std::string SourceSpan::to_string() const {
  if (!valid()) return "<no location>";
  std::string out = file.empty() ? "" : file + ":";
  out += std::to_string(line) + ":" + std::to_string(col);
  return out;
}

const char* errc_name(Errc c) {
  switch (c) {
  case Errc::ParseError: return "ParseError";
  case Errc::DanglingReference: return "DanglingReference";
  case Errc::NonContractive: return "NonContractive";
  case Errc::DuplicateDefinition: return "DuplicateDefinition";
  case Errc::DuplicateLabel: return "DuplicateLabel";
  case Errc::DuplicateSkeletonVariable: return "DuplicateSkeletonVariable";
  case Errc::TypeMismatch: return "TypeMismatch";
  case Errc::PotentialUnderflow: return "PotentialUnderflow";
  case Errc::LinearityViolation: return "LinearityViolation";
  case Errc::UnknownAnnotation: return "UnknownAnnotation";
  case Errc::Infeasible: return "Infeasible";
  case Errc::CompatError: return "CompatError";
  case Errc::FiniteInputViolation: return "FiniteInputViolation";
  case Errc::BudgetRequired: return "BudgetRequired";
  case Errc::DomainTooLarge: return "DomainTooLarge";
  case Errc::StuckConfiguration: return "StuckConfiguration";
  case Errc::BudgetExceeded: return "BudgetExceeded";
  case Errc::SolverError: return "SolverError";
  case Errc::BackendUnavailable: return "BackendUnavailable";
  case Errc::MissingAssignment: return "MissingAssignment";
  case Errc::UsageError: return "UsageError";
  case Errc::IoError: return "IoError";
  case Errc::Internal: return "Internal";
  }
  return "Unknown";
}

std::string SillError::format(Errc code, const std::string& msg,
                              const SourceSpan& span) {
  std::string out = errc_name(code);
  out += ": ";
  out += msg;
  if (span.valid()) {
    out += " (at ";
    out += span.to_string();
    out += ")";
  }
  return out;
}

} // namespace sill
