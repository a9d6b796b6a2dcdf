#include "decent/error.hpp"

#include <algorithm>

namespace decent {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::SymbolOutOfRange: return "SymbolOutOfRange";
    case ErrorKind::DuplicateInput: return "DuplicateInput";
    case ErrorKind::BadFrequencies: return "BadFrequencies";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::NonInjectiveCoding: return "NonInjectiveCoding";
    case ErrorKind::LengthOverflow: return "LengthOverflow";
    case ErrorKind::LayerSizeMismatch: return "LayerSizeMismatch";
    case ErrorKind::BackwardEdge: return "BackwardEdge";
    case ErrorKind::EmptyIntermediatePredecessors: return "EmptyIntermediatePredecessors";
    case ErrorKind::EmptyIntermediateSuccessors: return "EmptyIntermediateSuccessors";
    case ErrorKind::IrrelevantSuccessor: return "IrrelevantSuccessor";
    case ErrorKind::MissingProgramEntry: return "MissingProgramEntry";
    case ErrorKind::UnreachableProgramEntry: return "UnreachableProgramEntry";
    case ErrorKind::MalformedDesign: return "MalformedDesign";
    case ErrorKind::InputNotInDomain: return "InputNotInDomain";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::FanInTooLarge: return "FanInTooLarge";
    case ErrorKind::BadWeights: return "BadWeights";
    case ErrorKind::BadBounds: return "BadBounds";
    case ErrorKind::NoImplementingDesignWithinBounds: return "NoImplementingDesignWithinBounds";
    case ErrorKind::CandidateCapExceeded: return "CandidateCapExceeded";
    case ErrorKind::BadGame: return "BadGame";
    case ErrorKind::LagExceedsHorizon: return "LagExceedsHorizon";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

std::string format(const Diagnostic& d) {
  std::string out{to_string(d.kind)};
  if (!d.where.empty()) out += " at " + d.where;
  if (!d.message.empty()) out += ": " + d.message;
  return out;
}

namespace {

std::string join(const std::vector<Diagnostic>& ds) {
  std::string out;
  for (const auto& d : ds) {
    if (!out.empty()) out += "; ";
    out += format(d);
  }
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, std::string where, std::string message)
    : Error(std::vector<Diagnostic>{{kind, std::move(where), std::move(message)}}) {}

Error::Error(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(join(diagnostics)), diagnostics_(std::move(diagnostics)) {}

bool Error::has(ErrorKind kind) const noexcept {
  return std::any_of(diagnostics_.begin(), diagnostics_.end(),
                     [kind](const Diagnostic& d) { return d.kind == kind; });
}

}  // namespace decent
