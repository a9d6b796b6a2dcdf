#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace decent {

enum class ErrorKind {
  // machine_core
  LengthMismatch,
  SymbolOutOfRange,
  DuplicateInput,
  BadFrequencies,
  IndexOutOfRange,
  NonInjectiveCoding,
  LengthOverflow,
  // design_core
  LayerSizeMismatch,
  BackwardEdge,
  EmptyIntermediatePredecessors,
  EmptyIntermediateSuccessors,
  IrrelevantSuccessor,
  MissingProgramEntry,
  UnreachableProgramEntry,
  MalformedDesign,
  InputNotInDomain,
  ShapeMismatch,
  // cost_model
  FanInTooLarge,
  BadWeights,
  // synthesis
  BadBounds,
  NoImplementingDesignWithinBounds,
  CandidateCapExceeded,
  // game_design
  BadGame,
  LagExceedsHorizon,
  // cli_io
  ParseError,
};

std::string_view to_string(ErrorKind kind);

struct Diagnostic {
  ErrorKind kind;
  std::string where;  // field path, node id, or input sequence
  std::string message;
};

std::string format(const Diagnostic& d);

/// Raised by every fallible operation. Carries the full list of violations
/// when an operation checks more than one rule; `kind()` is the first one.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string where, std::string message);
  explicit Error(std::vector<Diagnostic> diagnostics);

  ErrorKind kind() const noexcept { return diagnostics_.front().kind; }
  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }
  bool has(ErrorKind kind) const noexcept;

 private:
  std::vector<Diagnostic> diagnostics_;
};

}  // namespace decent
