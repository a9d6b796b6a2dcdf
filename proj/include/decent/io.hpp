#pragma once

#include "decent/cost.hpp"
#include "decent/design.hpp"
#include "decent/game.hpp"
#include "decent/machine.hpp"
#include "decent/synthesis.hpp"

#include <optional>
#include <string>

namespace decent {

// JSON text formats. Parse failures raise ParseError with "line L, column C"
// for syntax errors or the offending field path otherwise; content errors
// raise the validating module's own kinds (e.g. SymbolOutOfRange).
//
//   machine: {"n": 2, "alphabet": 2, "entries": [{"in": "01", "out": "10"}, ...],
//             "frequencies": [0.25, "1/3", ...]}            (frequencies optional)
//   design:  {"alphabet": 2, "layers": [["in"], ["mid"], ["out"]],
//             "edges": [["in", "mid"], ...],
//             "behavior": {"mid": [{"recv": {"in": 1}, "out": 1, "send": ["out"]}, ...]}}
//   game:    {"players": 2, "strategies": [2, 2], "payoffs": [[...], [...]],
//             "lags": [[1, 2], [1, 1]]}                      (lags optional)

Machine parse_machine(const std::string& text);
std::string serialize_machine(const Machine& machine);

Design parse_design(const std::string& text);
std::string serialize_design(const Design& design);

NormalFormGame parse_game(const std::string& text);
std::string serialize_game(const NormalFormGame& game);

enum class FileKind { Machine, Design, Game };

/// Guesses the format from the top-level keys; ParseError if none fits.
FileKind detect_kind(const std::string& text);

/// Whole file contents; ParseError when it cannot be read.
std::string read_file(const std::string& path);
/// ParseError when it cannot be written.
void write_file(const std::string& path, const std::string& text);

/// Graphviz text, one rank per layer. With `input`, edges active on it are
/// solid and the rest dashed, and node labels show their outputs.
std::string export_dot(const Design& design, const std::optional<Sequence>& input = std::nullopt);

/// Human-readable cost breakdown; rationals as "p/q (decimal)".
std::string format_report(const CostReport& report);

std::string format_trace(const Design& design, const Trace& trace);

std::string format_validation(const ValidationReport& report);

}  // namespace decent
