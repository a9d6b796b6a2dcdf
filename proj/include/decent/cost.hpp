#pragma once

#include "decent/design.hpp"
#include "decent/machine.hpp"
#include "decent/rational.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace decent {

/// Nonnegative weights (x, y, z) on fixed, variable and programming cost.
struct CostWeights {
  Rational x{1};
  Rational y{0};
  Rational z{0};

  /// Throws BadWeights unless all are >= 0 and x + y + z = 1 (within 1e-9).
  static CostWeights make(Rational x, Rational y, Rational z);
  /// "x,y,z" with each term an integer, decimal or fraction.
  static CostWeights parse(std::string_view text);

  friend bool operator==(const CostWeights&, const CostWeights&) = default;
};

enum class CpMode {
  Exact,      // minimum over all adaptive policies; FanInTooLarge beyond the limit
  Heuristic,  // greedy upper bound
  Auto,       // exact up to the limit, greedy beyond
};

struct CpOptions {
  CpMode mode = CpMode::Auto;
  int exact_fan_in_limit = 10;
  /// When false (default) a node sees for free which predecessors
  /// transmitted; only symbol values are paid for. When true, every slot
  /// read costs one inspection, including discovering that it is absent.
  bool charge_presence = false;
};

/// Adaptive inspection algorithm for one node, as a decision tree.
struct InspectionPolicy {
  static constexpr int kUnknown = -2;
  /// Transmitted, value not yet inspected (the transmitting set is known).
  static constexpr int kPresent = -3;

  enum class Kind { Leaf, Inspect, ObservePresence };

  struct Node {
    Kind kind = Kind::Leaf;
    /// Knowledge before acting: per slot kUnknown, kPresent, kAbsent, or
    /// the observed symbol.
    std::vector<int> known;
    int slot = -1;  // Inspect only
    /// Inspect: observed value (symbol or kAbsent) -> child.
    /// ObservePresence: bitmask of transmitting slots -> child.
    std::vector<std::pair<int, int>> children;
    Symbol output = 0;  // Leaf only
  };

  std::vector<Node> nodes;  // nodes[0] is the root
  bool exact = true;
  bool charge_presence = false;
  std::size_t fan_in = 0;

  /// Maximum number of inspections along any path.
  int depth() const;
  /// Follows the tree on `input`; returns {inspections, output}. Throws
  /// InputNotInDomain when the tree has no branch for the input.
  std::pair<int, Symbol> run(const PartialInput& input) const;
};

struct NodeCost {
  std::int64_t cost = 0;  // sum over the domain of w(d) * inspections(d)
  InspectionPolicy policy;
};

using Program = std::map<PartialInput, Symbol>;

/// Minimum weighted inspection count for computing `program` on `domain`.
NodeCost node_programming_cost(const NodeDomain& domain, const Program& program, const CpOptions& options = {});

/// Program table of a design node.
Program program_of(const Design& design, NodeIndex node);

std::int64_t fixed_cost(const Design& design);

/// Sum of active edges over the domain; with frequencies, |D| * sum pi_s sigma_s.
Rational variable_cost(const Design& design, const Machine& machine);

Rational programming_cost(const Design& design, const Machine& machine, const CpOptions& options = {});

struct NodeCostLine {
  std::string node;
  std::size_t in_degree = 0;
  std::int64_t programming = 0;
  InspectionPolicy policy;
};

struct CostReport {
  std::int64_t fixed = 0;
  Rational variable;
  Rational programming;
  Rational combined;
  CostWeights weights;
  std::vector<NodeCostLine> per_node;  // nodes outside the first layer
};

/// Validates the design against the machine domain, then computes all three
/// costs and their weighted combination.
CostReport combined_cost(const Design& design, const Machine& machine, const CostWeights& weights,
                         const CpOptions& options = {});

}  // namespace decent
