#pragma once

#include "decent/error.hpp"
#include "decent/machine.hpp"

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace decent {

using NodeIndex = int;
using Edge = std::pair<NodeIndex, NodeIndex>;

inline constexpr int kAbsent = -1;

/// What a node receives: one slot per predecessor (in the node's sorted
/// predecessor order), holding the transmitted symbol or kAbsent. The
/// all-absent input is the empty sequence.
struct PartialInput {
  std::vector<int> slots;

  PartialInput() = default;
  explicit PartialInput(std::size_t fan_in) : slots(fan_in, kAbsent) {}
  explicit PartialInput(std::vector<int> s) : slots(std::move(s)) {}

  bool is_empty() const;
  int present_count() const;
  auto operator<=>(const PartialInput&) const = default;
};

/// Program output and transmission targets (sorted node indices) for one
/// received input.
struct Behavior {
  Symbol out = 0;
  std::vector<NodeIndex> send;
  friend bool operator==(const Behavior&, const Behavior&) = default;
};

/// Received input -> multiplicity over the machine domain.
using NodeDomain = std::map<PartialInput, std::size_t>;

/// Name-based description of a design, as read from or written to a file.
struct BehaviorRow {
  std::map<std::string, Symbol> recv;
  Symbol out = 0;
  std::vector<std::string> send;
  friend bool operator==(const BehaviorRow&, const BehaviorRow&) = default;
};

struct DesignSpec {
  int alphabet = 2;
  std::vector<std::vector<std::string>> layers;
  std::vector<std::pair<std::string, std::string>> edges;
  std::map<std::string, std::vector<BehaviorRow>> behavior;
  friend bool operator==(const DesignSpec&, const DesignSpec&) = default;
};

/// A layered design. Construction canonicalizes: intermediate layers are
/// sorted by node id (first and last layers keep their declared order, which
/// fixes input position i and output position i), node indices follow layer
/// order, and edges and predecessor lists are sorted by index.
///
/// `build` rejects references that cannot be resolved (unknown ids, rows
/// keyed by non-predecessors, sends to non-successors) with MalformedDesign.
/// The layering rules themselves are checked by validate_design.
class Design {
 public:
  static Design build(const DesignSpec& spec);
  DesignSpec to_spec() const;

  Alphabet alphabet() const noexcept { return alphabet_; }
  int n() const noexcept { return static_cast<int>(layers_.front().size()); }
  int layer_count() const noexcept { return static_cast<int>(layers_.size()); }
  std::size_t node_count() const noexcept { return names_.size(); }

  const std::string& name(NodeIndex a) const { return names_.at(a); }
  std::optional<NodeIndex> find(const std::string& name) const;
  int layer_of(NodeIndex a) const { return layer_of_.at(a); }
  const std::vector<NodeIndex>& layer(int t) const { return layers_.at(t); }
  const std::vector<NodeIndex>& initial() const { return layers_.front(); }
  const std::vector<NodeIndex>& terminal() const { return layers_.back(); }
  bool is_initial(NodeIndex a) const { return layer_of_.at(a) == 0; }
  bool is_terminal(NodeIndex a) const { return layer_of_.at(a) == layer_count() - 1; }

  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<NodeIndex>& preds(NodeIndex a) const { return preds_.at(a); }
  const std::vector<NodeIndex>& succs(NodeIndex a) const { return succs_.at(a); }
  /// Slot of `pred` in `node`'s PartialInput, or -1.
  int slot_of(NodeIndex node, NodeIndex pred) const;

  const std::map<PartialInput, Behavior>& behavior(NodeIndex a) const { return behavior_.at(a); }

  /// Partial input for `node` from a {predecessor id -> symbol} map.
  PartialInput make_input(NodeIndex node, const std::map<std::string, Symbol>& recv) const;

  friend bool operator==(const Design&, const Design&) = default;

 private:
  Alphabet alphabet_;
  std::vector<std::string> names_;
  std::vector<int> layer_of_;
  std::vector<std::vector<NodeIndex>> layers_;
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeIndex>> preds_;
  std::vector<std::vector<NodeIndex>> succs_;
  std::vector<std::map<PartialInput, Behavior>> behavior_;
};

/// "{a=1, b=0}" using predecessor ids; "{}" is the empty sequence.
std::string format_input(const Design& design, NodeIndex node, const PartialInput& input);

struct ValidationReport {
  std::vector<Diagnostic> errors;
  std::vector<Diagnostic> warnings;
  /// D_alpha with multiplicities, indexed by node; empty when structural
  /// errors prevented simulation.
  std::vector<NodeDomain> domains;

  bool ok() const noexcept { return errors.empty(); }
};

ValidationReport validate_design(const Design& design, const std::vector<Sequence>& machine_domain);

/// Throws an Error carrying every violation when the design is invalid.
void require_valid(const Design& design, const std::vector<Sequence>& machine_domain);

struct Trace {
  std::vector<Symbol> outputs;          // per node
  std::vector<PartialInput> received;   // per node
  std::vector<Edge> active_edges;       // sorted
  Sequence terminal_outputs;

  std::size_t sigma() const noexcept { return active_edges.size(); }
  friend bool operator==(const Trace&, const Trace&) = default;
};

/// Runs the design on initial input `s`. Initial nodes output s_i and
/// broadcast to all successors; every other node applies its program to what
/// it received and transmits to its rule's targets. Throws InputNotInDomain
/// for a malformed `s` and MissingProgramEntry if a program has no row for a
/// received input.
Trace simulate(const Design& design, const Sequence& s);

/// As above, additionally requiring s to be in `domain`.
Trace simulate(const Design& design, const Sequence& s, const std::vector<Sequence>& domain);

/// D_alpha for every node: the received inputs over all s in the domain,
/// with multiplicities.
std::vector<NodeDomain> node_domains(const Design& design, const std::vector<Sequence>& domain);

struct Mismatch {
  Sequence input;
  std::vector<int> positions;  // 1-based output positions that differ
};

struct ImplementationReport {
  bool ok = true;
  std::vector<Mismatch> counterexamples;
};

ImplementationReport implements(const Design& design, const Machine& machine);

/// Two layers, all n^2 edges, output j computes f_j from the full input.
Design trivial_design(const Machine& machine);

/// The machine obtained by simulating the design on every s in `domain`.
Machine implemented_machine(const Design& design, const std::vector<Sequence>& domain);

}  // namespace decent
