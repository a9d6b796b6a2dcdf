#pragma once

#include "decent/cost.hpp"
#include "decent/design.hpp"
#include "decent/machine.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace decent {

/// Finite slice of the design space searched by the exact synthesizers.
struct SearchBounds {
  int max_layers = 2;      // T_max >= 2
  int max_width = 0;       // nodes per intermediate layer, >= 0
  int max_fan_in = 1;      // predecessors per node, >= 1
  bool full_transmission_only = true;

  /// Throws BadBounds.
  void check() const;
  /// "T,m,p"
  static SearchBounds parse(const std::string& text);
};

enum class Optimality { ExactWithinBounds, Heuristic };

std::string to_string(Optimality o);

struct SynthesisOptions {
  CpOptions cp;
  /// Complete candidates evaluated before giving up with CandidateCapExceeded.
  std::uint64_t budget = 5'000'000;
};

struct SynthesisResult {
  Design best_design;
  CostReport best_cost;
  Optimality optimality = Optimality::ExactWithinBounds;
  std::uint64_t explored = 0;
  std::uint64_t seed = 0;
  /// Inputs on which the design reproduces the machine (all of D unless
  /// approximate).
  std::vector<Sequence> covered;
};

/// Calls `visit` on every design within the bounds, stopping early when it
/// returns false. Order: layer count, then intermediate widths, then
/// predecessor sets node by node, then program tables and transmission
/// rules node by node, each lexicographically. Nodes within an intermediate
/// layer are kept in nondecreasing order of (predecessors, successors) and,
/// with full transmission, of program table, so relabelings of the same
/// design are not repeated.
void enumerate_designs(const Machine& machine, const SearchBounds& bounds,
                       const std::function<bool(const Design&)>& visit);

/// Minimum combined cost over implementing designs within the bounds; the
/// first minimum in enumeration order wins.
SynthesisResult kappa(const Machine& machine, const CostWeights& weights, const SearchBounds& bounds,
                      const SynthesisOptions& options = {});

/// As kappa, but a design is feasible when it is correct on at least
/// ceil(coverage * |D|) inputs. `coverage` must be in (0, 1].
SynthesisResult approximate_kappa(const Machine& machine, const CostWeights& weights, const SearchBounds& bounds,
                                  const Rational& coverage, const SynthesisOptions& options = {});

struct AnnealSchedule {
  std::uint64_t iterations = 100'000;
  double t_start = 2.0;
  double t_end = 0.01;
  int chains = 1;
};

/// Simulated annealing from the trivial design. Returns the cheapest
/// implementing design seen (never worse than the trivial one); fully
/// determined by `seed`.
SynthesisResult anneal(const Machine& machine, const CostWeights& weights, const SearchBounds& bounds,
                       std::uint64_t seed, const AnnealSchedule& schedule = {}, const SynthesisOptions& options = {});

struct CodingResult {
  Coding coding;
  SynthesisResult result;
};

/// Minimizes kappa(encode(abstract, coding, n)) over injective codings.
CodingResult optimal_coding(const AbstractMachine& abstract, int n, Alphabet alphabet, const CostWeights& weights,
                            const SearchBounds& bounds, const SynthesisOptions& options = {});

}  // namespace decent
