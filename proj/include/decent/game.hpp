#pragma once

#include "decent/design.hpp"
#include "decent/machine.hpp"
#include "decent/rational.hpp"

#include <map>
#include <vector>

namespace decent {

/// Finite normal-form game. Players are numbered 1..n; player i has
/// strategies 0..strategies[i-1]-1. payoffs[i-1] lists u_i over all profiles
/// in row-major order (player 1 varies slowest).
struct NormalFormGame {
  std::vector<int> strategies;
  std::vector<std::vector<Rational>> payoffs;
  /// lag(i,j) >= 1 for observing player j from player i's node; empty means
  /// all ones. Indexed [i-1][j-1].
  std::vector<std::vector<int>> lags;

  int players() const noexcept { return static_cast<int>(strategies.size()); }
  std::size_t profile_count() const;
  std::size_t profile_index(const Sequence& profile) const;
  const Rational& payoff(int player, const Sequence& profile) const;
  int lag(int i, int j) const;

  /// Throws BadGame.
  void check() const;

  friend bool operator==(const NormalFormGame&, const NormalFormGame&) = default;
};

/// Every valid strategy profile, lexicographically.
std::vector<Sequence> profiles(const NormalFormGame& game);

/// Best reply of `player` to `profile` (its own entry is the previous
/// strategy): the previous strategy when it is among the maximizers,
/// otherwise the lowest maximizing strategy. `own_known` false drops the
/// inertia and takes the lowest maximizer.
Symbol best_reply(const NormalFormGame& game, int player, const Sequence& profile, bool own_known = true);

/// k+1 layers of n player nodes "p<i>.<t>"; node (i,t) for t >= 2 hears
/// (j, max(1, t - lag(i,j))) for every j (every j != i with rivals_only) and
/// outputs a best reply. Transmission is full. Alphabet: max(2, max |S_i|).
/// Throws LagExceedsHorizon for k < 1 and BadGame when the construction
/// leaves a node without neighbors.
Design best_reply_design(const NormalFormGame& game, int rounds, bool rivals_only = false);

/// Player (1-based) of a node built by best_reply_design.
int node_player(const Design& design, NodeIndex node);

/// A node's program as a table over full profiles: the slot from player j's
/// node fills position j; positions not received (own strategy in
/// rivals-only designs) are 0.
std::map<Sequence, Symbol> profile_program(const Design& design, NodeIndex node, int players);

/// True iff program(v) maximizes u_player(., v_-player) for every profile v.
/// Throws ShapeMismatch for profiles of the wrong length or range.
bool is_best_reply_program(const std::map<Sequence, Symbol>& program, const NormalFormGame& game, int player);

}  // namespace decent
