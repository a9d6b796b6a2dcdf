#include "decent/game.hpp"

#include <algorithm>
#include <optional>
#include <set>

namespace decent {

std::size_t NormalFormGame::profile_count() const {
  std::size_t c = 1;
  for (int s : strategies) c *= static_cast<std::size_t>(s);
  return c;
}

std::size_t NormalFormGame::profile_index(const Sequence& profile) const {
  if (profile.size() != strategies.size())
    throw Error(ErrorKind::ShapeMismatch, to_string(profile), "profile length differs from the player count");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (profile[i] >= strategies[i])
      throw Error(ErrorKind::ShapeMismatch, to_string(profile),
                  "player " + std::to_string(i + 1) + " has only " + std::to_string(strategies[i]) + " strategies");
    idx = idx * strategies[i] + profile[i];
  }
  return idx;
}

const Rational& NormalFormGame::payoff(int player, const Sequence& profile) const {
  return payoffs.at(player - 1).at(profile_index(profile));
}

int NormalFormGame::lag(int i, int j) const { return lags.empty() ? 1 : lags.at(i - 1).at(j - 1); }

void NormalFormGame::check() const {
  std::vector<Diagnostic> errs;
  if (strategies.empty()) errs.push_back({ErrorKind::BadGame, "players", "a game needs at least one player"});
  for (std::size_t i = 0; i < strategies.size(); ++i)
    if (strategies[i] < 1 || strategies[i] > Alphabet::kMaxSize)
      errs.push_back({ErrorKind::BadGame, "strategies[" + std::to_string(i) + "]",
                      "strategy count must be in 1.." + std::to_string(Alphabet::kMaxSize)});
  if (!errs.empty()) throw Error(std::move(errs));
  if (payoffs.size() != strategies.size())
    errs.push_back({ErrorKind::BadGame, "payoffs", "expected one payoff table per player"});
  for (std::size_t i = 0; i < payoffs.size(); ++i)
    if (payoffs[i].size() != profile_count())
      errs.push_back({ErrorKind::BadGame, "payoffs[" + std::to_string(i) + "]",
                      "expected " + std::to_string(profile_count()) + " entries, got " +
                          std::to_string(payoffs[i].size())});
  if (!lags.empty()) {
    if (lags.size() != strategies.size())
      errs.push_back({ErrorKind::BadGame, "lags", "lag matrix must be n x n"});
    for (std::size_t i = 0; i < lags.size(); ++i) {
      if (lags[i].size() != strategies.size()) {
        errs.push_back({ErrorKind::BadGame, "lags[" + std::to_string(i) + "]", "lag matrix must be n x n"});
        continue;
      }
      for (std::size_t j = 0; j < lags[i].size(); ++j) {
        std::string where = "lags[" + std::to_string(i) + "][" + std::to_string(j) + "]";
        if (lags[i][j] < 1) errs.push_back({ErrorKind::BadGame, where, "lags must be at least 1"});
        if (i == j && lags[i][j] != 1) errs.push_back({ErrorKind::BadGame, where, "a player sees its own move with lag 1"});
      }
    }
  }
  if (!errs.empty()) throw Error(std::move(errs));
}

std::vector<Sequence> profiles(const NormalFormGame& game) {
  std::vector<Sequence> out;
  Sequence cur(game.strategies.size(), 0);
  while (true) {
    out.push_back(cur);
    int i = static_cast<int>(cur.size()) - 1;
    while (i >= 0 && cur[i] + 1 == game.strategies[i]) cur[i--] = 0;
    if (i < 0) break;
    ++cur[i];
  }
  return out;
}

Symbol best_reply(const NormalFormGame& game, int player, const Sequence& profile, bool own_known) {
  Sequence v = profile;
  std::optional<Rational> best;
  std::vector<Symbol> argmax;
  for (int a = 0; a < game.strategies.at(player - 1); ++a) {
    v[player - 1] = static_cast<Symbol>(a);
    const Rational& u = game.payoff(player, v);
    if (!best || u > *best) {
      best = u;
      argmax.clear();
    }
    if (u == *best) argmax.push_back(static_cast<Symbol>(a));
  }
  Symbol own = profile[player - 1];
  if (own_known && std::find(argmax.begin(), argmax.end(), own) != argmax.end()) return own;
  return argmax.front();
}

namespace {

std::string node_name(int player, int round) { return "p" + std::to_string(player) + "." + std::to_string(round); }

}  // namespace

Design best_reply_design(const NormalFormGame& game, int rounds, bool rivals_only) {
  game.check();
  if (rounds < 1)
    throw Error(ErrorKind::LagExceedsHorizon, "rounds", "at least one round is needed, got " + std::to_string(rounds));
  const int n = game.players();
  int k = 2;
  for (int s : game.strategies) k = std::max(k, s);

  // round of player j's node heard by (i, t)
  auto source = [&](int i, int j, int t) { return std::max(1, t - game.lag(i, j)); };
  auto hears = [&](int i, int j) { return !(rivals_only && i == j); };

  if (rivals_only && n == 1)
    throw Error(ErrorKind::BadGame, "players", "a single player has no rivals to observe");

  DesignSpec spec;
  spec.alphabet = k;
  spec.layers.resize(rounds + 1);
  for (int t = 1; t <= rounds + 1; ++t)
    for (int i = 1; i <= n; ++i) spec.layers[t - 1].push_back(node_name(i, t));
  std::set<std::pair<std::string, std::string>> edges;
  for (int t = 2; t <= rounds + 1; ++t)
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j)
        if (hears(i, j)) edges.emplace(node_name(j, source(i, j, t)), node_name(i, t));
  spec.edges.assign(edges.begin(), edges.end());

  std::map<std::string, std::vector<std::string>> succs;
  for (const auto& [from, to] : edges) succs[from].push_back(to);
  for (int t = 2; t <= rounds; ++t)
    for (int i = 1; i <= n; ++i)
      if (!succs.count(node_name(i, t)))
        throw Error(ErrorKind::BadGame, node_name(i, t),
                    "no later node observes this one; use lags that keep every round observed");

  // Play every profile forward round by round, collecting the rows reached.
  std::map<std::string, std::map<std::map<std::string, Symbol>, Symbol>> rows;
  for (const auto& s : profiles(game)) {
    std::vector<Sequence> play{s};  // play[t-1] = strategies in round t
    for (int t = 2; t <= rounds + 1; ++t) {
      Sequence next(n);
      for (int i = 1; i <= n; ++i) {
        Sequence heard(n, 0);
        std::map<std::string, Symbol> recv;
        for (int j = 1; j <= n; ++j) {
          if (!hears(i, j)) continue;
          int r = source(i, j, t);
          heard[j - 1] = play[r - 1][j - 1];
          recv[node_name(j, r)] = heard[j - 1];
        }
        next[i - 1] = best_reply(game, i, heard, !rivals_only);
        auto name = node_name(i, t);
        rows[name][recv] = next[i - 1];
      }
      play.push_back(std::move(next));
    }
  }
  for (const auto& [node, table] : rows) {
    auto& out = spec.behavior[node];
    const auto& send = succs[node];
    for (const auto& [recv, sym] : table) out.push_back({recv, sym, send});
  }
  return Design::build(spec);
}

int node_player(const Design& design, NodeIndex node) {
  const auto& name = design.name(node);
  auto dot = name.find('.');
  if (name.size() < 2 || name[0] != 'p' || dot == std::string::npos)
    throw Error(ErrorKind::ShapeMismatch, name, "not a node of a best-reply design");
  return std::stoi(name.substr(1, dot - 1));
}

std::map<Sequence, Symbol> profile_program(const Design& design, NodeIndex node, int players) {
  std::map<Sequence, Symbol> out;
  const auto& preds = design.preds(node);
  for (const auto& [in, b] : design.behavior(node)) {
    Sequence v(players, 0);
    for (std::size_t j = 0; j < preds.size(); ++j)
      if (in.slots[j] != kAbsent) v[node_player(design, preds[j]) - 1] = static_cast<Symbol>(in.slots[j]);
    out[v] = b.out;
  }
  return out;
}

bool is_best_reply_program(const std::map<Sequence, Symbol>& program, const NormalFormGame& game, int player) {
  game.check();
  if (player < 1 || player > game.players())
    throw Error(ErrorKind::ShapeMismatch, "player", "no player " + std::to_string(player));
  for (const auto& [v, a] : program) {
    game.profile_index(v);
    if (a >= game.strategies[player - 1])
      throw Error(ErrorKind::ShapeMismatch, to_string(v), "output is not a strategy of player " + std::to_string(player));
    Sequence w = v;
    w[player - 1] = a;
    const Rational& chosen = game.payoff(player, w);
    for (int b = 0; b < game.strategies[player - 1]; ++b) {
      w[player - 1] = static_cast<Symbol>(b);
      if (game.payoff(player, w) > chosen) return false;
    }
  }
  return true;
}

}  // namespace decent
