#pragma once

// Brute-force reference for per-node inspection cost: materializes every
// decision tree that stops exactly when the output is determined, runs each
// domain element through each tree, and keeps the cheapest valid tree. It
// shares no code with the memoized solver in cost.cpp.

#include "decent/cost.hpp"

#include <limits>
#include <memory>

namespace decent::testing {

struct OracleTree {
  int slot = -1;  // -1: leaf
  Symbol out = 0;
  std::vector<std::pair<int, std::shared_ptr<const OracleTree>>> children;
};

using OracleTreePtr = std::shared_ptr<const OracleTree>;

namespace oracle_detail {

constexpr int kHidden = -2;

inline std::vector<std::pair<const PartialInput*, Symbol>> matching(
    const std::vector<std::pair<const PartialInput*, Symbol>>& es, const std::vector<int>& known) {
  std::vector<std::pair<const PartialInput*, Symbol>> out;
  for (const auto& e : es) {
    bool ok = true;
    for (std::size_t j = 0; j < known.size(); ++j)
      if (known[j] != kHidden && e.first->slots[j] != known[j]) ok = false;
    if (ok) out.push_back(e);
  }
  return out;
}

inline std::vector<OracleTreePtr> all_trees(const std::vector<std::pair<const PartialInput*, Symbol>>& es,
                                            const std::vector<int>& known) {
  auto here = matching(es, known);
  bool settled = true;
  for (const auto& e : here) settled = settled && e.second == here.front().second;
  if (settled) {
    auto leaf = std::make_shared<OracleTree>();
    leaf->out = here.empty() ? Symbol{0} : here.front().second;
    return {leaf};
  }
  std::vector<OracleTreePtr> out;
  for (std::size_t j = 0; j < known.size(); ++j) {
    if (known[j] != kHidden) continue;
    std::vector<int> values;
    for (const auto& e : here)
      if (std::find(values.begin(), values.end(), e.first->slots[j]) == values.end())
        values.push_back(e.first->slots[j]);
    // Cartesian product of subtrees over the observed values.
    std::vector<std::vector<OracleTreePtr>> options;
    for (int v : values) {
      auto child_known = known;
      child_known[j] = v;
      options.push_back(all_trees(es, child_known));
    }
    std::vector<std::size_t> pick(values.size(), 0);
    while (true) {
      auto t = std::make_shared<OracleTree>();
      t->slot = static_cast<int>(j);
      for (std::size_t c = 0; c < values.size(); ++c) t->children.emplace_back(values[c], options[c][pick[c]]);
      out.push_back(t);
      std::size_t c = 0;
      while (c < pick.size() && ++pick[c] == options[c].size()) pick[c++] = 0;
      if (c == pick.size()) break;
    }
  }
  return out;
}

// Returns {inspections, output}, or nullopt if the tree has no branch.
inline std::optional<std::pair<int, Symbol>> walk(const OracleTree& t, const PartialInput& in) {
  const OracleTree* cur = &t;
  int steps = 0;
  while (cur->slot >= 0) {
    ++steps;
    const OracleTree* next = nullptr;
    for (const auto& [v, child] : cur->children)
      if (v == in.slots[cur->slot]) next = child.get();
    if (!next) return std::nullopt;
    cur = next;
  }
  return std::make_pair(steps, cur->out);
}

inline std::int64_t best_cost(const std::vector<std::pair<const PartialInput*, Symbol>>& es,
                              const std::vector<std::int64_t>& weights, const std::vector<int>& start) {
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (const auto& tree : all_trees(es, start)) {
    std::int64_t cost = 0;
    bool valid = true;
    for (std::size_t i = 0; i < es.size() && valid; ++i) {
      auto r = walk(*tree, *es[i].first);
      if (!r || r->second != es[i].second) valid = false;
      else cost += weights[i] * r->first;
    }
    if (valid) best = std::min(best, cost);
  }
  return best;
}

}  // namespace oracle_detail

/// Exhaustive minimum of sum w(d) * inspections(d) over decision trees.
inline std::int64_t oracle_programming_cost(const NodeDomain& domain, const Program& program,
                                            bool charge_presence) {
  using namespace oracle_detail;
  if (domain.empty()) return 0;
  const std::size_t p = domain.begin()->first.slots.size();
  if (charge_presence) {
    std::vector<std::pair<const PartialInput*, Symbol>> es;
    std::vector<std::int64_t> ws;
    for (const auto& [in, w] : domain) {
      es.emplace_back(&in, program.at(in));
      ws.push_back(static_cast<std::int64_t>(w));
    }
    return best_cost(es, ws, std::vector<int>(p, kHidden));
  }
  // The transmitting set is known up front, so the best tree is chosen
  // separately for each set.
  std::map<std::vector<bool>, std::pair<std::vector<std::pair<const PartialInput*, Symbol>>, std::vector<std::int64_t>>>
      groups;
  for (const auto& [in, w] : domain) {
    std::vector<bool> present(p);
    for (std::size_t j = 0; j < p; ++j) present[j] = in.slots[j] != kAbsent;
    groups[present].first.emplace_back(&in, program.at(in));
    groups[present].second.push_back(static_cast<std::int64_t>(w));
  }
  // A tree for the whole domain that needs no inspection costs nothing.
  bool settled = true;
  for (const auto& [in, w] : domain) settled = settled && program.at(in) == program.at(domain.begin()->first);
  if (settled) return 0;
  std::int64_t total = 0;
  for (const auto& [present, group] : groups) {
    std::vector<int> start(p, kAbsent);
    for (std::size_t j = 0; j < p; ++j)
      if (present[j]) start[j] = kHidden;
    total += best_cost(group.first, group.second, start);
  }
  return total;
}

}  // namespace decent::testing
