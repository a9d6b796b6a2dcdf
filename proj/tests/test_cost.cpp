#include "doctest.h"

#include "cp_oracle.hpp"
#include "decent/cost.hpp"
#include "fixtures.hpp"

#include <random>

using namespace decent;
using namespace decent::testing;

namespace {

NodeDomain full_domain(int p, int k) {
  NodeDomain d;
  for (const auto& s : all_sequences(p, Alphabet{k})) d[PartialInput(std::vector<int>(s.begin(), s.end()))] = 1;
  return d;
}

Program program_from(const NodeDomain& d, auto&& f) {
  Program p;
  for (const auto& [in, w] : d) p[in] = static_cast<Symbol>(f(in.slots));
  return p;
}

std::int64_t policy_cost(const InspectionPolicy& policy, const NodeDomain& d, const Program& p) {
  std::int64_t total = 0;
  for (const auto& [in, w] : d) {
    auto [steps, out] = policy.run(in);
    CHECK(out == p.at(in));
    total += static_cast<std::int64_t>(w) * steps;
  }
  return total;
}

}  // namespace

TEST_CASE("inspection cost of AND, XOR and constants") {
  auto d = full_domain(2, 2);
  auto and_p = program_from(d, [](auto& s) { return s[0] & s[1]; });
  auto xor_p = program_from(d, [](auto& s) { return s[0] ^ s[1]; });
  auto zero = program_from(d, [](auto&) { return 0; });

  auto a = node_programming_cost(d, and_p);
  CHECK(a.cost == 6);
  CHECK(a.policy.exact);
  CHECK(a.policy.depth() == 2);
  CHECK(policy_cost(a.policy, d, and_p) == 6);

  CHECK(node_programming_cost(d, xor_p).cost == 8);
  auto c = node_programming_cost(d, zero);
  CHECK(c.cost == 0);
  CHECK(c.policy.depth() == 0);

  CHECK(node_programming_cost(NodeDomain{}, Program{}).cost == 0);
}

TEST_CASE("free observation of the transmitting set") {
  // {} -> 0, {a=1} -> 1: known transmitting set settles the output.
  NodeDomain d{{PartialInput(std::vector<int>{kAbsent}), 1}, {PartialInput(std::vector<int>{1}), 1}};
  Program p{{PartialInput(std::vector<int>{kAbsent}), 0}, {PartialInput(std::vector<int>{1}), 1}};
  CHECK(node_programming_cost(d, p).cost == 0);
  CpOptions charged;
  charged.charge_presence = true;
  auto r = node_programming_cost(d, p, charged);
  CHECK(r.cost == 2);
  CHECK(policy_cost(r.policy, d, p) == 2);
}

TEST_CASE("fan-in gate") {
  auto d = full_domain(3, 2);
  auto p = program_from(d, [](auto& s) { return s[0] ^ s[2]; });
  CpOptions exact;
  exact.mode = CpMode::Exact;
  exact.exact_fan_in_limit = 2;
  CHECK_THROWS_AS(node_programming_cost(d, p, exact), Error);
  CpOptions automatic;
  automatic.exact_fan_in_limit = 2;
  auto r = node_programming_cost(d, p, automatic);
  CHECK_FALSE(r.policy.exact);
  CHECK(r.cost >= node_programming_cost(d, p).cost);
}

TEST_CASE("exact cost matches exhaustive trees; greedy never beats it") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    int p = 1 + static_cast<int>(rng() % 3);
    int k = 2 + static_cast<int>(rng() % 2);
    bool charge = rng() % 2;
    // random subset of all partial inputs, random weights and outputs
    NodeDomain d;
    std::vector<int> slots(p, kAbsent);
    std::function<void(int)> rec = [&](int j) {
      if (j == p) {
        if (rng() % 3 != 0) d[PartialInput(slots)] = 1 + rng() % 4;
        return;
      }
      for (int v = kAbsent; v < k; ++v) {
        slots[j] = v;
        rec(j + 1);
      }
    };
    rec(0);
    Program prog;
    for (const auto& [in, w] : d) prog[in] = static_cast<Symbol>(rng() % k);

    CpOptions opts;
    opts.charge_presence = charge;
    auto exact = node_programming_cost(d, prog, opts);
    CHECK(exact.cost == oracle_programming_cost(d, prog, charge));
    CHECK(policy_cost(exact.policy, d, prog) == exact.cost);

    opts.mode = CpMode::Heuristic;
    auto greedy = node_programming_cost(d, prog, opts);
    CHECK_FALSE(greedy.policy.exact);
    CHECK(greedy.cost >= exact.cost);
    CHECK(policy_cost(greedy.policy, d, prog) == greedy.cost);

    for (const auto& [in, w] : d) {
      int steps = exact.policy.run(in).first;
      CHECK(steps >= 0);
      CHECK(steps <= (charge ? p : in.present_count()));
    }
  }
}

TEST_CASE("design costs") {
  auto triv = trivial_design(id2());
  CHECK(fixed_cost(triv) == 4);
  CHECK(variable_cost(triv, id2()) == 16);

  CHECK(fixed_cost(sel1()) == 2);
  CHECK(variable_cost(sel1(), m1()) == 3);
  CHECK(programming_cost(sel1(), m1()) == 2);

  auto weighted = m1().describe();
  weighted.frequencies = std::vector<Rational>{Rational(1, 4), Rational(3, 4)};
  CHECK(variable_cost(sel1(), validate_machine(weighted)) == Rational(7, 2));

  CHECK(fixed_cost(const2_design()) == 0);
  CHECK(programming_cost(const2_design(), const2()) == 0);
  CHECK(programming_cost(trivial_design(m2()), m2()) == 12);
}

TEST_CASE("combined cost") {
  auto third = Rational(1, 3);
  auto r = combined_cost(sel1(), m1(), CostWeights::make(third, third, third));
  CHECK(r.fixed == 2);
  CHECK(r.variable == 3);
  CHECK(r.programming == 2);
  CHECK(r.combined == Rational(7, 3));
  REQUIRE(r.per_node.size() == 2);
  CHECK(r.per_node[0].node == "mid");
  CHECK(r.per_node[0].programming == 2);
  CHECK(r.per_node[1].programming == 0);

  auto fixed_only = combined_cost(trivial_design(id2()), id2(), CostWeights{});
  CHECK(fixed_only.combined == 4);

  CHECK_THROWS_AS(CostWeights::parse("0.5,0.5,0.5"), Error);
  CHECK_THROWS_AS(CostWeights::parse("1,0"), Error);
  CHECK_THROWS_AS(CostWeights::make(2, -1, 0), Error);
  CHECK(CostWeights::parse("1/3,1/3,1/3") == CostWeights::make(third, third, third));
}

TEST_CASE("cost invariants on random machines") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    auto m = random_machine(rng, 1 + static_cast<int>(rng() % 3), 2 + static_cast<int>(rng() % 2), 16);
    auto d = trivial_design(m);
    std::size_t in_degrees = 0;
    for (NodeIndex a = 0; a < static_cast<NodeIndex>(d.node_count()); ++a) in_degrees += d.preds(a).size();
    CHECK(fixed_cost(d) == static_cast<std::int64_t>(in_degrees));
    // full transmission everywhere
    CHECK(variable_cost(d, m) == Rational(static_cast<long>(m.size()) * fixed_cost(d)));

    // affine in the weights for a fixed design
    auto base = combined_cost(d, m, CostWeights{});
    auto c = [&](Rational x, Rational y, Rational z) { return combined_cost(d, m, CostWeights::make(x, y, z)).combined; };
    CHECK(c(Rational(1, 2), Rational(1, 2), 0) == (c(1, 0, 0) + c(0, 1, 0)) / 2);
    CHECK(c(Rational(1, 4), Rational(1, 4), Rational(1, 2)) ==
          c(1, 0, 0) / 4 + c(0, 1, 0) / 4 + c(0, 0, 1) / 2);
    CHECK(base.combined == base.fixed);
  }
}
