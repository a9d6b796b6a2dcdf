#pragma once

// Small machines and designs shared by the unit and acceptance suites.

#include "decent/design.hpp"
#include "decent/machine.hpp"

#include <random>

namespace decent::testing {

inline Sequence seq(const std::string& text) { return *sequence_from_string(text); }

inline Machine make_machine(int n, int k, std::vector<std::pair<std::string, std::string>> table) {
  MachineDescription d;
  d.n = n;
  d.alphabet = k;
  for (auto& [in, out] : table) d.entries.push_back({seq(in), seq(out)});
  return validate_machine(d);
}

/// Identity on {0,1}^2.
inline Machine id2() { return make_machine(2, 2, {{"00", "00"}, {"01", "01"}, {"10", "10"}, {"11", "11"}}); }

/// Identity on {0,1}.
inline Machine m1() { return make_machine(1, 2, {{"0", "0"}, {"1", "1"}}); }

/// (s1 AND s2, s1 OR s2).
inline Machine m2() { return make_machine(2, 2, {{"00", "00"}, {"01", "01"}, {"10", "01"}, {"11", "11"}}); }

/// Constant 00 on {0,1}^2.
inline Machine const2() { return make_machine(2, 2, {{"00", "00"}, {"01", "00"}, {"10", "00"}, {"11", "00"}}); }

/// in -> mid -> out; mid copies its input and only forwards a 1.
inline DesignSpec sel1_spec() {
  DesignSpec spec;
  spec.layers = {{"in"}, {"mid"}, {"out"}};
  spec.edges = {{"in", "mid"}, {"mid", "out"}};
  spec.behavior["mid"] = {{{{"in", 0}}, 0, {}}, {{{"in", 1}}, 1, {"out"}}};
  spec.behavior["out"] = {{{}, 0, {}}, {{{"mid", 1}}, 1, {}}};
  return spec;
}

inline Design sel1() { return Design::build(sel1_spec()); }

/// Zero edges, both outputs constant 0.
inline Design const2_design() {
  DesignSpec spec;
  spec.layers = {{"in1", "in2"}, {"out1", "out2"}};
  spec.behavior["out1"] = {{{}, 0, {}}};
  spec.behavior["out2"] = {{{}, 0, {}}};
  return Design::build(spec);
}

/// Random machine with n inputs over k symbols and |D| <= max_domain.
inline Machine random_machine(std::mt19937_64& rng, int n, int k, std::size_t max_domain) {
  auto all = all_sequences(n, Alphabet{k});
  std::shuffle(all.begin(), all.end(), rng);
  std::uniform_int_distribution<std::size_t> size_dist(1, std::min(max_domain, all.size()));
  all.resize(size_dist(rng));
  std::uniform_int_distribution<int> sym(0, k - 1);
  MachineDescription d;
  d.n = n;
  d.alphabet = k;
  for (const auto& s : all) {
    Sequence out(n);
    for (auto& x : out) x = static_cast<Symbol>(sym(rng));
    d.entries.push_back({s, out});
  }
  return validate_machine(d);
}

}  // namespace decent::testing
