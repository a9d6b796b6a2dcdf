// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Reference values come from the brute-force oracles in this
// directory, never from the code under test.

#include "cp_oracle.hpp"
#include "decent/cost.hpp"
#include "decent/game.hpp"
#include "decent/io.hpp"
#include "decent/synthesis.hpp"
#include "fixtures.hpp"

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace decent;
using namespace decent::testing;

namespace {

struct Check {
  std::size_t cases = 0;
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    ++cases;
    if (!ok && failures.size() < 5) failures.push_back(what);
    else if (!ok) failures.emplace_back();
  }
};

int failed = 0;

void criterion(int number, const std::string& title, const std::function<std::string(Check&)>& body) {
  Check c;
  std::string detail;
  try {
    detail = body(c);
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
  bool ok = c.failures.empty();
  if (!ok) ++failed;
  std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << number << ": " << title << " (" << c.cases << " checks"
            << (detail.empty() ? "" : "; " + detail) << ")\n";
  for (const auto& f : c.failures)
    if (!f.empty()) std::cout << "      " << f << "\n";
}

SearchBounds bounds(int T, int m, int p) {
  SearchBounds b;
  b.max_layers = T;
  b.max_width = m;
  b.max_fan_in = p;
  return b;
}

const CostWeights kFixed{};
const CostWeights kThirds = CostWeights::make(Rational(1, 3), Rational(1, 3), Rational(1, 3));

// --- criterion 2 helpers ----------------------------------------------------

std::vector<PartialInput> partial_inputs(int p, int k, bool with_absent) {
  std::vector<PartialInput> out;
  std::vector<int> slots(p);
  std::function<void(int)> rec = [&](int j) {
    if (j == p) {
      out.emplace_back(slots);
      return;
    }
    for (int v = with_absent ? kAbsent : 0; v < k; ++v) {
      slots[j] = v;
      rec(j + 1);
    }
  };
  rec(0);
  return out;
}

void compare_cp(Check& c, const NodeDomain& d, const Program& prog, const std::string& label) {
  for (bool charge : {false, true}) {
    CpOptions o;
    o.mode = CpMode::Exact;
    o.charge_presence = charge;
    auto got = node_programming_cost(d, prog, o).cost;
    auto want = oracle_programming_cost(d, prog, charge);
    c.expect(got == want, label + (charge ? " charged" : " free") + ": dp " + std::to_string(got) + " oracle " +
                              std::to_string(want));
  }
}

// Every program over `inputs` (k outputs), uniform weights.
void all_programs(Check& c, const std::vector<PartialInput>& inputs, int k, const std::string& label) {
  NodeDomain d;
  for (const auto& in : inputs) d[in] = 1;
  std::vector<int> table(inputs.size(), 0);
  while (true) {
    Program prog;
    for (std::size_t i = 0; i < inputs.size(); ++i) prog[inputs[i]] = static_cast<Symbol>(table[i]);
    compare_cp(c, d, prog, label);
    std::size_t i = 0;
    while (i < table.size() && ++table[i] == k) table[i++] = 0;
    if (i == table.size()) break;
  }
}

// --- criterion 6 helpers ----------------------------------------------------

// Minimum of kappa over every injective coding, by plain nested enumeration.
Rational brute_coding_minimum(const AbstractMachine& am, int n, const CostWeights& w, const SearchBounds& b) {
  auto codes = all_sequences(n, Alphabet{2});
  std::optional<Rational> best;
  std::vector<std::size_t> in_pick(am.inputs.size()), out_pick(am.outputs.size());
  std::function<void(std::size_t, std::vector<char>&, std::vector<std::size_t>&, const std::function<void()>&)>
      injective = [&](std::size_t j, std::vector<char>& used, std::vector<std::size_t>& pick,
                      const std::function<void()>& done) {
        if (j == pick.size()) return done();
        for (std::size_t c = 0; c < codes.size(); ++c) {
          if (used[c]) continue;
          used[c] = 1;
          pick[j] = c;
          injective(j + 1, used, pick, done);
          used[c] = 0;
        }
      };
  std::vector<char> in_used(codes.size()), out_used(codes.size());
  injective(0, in_used, in_pick, [&] {
    injective(0, out_used, out_pick, [&] {
      Coding coding;
      for (std::size_t i = 0; i < am.inputs.size(); ++i) coding.input_code[am.inputs[i]] = codes[in_pick[i]];
      for (std::size_t i = 0; i < am.outputs.size(); ++i) coding.output_code[am.outputs[i]] = codes[out_pick[i]];
      auto cost = kappa(encode(am, coding, n), w, b).best_cost.combined;
      if (!best || cost < *best) best = cost;
    });
  });
  return *best;
}

// --- criterion 7 helpers ----------------------------------------------------

bool pure_nash(const NormalFormGame& g, const Sequence& s) {
  for (int i = 1; i <= g.players(); ++i) {
    Sequence v = s;
    for (int a = 0; a < g.strategies[i - 1]; ++a) {
      v[i - 1] = static_cast<Symbol>(a);
      if (g.payoff(i, v) > g.payoff(i, s)) return false;
    }
  }
  return true;
}

std::string run_command(const std::string& cmd) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return "<popen failed>";
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  int status = pclose(pipe);
  return status == 0 ? out : "<exit " + std::to_string(status) + ">" + out;
}

}  // namespace

int main() {
  criterion(1, "trivial design implements, c_F = n^2, c_V = |D| n^2", [](Check& c) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
      int n = 1 + static_cast<int>(rng() % 4);
      int k = 2 + static_cast<int>(rng() % 2);
      auto m = random_machine(rng, n, k, 32);
      if (trial % 2) {
        auto d = m.describe();
        std::vector<Rational> f;
        long total = 0;
        for (std::size_t i = 0; i < m.size(); ++i) total += static_cast<long>(f.emplace_back(1 + rng() % 5).convert_to<long>());
        for (auto& x : f) x /= total;
        d.frequencies = f;
        m = validate_machine(d);
      }
      auto t = trivial_design(m);
      auto tag = "machine " + std::to_string(trial);
      c.expect(implements(t, m).ok, tag + " not implemented");
      c.expect(fixed_cost(t) == n * n, tag + " c_F");
      c.expect(variable_cost(t, m) == Rational(static_cast<long>(m.size()) * n * n), tag + " c_V");
    }
    return "200 machines";
  });

  criterion(2, "exact inspection cost equals the exhaustive decision-tree minimum", [](Check& c) {
    // Spot values on uniform 2-bit domains.
    NodeDomain d;
    for (const auto& in : partial_inputs(2, 2, false)) d[in] = 1;
    Program and_p, xor_p;
    for (const auto& [in, w] : d) {
      and_p[in] = static_cast<Symbol>(in.slots[0] & in.slots[1]);
      xor_p[in] = static_cast<Symbol>(in.slots[0] ^ in.slots[1]);
    }
    c.expect(node_programming_cost(d, and_p).cost == 6, "AND != 6");
    c.expect(node_programming_cost(d, xor_p).cost == 8, "XOR != 8");

    // k = 2, exhaustive: every program on the full domain for fan-in 1..3,
    // every program on S(P) (absent slots included) for fan-in 1..2, and
    // every program on each fixed transmitting set V for fan-in 3.
    for (int p = 1; p <= 3; ++p) all_programs(c, partial_inputs(p, 2, false), 2, "full p=" + std::to_string(p));
    for (int p = 1; p <= 2; ++p) all_programs(c, partial_inputs(p, 2, true), 2, "S(P) p=" + std::to_string(p));
    for (int mask = 0; mask < 8; ++mask) {
      std::vector<PartialInput> inputs;
      for (const auto& in : partial_inputs(3, 2, true)) {
        bool fits = true;
        for (int j = 0; j < 3; ++j) fits = fits && ((in.slots[j] != kAbsent) == ((mask >> j & 1) != 0));
        if (fits) inputs.push_back(in);
      }
      all_programs(c, inputs, 2, "V=" + std::to_string(mask));
    }
    std::size_t exhaustive = c.cases;

    // Sampled: mixed transmitting sets at fan-in 3 for k = 2, and 1000 cases
    // for k = 3 over fan-in 1..3, with random multiplicities.
    std::mt19937_64 rng(77);
    auto sample = [&](int k, int p) {
      NodeDomain dom;
      Program prog;
      for (const auto& in : partial_inputs(p, k, true))
        if (rng() % 3 == 0) {
          dom[in] = 1 + rng() % 5;
          prog[in] = static_cast<Symbol>(rng() % k);
        }
      if (!dom.empty()) compare_cp(c, dom, prog, "k=" + std::to_string(k) + " p=" + std::to_string(p));
    };
    for (int i = 0; i < 1000; ++i) sample(2, 3);
    for (int i = 0; i < 1000; ++i) sample(3, 1 + i % 3);
    return std::to_string(exhaustive) + " exhaustive, " + std::to_string(c.cases - exhaustive) + " sampled";
  });

  criterion(3, "selective transmission on the one-bit identity", [](Check& c) {
    auto r = combined_cost(sel1(), m1(), kThirds);
    c.expect(r.fixed == 2, "c_F");
    c.expect(r.variable == 3, "c_V");
    c.expect(r.programming == 2, "c_P");
    c.expect(r.combined == Rational(7, 3), "combined");

    CpOptions charged;
    charged.charge_presence = true;
    auto domains = node_domains(sel1(), m1().domain());
    std::int64_t oracle = 0;
    for (NodeIndex a = 0; a < static_cast<NodeIndex>(sel1().node_count()); ++a)
      if (!sel1().is_initial(a)) oracle += oracle_programming_cost(domains[a], program_of(sel1(), a), true);
    auto got = programming_cost(sel1(), m1(), charged);
    c.expect(got == oracle, "charged c_P " + to_fraction_string(got) + " vs oracle " + std::to_string(oracle));
    return "(2, 3, 2), combined 7/3; charge-presence c_P = " + std::to_string(oracle);
  });

  criterion(4, "brute-force kappa, bound monotonicity, annealing", [](Check& c) {
    c.expect(kappa(m1(), kFixed, bounds(2, 0, 1)).best_cost.combined == 1, "kappa_F(M1)");
    c.expect(kappa(id2(), kFixed, bounds(2, 0, 2)).best_cost.combined == 2, "kappa_F(ID2)");
    for (const auto& w : {kFixed, kThirds, CostWeights::make(0, 1, 0), CostWeights::make(0, 0, 1)})
      c.expect(kappa(const2(), w, bounds(2, 0, 2)).best_cost.combined == 0, "kappa(CONST2)");

    std::mt19937_64 rng(404);
    AnnealSchedule sched;
    sched.iterations = 2000;
    for (int trial = 0; trial < 20; ++trial) {
      auto m = random_machine(rng, 1 + static_cast<int>(trial % 2), 2, 4);
      auto tag = "machine " + std::to_string(trial);
      auto small = kappa(m, kThirds, bounds(2, 0, 2)).best_cost.combined;
      auto mid = kappa(m, kThirds, bounds(3, 1, 2)).best_cost.combined;
      auto large = kappa(m, kThirds, bounds(3, 2, 2)).best_cost.combined;
      c.expect(mid <= small && large <= mid, tag + " monotonicity");
      auto trivial = combined_cost(trivial_design(m), m, kThirds).combined;
      auto a = anneal(m, kThirds, bounds(3, 1, 2), 1000 + trial, sched);
      c.expect(a.best_cost.combined <= trivial, tag + " anneal above trivial");
      c.expect(implements(a.best_design, m).ok, tag + " anneal result not implementing");
    }
    sched.iterations = 5000;
    c.expect(anneal(m1(), kFixed, bounds(2, 0, 1), 11, sched).best_cost.combined == 1, "anneal M1");
    c.expect(anneal(id2(), kFixed, bounds(2, 0, 2), 11, sched).best_cost.combined == 2, "anneal ID2");
    return "20 machines, bounds (2,0,2) <= (3,1,2) <= (3,2,2)";
  });

  criterion(5, "approximate kappa is monotone in q and equals kappa at q = 1", [](Check& c) {
    std::mt19937_64 rng(505);
    for (int trial = 0; trial < 20; ++trial) {
      auto m = random_machine(rng, 2, 2, 4);
      auto b = bounds(3, 1, 2);
      auto tag = "machine " + std::to_string(trial);
      auto exact = kappa(m, kThirds, b);
      auto full = approximate_kappa(m, kThirds, b, 1);
      c.expect(full.best_cost.combined == exact.best_cost.combined && full.best_design == exact.best_design,
               tag + " q=1");
      Rational prev = full.best_cost.combined;
      long size = static_cast<long>(m.size());
      for (long q = size * 4 - 1; q >= 1; --q) {
        Rational coverage(q, size * 4);
        auto r = approximate_kappa(m, kThirds, b, coverage);
        c.expect(r.best_cost.combined <= prev, tag + " q=" + to_fraction_string(coverage));
        Rational achieved(static_cast<long>(r.covered.size()), size);
        c.expect(achieved >= coverage, tag + " coverage");
        prev = r.best_cost.combined;
      }
    }
    return "20 machines, q in steps of 1/(4|D|)";
  });

  criterion(6, "optimal coding equals the minimum over every injective coding", [](Check& c) {
    std::size_t machines = 0;
    for (int n = 1; n <= 2; ++n)
      for (int a = 1; a <= 3; ++a)
        for (int b = 1; b <= 3; ++b) {
          if (a > (1 << n) || b > (1 << n)) continue;
          for (bool shared : {false, true}) {
            AbstractMachine am;
            for (int i = 0; i < a; ++i) am.inputs.push_back(std::string(1, static_cast<char>('a' + i)));
            for (int j = 0; j < b; ++j)
              am.outputs.push_back(std::string(1, static_cast<char>((shared ? 'a' : 'x') + j)));
            std::vector<int> f(a, 0);
            while (true) {
              for (int i = 0; i < a; ++i) am.table[am.inputs[i]] = am.outputs[f[i]];
              ++machines;
              for (const auto& w : {kFixed, kThirds}) {
                auto bnd = bounds(2, 0, n);
                auto got = optimal_coding(am, n, Alphabet{2}, w, bnd);
                auto want = brute_coding_minimum(am, n, w, bnd);
                c.expect(got.result.best_cost.combined == want,
                         "n=" + std::to_string(n) + " |I|=" + std::to_string(a) + " |O|=" + std::to_string(b));
                c.expect(implements(got.result.best_design, encode(am, got.coding, n)).ok, "argmin coding");
              }
              int i = 0;
              while (i < a && ++f[i] == b) f[i++] = 0;
              if (i == a) break;
            }
          }
        }
    return std::to_string(machines) + " abstract machines";
  });

  criterion(7, "best-reply designs", [](Check& c) {
    NormalFormGame coord{{2, 2}, {{1, 0, 0, 1}, {1, 0, 0, 1}}, {}};
    c.expect(implemented_machine(best_reply_design(coord, 1), profiles(coord)) ==
                 make_machine(2, 2, {{"00", "00"}, {"01", "10"}, {"10", "01"}, {"11", "11"}}),
             "coordination k=1");
    c.expect(implemented_machine(best_reply_design(coord, 2), profiles(coord)) == id2(), "coordination k=2");

    std::mt19937_64 rng(707);
    std::size_t nash = 0;
    for (int trial = 0; trial < 100; ++trial) {
      NormalFormGame g;
      g.strategies.assign(trial % 2 ? 3 : 2, 2);
      for (int i = 0; i < g.players(); ++i) {
        g.payoffs.emplace_back();
        for (std::size_t p = 0; p < g.profile_count(); ++p) g.payoffs.back().emplace_back(static_cast<long>(rng() % 5));
      }
      auto tag = "game " + std::to_string(trial);
      for (int k = 1; k <= 3; ++k) {
        auto d = best_reply_design(g, k);
        c.expect(validate_design(d, profiles(g)).ok(), tag + " invalid design");
        auto m = implemented_machine(d, profiles(g));
        for (const auto& s : profiles(g))
          if (pure_nash(g, s)) {
            ++nash;
            c.expect(m(s) == s, tag + " Nash profile " + to_string(s) + " moved");
          }
        for (NodeIndex a = 0; a < static_cast<NodeIndex>(d.node_count()); ++a)
          if (!d.is_initial(a))
            c.expect(is_best_reply_program(profile_program(d, a, g.players()), g, node_player(d, a)),
                     tag + " node " + d.name(a));
      }
      auto scaled = g;
      int who = 1 + trial % g.players();
      Rational factor(1 + static_cast<long>(rng() % 7), 1 + static_cast<long>(rng() % 3));
      for (auto& u : scaled.payoffs[who - 1]) u *= factor;
      for (int k = 1; k <= 3; ++k) c.expect(best_reply_design(scaled, k) == best_reply_design(g, k), tag + " scaling");
    }
    return "100 games, " + std::to_string(nash) + " Nash checks";
  });

  criterion(8, "deterministic synthesis and file round-trips", [](Check& c) {
    AnnealSchedule sched;
    sched.iterations = 3000;
    auto render = [&](std::uint64_t seed) {
      auto r = anneal(m2(), kThirds, bounds(3, 1, 2), seed, sched);
      return serialize_design(r.best_design) + format_report(r.best_cost) + std::to_string(r.explored);
    };
    c.expect(render(99) == render(99), "library anneal differs between runs");

    std::string cli = DECENT_CLI;
    std::string fixtures = DECENT_FIXTURE_DIR;
    auto cmd = cli + " synth " + fixtures + "/m2.json --weights 1/3,1/3,1/3 --bounds 3,1,2 --mode anneal" +
               " --iterations 3000 --seed 12345";
    auto first = run_command(cmd), second = run_command(cmd);
    c.expect(first == second && first.find("seed        12345") != std::string::npos, "CLI anneal output differs");
    auto env = run_command("DECENT_SEED=12345 " + cli + " synth " + fixtures +
                           "/m2.json --weights 1/3,1/3,1/3 --bounds 3,1,2 --mode anneal --iterations 3000");
    c.expect(env == first, "DECENT_SEED fallback differs from --seed");
    auto exact = cli + " synth " + fixtures + "/id2.json --bounds 3,1,2";
    c.expect(run_command(exact) == run_command(exact), "CLI exact output differs");

    std::size_t files = 0;
    for (const auto& entry : std::filesystem::directory_iterator(fixtures)) {
      if (entry.path().extension() != ".json") continue;
      ++files;
      auto text = read_file(entry.path().string());
      auto name = entry.path().filename().string();
      switch (detect_kind(text)) {
        case FileKind::Machine: {
          auto m = parse_machine(text);
          c.expect(parse_machine(serialize_machine(m)) == m && serialize_machine(m) == text, name);
          break;
        }
        case FileKind::Design: {
          auto d = parse_design(text);
          c.expect(parse_design(serialize_design(d)) == d && serialize_design(d) == text, name);
          break;
        }
        case FileKind::Game: {
          auto g = parse_game(text);
          c.expect(parse_game(serialize_game(g)) == g && serialize_game(g) == text, name);
          break;
        }
      }
    }
    return std::to_string(files) + " fixture files";
  });

  return failed == 0 ? 0 : 1;
}
