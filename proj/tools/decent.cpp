// decent: validate, simulate, cost and synthesize designs from the shell.
//
// Exit status: 0 success, 1 domain or validation error, 2 parse or usage error.

#include "decent/cost.hpp"
#include "decent/game.hpp"
#include "decent/io.hpp"
#include "decent/synthesis.hpp"

#include <cstdlib>
#include <iostream>
#include <random>

#include "CLI11.hpp"

using namespace decent;

namespace {

constexpr int kDomainError = 1;
constexpr int kUsageError = 2;

struct CpFlags {
  int exact_limit = 10;
  bool charge_presence = false;
  bool greedy = false;

  void add(CLI::App* cmd) {
    cmd->add_option("--cp-exact-limit", exact_limit, "largest fan-in costed exactly")->check(CLI::NonNegativeNumber);
    cmd->add_flag("--cp-charge-presence", charge_presence, "charge an inspection for absent slots too");
    cmd->add_flag("--cp-greedy", greedy, "greedy inspection cost at every node");
  }

  CpOptions options() const {
    CpOptions o;
    o.exact_fan_in_limit = exact_limit;
    o.charge_presence = charge_presence;
    o.mode = greedy ? CpMode::Heuristic : CpMode::Auto;
    return o;
  }
};

Sequence input_sequence(const std::string& text) {
  auto s = sequence_from_string(text);
  if (!s) throw Error(ErrorKind::ParseError, "--input", "'" + text + "' is not a digit string");
  return *s;
}

std::uint64_t pick_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("DECENT_SEED")) {
    try {
      std::size_t used = 0;
      auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorKind::ParseError, "DECENT_SEED", std::string("not an integer: '") + env + "'");
  }
  return std::random_device{}();
}

int run_validate(const std::string& file, const std::string& machine_file) {
  auto text = read_file(file);
  switch (detect_kind(text)) {
    case FileKind::Machine: {
      auto m = parse_machine(text);
      std::cout << "ok: machine with n=" << m.n() << ", k=" << m.alphabet().size << ", |D|=" << m.size() << "\n";
      return 0;
    }
    case FileKind::Game: {
      auto g = parse_game(text);
      std::cout << "ok: game with " << g.players() << " players, " << g.profile_count() << " profiles\n";
      return 0;
    }
    case FileKind::Design: break;
  }
  auto d = parse_design(text);
  std::vector<Sequence> domain;
  if (!machine_file.empty()) domain = parse_machine(read_file(machine_file)).domain();
  else domain = all_sequences(d.n(), d.alphabet());
  auto report = validate_design(d, domain);
  std::cout << format_validation(report);
  return report.ok() ? 0 : kDomainError;
}

void print_synthesis(const SynthesisResult& r, const std::string& mode, bool seeded, const std::string& out,
                     const std::string& dot) {
  std::cout << "mode        " << mode << "\n";
  std::cout << "optimality  " << to_string(r.optimality) << "\n";
  std::cout << "explored    " << r.explored << "\n";
  if (seeded) std::cout << "seed        " << r.seed << "\n";
  std::cout << "covered     " << r.covered.size() << "\n\n";
  std::cout << format_report(r.best_cost);
  if (!out.empty()) write_file(out, serialize_design(r.best_design));
  if (!dot.empty()) write_file(dot, export_dot(r.best_design));
  if (out.empty()) std::cout << "\n" << serialize_design(r.best_design);
  if (dot.empty()) std::cout << "\n" << export_dot(r.best_design);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized designs for finite machines: validation, costs and synthesis"};
  app.require_subcommand(1);

  std::string file, machine_file, input, weights_text = "1,0,0", out, dot_out;
  CpFlags cp;

  auto* validate = app.add_subcommand("validate", "check a machine, design or game file");
  validate->add_option("file", file)->required();
  validate->add_option("--machine", machine_file, "validate a design against this machine's domain");

  auto* sim = app.add_subcommand("simulate", "run a design on one input");
  sim->add_option("design", file)->required();
  sim->add_option("machine", machine_file)->required();
  sim->add_option("--input", input, "input sequence, e.g. 0110")->required();

  auto* cost = app.add_subcommand("cost", "fixed, variable and programming cost of a design");
  cost->add_option("design", file)->required();
  cost->add_option("machine", machine_file)->required();
  cost->add_option("--weights", weights_text, "x,y,z summing to 1");
  cp.add(cost);

  std::string bounds_text = "2,0,1", mode = "exact", coverage_text = "1";
  std::optional<std::uint64_t> seed;
  std::uint64_t budget = SynthesisOptions{}.budget, iterations = AnnealSchedule{}.iterations;
  int chains = 1;
  bool general = false;
  auto* synth = app.add_subcommand("synth", "search for a cheapest implementing design");
  synth->add_option("machine", machine_file)->required();
  synth->add_option("--weights", weights_text, "x,y,z summing to 1");
  synth->add_option("--bounds", bounds_text, "T,m,p: max layers, max intermediate width, max fan-in");
  synth->add_option("--mode", mode)->check(CLI::IsMember({"exact", "anneal", "approx"}));
  synth->add_option("--coverage", coverage_text, "fraction of inputs to match (approx mode)");
  synth->add_option("--seed", seed, "annealing seed (default: $DECENT_SEED, else random)");
  synth->add_option("--budget", budget, "cap on evaluated candidates (exact, approx)");
  synth->add_option("--iterations", iterations, "annealing steps per chain");
  synth->add_option("--chains", chains, "independent annealing chains")->check(CLI::PositiveNumber);
  synth->add_flag("--general", general, "also enumerate selective transmission rules");
  synth->add_option("--out", out, "write the best design here");
  synth->add_option("--dot", dot_out, "write its DOT rendering here");
  cp.add(synth);

  int rounds = 1;
  bool rivals_only = false;
  auto* game = app.add_subcommand("game", "best-reply design of a normal-form game");
  game->add_option("game", file)->required();
  game->add_option("--rounds", rounds, "best-reply rounds k")->required();
  game->add_flag("--rivals-only", rivals_only, "players do not observe their own previous move");
  game->add_option("--weights", weights_text, "x,y,z summing to 1");
  game->add_option("--out", out, "write the design here");
  cp.add(game);

  auto* dot = app.add_subcommand("dot", "Graphviz rendering of a design");
  dot->add_option("design", file)->required();
  dot->add_option("--input", input, "mark the edges active on this input");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*validate) return run_validate(file, machine_file);

    if (*sim) {
      auto s = input_sequence(input);
      auto d = parse_design(read_file(file));
      auto m = parse_machine(read_file(machine_file));
      require_valid(d, m.domain());
      auto trace = simulate(d, s, m.domain());
      std::cout << format_trace(d, trace);
      bool match = trace.terminal_outputs == m(s);
      std::cout << "machine " << to_string(m(s)) << (match ? " (match)" : " (MISMATCH)") << "\n";
      return 0;
    }

    if (*cost) {
      auto w = CostWeights::parse(weights_text);
      auto d = parse_design(read_file(file));
      auto m = parse_machine(read_file(machine_file));
      std::cout << format_report(combined_cost(d, m, w, cp.options()));
      auto impl = implements(d, m);
      std::cout << "implements        " << (impl.ok ? "yes" : "no") << "\n";
      return 0;
    }

    if (*synth) {
      auto w = CostWeights::parse(weights_text);
      auto b = SearchBounds::parse(bounds_text);
      b.full_transmission_only = !general;
      auto q = parse_rational(coverage_text);
      if (!q) throw Error(ErrorKind::ParseError, "--coverage", "cannot read '" + coverage_text + "'");
      auto m = parse_machine(read_file(machine_file));
      SynthesisOptions opts;
      opts.cp = cp.options();
      opts.budget = budget;
      if (mode == "anneal") {
        AnnealSchedule sched;
        sched.iterations = iterations;
        sched.chains = chains;
        auto s = pick_seed(seed);
        print_synthesis(anneal(m, w, b, s, sched, opts), mode, true, out, dot_out);
      } else if (mode == "approx") {
        print_synthesis(approximate_kappa(m, w, b, *q, opts), mode, false, out, dot_out);
      } else {
        print_synthesis(kappa(m, w, b, opts), mode, false, out, dot_out);
      }
      return 0;
    }

    if (*game) {
      auto w = CostWeights::parse(weights_text);
      auto g = parse_game(read_file(file));
      auto d = best_reply_design(g, rounds, rivals_only);
      auto m = implemented_machine(d, profiles(g));
      std::cout << format_report(combined_cost(d, m, w, cp.options()));
      std::cout << "\nimplemented machine\n" << serialize_machine(m);
      if (out.empty()) std::cout << "\n" << serialize_design(d);
      else write_file(out, serialize_design(d));
      return 0;
    }

    if (*dot) {
      auto d = parse_design(read_file(file));
      std::optional<Sequence> s;
      if (!input.empty()) s = input_sequence(input);
      std::cout << export_dot(d, s);
      return 0;
    }
  } catch (const Error& e) {
    for (const auto& d : e.diagnostics()) std::cerr << "error: " << format(d) << "\n";
    switch (e.kind()) {
      case ErrorKind::ParseError:
      case ErrorKind::BadWeights:
      case ErrorKind::BadBounds: return kUsageError;
      default: return kDomainError;
    }
  }
  return 0;
}
