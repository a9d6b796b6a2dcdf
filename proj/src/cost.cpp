#include "decent/cost.hpp"

#include <algorithm>

namespace decent {

CostWeights CostWeights::make(Rational x, Rational y, Rational z) {
  if (x < 0 || y < 0 || z < 0)
    throw Error(ErrorKind::BadWeights, "weights", "weights must be nonnegative");
  Rational sum = x + y + z;
  if (abs(sum - 1) > Rational(1, 1000000000))
    throw Error(ErrorKind::BadWeights, "weights", "weights sum to " + to_fraction_string(sum) + ", not 1");
  return CostWeights{std::move(x), std::move(y), std::move(z)};
}

CostWeights CostWeights::parse(std::string_view text) {
  std::vector<Rational> parts;
  std::size_t start = 0;
  while (true) {
    auto comma = text.find(',', start);
    auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    auto r = parse_rational(piece);
    if (!r) throw Error(ErrorKind::BadWeights, "weights", "cannot parse '" + std::string(piece) + "'");
    parts.push_back(*r);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (parts.size() != 3) throw Error(ErrorKind::BadWeights, "weights", "expected three comma-separated weights");
  return make(parts[0], parts[1], parts[2]);
}

namespace {

using Known = std::vector<int>;
constexpr int kUnknown = InspectionPolicy::kUnknown;
constexpr int kPresent = InspectionPolicy::kPresent;

bool hidden(int k) { return k == kUnknown || k == kPresent; }
constexpr std::size_t kMaxPresenceBits = 30;

struct Entry {
  const PartialInput* input;
  std::int64_t weight;
  Symbol out;
};

bool consistent(const Known& known, const PartialInput& in) {
  for (std::size_t j = 0; j < known.size(); ++j) {
    if (known[j] == kUnknown) continue;
    if (known[j] == kPresent ? in.slots[j] == kAbsent : known[j] != in.slots[j]) return false;
  }
  return true;
}

bool determined(const std::vector<const Entry*>& es) {
  return std::all_of(es.begin(), es.end(), [&](const Entry* e) { return e->out == es.front()->out; });
}

// Splits `es` by the value at `slot`; values in increasing order (kAbsent first).
std::map<int, std::vector<const Entry*>> split(const std::vector<const Entry*>& es, int slot) {
  std::map<int, std::vector<const Entry*>> parts;
  for (const Entry* e : es) parts[e->input->slots[slot]].push_back(e);
  return parts;
}

std::int64_t total_weight(const std::vector<const Entry*>& es) {
  std::int64_t w = 0;
  for (const Entry* e : es) w += e->weight;
  return w;
}

class PolicySolver {
 public:
  PolicySolver(const std::vector<Entry>& entries, bool greedy) : entries_(entries), greedy_(greedy) {}

  std::int64_t solve(const Known& known) {
    if (auto it = memo_.find(known); it != memo_.end()) return it->second.cost;
    auto es = consistent_entries(known);
    Choice best{0, -1};
    if (!es.empty() && !determined(es)) {
      best.slot = greedy_ ? greedy_slot(known, es) : -1;
      std::int64_t w = total_weight(es);
      for (int j = 0; j < static_cast<int>(known.size()); ++j) {
        if (!hidden(known[j])) continue;
        if (greedy_ && j != best.slot) continue;
        std::int64_t c = w;
        Known child = known;
        for (const auto& [value, part] : split(es, j)) {
          child[j] = value;
          c += solve(child);
        }
        if (greedy_ || best.slot < 0 || c < best.cost) best = {c, j};
      }
    }
    memo_.emplace(known, best);
    return best.cost;
  }

  int build(const Known& known, InspectionPolicy& policy) {
    solve(known);
    auto es = consistent_entries(known);
    const Choice& choice = memo_.at(known);
    int idx = static_cast<int>(policy.nodes.size());
    policy.nodes.push_back({});
    policy.nodes[idx].known = known;
    if (choice.slot < 0) {
      policy.nodes[idx].kind = InspectionPolicy::Kind::Leaf;
      policy.nodes[idx].output = es.empty() ? Symbol{0} : es.front()->out;
      return idx;
    }
    policy.nodes[idx].kind = InspectionPolicy::Kind::Inspect;
    policy.nodes[idx].slot = choice.slot;
    for (const auto& [value, part] : split(es, choice.slot)) {
      Known child = known;
      child[choice.slot] = value;
      int c = build(child, policy);
      policy.nodes[idx].children.emplace_back(value, c);
    }
    return idx;
  }

 private:
  struct Choice {
    std::int64_t cost;
    int slot;  // -1: leaf
  };

  std::vector<const Entry*> consistent_entries(const Known& known) const {
    std::vector<const Entry*> out;
    for (const auto& e : entries_)
      if (consistent(known, *e.input)) out.push_back(&e);
    return out;
  }

  // Slot whose inspection settles the output for the most weight; lowest
  // slot on ties.
  int greedy_slot(const Known& known, const std::vector<const Entry*>& es) const {
    int best = -1;
    std::int64_t best_settled = -1;
    for (int j = 0; j < static_cast<int>(known.size()); ++j) {
      if (!hidden(known[j])) continue;
      std::int64_t settled = 0;
      for (const auto& [value, part] : split(es, j))
        if (determined(part)) settled += total_weight(part);
      if (settled > best_settled) {
        best_settled = settled;
        best = j;
      }
    }
    return best;
  }

  const std::vector<Entry>& entries_;
  bool greedy_;
  std::map<Known, Choice> memo_;
};

int presence_mask(const PartialInput& in) {
  int mask = 0;
  for (std::size_t j = 0; j < in.slots.size(); ++j)
    if (in.slots[j] != kAbsent) mask |= 1 << j;
  return mask;
}

int depth_from(const InspectionPolicy& p, int idx) {
  const auto& node = p.nodes[idx];
  int best = 0;
  for (const auto& [value, child] : node.children) best = std::max(best, depth_from(p, child));
  return best + (node.kind == InspectionPolicy::Kind::Inspect ? 1 : 0);
}

}  // namespace

int InspectionPolicy::depth() const { return nodes.empty() ? 0 : depth_from(*this, 0); }

std::pair<int, Symbol> InspectionPolicy::run(const PartialInput& input) const {
  int idx = 0, inspections = 0;
  while (true) {
    const auto& node = nodes.at(idx);
    if (node.kind == Kind::Leaf) return {inspections, node.output};
    int key;
    if (node.kind == Kind::Inspect) {
      key = input.slots.at(node.slot);
      ++inspections;
    } else {
      key = presence_mask(input);
    }
    auto it = std::find_if(node.children.begin(), node.children.end(),
                           [key](const auto& c) { return c.first == key; });
    if (it == node.children.end())
      throw Error(ErrorKind::InputNotInDomain, "policy", "no branch for the given input");
    idx = it->second;
  }
}

NodeCost node_programming_cost(const NodeDomain& domain, const Program& program, const CpOptions& options) {
  NodeCost result;
  auto& policy = result.policy;
  policy.charge_presence = options.charge_presence;
  policy.fan_in = domain.empty() ? 0 : domain.begin()->first.slots.size();

  bool greedy = options.mode == CpMode::Heuristic;
  if (static_cast<int>(policy.fan_in) > options.exact_fan_in_limit) {
    if (options.mode == CpMode::Exact)
      throw Error(ErrorKind::FanInTooLarge, "fan-in " + std::to_string(policy.fan_in),
                  "exact inspection cost is limited to fan-in " + std::to_string(options.exact_fan_in_limit));
    greedy = true;
  }
  if (!options.charge_presence && policy.fan_in > kMaxPresenceBits)
    throw Error(ErrorKind::FanInTooLarge, "fan-in " + std::to_string(policy.fan_in), "too many predecessors");
  policy.exact = !greedy;

  std::vector<Entry> entries;
  for (const auto& [in, w] : domain) {
    auto it = program.find(in);
    if (it == program.end())
      throw Error(ErrorKind::MissingProgramEntry, "program", "no output for a reachable input");
    entries.push_back({&in, static_cast<std::int64_t>(w), it->second});
  }

  std::vector<const Entry*> all;
  for (const auto& e : entries) all.push_back(&e);
  if (all.empty() || determined(all)) {
    InspectionPolicy::Node leaf;
    leaf.known.assign(policy.fan_in, kUnknown);
    leaf.output = all.empty() ? Symbol{0} : all.front()->out;
    policy.nodes.push_back(std::move(leaf));
    return result;
  }

  PolicySolver solver(entries, greedy);
  if (options.charge_presence) {
    Known root(policy.fan_in, kUnknown);
    result.cost = solver.solve(root);
    solver.build(root, policy);
    return result;
  }

  // Which predecessors transmitted is observed before any inspection.
  std::map<int, Known> groups;
  for (const auto& e : entries) {
    int mask = presence_mask(*e.input);
    if (groups.count(mask)) continue;
    Known start(policy.fan_in, kAbsent);
    for (std::size_t j = 0; j < policy.fan_in; ++j)
      if (e.input->slots[j] != kAbsent) start[j] = kPresent;
    groups.emplace(mask, std::move(start));
  }
  policy.nodes.push_back({});
  policy.nodes[0].kind = InspectionPolicy::Kind::ObservePresence;
  policy.nodes[0].known.assign(policy.fan_in, kUnknown);
  for (const auto& [mask, start] : groups) {
    result.cost += solver.solve(start);
    int child = solver.build(start, policy);
    policy.nodes[0].children.emplace_back(mask, child);
  }
  return result;
}

Program program_of(const Design& design, NodeIndex node) {
  Program p;
  for (const auto& [in, b] : design.behavior(node)) p.emplace(in, b.out);
  return p;
}

std::int64_t fixed_cost(const Design& design) { return static_cast<std::int64_t>(design.edges().size()); }

Rational variable_cost(const Design& design, const Machine& machine) {
  Rational total = 0;
  for (std::size_t i = 0; i < machine.size(); ++i) {
    auto sigma = static_cast<long>(simulate(design, machine.input(i)).sigma());
    total += machine.has_frequencies() ? Rational(machine.frequency(i) * sigma) : Rational(sigma);
  }
  if (machine.has_frequencies()) total *= static_cast<long>(machine.size());
  return total;
}

namespace {

std::vector<NodeCostLine> node_lines(const Design& design, const Machine& machine, const CpOptions& options) {
  auto domains = node_domains(design, machine.domain());
  std::vector<NodeCostLine> lines;
  for (NodeIndex a = 0; a < static_cast<NodeIndex>(design.node_count()); ++a) {
    if (design.is_initial(a)) continue;
    auto nc = node_programming_cost(domains[a], program_of(design, a), options);
    lines.push_back({design.name(a), design.preds(a).size(), nc.cost, std::move(nc.policy)});
  }
  return lines;
}

}  // namespace

Rational programming_cost(const Design& design, const Machine& machine, const CpOptions& options) {
  Rational total = 0;
  for (const auto& line : node_lines(design, machine, options)) total += line.programming;
  return total;
}

CostReport combined_cost(const Design& design, const Machine& machine, const CostWeights& weights,
                         const CpOptions& options) {
  require_valid(design, machine.domain());
  CostReport report;
  report.weights = weights;
  report.fixed = fixed_cost(design);
  report.variable = variable_cost(design, machine);
  report.per_node = node_lines(design, machine, options);
  report.programming = 0;
  for (const auto& line : report.per_node) report.programming += line.programming;
  report.combined = weights.x * report.fixed + weights.y * report.variable + weights.z * report.programming;
  return report;
}

}  // namespace decent
