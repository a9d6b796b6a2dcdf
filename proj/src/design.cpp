#include "decent/design.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace decent {

bool PartialInput::is_empty() const {
  return std::all_of(slots.begin(), slots.end(), [](int v) { return v == kAbsent; });
}

int PartialInput::present_count() const {
  return static_cast<int>(std::count_if(slots.begin(), slots.end(), [](int v) { return v != kAbsent; }));
}

std::optional<NodeIndex> Design::find(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<NodeIndex>(it - names_.begin());
}

int Design::slot_of(NodeIndex node, NodeIndex pred) const {
  const auto& p = preds_.at(node);
  auto it = std::lower_bound(p.begin(), p.end(), pred);
  if (it == p.end() || *it != pred) return -1;
  return static_cast<int>(it - p.begin());
}

PartialInput Design::make_input(NodeIndex node, const std::map<std::string, Symbol>& recv) const {
  PartialInput in(preds_.at(node).size());
  for (const auto& [id, sym] : recv) {
    auto pred = find(id);
    int slot = pred ? slot_of(node, *pred) : -1;
    if (slot < 0)
      throw Error(ErrorKind::MalformedDesign, names_.at(node), "'" + id + "' is not a predecessor");
    in.slots[slot] = sym;
  }
  return in;
}

Design Design::build(const DesignSpec& spec) {
  std::vector<Diagnostic> errs;
  auto fail = [&](ErrorKind k, std::string where, std::string msg) {
    errs.push_back({k, std::move(where), std::move(msg)});
  };

  if (spec.alphabet < 2 || spec.alphabet > Alphabet::kMaxSize)
    fail(ErrorKind::SymbolOutOfRange, "alphabet", "alphabet size must be in [2, 36]");
  if (spec.layers.size() < 2) fail(ErrorKind::MalformedDesign, "layers", "a design needs at least two layers");
  for (std::size_t t = 0; t < spec.layers.size(); ++t)
    if (spec.layers[t].empty()) fail(ErrorKind::MalformedDesign, "layers[" + std::to_string(t) + "]", "empty layer");
  if (!errs.empty()) throw Error(std::move(errs));

  Design d;
  d.alphabet_ = Alphabet{spec.alphabet};
  std::unordered_map<std::string, NodeIndex> index;
  for (std::size_t t = 0; t < spec.layers.size(); ++t) {
    auto ids = spec.layers[t];
    if (t != 0 && t + 1 != spec.layers.size()) std::sort(ids.begin(), ids.end());
    d.layers_.emplace_back();
    for (const auto& id : ids) {
      auto node = static_cast<NodeIndex>(d.names_.size());
      if (!index.emplace(id, node).second) {
        fail(ErrorKind::MalformedDesign, id, "duplicate node id");
        continue;
      }
      d.names_.push_back(id);
      d.layer_of_.push_back(static_cast<int>(t));
      d.layers_.back().push_back(node);
    }
  }
  d.preds_.resize(d.names_.size());
  d.succs_.resize(d.names_.size());
  d.behavior_.resize(d.names_.size());

  auto lookup = [&](const std::string& id, const std::string& where) -> std::optional<NodeIndex> {
    auto it = index.find(id);
    if (it == index.end()) {
      fail(ErrorKind::MalformedDesign, where, "unknown node id '" + id + "'");
      return std::nullopt;
    }
    return it->second;
  };

  std::set<Edge> edge_set;
  for (std::size_t i = 0; i < spec.edges.size(); ++i) {
    const auto& [from_id, to_id] = spec.edges[i];
    auto where = "edges[" + std::to_string(i) + "]";
    auto from = lookup(from_id, where);
    auto to = lookup(to_id, where);
    if (!from || !to) continue;
    if (*from == *to) {
      fail(ErrorKind::BackwardEdge, where, "self loop on '" + from_id + "'");
      continue;
    }
    if (!edge_set.emplace(*from, *to).second) fail(ErrorKind::MalformedDesign, where, "duplicate edge");
  }
  d.edges_.assign(edge_set.begin(), edge_set.end());
  for (const auto& [a, b] : d.edges_) {
    d.preds_[b].push_back(a);
    d.succs_[a].push_back(b);
  }
  for (auto& p : d.preds_) std::sort(p.begin(), p.end());
  for (auto& s : d.succs_) std::sort(s.begin(), s.end());

  for (const auto& [id, rows] : spec.behavior) {
    auto node = lookup(id, "behavior");
    if (!node) continue;
    if (d.is_initial(*node)) {
      fail(ErrorKind::MalformedDesign, id, "initial nodes have no program");
      continue;
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto& row = rows[r];
      auto where = id + ".rows[" + std::to_string(r) + "]";
      PartialInput in(d.preds_[*node].size());
      bool row_ok = true;
      for (const auto& [pred_id, sym] : row.recv) {
        auto pred = index.find(pred_id);
        int slot = pred == index.end() ? -1 : d.slot_of(*node, pred->second);
        if (slot < 0) {
          fail(ErrorKind::MalformedDesign, where, "'" + pred_id + "' is not a predecessor of '" + id + "'");
          row_ok = false;
          continue;
        }
        if (sym >= spec.alphabet) {
          fail(ErrorKind::SymbolOutOfRange, where, "received symbol " + std::to_string(sym));
          row_ok = false;
        }
        in.slots[slot] = sym;
      }
      if (row.out >= spec.alphabet) {
        fail(ErrorKind::SymbolOutOfRange, where, "output symbol " + std::to_string(row.out));
        row_ok = false;
      }
      Behavior b{row.out, {}};
      for (const auto& target_id : row.send) {
        auto target = index.find(target_id);
        if (target == index.end() ||
            !std::binary_search(d.succs_[*node].begin(), d.succs_[*node].end(), target->second)) {
          fail(ErrorKind::MalformedDesign, where, "'" + target_id + "' is not a successor of '" + id + "'");
          row_ok = false;
          continue;
        }
        b.send.push_back(target->second);
      }
      std::sort(b.send.begin(), b.send.end());
      if (std::adjacent_find(b.send.begin(), b.send.end()) != b.send.end()) {
        fail(ErrorKind::MalformedDesign, where, "repeated transmission target");
        row_ok = false;
      }
      if (!row_ok) continue;
      if (!d.behavior_[*node].emplace(std::move(in), std::move(b)).second)
        fail(ErrorKind::MalformedDesign, where, "duplicate row for the same received input");
    }
  }
  if (!errs.empty()) throw Error(std::move(errs));
  return d;
}

DesignSpec Design::to_spec() const {
  DesignSpec spec;
  spec.alphabet = alphabet_.size;
  for (const auto& layer : layers_) {
    spec.layers.emplace_back();
    for (auto a : layer) spec.layers.back().push_back(names_[a]);
  }
  for (const auto& [a, b] : edges_) spec.edges.emplace_back(names_[a], names_[b]);
  for (NodeIndex a = 0; a < static_cast<NodeIndex>(names_.size()); ++a) {
    if (behavior_[a].empty()) continue;
    auto& rows = spec.behavior[names_[a]];
    for (const auto& [in, b] : behavior_[a]) {
      BehaviorRow row;
      for (std::size_t j = 0; j < in.slots.size(); ++j)
        if (in.slots[j] != kAbsent) row.recv.emplace(names_[preds_[a][j]], static_cast<Symbol>(in.slots[j]));
      row.out = b.out;
      for (auto t : b.send) row.send.push_back(names_[t]);
      rows.push_back(std::move(row));
    }
  }
  return spec;
}

std::string format_input(const Design& design, NodeIndex node, const PartialInput& input) {
  std::string out = "{";
  bool first = true;
  for (std::size_t j = 0; j < input.slots.size(); ++j) {
    if (input.slots[j] == kAbsent) continue;
    if (!first) out += ", ";
    first = false;
    out += design.name(design.preds(node)[j]) + "=" + symbol_char(static_cast<Symbol>(input.slots[j]));
  }
  return out + "}";
}

namespace {

struct MissingRow {
  NodeIndex node;
  PartialInput input;
};

void check_input(const Design& design, const Sequence& s) {
  if (static_cast<int>(s.size()) != design.n())
    throw Error(ErrorKind::InputNotInDomain, to_string(s),
                "expected length " + std::to_string(design.n()));
  for (Symbol x : s)
    if (x >= design.alphabet().size)
      throw Error(ErrorKind::InputNotInDomain, to_string(s), "symbol out of range");
}

// Returns false (and fills `missing`) when a program has no row for what a
// node received; the trace is then incomplete.
bool run(const Design& design, const Sequence& s, Trace& trace, MissingRow* missing) {
  const auto count = design.node_count();
  trace.outputs.assign(count, 0);
  trace.received.clear();
  trace.received.reserve(count);
  for (std::size_t a = 0; a < count; ++a) trace.received.emplace_back(design.preds(static_cast<NodeIndex>(a)).size());
  trace.active_edges.clear();

  auto transmit = [&](NodeIndex from, NodeIndex to) {
    trace.received[to].slots[design.slot_of(to, from)] = trace.outputs[from];
    trace.active_edges.emplace_back(from, to);
  };

  for (int t = 0; t < design.layer_count(); ++t) {
    const auto& layer = design.layer(t);
    for (std::size_t i = 0; i < layer.size(); ++i) {
      NodeIndex a = layer[i];
      if (t == 0) {
        trace.outputs[a] = s[i];
        for (auto b : design.succs(a)) transmit(a, b);
        continue;
      }
      const auto& table = design.behavior(a);
      auto row = table.find(trace.received[a]);
      if (row == table.end()) {
        if (missing) *missing = {a, trace.received[a]};
        return false;
      }
      trace.outputs[a] = row->second.out;
      for (auto b : row->second.send) transmit(a, b);
    }
  }
  std::sort(trace.active_edges.begin(), trace.active_edges.end());
  trace.terminal_outputs.clear();
  for (auto a : design.terminal()) trace.terminal_outputs.push_back(trace.outputs[a]);
  return true;
}

}  // namespace

Trace simulate(const Design& design, const Sequence& s) {
  check_input(design, s);
  Trace trace;
  MissingRow missing;
  if (!run(design, s, trace, &missing))
    throw Error(ErrorKind::MissingProgramEntry, design.name(missing.node),
                "no program row for " + format_input(design, missing.node, missing.input) + " (initial input " +
                    to_string(s) + ")");
  return trace;
}

Trace simulate(const Design& design, const Sequence& s, const std::vector<Sequence>& domain) {
  if (std::find(domain.begin(), domain.end(), s) == domain.end())
    throw Error(ErrorKind::InputNotInDomain, to_string(s), "input is not in the machine domain");
  return simulate(design, s);
}

std::vector<NodeDomain> node_domains(const Design& design, const std::vector<Sequence>& domain) {
  std::vector<NodeDomain> out(design.node_count());
  for (const auto& s : domain) {
    auto trace = simulate(design, s);
    for (std::size_t a = 0; a < design.node_count(); ++a) ++out[a][trace.received[a]];
  }
  return out;
}

ValidationReport validate_design(const Design& design, const std::vector<Sequence>& machine_domain) {
  ValidationReport report;
  auto& errs = report.errors;
  const int T = design.layer_count();

  if (design.terminal().size() != design.initial().size())
    errs.push_back({ErrorKind::LayerSizeMismatch, "layers",
                    "first layer has " + std::to_string(design.initial().size()) + " nodes, last has " +
                        std::to_string(design.terminal().size())});
  for (const auto& s : machine_domain) {
    if (static_cast<int>(s.size()) != design.n()) {
      errs.push_back({ErrorKind::LayerSizeMismatch, to_string(s),
                      "machine inputs have length " + std::to_string(s.size()) + ", design has " +
                          std::to_string(design.n()) + " initial nodes"});
      break;
    }
    if (std::any_of(s.begin(), s.end(), [&](Symbol x) { return x >= design.alphabet().size; })) {
      errs.push_back({ErrorKind::SymbolOutOfRange, to_string(s), "machine input outside the design alphabet"});
      break;
    }
  }
  for (const auto& [a, b] : design.edges())
    if (design.layer_of(a) >= design.layer_of(b))
      errs.push_back({ErrorKind::BackwardEdge, design.name(a) + "->" + design.name(b),
                      "edge from layer " + std::to_string(design.layer_of(a) + 1) + " to layer " +
                          std::to_string(design.layer_of(b) + 1)});
  for (int t = 1; t + 1 < T; ++t)
    for (auto a : design.layer(t)) {
      if (design.preds(a).empty())
        errs.push_back({ErrorKind::EmptyIntermediatePredecessors, design.name(a), "intermediate node has no predecessors"});
      if (design.succs(a).empty())
        errs.push_back({ErrorKind::EmptyIntermediateSuccessors, design.name(a), "intermediate node has no successors"});
    }
  if (!errs.empty()) return report;

  report.domains.assign(design.node_count(), {});
  std::set<std::pair<NodeIndex, PartialInput>> missing_seen;
  for (const auto& s : machine_domain) {
    Trace trace;
    MissingRow missing;
    std::size_t complete = design.node_count();
    if (!run(design, s, trace, &missing)) {
      if (missing_seen.emplace(missing.node, missing.input).second)
        errs.push_back({ErrorKind::MissingProgramEntry, design.name(missing.node),
                        "no program row for " + format_input(design, missing.node, missing.input)});
      // nodes up to the failing one received their full input
      complete = static_cast<std::size_t>(missing.node) + 1;
    }
    for (std::size_t a = 0; a < complete; ++a) ++report.domains[a][trace.received[a]];
  }

  for (std::size_t a = 0; a < design.node_count(); ++a) {
    auto node = static_cast<NodeIndex>(a);
    if (design.is_initial(node)) continue;
    std::set<NodeIndex> reached;
    for (const auto& [in, b] : design.behavior(node)) {
      if (!report.domains[a].count(in)) {
        report.warnings.push_back({ErrorKind::UnreachableProgramEntry, design.name(node),
                                   "row " + format_input(design, node, in) + " is unreachable"});
        continue;
      }
      reached.insert(b.send.begin(), b.send.end());
    }
    if (!missing_seen.empty()) continue;
    for (auto b : design.succs(node))
      if (!reached.count(b))
        errs.push_back({ErrorKind::IrrelevantSuccessor, design.name(node) + "->" + design.name(b),
                        "no reachable input transmits along this edge"});
  }
  return report;
}

void require_valid(const Design& design, const std::vector<Sequence>& machine_domain) {
  auto report = validate_design(design, machine_domain);
  if (!report.ok()) throw Error(std::move(report.errors));
}

ImplementationReport implements(const Design& design, const Machine& machine) {
  if (design.n() != machine.n() || static_cast<int>(design.terminal().size()) != machine.n())
    throw Error(ErrorKind::ShapeMismatch, "n",
                "design has " + std::to_string(design.n()) + " initial nodes, machine n=" + std::to_string(machine.n()));
  if (design.alphabet() != machine.alphabet())
    throw Error(ErrorKind::ShapeMismatch, "alphabet", "design and machine alphabets differ");
  ImplementationReport report;
  for (std::size_t i = 0; i < machine.size(); ++i) {
    auto trace = simulate(design, machine.input(i));
    Mismatch m{machine.input(i), {}};
    for (int j = 0; j < machine.n(); ++j)
      if (trace.terminal_outputs[j] != machine.output(i)[j]) m.positions.push_back(j + 1);
    if (!m.positions.empty()) {
      report.ok = false;
      report.counterexamples.push_back(std::move(m));
    }
  }
  return report;
}

Design trivial_design(const Machine& machine) {
  const int n = machine.n();
  DesignSpec spec;
  spec.alphabet = machine.alphabet().size;
  spec.layers.resize(2);
  for (int i = 1; i <= n; ++i) {
    spec.layers[0].push_back("in" + std::to_string(i));
    spec.layers[1].push_back("out" + std::to_string(i));
  }
  for (const auto& from : spec.layers[0])
    for (const auto& to : spec.layers[1]) spec.edges.emplace_back(from, to);
  for (int j = 0; j < n; ++j) {
    auto& rows = spec.behavior[spec.layers[1][j]];
    for (std::size_t k = 0; k < machine.size(); ++k) {
      BehaviorRow row;
      for (int i = 0; i < n; ++i) row.recv.emplace(spec.layers[0][i], machine.input(k)[i]);
      row.out = machine.output(k)[j];
      rows.push_back(std::move(row));
    }
  }
  return Design::build(spec);
}

Machine implemented_machine(const Design& design, const std::vector<Sequence>& domain) {
  return tabulate(design.n(), design.alphabet(), domain,
                  [&](const Sequence& s) { return simulate(design, s).terminal_outputs; });
}

}  // namespace decent
