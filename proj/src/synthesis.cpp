#include "decent/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <set>

namespace decent {

void SearchBounds::check() const {
  if (max_layers < 2) throw Error(ErrorKind::BadBounds, "bounds", "T_max must be at least 2");
  if (max_width < 0) throw Error(ErrorKind::BadBounds, "bounds", "m_max must be nonnegative");
  if (max_fan_in < 1) throw Error(ErrorKind::BadBounds, "bounds", "p_max must be at least 1");
}

SearchBounds SearchBounds::parse(const std::string& text) {
  std::vector<int> parts;
  std::size_t start = 0;
  while (true) {
    auto comma = text.find(',', start);
    auto piece = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(piece, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != piece.size())
      throw Error(ErrorKind::BadBounds, "bounds", "cannot parse '" + piece + "'");
    parts.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (parts.size() != 3) throw Error(ErrorKind::BadBounds, "bounds", "expected T,m,p");
  SearchBounds b;
  b.max_layers = parts[0];
  b.max_width = parts[1];
  b.max_fan_in = parts[2];
  b.check();
  return b;
}

std::string to_string(Optimality o) {
  return o == Optimality::ExactWithinBounds ? "exact-within-bounds" : "heuristic";
}

namespace {

// ---------------------------------------------------------------------------
// Bounded enumeration

struct NodeState {
  std::vector<NodeIndex> preds;
  std::vector<NodeIndex> succs;
  std::vector<PartialInput> keys;  // D_alpha, sorted
  std::vector<std::size_t> counts;
  std::vector<Symbol> table;
  std::vector<std::vector<NodeIndex>> send;  // per key
  std::vector<int> key_of;                   // per input s
};

class Engine {
 public:
  enum class Rule { All, Forced, Coverage };

  Engine(const Machine& machine, const SearchBounds& bounds, Rule rule, std::size_t needed = 0)
      : m_(machine), b_(bounds), rule_(rule), needed_(needed) {}

  // Lower bound on the cost of any completion of a topology; false prunes it.
  std::function<bool(std::int64_t edges, std::int64_t initial_edges)> keep_topology;
  // Called on every complete design; false stops the enumeration.
  std::function<bool()> on_leaf;

  void run() {
    b_.check();
    for (int T = 2; T <= b_.max_layers; ++T) {
      if (T > 2 && b_.max_width == 0) break;
      std::vector<int> widths(T - 2, 1);
      while (true) {
        if (!run_skeleton(widths)) return;
        int j = T - 3;
        while (j >= 0 && widths[j] == b_.max_width) widths[j--] = 1;
        if (j < 0) break;
        ++widths[j];
      }
    }
  }

  std::int64_t edges() const { return edges_; }
  const std::vector<NodeState>& nodes() const { return nodes_; }
  std::size_t alive() const { return alive_count_; }

  // Active edges for input s.
  std::size_t sigma(std::size_t s) const {
    std::size_t total = initial_edges_;
    for (std::size_t a = m_.n(); a < nodes_.size(); ++a)
      if (!nodes_[a].succs.empty()) total += nodes_[a].send[nodes_[a].key_of[s]].size();
    return total;
  }

  DesignSpec spec() const {
    DesignSpec spec;
    spec.alphabet = m_.alphabet().size;
    spec.layers.resize(layers_.size());
    for (std::size_t t = 0; t < layers_.size(); ++t)
      for (NodeIndex a : layers_[t]) spec.layers[t].push_back(names_[a]);
    for (std::size_t a = 0; a < nodes_.size(); ++a)
      for (NodeIndex p : nodes_[a].preds) spec.edges.emplace_back(names_[p], names_[a]);
    for (std::size_t a = m_.n(); a < nodes_.size(); ++a) {
      const auto& st = nodes_[a];
      auto& rows = spec.behavior[names_[a]];
      for (std::size_t r = 0; r < st.keys.size(); ++r) {
        BehaviorRow row;
        for (std::size_t j = 0; j < st.preds.size(); ++j)
          if (st.keys[r].slots[j] != kAbsent) row.recv[names_[st.preds[j]]] = static_cast<Symbol>(st.keys[r].slots[j]);
        row.out = st.table[r];
        for (NodeIndex x : st.send[r]) row.send.push_back(names_[x]);
        rows.push_back(std::move(row));
      }
    }
    return spec;
  }

 private:
  bool run_skeleton(const std::vector<int>& widths) {
    int n = m_.n();
    layers_.assign(widths.size() + 2, {});
    names_.clear();
    layer_of_.clear();
    auto add = [&](int t, std::string name) {
      layers_[t].push_back(static_cast<NodeIndex>(names_.size()));
      names_.push_back(std::move(name));
      layer_of_.push_back(t);
    };
    int pad = static_cast<int>(std::to_string(std::max(b_.max_width, 1)).size());
    auto padded = [&](int v) {
      auto s = std::to_string(v);
      return std::string(pad > static_cast<int>(s.size()) ? pad - s.size() : 0, '0') + s;
    };
    for (int i = 1; i <= n; ++i) add(0, "in" + std::to_string(i));
    for (std::size_t t = 0; t < widths.size(); ++t)
      for (int j = 1; j <= widths[t]; ++j) add(static_cast<int>(t) + 1, "h" + std::to_string(t + 2) + "." + padded(j));
    int last = static_cast<int>(layers_.size()) - 1;
    for (int i = 1; i <= n; ++i) add(last, "out" + std::to_string(i));

    nodes_.assign(names_.size(), {});
    options_.assign(layers_.size(), {});
    for (int t = 1; t <= last; ++t) {
      std::vector<NodeIndex> cand;
      for (int u = 0; u < t; ++u) cand.insert(cand.end(), layers_[u].begin(), layers_[u].end());
      std::vector<NodeIndex> cur;
      std::function<void(std::size_t)> gen = [&](std::size_t from) {
        if (!(t < last && cur.empty())) options_[t].push_back(cur);
        if (static_cast<int>(cur.size()) == b_.max_fan_in) return;
        for (std::size_t i = from; i < cand.size(); ++i) {
          cur.push_back(cand[i]);
          gen(i + 1);
          cur.pop_back();
        }
      };
      gen(0);
    }
    edges_ = 0;
    initial_edge_count_ = 0;
    return choose_preds(n);
  }

  bool twin_before(NodeIndex a) const {
    return a > 0 && layer_of_[a] == layer_of_[a - 1] && layer_of_[a] > 0 &&
           layer_of_[a] < static_cast<int>(layers_.size()) - 1;
  }

  bool choose_preds(NodeIndex a) {
    if (a == static_cast<NodeIndex>(nodes_.size())) return finish_topology();
    for (const auto& opt : options_[layer_of_[a]]) {
      if (twin_before(a) && opt < nodes_[a - 1].preds) continue;
      std::int64_t from_initial = std::count_if(opt.begin(), opt.end(), [&](NodeIndex p) { return layer_of_[p] == 0; });
      edges_ += static_cast<std::int64_t>(opt.size());
      initial_edge_count_ += from_initial;
      bool go = !keep_topology || keep_topology(edges_, initial_edge_count_);
      nodes_[a].preds = opt;
      bool cont = go ? choose_preds(a + 1) : true;
      edges_ -= static_cast<std::int64_t>(opt.size());
      initial_edge_count_ -= from_initial;
      if (!cont) return false;
    }
    return true;
  }

  bool finish_topology() {
    for (auto& st : nodes_) st.succs.clear();
    for (std::size_t a = 0; a < nodes_.size(); ++a)
      for (NodeIndex p : nodes_[a].preds) nodes_[p].succs.push_back(static_cast<NodeIndex>(a));
    for (NodeIndex a = 0; a < static_cast<NodeIndex>(nodes_.size()); ++a) {
      int t = layer_of_[a];
      if (t > 0 && t < static_cast<int>(layers_.size()) - 1 && nodes_[a].succs.empty()) return true;
      if (twin_before(a) && nodes_[a].preds == nodes_[a - 1].preds && nodes_[a].succs < nodes_[a - 1].succs)
        return true;
    }
    initial_edges_ = static_cast<std::size_t>(initial_edge_count_);
    std::size_t n = m_.n();
    for (std::size_t a = 0; a < n; ++a) nodes_[a].key_of.assign(m_.size(), 0);
    alive_.assign(m_.size(), 1);
    alive_count_ = m_.size();
    return assign(static_cast<NodeIndex>(n));
  }

  // Output of node b on input s.
  int output(NodeIndex b, std::size_t s) const {
    if (layer_of_[b] == 0) return m_.input(s)[b];
    return nodes_[b].table[nodes_[b].key_of[s]];
  }

  bool transmits(NodeIndex b, NodeIndex a, std::size_t s) const {
    if (layer_of_[b] == 0) return true;
    const auto& send = nodes_[b].send[nodes_[b].key_of[s]];
    return std::binary_search(send.begin(), send.end(), a);
  }

  bool assign(NodeIndex a) {
    if (a == static_cast<NodeIndex>(nodes_.size())) return on_leaf ? on_leaf() : true;
    auto& st = nodes_[a];
    std::map<PartialInput, std::size_t> dom;
    std::vector<PartialInput> recv(m_.size());
    for (std::size_t s = 0; s < m_.size(); ++s) {
      PartialInput in(st.preds.size());
      for (std::size_t j = 0; j < st.preds.size(); ++j)
        if (transmits(st.preds[j], a, s)) in.slots[j] = output(st.preds[j], s);
      ++dom[in];
      recv[s] = std::move(in);
    }
    st.keys.clear();
    st.counts.clear();
    for (auto& [k, c] : dom) {
      st.keys.push_back(k);
      st.counts.push_back(c);
    }
    st.key_of.assign(m_.size(), 0);
    for (std::size_t s = 0; s < m_.size(); ++s)
      st.key_of[s] = static_cast<int>(std::lower_bound(st.keys.begin(), st.keys.end(), recv[s]) - st.keys.begin());

    bool terminal = layer_of_[a] == static_cast<int>(layers_.size()) - 1;
    std::size_t q = st.keys.size();
    int k = m_.alphabet().size;

    if (terminal && rule_ == Rule::Forced) {
      int pos = a - static_cast<NodeIndex>(nodes_.size() - m_.n());
      std::vector<int> forced(q, -1);
      for (std::size_t s = 0; s < m_.size(); ++s) {
        int want = m_.output(s)[pos];
        int& slot = forced[st.key_of[s]];
        if (slot >= 0 && slot != want) return true;
        slot = want;
      }
      st.table.assign(forced.begin(), forced.end());
      st.send.assign(q, {});
      return assign(a + 1);
    }

    bool same_as_twin = b_.full_transmission_only && twin_before(a) && st.preds == nodes_[a - 1].preds &&
                        st.succs == nodes_[a - 1].succs;
    st.table.assign(q, 0);
    while (true) {
      if (!same_as_twin || !(st.table < nodes_[a - 1].table)) {
        if (!assign_sends(a, terminal)) return false;
      }
      std::size_t j = q;
      while (j > 0 && st.table[j - 1] == k - 1) st.table[--j] = 0;
      if (j == 0) break;
      ++st.table[j - 1];
    }
    return true;
  }

  bool assign_sends(NodeIndex a, bool terminal) {
    auto& st = nodes_[a];
    if (terminal) {
      st.send.assign(st.keys.size(), {});
      if (rule_ == Rule::Coverage) {
        int pos = a - static_cast<NodeIndex>(nodes_.size() - m_.n());
        std::vector<std::size_t> dropped;
        for (std::size_t s = 0; s < m_.size(); ++s)
          if (alive_[s] && st.table[st.key_of[s]] != m_.output(s)[pos]) dropped.push_back(s);
        if (alive_count_ - dropped.size() < needed_) return true;
        for (auto s : dropped) alive_[s] = 0;
        alive_count_ -= dropped.size();
        bool cont = assign(a + 1);
        for (auto s : dropped) alive_[s] = 1;
        alive_count_ += dropped.size();
        return cont;
      }
      return assign(a + 1);
    }
    std::size_t q = st.keys.size();
    if (b_.full_transmission_only || st.succs.empty()) {
      st.send.assign(q, st.succs);
      return assign(a + 1);
    }
    // Every per-key subset of S_alpha whose union is S_alpha.
    std::size_t full = (std::size_t{1} << st.succs.size()) - 1;
    std::vector<std::size_t> masks(q, 0);
    while (true) {
      std::size_t uni = 0;
      for (auto mk : masks) uni |= mk;
      if (uni == full) {
        st.send.assign(q, {});
        for (std::size_t r = 0; r < q; ++r)
          for (std::size_t j = 0; j < st.succs.size(); ++j)
            if (masks[r] >> j & 1) st.send[r].push_back(st.succs[j]);
        if (!assign(a + 1)) return false;
      }
      std::size_t r = q;
      while (r > 0 && masks[r - 1] == full) masks[--r] = 0;
      if (r == 0) break;
      ++masks[r - 1];
    }
    return true;
  }

  const Machine& m_;
  SearchBounds b_;
  Rule rule_;
  std::size_t needed_;

  std::vector<std::vector<NodeIndex>> layers_;
  std::vector<std::string> names_;
  std::vector<int> layer_of_;
  std::vector<std::vector<std::vector<NodeIndex>>> options_;  // per layer: candidate predecessor lists
  std::vector<NodeState> nodes_;
  std::int64_t edges_ = 0;
  std::int64_t initial_edge_count_ = 0;
  std::size_t initial_edges_ = 0;
  std::vector<char> alive_;
  std::size_t alive_count_ = 0;
};

std::size_t required_matches(const Rational& coverage, std::size_t domain) {
  Rational need = coverage * static_cast<long>(domain);
  auto num = boost::multiprecision::numerator(need);
  auto den = boost::multiprecision::denominator(need);
  auto c = (num + den - 1) / den;
  return c.convert_to<std::size_t>();
}

std::vector<Sequence> covered_inputs(const Design& d, const Machine& m) {
  std::vector<Sequence> out;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (simulate(d, m.input(i)).terminal_outputs == m.output(i)) out.push_back(m.input(i));
  return out;
}

SynthesisResult search(const Machine& machine, const CostWeights& weights, const SearchBounds& bounds,
                       const SynthesisOptions& options, std::optional<std::size_t> needed) {
  bounds.check();
  bool exact_fit = !needed || *needed >= machine.size();
  Engine engine(machine, bounds, exact_fit ? Engine::Rule::Forced : Engine::Rule::Coverage,
                exact_fit ? machine.size() : *needed);

  Rational freq_total = 0;
  for (std::size_t i = 0; i < machine.size(); ++i) freq_total += machine.frequency(i);
  Rational scale = machine.has_frequencies() ? Rational(static_cast<long>(machine.size())) : Rational(1);
  Rational per_initial_edge = machine.has_frequencies() ? scale * freq_total : Rational(static_cast<long>(machine.size()));

  std::optional<Rational> best;
  std::optional<DesignSpec> best_spec;
  std::uint64_t explored = 0;

  engine.keep_topology = [&](std::int64_t e, std::int64_t init) {
    if (!best) return true;
    // initial edges are active on every input
    return weights.x * e + weights.y * per_initial_edge * init < *best;
  };
  engine.on_leaf = [&]() {
    if (++explored > options.budget)
      throw Error(ErrorKind::CandidateCapExceeded, "synthesis",
                  "evaluated " + std::to_string(options.budget) + " candidates without finishing" +
                      (best ? "; best so far " + to_fraction_string(*best) : std::string()));
    Rational cv = 0;
    for (std::size_t s = 0; s < machine.size(); ++s) {
      long sigma = static_cast<long>(engine.sigma(s));
      cv += machine.has_frequencies() ? Rational(machine.frequency(s) * sigma) : Rational(sigma);
    }
    cv *= scale;
    Rational partial = weights.x * engine.edges() + weights.y * cv;
    if (best && partial >= *best) return true;
    Rational cp = 0;
    if (weights.z != 0) {
      for (std::size_t a = machine.n(); a < engine.nodes().size(); ++a) {
        const auto& st = engine.nodes()[a];
        NodeDomain dom;
        Program prog;
        for (std::size_t r = 0; r < st.keys.size(); ++r) {
          dom.emplace(st.keys[r], st.counts[r]);
          prog.emplace(st.keys[r], st.table[r]);
        }
        cp += node_programming_cost(dom, prog, options.cp).cost;
      }
    }
    Rational total = partial + weights.z * cp;
    if (!best || total < *best) {
      best = total;
      best_spec = engine.spec();
    }
    return *best != 0;
  };
  engine.run();

  if (!best_spec)
    throw Error(ErrorKind::NoImplementingDesignWithinBounds, "synthesis",
                "no design within T_max=" + std::to_string(bounds.max_layers) + ", m_max=" +
                    std::to_string(bounds.max_width) + ", p_max=" + std::to_string(bounds.max_fan_in) +
                    (exact_fit ? " implements the machine" : " reaches the requested coverage"));

  SynthesisResult result{Design::build(*best_spec), {}, Optimality::ExactWithinBounds, explored, 0, {}};
  result.best_cost = combined_cost(result.best_design, machine, weights, options.cp);
  result.covered = covered_inputs(result.best_design, machine);
  if (result.best_cost.combined != *best)
    throw std::logic_error("synthesis: incremental cost disagrees with the cost model");
  if (result.covered.size() < (exact_fit ? machine.size() : *needed))
    throw std::logic_error("synthesis: best design does not reach the required coverage");
  return result;
}

}  // namespace

void enumerate_designs(const Machine& machine, const SearchBounds& bounds,
                       const std::function<bool(const Design&)>& visit) {
  Engine engine(machine, bounds, Engine::Rule::All);
  engine.on_leaf = [&]() { return visit(Design::build(engine.spec())); };
  engine.run();
}

SynthesisResult kappa(const Machine& machine, const CostWeights& weights, const SearchBounds& bounds,
                      const SynthesisOptions& options) {
  return search(machine, weights, bounds, options, std::nullopt);
}

SynthesisResult approximate_kappa(const Machine& machine, const CostWeights& weights, const SearchBounds& bounds,
                                  const Rational& coverage, const SynthesisOptions& options) {
  if (coverage <= 0 || coverage > 1)
    throw Error(ErrorKind::BadBounds, "coverage", "coverage must be in (0, 1], got " + to_fraction_string(coverage));
  return search(machine, weights, bounds, options, required_matches(coverage, machine.size()));
}

// ---------------------------------------------------------------------------
// Simulated annealing

namespace {

using Recv = std::map<std::string, Symbol>;

struct Row {
  Symbol out = 0;
  std::set<std::string> send;
};

// Name-based mutable design.
struct Working {
  int k = 2;
  std::vector<std::vector<std::string>> layers;
  std::set<std::pair<std::string, std::string>> edges;
  std::map<std::string, std::map<Recv, Row>> rows;
  int fresh = 0;

  static Working from(const Design& d) {
    Working w;
    auto spec = d.to_spec();
    w.k = spec.alphabet;
    w.layers = spec.layers;
    w.edges.insert(spec.edges.begin(), spec.edges.end());
    for (const auto& [node, rs] : spec.behavior)
      for (const auto& r : rs) w.rows[node][r.recv] = Row{r.out, {r.send.begin(), r.send.end()}};
    return w;
  }

  DesignSpec spec() const {
    DesignSpec spec;
    spec.alphabet = k;
    spec.layers = layers;
    spec.edges.assign(edges.begin(), edges.end());
    for (const auto& [node, rs] : rows) {
      auto& out = spec.behavior[node];
      for (const auto& [recv, r] : rs) out.push_back({recv, r.out, {r.send.begin(), r.send.end()}});
    }
    return spec;
  }

  std::map<std::string, int> layer_index() const {
    std::map<std::string, int> li;
    for (std::size_t t = 0; t < layers.size(); ++t)
      for (const auto& a : layers[t]) li[a] = static_cast<int>(t);
    return li;
  }

  std::set<std::string> preds(const std::string& a) const {
    std::set<std::string> p;
    for (const auto& [x, y] : edges)
      if (y == a) p.insert(x);
    return p;
  }

  std::set<std::string> succs(const std::string& a) const {
    std::set<std::string> s;
    for (const auto& [x, y] : edges)
      if (x == a) s.insert(y);
    return s;
  }
};

// Re-simulates in layer order, restricting or extending program rows to the
// inputs actually received. Returns the number of mismatched terminal symbols
// over D, or nothing when the structure is no longer a valid design.
std::optional<std::size_t> repair(Working& w, const Machine& m) {
  if (w.layers.size() < 2) return std::nullopt;
  std::erase_if(w.layers, [](const auto& l) { return l.empty(); });
  if (w.layers.size() < 2 || w.layers.front().size() != static_cast<std::size_t>(m.n()) ||
      w.layers.back().size() != static_cast<std::size_t>(m.n()))
    return std::nullopt;
  std::size_t T = w.layers.size();
  std::map<std::string, std::set<std::string>> preds, succs;
  for (const auto& [x, y] : w.edges) {
    preds[y].insert(x);
    succs[x].insert(y);
  }
  std::set<std::string> initial(w.layers[0].begin(), w.layers[0].end());
  std::vector<std::map<std::string, Symbol>> out(m.size());
  std::vector<std::map<std::string, const Row*>> used(m.size());
  for (std::size_t s = 0; s < m.size(); ++s)
    for (std::size_t i = 0; i < w.layers[0].size(); ++i) out[s][w.layers[0][i]] = m.input(s)[i];

  for (std::size_t t = 1; t < T; ++t) {
    for (const auto& a : w.layers[t]) {
      bool terminal = t + 1 == T;
      if (!terminal && (preds[a].empty() || succs[a].empty())) return std::nullopt;
      const auto& old = w.rows[a];
      std::map<Recv, Row> fresh;
      std::vector<Recv> recv(m.size());
      for (std::size_t s = 0; s < m.size(); ++s) {
        Recv r;
        for (const auto& p : preds[a])
          if (initial.count(p) || used[s].at(p)->send.count(a)) r[p] = out[s].at(p);
        if (!fresh.count(r)) {
          Row row;
          if (auto it = old.find(r); it != old.end()) {
            row = it->second;
          } else {
            auto agrees = [&](const Recv& o) {
              for (const auto& [key, v] : o)
                if (auto f = r.find(key); f != r.end() && f->second != v) return false;
              return true;
            };
            auto match = std::find_if(old.begin(), old.end(), [&](const auto& e) { return agrees(e.first); });
            if (match != old.end()) row = match->second;
            else row.send = succs[a];
          }
          std::erase_if(row.send, [&](const std::string& x) { return !succs[a].count(x); });
          fresh.emplace(r, std::move(row));
        }
        recv[s] = std::move(r);
      }
      w.rows[a] = std::move(fresh);
      std::set<std::string> reached;
      for (const auto& [r, row] : w.rows[a]) reached.insert(row.send.begin(), row.send.end());
      if (!terminal && reached != succs[a]) return std::nullopt;
      for (std::size_t s = 0; s < m.size(); ++s) {
        const Row* row = &w.rows[a].at(recv[s]);
        used[s][a] = row;
        out[s][a] = row->out;
      }
    }
  }
  std::set<std::string> live;
  for (std::size_t t = 1; t < T; ++t) live.insert(w.layers[t].begin(), w.layers[t].end());
  std::erase_if(w.rows, [&](const auto& e) { return !live.count(e.first); });
  std::size_t mismatches = 0;
  for (std::size_t s = 0; s < m.size(); ++s)
    for (int i = 0; i < m.n(); ++i)
      if (out[s].at(w.layers.back()[i]) != m.output(s)[i]) ++mismatches;
  return mismatches;
}

class Annealer {
 public:
  Annealer(const SearchBounds& b, std::uint64_t seed) : b_(b), rng_(seed) {}

  // Returns false when the move does not apply to the current design.
  bool propose(Working& w) {
    switch (std::uniform_int_distribution<int>(0, 5)(rng_)) {
      case 0: return flip(w);
      case 1: return toggle(w);
      case 2: return add_edge(w);
      case 3: return remove_edge(w);
      case 4: return add_node(w);
      default: return remove_node(w);
    }
  }

 private:
  template <class C>
  auto pick(C& c) -> decltype(c.begin()) {
    auto it = c.begin();
    std::advance(it, std::uniform_int_distribution<std::size_t>(0, c.size() - 1)(rng_));
    return it;
  }

  std::vector<std::string> non_initial(const Working& w, bool with_succs) const {
    std::vector<std::string> v;
    for (std::size_t t = 1; t < w.layers.size(); ++t)
      if (!with_succs || t + 1 < w.layers.size()) v.insert(v.end(), w.layers[t].begin(), w.layers[t].end());
    return v;
  }

  bool flip(Working& w) {
    auto nodes = non_initial(w, false);
    auto a = *pick(nodes);
    auto& rows = w.rows[a];
    if (rows.empty() || w.k < 2) return false;
    auto& row = pick(rows)->second;
    row.out = static_cast<Symbol>((row.out + 1 + std::uniform_int_distribution<int>(0, w.k - 2)(rng_)) % w.k);
    return true;
  }

  bool toggle(Working& w) {
    if (b_.full_transmission_only) return false;
    auto nodes = non_initial(w, true);
    if (nodes.empty()) return false;
    auto a = *pick(nodes);
    auto succ = w.succs(a);
    auto& rows = w.rows[a];
    if (succ.empty() || rows.empty()) return false;
    auto& row = pick(rows)->second;
    auto target = *pick(succ);
    if (!row.send.erase(target)) row.send.insert(target);
    return true;
  }

  bool add_edge(Working& w) {
    auto li = w.layer_index();
    std::vector<std::string> targets;
    for (const auto& a : non_initial(w, false))
      if (static_cast<int>(w.preds(a).size()) < b_.max_fan_in) targets.push_back(a);
    if (targets.empty()) return false;
    auto b = *pick(targets);
    std::vector<std::string> sources;
    auto existing = w.preds(b);
    for (const auto& [name, t] : li)
      if (t < li[b] && !existing.count(name)) sources.push_back(name);
    if (sources.empty()) return false;
    auto a = *pick(sources);
    w.edges.emplace(a, b);
    if (li[a] > 0)
      for (auto& [r, row] : w.rows[a]) row.send.insert(b);
    return true;
  }

  bool remove_edge(Working& w) {
    if (w.edges.empty()) return false;
    auto [a, b] = *pick(w.edges);
    w.edges.erase({a, b});
    if (auto it = w.rows.find(a); it != w.rows.end())
      for (auto& [r, row] : it->second) row.send.erase(b);
    return true;
  }

  bool add_node(Working& w) {
    int inner = static_cast<int>(w.layers.size()) - 2;
    std::vector<int> slots;  // >0: join layer t; <=0: new layer before index -t+1
    for (int t = 1; t <= inner; ++t)
      if (static_cast<int>(w.layers[t].size()) < b_.max_width) slots.push_back(t);
    if (static_cast<int>(w.layers.size()) < b_.max_layers && b_.max_width >= 1)
      for (int t = 1; t < static_cast<int>(w.layers.size()); ++t) slots.push_back(-t);
    if (slots.empty()) return false;
    int choice = *pick(slots);
    int t = choice > 0 ? choice : -choice;
    if (choice <= 0) w.layers.insert(w.layers.begin() + t, std::vector<std::string>{});
    std::string name = "h" + std::to_string(++w.fresh);
    while (w.rows.count(name) || std::any_of(w.layers.front().begin(), w.layers.front().end(),
                                             [&](const auto& x) { return x == name; }))
      name = "h" + std::to_string(++w.fresh);
    std::vector<std::string> before, after;
    for (int u = 0; u < t; ++u) before.insert(before.end(), w.layers[u].begin(), w.layers[u].end());
    for (std::size_t u = t + 1; u < w.layers.size(); ++u)
      for (const auto& x : w.layers[u])
        if (static_cast<int>(w.preds(x).size()) < b_.max_fan_in) after.push_back(x);
    if (after.empty()) {
      if (choice <= 0) w.layers.erase(w.layers.begin() + t);
      return false;
    }
    auto p = *pick(before);
    auto q = *pick(after);
    w.layers[t].push_back(name);
    w.edges.emplace(p, name);
    w.edges.emplace(name, q);
    auto li = w.layer_index();
    if (li[p] > 0)
      for (auto& [r, row] : w.rows[p]) row.send.insert(name);
    auto& rows = w.rows[name];
    rows[Recv{}] = Row{0, {q}};
    for (int v = 0; v < w.k; ++v) rows[Recv{{p, static_cast<Symbol>(v)}}] = Row{static_cast<Symbol>(v), {q}};
    return true;
  }

  bool remove_node(Working& w) {
    std::vector<std::string> inner;
    for (std::size_t t = 1; t + 1 < w.layers.size(); ++t) inner.insert(inner.end(), w.layers[t].begin(), w.layers[t].end());
    if (inner.empty()) return false;
    auto a = *pick(inner);
    for (auto& l : w.layers) std::erase(l, a);
    std::erase_if(w.edges, [&](const auto& e) { return e.first == a || e.second == a; });
    w.rows.erase(a);
    for (auto& [node, rows] : w.rows)
      for (auto& [r, row] : rows) row.send.erase(a);
    return true;
  }

  SearchBounds b_;
  std::mt19937_64 rng_;

 public:
  std::mt19937_64& rng() { return rng_; }
};

}  // namespace

SynthesisResult anneal(const Machine& machine, const CostWeights& weights, const SearchBounds& bounds,
                       std::uint64_t seed, const AnnealSchedule& schedule, const SynthesisOptions& options) {
  bounds.check();
  Design trivial = trivial_design(machine);
  CostReport trivial_cost = combined_cost(trivial, machine, weights, options.cp);
  Rational lambda = trivial_cost.combined + 1;

  SynthesisResult result{trivial, trivial_cost, Optimality::Heuristic, 0, seed, machine.domain()};
  int chains = std::max(1, schedule.chains);
  for (int c = 0; c < chains; ++c) {
    Annealer annealer(bounds, seed + static_cast<std::uint64_t>(c));
    Working current = Working::from(trivial);
    Rational current_obj = trivial_cost.combined;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::uint64_t i = 0; i < schedule.iterations; ++i) {
      ++result.explored;
      double frac = schedule.iterations > 1 ? static_cast<double>(i) / static_cast<double>(schedule.iterations - 1) : 0.0;
      double temp = schedule.t_start * std::pow(schedule.t_end / schedule.t_start, frac);
      Working next = current;
      if (!annealer.propose(next)) continue;
      auto mismatches = repair(next, machine);
      if (!mismatches) continue;
      std::optional<Design> design;
      CostReport cost;
      try {
        design = Design::build(next.spec());
        cost = combined_cost(*design, machine, weights, options.cp);
      } catch (const Error&) {
        continue;
      }
      Rational obj = cost.combined + lambda * static_cast<long>(*mismatches);
      double delta = to_double(obj - current_obj);
      if (delta <= 0 || unit(annealer.rng()) < std::exp(-delta / temp)) {
        current = std::move(next);
        current_obj = obj;
      }
      if (*mismatches == 0 && cost.combined < result.best_cost.combined) {
        result.best_design = *design;
        result.best_cost = std::move(cost);
      }
    }
  }
  if (!implements(result.best_design, machine).ok)
    throw std::logic_error("anneal: best design does not implement the machine");
  return result;
}

// ---------------------------------------------------------------------------
// Coding

CodingResult optimal_coding(const AbstractMachine& abstract, int n, Alphabet alphabet, const CostWeights& weights,
                            const SearchBounds& bounds, const SynthesisOptions& options) {
  abstract.check();
  auto codes = all_sequences(n, alphabet);
  std::size_t room = codes.size();
  if (abstract.inputs.size() > room || abstract.outputs.size() > room) {
    // encode reports the overflow with its own diagnostics
    encode(abstract, Coding{}, n, alphabet);
  }
  std::set<std::string> in_labels(abstract.inputs.begin(), abstract.inputs.end());
  bool disjoint = std::none_of(abstract.outputs.begin(), abstract.outputs.end(),
                               [&](const std::string& o) { return in_labels.count(o) > 0; });

  std::optional<CodingResult> best;
  Coding coding;
  std::vector<char> in_used(room, 0), out_used(room, 0);

  std::function<void(std::size_t)> outputs = [&](std::size_t j) {
    if (j == abstract.outputs.size()) {
      auto machine = encode(abstract, coding, n, alphabet);
      auto r = kappa(machine, weights, bounds, options);
      if (!best || r.best_cost.combined < best->result.best_cost.combined) best = CodingResult{coding, std::move(r)};
      return;
    }
    for (std::size_t c = 0; c < room; ++c) {
      if (out_used[c]) continue;
      out_used[c] = 1;
      coding.output_code[abstract.outputs[j]] = codes[c];
      outputs(j + 1);
      out_used[c] = 0;
    }
    coding.output_code.erase(abstract.outputs[j]);
  };
  std::function<void(std::size_t)> inputs = [&](std::size_t j) {
    if (j == abstract.inputs.size()) return outputs(0);
    std::size_t limit = (j == 0 && disjoint) ? 1 : room;
    for (std::size_t c = 0; c < limit; ++c) {
      if (in_used[c]) continue;
      in_used[c] = 1;
      coding.input_code[abstract.inputs[j]] = codes[c];
      inputs(j + 1);
      in_used[c] = 0;
    }
    coding.input_code.erase(abstract.inputs[j]);
  };
  inputs(0);
  if (!best) throw Error(ErrorKind::LengthOverflow, "coding", "no injective coding exists");
  return std::move(*best);
}

}  // namespace decent
