#include "decent/io.hpp"

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "json.hpp"

namespace decent {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& message) {
  throw Error(ErrorKind::ParseError, where, message);
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 0;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 0;
      } else {
        ++column;
      }
    }
    std::string what = e.what();
    auto col = what.find("column");
    auto colon = what.find(": ", col == std::string::npos ? 0 : col);
    fail("line " + std::to_string(line) + ", column " + std::to_string(std::max<std::size_t>(column, 1)),
         colon == std::string::npos ? what : what.substr(colon + 2));
  }
}

void only_keys(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
  if (!obj.is_object()) fail(where.empty() ? "top level" : where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) fail(where.empty() ? key : where + "." + key, "unknown field");
  }
}

std::string path(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }

std::string index(const std::string& where, std::size_t i) { return where + "[" + std::to_string(i) + "]"; }

const json& field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path(where, key), "missing field");
  return *it;
}

long as_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where, "expected an integer");
  return v.get<long>();
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "expected a string");
  return v.get<std::string>();
}

const json& as_array(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array");
  return v;
}

Rational as_rational(const json& v, const std::string& where) {
  std::string text;
  if (v.is_number()) text = v.dump();
  else if (v.is_string()) text = v.get<std::string>();
  else fail(where, "expected a number or a \"p/q\" string");
  auto r = parse_rational(text);
  if (!r) fail(where, "cannot read '" + text + "' as a rational");
  return *r;
}

Sequence as_sequence(const json& v, const std::string& where) {
  auto text = as_string(v, where);
  auto s = sequence_from_string(text);
  if (!s) fail(where, "'" + text + "' is not a string of base-36 digits");
  return *s;
}

Symbol as_symbol(const json& v, const std::string& where) {
  long x = as_int(v, where);
  if (x < 0 || x >= Alphabet::kMaxSize) throw Error(ErrorKind::SymbolOutOfRange, where, "symbol " + std::to_string(x));
  return static_cast<Symbol>(x);
}

// Exact decimals with few digits stay numbers; everything else is "p/q".
ojson rational_json(const Rational& r) {
  std::string decimal;
  if (to_exact_decimal(r, decimal)) {
    std::size_t digits = std::count_if(decimal.begin(), decimal.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    if (digits <= 15) return ojson::parse(decimal);
  }
  return to_fraction_string(r);
}

std::string compact(const ojson& j) {
  if (j.is_array()) {
    std::string out = "[";
    for (std::size_t i = 0; i < j.size(); ++i) out += (i ? ", " : "") + compact(j[i]);
    return out + "]";
  }
  if (j.is_object()) {
    std::string out = "{";
    bool first = true;
    for (const auto& [k, v] : j.items()) {
      out += (first ? "" : ", ") + ojson(k).dump() + ": " + compact(v);
      first = false;
    }
    return out + "}";
  }
  return j.dump();
}

// Indented, but containers that fit on a line stay on one line.
void pretty(const ojson& j, std::size_t indent, std::string& out) {
  std::string flat = compact(j);
  if (!j.is_structured() || j.empty() || indent + flat.size() <= 80) {
    out += flat;
    return;
  }
  std::string pad(indent + 2, ' ');
  out += j.is_array() ? "[\n" : "{\n";
  std::size_t i = 0;
  for (const auto& [k, v] : j.items()) {
    out += pad;
    if (j.is_object()) out += ojson(k).dump() + ": ";
    pretty(v, indent + 2, out);
    out += ++i < j.size() ? ",\n" : "\n";
  }
  out += std::string(indent, ' ') + (j.is_array() ? "]" : "}");
}

std::string dump(const ojson& j) {
  std::string out;
  pretty(j, 0, out);
  return out + "\n";
}

}  // namespace

// ---------------------------------------------------------------------------

Machine parse_machine(const std::string& text) {
  json j = parse_json(text);
  only_keys(j, {"n", "alphabet", "entries", "frequencies"}, "");
  MachineDescription d;
  d.n = static_cast<int>(as_int(field(j, "n", ""), "n"));
  d.alphabet = j.contains("alphabet") ? static_cast<int>(as_int(j["alphabet"], "alphabet")) : 2;
  const auto& entries = as_array(field(j, "entries", ""), "entries");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto where = index("entries", i);
    only_keys(entries[i], {"in", "out"}, where);
    d.entries.push_back({as_sequence(field(entries[i], "in", where), where + ".in"),
                         as_sequence(field(entries[i], "out", where), where + ".out")});
  }
  if (j.contains("frequencies")) {
    const auto& f = as_array(j["frequencies"], "frequencies");
    d.frequencies.emplace();
    for (std::size_t i = 0; i < f.size(); ++i) d.frequencies->push_back(as_rational(f[i], index("frequencies", i)));
  }
  return validate_machine(d);
}

std::string serialize_machine(const Machine& machine) {
  ojson j;
  j["n"] = machine.n();
  j["alphabet"] = machine.alphabet().size;
  j["entries"] = ojson::array();
  for (std::size_t i = 0; i < machine.size(); ++i)
    j["entries"].push_back(ojson{{"in", to_string(machine.input(i))}, {"out", to_string(machine.output(i))}});
  if (machine.has_frequencies()) {
    j["frequencies"] = ojson::array();
    for (std::size_t i = 0; i < machine.size(); ++i) j["frequencies"].push_back(rational_json(machine.frequency(i)));
  }
  return dump(j);
}

Design parse_design(const std::string& text) {
  json j = parse_json(text);
  only_keys(j, {"alphabet", "layers", "edges", "behavior"}, "");
  DesignSpec spec;
  spec.alphabet = j.contains("alphabet") ? static_cast<int>(as_int(j["alphabet"], "alphabet")) : 2;
  const auto& layers = as_array(field(j, "layers", ""), "layers");
  for (std::size_t t = 0; t < layers.size(); ++t) {
    const auto& layer = as_array(layers[t], index("layers", t));
    spec.layers.emplace_back();
    for (std::size_t i = 0; i < layer.size(); ++i)
      spec.layers.back().push_back(as_string(layer[i], index(index("layers", t), i)));
  }
  if (j.contains("edges")) {
    const auto& edges = as_array(j["edges"], "edges");
    for (std::size_t e = 0; e < edges.size(); ++e) {
      auto where = index("edges", e);
      if (!edges[e].is_array() || edges[e].size() != 2) fail(where, "expected [from, to]");
      spec.edges.emplace_back(as_string(edges[e][0], where + "[0]"), as_string(edges[e][1], where + "[1]"));
    }
  }
  if (j.contains("behavior")) {
    const auto& behavior = j["behavior"];
    if (!behavior.is_object()) fail("behavior", "expected an object keyed by node id");
    for (const auto& [node, rows] : behavior.items()) {
      auto where = "behavior." + node;
      as_array(rows, where);
      auto& out = spec.behavior[node];
      for (std::size_t r = 0; r < rows.size(); ++r) {
        auto rw = index(where, r);
        only_keys(rows[r], {"recv", "out", "send"}, rw);
        BehaviorRow row;
        if (rows[r].contains("recv")) {
          const auto& recv = rows[r]["recv"];
          if (!recv.is_object()) fail(rw + ".recv", "expected an object {predecessor: symbol}");
          for (const auto& [pred, sym] : recv.items()) row.recv[pred] = as_symbol(sym, rw + ".recv." + pred);
        }
        row.out = as_symbol(field(rows[r], "out", rw), rw + ".out");
        if (rows[r].contains("send")) {
          const auto& send = as_array(rows[r]["send"], rw + ".send");
          for (std::size_t s = 0; s < send.size(); ++s) row.send.push_back(as_string(send[s], index(rw + ".send", s)));
        }
        out.push_back(std::move(row));
      }
    }
  }
  try {
    return Design::build(spec);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::MalformedDesign) throw;
    std::vector<Diagnostic> diags = e.diagnostics();
    for (auto& d : diags)
      if (d.kind == ErrorKind::MalformedDesign) d.kind = ErrorKind::ParseError;
    throw Error(std::move(diags));
  }
}

std::string serialize_design(const Design& design) {
  auto spec = design.to_spec();
  ojson j;
  j["alphabet"] = spec.alphabet;
  j["layers"] = spec.layers;
  j["edges"] = ojson::array();
  for (const auto& [a, b] : spec.edges) j["edges"].push_back(ojson::array({a, b}));
  j["behavior"] = ojson::object();
  // node order follows the layers
  for (const auto& layer : spec.layers)
    for (const auto& node : layer) {
      auto it = spec.behavior.find(node);
      if (it == spec.behavior.end()) continue;
      auto& rows = j["behavior"][node] = ojson::array();
      for (const auto& row : it->second) {
        ojson recv = ojson::object();
        for (const auto& [p, s] : row.recv) recv[p] = static_cast<int>(s);
        rows.push_back(ojson{{"recv", recv}, {"out", static_cast<int>(row.out)}, {"send", row.send}});
      }
    }
  return dump(j);
}

NormalFormGame parse_game(const std::string& text) {
  json j = parse_json(text);
  only_keys(j, {"players", "strategies", "payoffs", "lags"}, "");
  NormalFormGame g;
  long players = as_int(field(j, "players", ""), "players");
  const auto& strategies = as_array(field(j, "strategies", ""), "strategies");
  for (std::size_t i = 0; i < strategies.size(); ++i)
    g.strategies.push_back(static_cast<int>(as_int(strategies[i], index("strategies", i))));
  if (static_cast<long>(g.strategies.size()) != players)
    throw Error(ErrorKind::BadGame, "strategies", "expected one strategy count per player");
  const auto& payoffs = as_array(field(j, "payoffs", ""), "payoffs");
  for (std::size_t i = 0; i < payoffs.size(); ++i) {
    const auto& table = as_array(payoffs[i], index("payoffs", i));
    g.payoffs.emplace_back();
    for (std::size_t p = 0; p < table.size(); ++p)
      g.payoffs.back().push_back(as_rational(table[p], index(index("payoffs", i), p)));
  }
  if (j.contains("lags")) {
    const auto& lags = as_array(j["lags"], "lags");
    for (std::size_t i = 0; i < lags.size(); ++i) {
      const auto& row = as_array(lags[i], index("lags", i));
      g.lags.emplace_back();
      for (std::size_t c = 0; c < row.size(); ++c)
        g.lags.back().push_back(static_cast<int>(as_int(row[c], index(index("lags", i), c))));
    }
  }
  g.check();
  return g;
}

std::string serialize_game(const NormalFormGame& game) {
  ojson j;
  j["players"] = game.players();
  j["strategies"] = game.strategies;
  j["payoffs"] = ojson::array();
  for (const auto& table : game.payoffs) {
    ojson row = ojson::array();
    for (const auto& u : table) row.push_back(rational_json(u));
    j["payoffs"].push_back(std::move(row));
  }
  if (!game.lags.empty()) j["lags"] = game.lags;
  return dump(j);
}

FileKind detect_kind(const std::string& text) {
  json j = parse_json(text);
  if (!j.is_object()) fail("top level", "expected an object");
  if (j.contains("entries")) return FileKind::Machine;
  if (j.contains("layers")) return FileKind::Design;
  if (j.contains("payoffs")) return FileKind::Game;
  fail("top level", "not a machine, design or game file");
}

std::string read_file(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(file, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out || !(out << text)) fail(file, "cannot write file");
}

// ---------------------------------------------------------------------------

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string export_dot(const Design& design, const std::optional<Sequence>& input) {
  std::optional<Trace> trace;
  if (input) trace = simulate(design, *input);
  std::ostringstream out;
  out << "digraph design {\n  rankdir=LR;\n  node [shape=circle];\n";
  for (int t = 0; t < design.layer_count(); ++t) {
    out << "  { rank=same;";
    for (NodeIndex a : design.layer(t)) out << " " << quoted(design.name(a)) << ";";
    out << " }\n";
  }
  if (trace)
    for (NodeIndex a = 0; a < static_cast<NodeIndex>(design.node_count()); ++a) {
      auto label = quoted(design.name(a));
      label.insert(label.size() - 1, std::string("\\n= ") + symbol_char(trace->outputs[a]));
      out << "  " << quoted(design.name(a)) << " [label=" << label << "];\n";
    }
  for (const auto& e : design.edges()) {
    out << "  " << quoted(design.name(e.first)) << " -> " << quoted(design.name(e.second));
    if (trace) {
      bool active = std::binary_search(trace->active_edges.begin(), trace->active_edges.end(), e);
      out << " [style=" << (active ? "solid" : "dashed") << "]";
    }
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

std::string format_report(const CostReport& report) {
  std::ostringstream out;
  out << "fixed cost        " << report.fixed << "\n";
  out << "variable cost     " << to_display_string(report.variable) << "\n";
  out << "programming cost  " << to_display_string(report.programming) << "\n";
  out << "weights           " << to_fraction_string(report.weights.x) << ", " << to_fraction_string(report.weights.y)
      << ", " << to_fraction_string(report.weights.z) << "\n";
  out << "combined cost     " << to_display_string(report.combined) << "\n";
  if (!report.per_node.empty()) {
    std::size_t width = 4;
    for (const auto& line : report.per_node) width = std::max(width, line.node.size());
    out << "\n" << std::left << std::setw(static_cast<int>(width) + 2) << "node" << "fan-in  inspections  policy\n";
    for (const auto& line : report.per_node) {
      out << std::left << std::setw(static_cast<int>(width) + 2) << line.node << std::setw(8) << line.in_degree
          << std::setw(13) << line.programming << (line.policy.exact ? "exact" : "greedy") << ", depth "
          << line.policy.depth() << "\n";
    }
  }
  return out.str();
}

std::string format_trace(const Design& design, const Trace& trace) {
  std::ostringstream out;
  for (NodeIndex a = 0; a < static_cast<NodeIndex>(design.node_count()); ++a) {
    out << design.name(a) << ": ";
    if (!design.is_initial(a)) out << format_input(design, a, trace.received[a]) << " -> ";
    out << symbol_char(trace.outputs[a]) << "\n";
  }
  out << "active edges (" << trace.sigma() << "):";
  for (const auto& [a, b] : trace.active_edges) out << " " << design.name(a) << "->" << design.name(b);
  out << "\noutput " << to_string(trace.terminal_outputs) << "\n";
  return out.str();
}

std::string format_validation(const ValidationReport& report) {
  std::ostringstream out;
  for (const auto& d : report.errors) out << "error: " << format(d) << "\n";
  for (const auto& d : report.warnings) out << "warning: " << format(d) << "\n";
  if (report.ok()) out << "ok\n";
  return out.str();
}

}  // namespace decent
