#include "decent/machine.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace decent {

char symbol_char(Symbol s) {
  return s < 10 ? static_cast<char>('0' + s) : static_cast<char>('a' + (s - 10));
}

std::optional<Symbol> symbol_from_char(char c) {
  if (c >= '0' && c <= '9') return static_cast<Symbol>(c - '0');
  if (c >= 'a' && c <= 'z') return static_cast<Symbol>(c - 'a' + 10);
  if (c >= 'A' && c <= 'Z') return static_cast<Symbol>(c - 'A' + 10);
  return std::nullopt;
}

std::string to_string(const Sequence& s) {
  std::string out;
  out.reserve(s.size());
  for (Symbol x : s) out.push_back(symbol_char(x));
  return out;
}

std::optional<Sequence> sequence_from_string(const std::string& text) {
  Sequence s;
  s.reserve(text.size());
  for (char c : text) {
    auto sym = symbol_from_char(c);
    if (!sym) return std::nullopt;
    s.push_back(*sym);
  }
  return s;
}

std::vector<Sequence> all_sequences(int n, Alphabet alphabet) {
  std::vector<Sequence> out;
  Sequence s(static_cast<std::size_t>(n), 0);
  while (true) {
    out.push_back(s);
    int pos = n - 1;
    while (pos >= 0 && s[pos] + 1 == alphabet.size) s[pos--] = 0;
    if (pos < 0) break;
    ++s[pos];
  }
  return out;
}

std::optional<std::size_t> Machine::find(const Sequence& s) const {
  auto it = std::lower_bound(inputs_.begin(), inputs_.end(), s);
  if (it == inputs_.end() || *it != s) return std::nullopt;
  return static_cast<std::size_t>(it - inputs_.begin());
}

const Sequence& Machine::operator()(const Sequence& s) const {
  auto idx = find(s);
  if (!idx) throw Error(ErrorKind::InputNotInDomain, to_string(s), "input is not in the machine domain");
  return outputs_[*idx];
}

Rational Machine::frequency(std::size_t idx) const {
  if (frequencies_) return frequencies_->at(idx);
  return Rational(1, static_cast<long>(inputs_.size()));
}

MachineDescription Machine::describe() const {
  MachineDescription d;
  d.n = n_;
  d.alphabet = alphabet_.size;
  for (std::size_t i = 0; i < inputs_.size(); ++i) d.entries.push_back({inputs_[i], outputs_[i]});
  d.frequencies = frequencies_;
  return d;
}

Machine validate_machine(const MachineDescription& raw) {
  std::vector<Diagnostic> errs;
  auto at = [](std::size_t i, const char* field) {
    return "entries[" + std::to_string(i) + "]." + field;
  };

  if (raw.alphabet < 2 || raw.alphabet > Alphabet::kMaxSize)
    errs.push_back({ErrorKind::SymbolOutOfRange, "alphabet",
                    "alphabet size must be in [2, 36], got " + std::to_string(raw.alphabet)});
  if (raw.n < 1) errs.push_back({ErrorKind::LengthMismatch, "n", "sequence length must be >= 1"});
  if (raw.entries.empty()) errs.push_back({ErrorKind::LengthMismatch, "entries", "domain must be nonempty"});

  auto check_seq = [&](const Sequence& s, std::size_t i, const char* field) {
    if (static_cast<int>(s.size()) != raw.n)
      errs.push_back({ErrorKind::LengthMismatch, at(i, field),
                      "expected length " + std::to_string(raw.n) + ", got " + std::to_string(s.size())});
    for (Symbol x : s)
      if (x >= raw.alphabet) {
        errs.push_back({ErrorKind::SymbolOutOfRange, at(i, field),
                        "symbol " + std::to_string(x) + " >= alphabet size " + std::to_string(raw.alphabet)});
        break;
      }
  };

  std::map<Sequence, std::size_t> first_seen;
  for (std::size_t i = 0; i < raw.entries.size(); ++i) {
    check_seq(raw.entries[i].in, i, "in");
    check_seq(raw.entries[i].out, i, "out");
    auto [it, inserted] = first_seen.emplace(raw.entries[i].in, i);
    if (!inserted)
      errs.push_back({ErrorKind::DuplicateInput, at(i, "in"),
                      "input " + to_string(raw.entries[i].in) + " already defined by entries[" +
                          std::to_string(it->second) + "]"});
  }

  if (raw.frequencies) {
    const auto& fr = *raw.frequencies;
    if (fr.size() != raw.entries.size()) {
      errs.push_back({ErrorKind::BadFrequencies, "freq",
                      "expected " + std::to_string(raw.entries.size()) + " frequencies, got " +
                          std::to_string(fr.size())});
    } else {
      Rational sum = 0;
      for (std::size_t i = 0; i < fr.size(); ++i) {
        if (fr[i] <= 0)
          errs.push_back({ErrorKind::BadFrequencies, "freq[" + std::to_string(i) + "]",
                          "frequency must be positive"});
        sum += fr[i];
      }
      if (abs(sum - 1) > Rational(1, 1000000000))
        errs.push_back({ErrorKind::BadFrequencies, "freq", "frequencies sum to " + to_fraction_string(sum)});
    }
  }

  if (!errs.empty()) throw Error(std::move(errs));

  std::vector<std::size_t> order(raw.entries.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return raw.entries[a].in < raw.entries[b].in; });

  Machine m;
  m.n_ = raw.n;
  m.alphabet_ = Alphabet{raw.alphabet};
  if (raw.frequencies) m.frequencies_.emplace();
  for (auto i : order) {
    m.inputs_.push_back(raw.entries[i].in);
    m.outputs_.push_back(raw.entries[i].out);
    if (raw.frequencies) m.frequencies_->push_back((*raw.frequencies)[i]);
  }
  return m;
}

std::map<Sequence, Symbol> component(const Machine& machine, int i) {
  if (i < 1 || i > machine.n())
    throw Error(ErrorKind::IndexOutOfRange, "i=" + std::to_string(i),
                "component index must be in [1, " + std::to_string(machine.n()) + "]");
  std::map<Sequence, Symbol> out;
  for (std::size_t j = 0; j < machine.size(); ++j) out.emplace(machine.input(j), machine.output(j)[i - 1]);
  return out;
}

void AbstractMachine::check() const {
  std::vector<Diagnostic> errs;
  std::set<std::string> in_set(inputs.begin(), inputs.end());
  std::set<std::string> out_set(outputs.begin(), outputs.end());
  if (inputs.empty()) errs.push_back({ErrorKind::ShapeMismatch, "inputs", "no inputs"});
  if (in_set.size() != inputs.size()) errs.push_back({ErrorKind::ShapeMismatch, "inputs", "repeated label"});
  if (out_set.size() != outputs.size()) errs.push_back({ErrorKind::ShapeMismatch, "outputs", "repeated label"});
  for (const auto& a : inputs) {
    auto it = table.find(a);
    if (it == table.end())
      errs.push_back({ErrorKind::ShapeMismatch, a, "no table entry for input"});
    else if (!out_set.count(it->second))
      errs.push_back({ErrorKind::ShapeMismatch, a, "maps to unknown output " + it->second});
  }
  for (const auto& [a, b] : table)
    if (!in_set.count(a)) errs.push_back({ErrorKind::ShapeMismatch, a, "table entry for unknown input"});
  if (!errs.empty()) throw Error(std::move(errs));
}

namespace {

void check_code(const std::vector<std::string>& labels, const std::map<std::string, Sequence>& code,
                const char* which, int n, Alphabet alphabet) {
  std::map<Sequence, std::string> image;
  for (const auto& label : labels) {
    auto it = code.find(label);
    if (it == code.end())
      throw Error(ErrorKind::NonInjectiveCoding, std::string(which) + "." + label, "label has no code");
    const auto& seq = it->second;
    if (static_cast<int>(seq.size()) != n)
      throw Error(ErrorKind::LengthMismatch, std::string(which) + "." + label,
                  "code length " + std::to_string(seq.size()) + " != n=" + std::to_string(n));
    for (Symbol x : seq)
      if (x >= alphabet.size)
        throw Error(ErrorKind::SymbolOutOfRange, std::string(which) + "." + label, to_string(seq));
    auto [pos, inserted] = image.emplace(seq, label);
    if (!inserted)
      throw Error(ErrorKind::NonInjectiveCoding, std::string(which) + "." + label,
                  "code " + to_string(seq) + " also used by " + pos->second);
  }
}

}  // namespace

Machine encode(const AbstractMachine& abstract, const Coding& coding, int n, Alphabet alphabet) {
  abstract.check();
  double capacity = 1;
  for (int i = 0; i < n; ++i) capacity *= alphabet.size;
  if (capacity < static_cast<double>(abstract.inputs.size()) ||
      capacity < static_cast<double>(abstract.outputs.size()))
    throw Error(ErrorKind::LengthOverflow, "n=" + std::to_string(n),
                std::to_string(alphabet.size) + "^" + std::to_string(n) + " sequences cannot code " +
                    std::to_string(std::max(abstract.inputs.size(), abstract.outputs.size())) + " labels");
  check_code(abstract.inputs, coding.input_code, "input", n, alphabet);
  check_code(abstract.outputs, coding.output_code, "output", n, alphabet);

  MachineDescription d;
  d.n = n;
  d.alphabet = alphabet.size;
  for (const auto& a : abstract.inputs)
    d.entries.push_back({coding.input_code.at(a), coding.output_code.at(abstract.table.at(a))});
  return validate_machine(d);
}

AbstractMachine decode(const Machine& machine, const AbstractMachine& shape, const Coding& coding) {
  std::map<Sequence, std::string> in_label, out_label;
  for (const auto& a : shape.inputs) in_label.emplace(coding.input_code.at(a), a);
  for (const auto& b : shape.outputs) out_label.emplace(coding.output_code.at(b), b);
  AbstractMachine out;
  out.inputs = shape.inputs;
  out.outputs = shape.outputs;
  for (std::size_t i = 0; i < machine.size(); ++i) {
    auto a = in_label.find(machine.input(i));
    auto b = out_label.find(machine.output(i));
    if (a == in_label.end() || b == out_label.end())
      throw Error(ErrorKind::ShapeMismatch, to_string(machine.input(i)), "sequence has no label under coding");
    out.table.emplace(a->second, b->second);
  }
  return out;
}

}  // namespace decent
