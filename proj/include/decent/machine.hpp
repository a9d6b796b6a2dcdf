#pragma once

#include "decent/error.hpp"
#include "decent/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace decent {

using Symbol = std::uint8_t;
using Sequence = std::vector<Symbol>;

/// Symbols are 0..size-1. Sizes above 36 are rejected because sequences are
/// written as base-36 digit strings.
struct Alphabet {
  int size = 2;
  static constexpr int kMaxSize = 36;
  friend bool operator==(const Alphabet&, const Alphabet&) = default;
};

char symbol_char(Symbol s);
std::optional<Symbol> symbol_from_char(char c);
std::string to_string(const Sequence& s);
/// Parses a digit string; does not range-check against an alphabet.
std::optional<Sequence> sequence_from_string(const std::string& text);

/// All k^n sequences in lexicographic order.
std::vector<Sequence> all_sequences(int n, Alphabet alphabet);

struct MachineEntry {
  Sequence in;
  Sequence out;
};

/// Unvalidated machine description as read from a file or built in code.
struct MachineDescription {
  int n = 0;
  int alphabet = 2;
  std::vector<MachineEntry> entries;
  std::optional<std::vector<Rational>> frequencies;
};

/// A validated finite machine f: D -> S^n. Entries are kept sorted by input,
/// so two machines with the same table compare equal regardless of the order
/// they were described in.
class Machine {
 public:
  int n() const noexcept { return n_; }
  Alphabet alphabet() const noexcept { return alphabet_; }
  std::size_t size() const noexcept { return inputs_.size(); }

  const std::vector<Sequence>& domain() const noexcept { return inputs_; }
  const std::vector<Sequence>& outputs() const noexcept { return outputs_; }
  const Sequence& input(std::size_t idx) const { return inputs_.at(idx); }
  const Sequence& output(std::size_t idx) const { return outputs_.at(idx); }

  std::optional<std::size_t> find(const Sequence& s) const;
  bool contains(const Sequence& s) const { return find(s).has_value(); }
  /// f(s); throws InputNotInDomain.
  const Sequence& operator()(const Sequence& s) const;

  bool has_frequencies() const noexcept { return frequencies_.has_value(); }
  /// pi_s, uniform 1/|D| when no frequencies were supplied.
  Rational frequency(std::size_t idx) const;

  MachineDescription describe() const;

  friend bool operator==(const Machine&, const Machine&) = default;

 private:
  friend Machine validate_machine(const MachineDescription&);

  int n_ = 0;
  Alphabet alphabet_;
  std::vector<Sequence> inputs_;
  std::vector<Sequence> outputs_;
  std::optional<std::vector<Rational>> frequencies_;
};

/// Checks every invariant and throws an Error listing all violations
/// (LengthMismatch, SymbolOutOfRange, DuplicateInput, BadFrequencies).
Machine validate_machine(const MachineDescription& raw);

/// f_i for 1 <= i <= n.
std::map<Sequence, Symbol> component(const Machine& machine, int i);

/// Machine whose domain is given and whose table is computed by `f`.
template <typename F>
Machine tabulate(int n, Alphabet alphabet, const std::vector<Sequence>& domain, F&& f) {
  MachineDescription d;
  d.n = n;
  d.alphabet = alphabet.size;
  for (const auto& s : domain) d.entries.push_back({s, f(s)});
  return validate_machine(d);
}

/// Machine over opaque labels.
struct AbstractMachine {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::map<std::string, std::string> table;

  /// Throws ShapeMismatch when labels repeat or the table is not a total
  /// map from inputs into outputs.
  void check() const;
  friend bool operator==(const AbstractMachine&, const AbstractMachine&) = default;
};

struct Coding {
  std::map<std::string, Sequence> input_code;
  std::map<std::string, Sequence> output_code;
  friend bool operator==(const Coding&, const Coding&) = default;
};

Machine encode(const AbstractMachine& abstract, const Coding& coding, int n, Alphabet alphabet = {});

/// Inverse of encode for the same coding.
AbstractMachine decode(const Machine& machine, const AbstractMachine& shape, const Coding& coding);

}  // namespace decent
