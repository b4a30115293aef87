#include "mclink/ternary.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace mclink {

char to_char(Ternary v) {
  switch (v) {
    case Ternary::Zero: return '0';
    case Ternary::One: return '1';
    case Ternary::M: break;
  }
  return 'x';
}

Ternary ternary_from_char(char c) {
  switch (c) {
    case '0': return Ternary::Zero;
    case '1': return Ternary::One;
    case 'x':
    case 'X':
    case 'M': return Ternary::M;
    default: break;
  }
  throw std::invalid_argument(std::string("not a ternary level: '") + c + "'");
}

std::string_view to_string(Ternary v) {
  switch (v) {
    case Ternary::Zero: return "0";
    case Ternary::One: return "1";
    case Ternary::M: break;
  }
  return "M";
}

TruthTable::TruthTable(int arity, std::uint16_t rows) : arity_(arity), rows_(rows) {
  if (arity < 0 || arity > kMaxArity) {
    throw std::invalid_argument("truth table arity must be in [0, 4]");
  }
  if (arity < kMaxArity) {
    rows_ &= static_cast<std::uint16_t>((1u << (1u << arity)) - 1u);
  }
}

TruthTable TruthTable::from_function(int arity, const std::function<bool(std::span<const bool>)>& f) {
  if (arity < 0 || arity > kMaxArity) {
    throw std::invalid_argument("truth table arity must be in [0, 4]");
  }
  std::uint16_t rows = 0;
  std::array<bool, kMaxArity> in{};
  for (unsigned row = 0; row < (1u << arity); ++row) {
    for (int i = 0; i < arity; ++i) in[i] = (row >> i) & 1u;
    if (f(std::span<const bool>(in.data(), arity))) rows |= static_cast<std::uint16_t>(1u << row);
  }
  return TruthTable(arity, rows);
}

namespace gates {
TruthTable not_gate() { return TruthTable(1, 0b01); }
TruthTable xor2() { return TruthTable(2, 0b0110); }
TruthTable and2() { return TruthTable(2, 0b1000); }
TruthTable or2() { return TruthTable(2, 0b1110); }
TruthTable mux2() {
  return TruthTable::from_function(3, [](std::span<const bool> in) { return in[0] ? in[2] : in[1]; });
}
}  // namespace gates

Ternary gate_closure(const TruthTable& table, std::span<const Ternary> inputs) {
  if (static_cast<int>(inputs.size()) != table.arity()) {
    throw std::invalid_argument("gate_closure: truth table arity " + std::to_string(table.arity()) +
                                " does not match " + std::to_string(inputs.size()) + " inputs");
  }
  // Stable inputs pin their bit; M inputs are free. Walk all rows matching the pins.
  unsigned fixed_mask = 0;
  unsigned fixed_bits = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i] == Ternary::M) continue;
    fixed_mask |= 1u << i;
    if (inputs[i] == Ternary::One) fixed_bits |= 1u << i;
  }
  bool seen_zero = false;
  bool seen_one = false;
  for (unsigned row = 0; row < (1u << table.arity()); ++row) {
    if ((row & fixed_mask) != fixed_bits) continue;
    (table.eval(row) ? seen_one : seen_zero) = true;
    if (seen_zero && seen_one) return Ternary::M;
  }
  return seen_one ? Ternary::One : Ternary::Zero;
}

Ternary gate_closure(const TruthTable& table, std::initializer_list<Ternary> inputs) {
  return gate_closure(table, std::span<const Ternary>(inputs.begin(), inputs.size()));
}

}  // namespace mclink
