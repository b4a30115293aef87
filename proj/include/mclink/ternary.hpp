#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string_view>

namespace mclink {

/// Signal level in {0, M, 1}. M stands for "potentially metastable or in
/// transition" and is never coerced to a binary value implicitly.
enum class Ternary : std::uint8_t { Zero, M, One };

constexpr Ternary from_bool(bool b) { return b ? Ternary::One : Ternary::Zero; }
constexpr bool is_stable(Ternary v) { return v != Ternary::M; }

/// '0', 'x', '1' (the CSV/VCD encoding).
char to_char(Ternary v);
Ternary ternary_from_char(char c);
std::string_view to_string(Ternary v);

/// Set of binary values a ternary level may resolve to.
class ResolutionSet {
 public:
  constexpr ResolutionSet(bool zero, bool one) : zero_(zero), one_(one) {}
  constexpr bool contains(bool b) const { return b ? one_ : zero_; }
  constexpr int size() const { return int(zero_) + int(one_); }
  friend constexpr bool operator==(ResolutionSet, ResolutionSet) = default;

 private:
  bool zero_;
  bool one_;
};

constexpr ResolutionSet resolutions(Ternary v) {
  switch (v) {
    case Ternary::Zero: return {true, false};
    case Ternary::One: return {false, true};
    case Ternary::M: break;
  }
  return {true, true};
}

/// Boolean function of up to four inputs stored as a packed truth table.
/// Row index bit i is the value of input i.
class TruthTable {
 public:
  static constexpr int kMaxArity = 4;

  TruthTable(int arity, std::uint16_t rows);
  static TruthTable from_function(int arity, const std::function<bool(std::span<const bool>)>& f);

  int arity() const { return arity_; }
  bool eval(unsigned row) const { return (rows_ >> row) & 1u; }

 private:
  int arity_;
  std::uint16_t rows_;
};

namespace gates {
TruthTable not_gate();
TruthTable xor2();
TruthTable and2();
TruthTable or2();
/// Inputs (sel, in0, in1): sel ? in1 : in0.
TruthTable mux2();
}  // namespace gates

/// Worst-case (metastable-closure) evaluation: the output is b iff every
/// binary resolution of the inputs yields b; otherwise M.
/// Throws std::invalid_argument on arity mismatch.
Ternary gate_closure(const TruthTable& table, std::span<const Ternary> inputs);
Ternary gate_closure(const TruthTable& table, std::initializer_list<Ternary> inputs);

}  // namespace mclink
