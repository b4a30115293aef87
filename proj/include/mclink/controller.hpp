#pragma once

#include <cstdint>
#include <optional>

#include "mclink/analysis.hpp"
#include "mclink/flipflop.hpp"
#include "mclink/link_buffer.hpp"
#include "mclink/ternary.hpp"
#include "mclink/units.hpp"

namespace mclink {

struct ControllerOutputs {
  Ternary md_snd = Ternary::M;
  Ternary md_rcv = Ternary::M;
  friend bool operator==(const ControllerOutputs&, const ControllerOutputs&) = default;
};

/// Abstract threshold controller: the pair it forces, or nullopt when the
/// outputs are unconstrained (|c_s - c_r| < T).
std::optional<ControllerOutputs> cont_th_reference(double c_s, double c_r, double threshold);

/// (receiver_address + n/2) mod n.
std::int64_t sampled_cell_index(std::int64_t receiver_address, std::int64_t n);

/// Controller timing derived from the link and the ffs flip-flop.
struct DerivedTiming {
  double t_ctr_ps = 0.0;
  /// Clock-difference threshold the controller realizes, cycles.
  double threshold = 0.0;
  /// Phase of the ffs clock relative to clk_rcv, cycles.
  double sample_offset = 0.0;
};

/// The ffs setup/hold window widens the sender's access window as seen by
/// the sampler: tau_eff = tau_s + setup + hold. The threshold is
/// f+ tau_eff / 2 and the sampling edge sits at f+ (tau_s + setup - hold) / 2.
DerivedTiming derive_timing(const LinkParams& p, const FlipFlopTiming& ffs);
/// Copy of p with tau_s widened by the ffs setup and hold times.
LinkParams effective_params(const LinkParams& p, const FlipFlopTiming& ffs);

struct ClockedThConfig {
  std::int64_t n = 2;
  Femtos tau_max = from_ps(50.0);
  FlipFlopTiming ffa_timing{};
  FlipFlopTiming ffs_timing{};
  double sample_offset = 0.0;
  /// Two-cell circuit with a one-bit ffa and a ternary MUX. Needs n == 2.
  bool gate_level = false;
  Ternary ffs_initial = Ternary::M;
};

/// Clocked threshold controller: ffa advances the sample address on falling
/// receiver edges, ffs samples the addressed flag on the phase-shifted
/// rising edge, md_rcv = ffs and md_snd = NOT ffs after tau_max.
class ClockedTh {
 public:
  /// c_r0 is the receiver clock at start; ffa points at the cell of the
  /// first sample taken before the next falling edge.
  ClockedTh(const ClockedThConfig& cfg, double c_r0);

  /// Falling edge of clk_rcv at time t.
  void on_falling_edge(Femtos t);

  /// ffs clock edge at e. Returns true if the mode outputs go M at e.
  bool on_sample(const LinkBuffer& buf, Femtos e);
  /// Settles the pending latch once the hold window has passed; call at
  /// e + hold. Returns true if the mode outputs go M now.
  bool resolve(const LinkBuffer& buf);
  /// Makes the latched value visible on the mode outputs (at e + tau_max).
  /// Returns true if the outputs changed.
  bool publish();

  ControllerOutputs outputs() const { return outputs_; }
  Ternary ffs_stored() const { return ffs_.stored; }
  /// Current sample address; M only if a one-bit ffa went metastable.
  std::optional<std::int64_t> address(Femtos t) const;
  Ternary ffa_bit(Femtos t) const { return ffa_.output(t); }
  bool ffa_metastable() const { return ffa_metastable_; }
  const ClockedThConfig& config() const { return cfg_; }
  std::optional<Femtos> pending_edge() const { return pending_ ? std::optional<Femtos>(pending_->edge) : std::nullopt; }

 private:
  Ternary mux_output(const LinkBuffer& buf, Femtos t) const;
  Femtos mux_last_change(const LinkBuffer& buf, Femtos t) const;
  void set_outputs(Ternary ffs_value);

  struct Pending {
    Femtos edge;
    Ternary d;
    bool md_went_m;
  };

  ClockedThConfig cfg_;
  FlipFlop ffa_;
  std::int64_t counter_ = 0;
  Femtos counter_changed_ = Femtos::min();
  FlipFlop ffs_;
  std::optional<Pending> pending_;
  ControllerOutputs outputs_{};
  bool ffa_metastable_ = false;
};

}  // namespace mclink
