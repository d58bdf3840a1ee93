#pragma once

#include "purify/physics.hpp"
#include "purify/sde.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace purify {

enum class ProtocolKind { none, ideal_I, ideal_II, practical_I, practical_II };

std::string_view to_string(ProtocolKind kind);

/// Accepts the CLI spellings none, ideal1, ideal2, practical1, practical2.
std::optional<ProtocolKind> parse_protocol(std::string_view name);

struct ProtocolSpec {
  ProtocolKind kind = ProtocolKind::none;
  double z_limit = 0.333;
  double n_g_lock = 0.70;
  double delay_phase_deg = 0.0;
  int peak_window = 1;

  /// Throws std::invalid_argument on out-of-range knobs for the chosen kind.
  void validate() const;
};

enum class ControllerMode { idle, delaying, pulsing, locked };

struct ControllerState {
  ControllerMode mode = ControllerMode::idle;
  std::optional<PulsePlan> pulse;
  long steps_remaining = 0;
  long pulse_steps = 0;
  double last_step_fraction = 1.0;  ///< fraction of the final pulse step under bias
  double previous_abs_z = 0.0;
  int non_increasing_steps = 0;
};

enum class ControllerEvent { none, delay_start, pulse_start, pulse_end, lock };

std::string_view to_string(ControllerEvent event);

struct ControlDecision {
  ControlOutput output;
  ControllerState next;
  ControllerEvent event = ControllerEvent::none;
};

/// No feedback: the bias stays at the degeneracy point, leaving only the
/// Josephson x rotation.
inline double control_none(const BlochState& /*state*/, double /*t*/) { return 0.5; }

/// Instantaneous rotation onto the plane orthogonal to the measurement axis: (r, 0, 0).
BlochState project_ideal_I(const BlochState& state);

/// Instantaneous rotation onto the measurement axis: (0, 0, sign(z) r), +z at z = 0.
BlochState project_ideal_II(const BlochState& state);

/// Threshold-triggered pi pulses that return the Bloch vector to the x axis.
///
/// The pulse is planned from the state at the trigger step using the actual
/// |z| and Bloch length. A non-zero `delay_phase_deg` holds that plan for
/// the given fraction of a Josephson period before applying it.
ControlDecision control_practical_I(const BlochState& state, const ControllerState& ctrl,
                                    const ProtocolSpec& spec, const DeviceParams& params,
                                    double dt);

/// Idle until |z| has passed z_limit and stopped growing, then hold n_g_lock forever.
ControlDecision control_practical_II(const BlochState& state, const ControllerState& ctrl,
                                     const ProtocolSpec& spec);

/// Feedback loop owned by one trajectory.
class Controller {
 public:
  Controller(const ProtocolSpec& spec, const DeviceParams& params, double dt);

  /// Bias for the step that starts from `state`.
  ControlOutput command(const BlochState& state);

  /// Measurement update for the step; ideal I uses its closed-loop form.
  StepOutcome evolve(Stepper& stepper, const BlochState& state, const ControlOutput& out,
                     double dW) const;

  /// Instantaneous correction applied after each step (ideal protocols only).
  BlochState correct(const BlochState& state) const;

  ControllerEvent last_event() const { return last_event_; }
  const ControllerState& state() const { return ctrl_; }
  const ProtocolSpec& spec() const { return spec_; }

 private:
  ProtocolSpec spec_;
  DeviceParams params_;
  double dt_;
  ControllerState ctrl_;
  ControllerEvent last_event_ = ControllerEvent::none;
};

}  // namespace purify
