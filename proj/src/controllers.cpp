#include "purify/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace purify {

std::string_view to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::none: return "none";
    case ProtocolKind::ideal_I: return "ideal1";
    case ProtocolKind::ideal_II: return "ideal2";
    case ProtocolKind::practical_I: return "practical1";
    case ProtocolKind::practical_II: return "practical2";
  }
  return "unknown";
}

std::optional<ProtocolKind> parse_protocol(std::string_view name) {
  for (auto kind : {ProtocolKind::none, ProtocolKind::ideal_I, ProtocolKind::ideal_II,
                    ProtocolKind::practical_I, ProtocolKind::practical_II}) {
    if (name == to_string(kind)) return kind;
  }
  return std::nullopt;
}

std::string_view to_string(ControllerEvent event) {
  switch (event) {
    case ControllerEvent::none: return "none";
    case ControllerEvent::delay_start: return "delay_start";
    case ControllerEvent::pulse_start: return "pulse_start";
    case ControllerEvent::pulse_end: return "pulse_end";
    case ControllerEvent::lock: return "lock";
  }
  return "unknown";
}

void ProtocolSpec::validate() const {
  const bool thresholded = kind == ProtocolKind::practical_I || kind == ProtocolKind::practical_II;
  if (thresholded && !(z_limit > 0.0 && z_limit < 1.0)) {
    throw std::invalid_argument("zlimit must lie in (0, 1)");
  }
  if (kind == ProtocolKind::practical_II && !(n_g_lock >= 0.5 && n_g_lock <= 0.75)) {
    throw std::invalid_argument("ng_lock must lie in [0.5, 0.75]");
  }
  if (!(delay_phase_deg >= 0.0) || !std::isfinite(delay_phase_deg)) {
    throw std::invalid_argument("delay_deg must be a finite non-negative phase");
  }
  if (peak_window < 1) throw std::invalid_argument("peak_window must be >= 1");
}

BlochState project_ideal_I(const BlochState& state) { return {state.norm(), 0.0, 0.0}; }

BlochState project_ideal_II(const BlochState& state) {
  const double sign = state.z() < 0.0 ? -1.0 : 1.0;
  return {0.0, 0.0, sign * state.norm()};
}

namespace {

ControlOutput pulse_step(ControllerState& ctrl) {
  ControlOutput out;
  out.n_g = ctrl.pulse->n_g;
  if (ctrl.steps_remaining == 1) out.hold_fraction = ctrl.last_step_fraction;
  --ctrl.steps_remaining;
  return out;
}

void arm_pulse(ControllerState& ctrl, double dt) {
  const double steps = ctrl.pulse->tau / dt;
  // A pulse ending within 1e-9 of a step edge is taken to end on it.
  const long whole = static_cast<long>(std::ceil(steps - 1e-9));
  ctrl.steps_remaining = std::max(1L, whole);
  ctrl.pulse_steps = ctrl.steps_remaining;
  ctrl.last_step_fraction = std::clamp(steps - static_cast<double>(ctrl.steps_remaining - 1),
                                       0.0, 1.0);
  ctrl.mode = ControllerMode::pulsing;
}

}  // namespace

ControlDecision control_practical_I(const BlochState& state, const ControllerState& ctrl,
                                    const ProtocolSpec& spec, const DeviceParams& params,
                                    double dt) {
  ControlDecision d;
  d.next = ctrl;
  ControllerState& next = d.next;

  if (ctrl.mode == ControllerMode::idle) {
    const double abs_z = std::abs(state.z());
    const double r = state.norm();
    if (abs_z < spec.z_limit || r == 0.0) return d;
    next.pulse = pulse_plan(std::min(abs_z, r), r, Quadrant::of(state), params);
    const double delay = spec.delay_phase_deg / 360.0 * params.josephson_period();
    const long delay_steps = std::lround(delay / dt);
    if (delay_steps > 0) {
      next.mode = ControllerMode::delaying;
      next.steps_remaining = delay_steps;
      d.event = ControllerEvent::delay_start;
    } else {
      arm_pulse(next, dt);
    }
  }

  if (next.mode == ControllerMode::delaying) {
    if (next.steps_remaining > 0) {
      --next.steps_remaining;
      return d;
    }
    arm_pulse(next, dt);
  }

  if (next.mode == ControllerMode::pulsing) {
    if (next.steps_remaining == next.pulse_steps) d.event = ControllerEvent::pulse_start;
    d.output = pulse_step(next);
    if (next.steps_remaining == 0) {
      next.mode = ControllerMode::idle;
      next.pulse.reset();
      if (d.event == ControllerEvent::none) d.event = ControllerEvent::pulse_end;
    }
  }
  return d;
}

ControlDecision control_practical_II(const BlochState& state, const ControllerState& ctrl,
                                     const ProtocolSpec& spec) {
  ControlDecision d;
  d.next = ctrl;
  ControllerState& next = d.next;
  if (ctrl.mode == ControllerMode::locked) {
    d.output.n_g = spec.n_g_lock;
    return d;
  }
  const double abs_z = std::abs(state.z());
  next.non_increasing_steps = abs_z <= ctrl.previous_abs_z ? ctrl.non_increasing_steps + 1 : 0;
  next.previous_abs_z = abs_z;
  if (abs_z >= spec.z_limit && next.non_increasing_steps >= spec.peak_window) {
    next.mode = ControllerMode::locked;
    d.output.n_g = spec.n_g_lock;
    d.event = ControllerEvent::lock;
  }
  return d;
}

Controller::Controller(const ProtocolSpec& spec, const DeviceParams& params, double dt)
    : spec_(spec), params_(params), dt_(dt) {}

ControlOutput Controller::command(const BlochState& state) {
  last_event_ = ControllerEvent::none;
  ControlDecision d;
  switch (spec_.kind) {
    case ProtocolKind::none:
      d.output.n_g = control_none(state, 0.0);
      return d.output;
    case ProtocolKind::ideal_I:
    case ProtocolKind::ideal_II:
      d.output.hamiltonian = false;
      return d.output;
    case ProtocolKind::practical_I:
      d = control_practical_I(state, ctrl_, spec_, params_, dt_);
      break;
    case ProtocolKind::practical_II:
      d = control_practical_II(state, ctrl_, spec_);
      break;
  }
  ctrl_ = std::move(d.next);
  last_event_ = d.event;
  return d.output;
}

StepOutcome Controller::evolve(Stepper& stepper, const BlochState& state,
                               const ControlOutput& out, double dW) const {
  if (spec_.kind == ProtocolKind::ideal_I) {
    StepOutcome o;
    o.current = measurement_current_sample(state, dW, params_.gamma, dt_);
    o.state = equatorial_feedback_update(state, params_.gamma, dt_);
    return o;
  }
  return stepper.advance(state, out, dW);
}

BlochState Controller::correct(const BlochState& state) const {
  switch (spec_.kind) {
    case ProtocolKind::ideal_I: return project_ideal_I(state);
    case ProtocolKind::ideal_II: return project_ideal_II(state);
    default: return state;
  }
}

}  // namespace purify
