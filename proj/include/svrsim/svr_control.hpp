#pragma once

// Step voltage regulator control: measuring element, double time-delay tap
// changer, and bidirectional regulation-point selection. All functions are
// pure state transitions over explicit value types; the simulation engines
// own and sequence the state.

#include <algorithm>
#include <cmath>
#include <optional>

#include "svrsim/errors.hpp"

namespace svrsim {

// Standard 33-position regulator: +-10 % range, 0.625 % per step.
inline constexpr int kTapMin = -16;
inline constexpr int kTapMax = +16;
inline constexpr double kTapStepPu = 0.00625;

// Timer comparisons tolerate accumulated float error from repeated
// decrements (e.g. 300 subtractions of 0.1 s).
inline constexpr double kTimerEps = 1e-9;

/// Turns ratio of the series winding for a given tap position.
/// Position +16 boosts the downstream side by 10 %, -16 bucks it by 10 %.
inline double tap_ratio(int tap) {
    if (tap < kTapMin || tap > kTapMax)
        throw Error("tap position " + std::to_string(tap) + " outside [" +
                    std::to_string(kTapMin) + ", " + std::to_string(kTapMax) + "]");
    return 1.0 + kTapStepPu * tap;
}

/// Which terminal the controller regulates, per the direction of active
/// power flow through the device.
enum class RegulatedSide {
    Upstream,   // point 1, source side (reverse power flow)
    Downstream, // point 2, load side (direct power flow)
};

/// Requested voltage correction at the regulation point.
enum class ActDirection { None, Raise, Lower };

struct Activation {
    ActDirection direction = ActDirection::None;

    bool active() const { return direction != ActDirection::None; }
    bool operator==(const Activation&) const = default;
};

/// Physical tap movement request.
enum class TapCommand { Raise, Lower };

/// Controller parameters. Band and hysteresis values are per unit on the
/// regulator's voltage base.
struct SvrConfig {
    double v_ref_pu = 1.0;
    double deadband_pu = 0.01;       // half-width unless band_is_full_width
    double hysteresis_pu = 0.0;
    double t1_s = 30.0;              // first operation of a violation episode
    double t2_s = 5.0;               // subsequent operations
    bool band_is_full_width = false; // alternate reading of "deadband of 1 %"
    int tap_min = kTapMin;
    int tap_max = kTapMax;
    double step_pu = kTapStepPu;

    double band_halfwidth() const {
        return band_is_full_width ? deadband_pu / 2.0 : deadband_pu;
    }

    bool operator==(const SvrConfig&) const = default;
};

/// Mutable controller state, one instance per regulator.
struct SvrState {
    int tap = 0;
    RegulatedSide regulated_side = RegulatedSide::Downstream;
    std::optional<double> timer_s;  // remaining delay; empty = inactive
    bool first_delay_armed = true;  // next timer start uses t1 instead of t2
    bool was_active = false;        // previous measuring-element outcome
    int op_count = 0;               // taps actually moved
    bool at_limit = false;

    bool operator==(const SvrState&) const = default;
};

/// Regulation-point selection in bidirectional mode. Positive flow
/// (source toward load) regulates the downstream terminal; negative flow
/// the upstream one; zero flow retains the previous side.
inline RegulatedSide select_regulation_point(double p_flow_mw, RegulatedSide previous) {
    if (p_flow_mw > 0.0) return RegulatedSide::Downstream;
    if (p_flow_mw < 0.0) return RegulatedSide::Upstream;
    return previous;
}

/// Measuring element: compares the voltage error against the deadband and,
/// while active, against the reduced hysteresis release threshold.
inline Activation measure(double v_in_pu, const SvrConfig& cfg, bool was_active) {
    if (!(v_in_pu > 0.0))
        throw Error("measured voltage must be positive");
    const double e = v_in_pu - cfg.v_ref_pu;
    const double hw = cfg.band_halfwidth();
    const bool trigger = std::abs(e) > hw;
    const bool retain = was_active && std::abs(e) > hw - cfg.hysteresis_pu;
    if (!trigger && !retain) return {ActDirection::None};
    return {e > 0.0 ? ActDirection::Lower : ActDirection::Raise};
}

struct TimerOutcome {
    SvrState state;
    std::optional<ActDirection> command; // emitted tap operation, voltage sense
};

/// Advances the tap-changer timer by dt. An activation starts the timer at
/// t1 (first operation of the episode) or t2 (subsequent ones); expiry emits
/// exactly one command and deactivates the timer, which re-arms at t2 on the
/// next step if the violation persists. Loss of activation cancels any
/// pending operation and restores the t1 delay.
inline TimerOutcome step_timer(SvrState state, Activation activation, double dt_s,
                               const SvrConfig& cfg) {
    if (!(dt_s > 0.0))
        throw Error("timer step must be positive");
    if (!activation.active()) {
        state.timer_s.reset();
        state.first_delay_armed = true;
        return {state, std::nullopt};
    }
    if (!state.timer_s)
        state.timer_s = state.first_delay_armed ? cfg.t1_s : cfg.t2_s;
    *state.timer_s -= dt_s;
    if (*state.timer_s <= kTimerEps) {
        state.timer_s.reset();
        state.first_delay_armed = false;
        return {state, activation.direction};
    }
    return {state, std::nullopt};
}

/// Moves the tap one step in the commanded direction, clamped at the range
/// limits. The operation counter advances only when the tap actually moves.
inline SvrState apply_tap(SvrState state, TapCommand command, const SvrConfig& cfg) {
    const int wanted = state.tap + (command == TapCommand::Raise ? 1 : -1);
    const int clamped = std::clamp(wanted, cfg.tap_min, cfg.tap_max);
    if (clamped != state.tap) ++state.op_count;
    state.tap = clamped;
    state.at_limit = (state.tap == cfg.tap_min || state.tap == cfg.tap_max);
    return state;
}

/// Maps a voltage correction onto a tap direction for the active regulation
/// point. Regulating downstream, the ratio acts on the regulated terminal
/// directly. Regulating upstream, the controller sees the regulated terminal
/// through the inverse ratio, so the mapping flips: this inversion is what
/// drives the tap toward its limit when the upstream bus barely responds.
inline TapCommand tap_command_for(ActDirection wanted, RegulatedSide side) {
    const bool raise_voltage = (wanted == ActDirection::Raise);
    if (side == RegulatedSide::Downstream)
        return raise_voltage ? TapCommand::Raise : TapCommand::Lower;
    return raise_voltage ? TapCommand::Lower : TapCommand::Raise;
}

} // namespace svrsim
