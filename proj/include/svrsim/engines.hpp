#pragma once

// The three analysis techniques over a feeder + scenario:
//
//   run_clf      snapshot sweep; control actions settle instantly within
//                each instant, no timers.
//   run_qsts     time marching at qsts.dt carrying controller state (taps,
//                timers) between steps; a tap commanded at step t takes
//                electrical effect at the t+dt solve.
//   run_dynamic  same marching at dyn.h with continuous timers and an
//                optional first-order measurement lag; the network stays
//                algebraic each step.
//
// Each engine is a pure function of (feeder, scenario, options): repeated
// runs give bit-identical results, and distinct runs may execute
// concurrently.

#include <chrono>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "svrsim/feeder.hpp"
#include "svrsim/powerflow.hpp"
#include "svrsim/scenario.hpp"
#include "svrsim/svr_control.hpp"

namespace svrsim {

enum class EngineKind { Clf, Qsts, Dynamic };

inline const char* engine_name(EngineKind k) {
    switch (k) {
    case EngineKind::Clf: return "clf";
    case EngineKind::Qsts: return "qsts";
    case EngineKind::Dynamic: return "dynamic";
    }
    return "?";
}

struct TapEvent {
    double time_s = 0.0;
    int svr = 0;
    int old_tap = 0;
    int new_tap = 0;
    RegulatedSide side = RegulatedSide::Downstream;

    bool operator==(const TapEvent&) const = default;
};

struct RunResult {
    EngineKind engine = EngineKind::Qsts;
    std::string feeder_tag;
    std::string scenario_tag;
    std::vector<std::string> bus_ids;        // recorded buses
    std::vector<double> time_s;
    std::vector<double> dg_mw;               // total DG injection
    std::vector<std::vector<double>> p_svr_mw; // [step][svr]
    std::vector<std::vector<int>> tap;         // [step][svr]
    std::vector<std::vector<double>> v_pu;     // [step][recorded bus]
    std::vector<TapEvent> events;
    std::vector<double> oscillation_times_s;   // CLF settle diagnostics
    int total_tap_ops = 0;
    double wall_seconds = 0.0;
    double max_balance_residual_pu = 0.0;
};

struct EngineOptions {
    SolverSettings solver;
    std::vector<std::string> record_buses; // empty = all buses
    std::string feeder_tag;
    std::string scenario_tag;
    bool clf_reuse_unchanged_snapshots = true; // identical consecutive snapshots
    int clf_iteration_cap = 40;
};

namespace detail {

inline std::vector<int> recorded_bus_indices(const Feeder& f,
                                             const std::vector<std::string>& wanted) {
    std::vector<int> idx;
    if (wanted.empty()) {
        idx.resize(f.buses.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    } else {
        for (const std::string& id : wanted) idx.push_back(f.bus_index(id));
    }
    return idx;
}

inline std::vector<double> dg_injections(const Feeder& f, const Scenario& scn, double t) {
    std::vector<double> dgs(f.dgs.size());
    for (std::size_t i = 0; i < dgs.size(); ++i)
        dgs[i] = dg_power(scn.ramp, t);
    return dgs;
}

inline int regulated_bus(const Feeder& f, std::size_t svr, RegulatedSide side) {
    const SvrBranch& s = f.svrs[svr];
    return f.bus_index(side == RegulatedSide::Upstream ? s.from : s.to);
}

inline void record_step(RunResult& out, const Feeder& f, const PowerFlowSolution& sol,
                        const std::vector<int>& rec, double t, double dg_total,
                        const std::vector<SvrState>& st) {
    out.time_s.push_back(t);
    out.dg_mw.push_back(dg_total);
    std::vector<double> flows(f.svrs.size());
    std::vector<int> taps(f.svrs.size());
    for (std::size_t s = 0; s < f.svrs.size(); ++s) {
        flows[s] = svr_active_power_mw(f, sol, s);
        taps[s] = st[s].tap;
    }
    out.p_svr_mw.push_back(std::move(flows));
    out.tap.push_back(std::move(taps));
    std::vector<double> vrow(rec.size());
    for (std::size_t i = 0; i < rec.size(); ++i)
        vrow[i] = std::abs(sol.v_pu[rec[i]]);
    out.v_pu.push_back(std::move(vrow));
}

inline RunResult run_time_series(const Feeder& f, const Scenario& scn, double dt,
                                 EngineKind kind, double tau_m,
                                 const EngineOptions& opts) {
    scn.validate();
    const auto t_begin = std::chrono::steady_clock::now();

    const long n_steps = std::lround(scn.ramp.t_stop_s / dt);
    const std::vector<int> rec = recorded_bus_indices(f, opts.record_buses);

    RunResult out;
    out.engine = kind;
    out.feeder_tag = opts.feeder_tag;
    out.scenario_tag = opts.scenario_tag;
    for (int b : rec) out.bus_ids.push_back(f.buses[b].id);

    std::vector<SvrState> st(f.svrs.size());
    std::vector<double> v_filt(f.svrs.size(), 0.0);
    std::vector<int> taps(f.svrs.size(), 0);

    for (long k = 0; k <= n_steps; ++k) {
        const double t = std::min(k * dt, scn.ramp.t_stop_s);
        const std::vector<double> dgs = dg_injections(f, scn, t);
        for (std::size_t s = 0; s < st.size(); ++s) taps[s] = st[s].tap;

        PowerFlowSolution sol;
        try {
            sol = solve(f, taps, dgs, opts.solver);
        } catch (const SolveError& e) {
            throw SolveError(std::string(engine_name(kind)) + " step at t = " +
                             std::to_string(t) + " s: " + e.what());
        }
        out.max_balance_residual_pu =
            std::max(out.max_balance_residual_pu,
                     std::abs(power_balance_residual(f, sol, dgs)));

        double dg_total = 0.0;
        for (double d : dgs) dg_total += d;
        record_step(out, f, sol, rec, t, dg_total, st);
        if (k == n_steps) break;

        const double t_next = std::min((k + 1) * dt, scn.ramp.t_stop_s);
        for (std::size_t s = 0; s < f.svrs.size(); ++s) {
            const SvrConfig& cfg = f.svrs[s].controller;
            const double p_mw = svr_active_power_mw(f, sol, s);
            st[s].regulated_side = select_regulation_point(p_mw, st[s].regulated_side);

            double v_in = std::abs(sol.v_pu[regulated_bus(f, s, st[s].regulated_side)]);
            if (tau_m > 0.0) {
                if (k == 0) v_filt[s] = v_in;
                else v_filt[s] += (dt / tau_m) * (v_in - v_filt[s]);
                v_in = v_filt[s];
            }

            const Activation act = measure(v_in, cfg, st[s].was_active);
            st[s].was_active = act.active();
            TimerOutcome step = step_timer(st[s], act, dt, cfg);
            st[s] = step.state;
            if (step.command) {
                const TapCommand tc = tap_command_for(*step.command, st[s].regulated_side);
                const SvrState after = apply_tap(st[s], tc, cfg);
                if (after.tap != st[s].tap)
                    out.events.push_back({t_next, static_cast<int>(s), st[s].tap,
                                          after.tap, st[s].regulated_side});
                st[s] = after;
            }
        }
    }

    for (const SvrState& s : st) out.total_tap_ops += s.op_count;
    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    return out;
}

} // namespace detail

/// Quasi-static time series at the scenario's qsts.dt.
inline RunResult run_qsts(const Feeder& f, const Scenario& scn,
                          const EngineOptions& opts = {}) {
    return detail::run_time_series(f, scn, scn.qsts_dt_s, EngineKind::Qsts, 0.0, opts);
}

/// Fine-step run at dyn.h with continuous timers and optional measurement
/// lag dyn.tau_m (first-order, forward Euler). Serves as the chronological
/// reference for the other engines.
inline RunResult run_dynamic(const Feeder& f, const Scenario& scn,
                             const EngineOptions& opts = {}) {
    return detail::run_time_series(f, scn, scn.dyn_h_s, EngineKind::Dynamic,
                                   scn.dyn_tau_m_s, opts);
}

/// Conventional load-flow sweep: at each instant, taps are stepped and the
/// network re-solved until the controller settles (or the device exhausts
/// its range, or the iteration cap / a state revisit flags oscillation).
/// Tap state carries forward between instants; events carry the instant's
/// timestamp. Consecutive instants with identical injections, taps and
/// regulated sides after an event-free settle reuse the previous solution.
inline RunResult run_clf(const Feeder& f, const Scenario& scn,
                         const EngineOptions& opts = {}) {
    scn.validate();
    const auto t_begin = std::chrono::steady_clock::now();

    std::vector<double> instants = scn.clf_instants_s;
    if (instants.empty()) {
        const long n_steps = std::lround(scn.ramp.t_stop_s / scn.qsts_dt_s);
        for (long k = 0; k <= n_steps; ++k)
            instants.push_back(std::min(k * scn.qsts_dt_s, scn.ramp.t_stop_s));
    }

    const std::vector<int> rec = detail::recorded_bus_indices(f, opts.record_buses);

    RunResult out;
    out.engine = EngineKind::Clf;
    out.feeder_tag = opts.feeder_tag;
    out.scenario_tag = opts.scenario_tag;
    for (int b : rec) out.bus_ids.push_back(f.buses[b].id);

    std::vector<SvrState> st(f.svrs.size());
    std::vector<int> taps(f.svrs.size(), 0);

    auto state_key = [&]() {
        std::vector<int> key;
        key.reserve(2 * st.size());
        for (const SvrState& s : st) {
            key.push_back(s.tap);
            key.push_back(s.regulated_side == RegulatedSide::Upstream ? 1 : 0);
        }
        return key;
    };

    struct Snapshot {
        std::vector<double> dgs;
        std::vector<int> taps;
        std::vector<int> key;
        std::size_t row = 0;
        bool reusable = false;
    };
    std::optional<Snapshot> prev;

    for (double t : instants) {
        const std::vector<double> dgs = detail::dg_injections(f, scn, t);
        for (std::size_t s = 0; s < st.size(); ++s) taps[s] = st[s].tap;

        double dg_total = 0.0;
        for (double d : dgs) dg_total += d;

        if (opts.clf_reuse_unchanged_snapshots && prev && prev->reusable &&
            prev->dgs == dgs && prev->taps == taps && prev->key == state_key()) {
            const std::size_t r = prev->row;
            out.time_s.push_back(t);
            out.dg_mw.push_back(out.dg_mw[r]);
            out.p_svr_mw.push_back(out.p_svr_mw[r]);
            out.tap.push_back(out.tap[r]);
            out.v_pu.push_back(out.v_pu[r]);
            prev->row = out.time_s.size() - 1;
            continue;
        }

        PowerFlowSolution sol;
        auto solve_now = [&]() {
            for (std::size_t s = 0; s < st.size(); ++s) taps[s] = st[s].tap;
            try {
                sol = solve(f, taps, dgs, opts.solver);
            } catch (const SolveError& e) {
                throw SolveError("clf instant at t = " + std::to_string(t) + " s: " +
                                 e.what());
            }
            out.max_balance_residual_pu =
                std::max(out.max_balance_residual_pu,
                         std::abs(power_balance_residual(f, sol, dgs)));
        };
        solve_now();

        const std::size_t events_before = out.events.size();
        bool oscillation = false;
        std::set<std::vector<int>> visited;
        visited.insert(state_key());
        std::vector<bool> was_active(f.svrs.size(), false);

        for (int iter = 0;; ++iter) {
            bool any_active = false;
            bool any_change = false;
            for (std::size_t s = 0; s < f.svrs.size(); ++s) {
                const SvrConfig& cfg = f.svrs[s].controller;
                const double p_mw = svr_active_power_mw(f, sol, s);
                st[s].regulated_side =
                    select_regulation_point(p_mw, st[s].regulated_side);
                const double v_in =
                    std::abs(sol.v_pu[detail::regulated_bus(f, s, st[s].regulated_side)]);
                const Activation act = measure(v_in, cfg, was_active[s]);
                was_active[s] = act.active();
                if (!act.active()) continue;
                any_active = true;
                const TapCommand tc = tap_command_for(act.direction, st[s].regulated_side);
                const SvrState after = apply_tap(st[s], tc, cfg);
                if (after.tap != st[s].tap) {
                    out.events.push_back({t, static_cast<int>(s), st[s].tap, after.tap,
                                          st[s].regulated_side});
                    any_change = true;
                }
                st[s] = after;
            }
            if (!any_active) break;   // settled inside the band
            if (!any_change) break;   // range exhausted under persistent violation
            solve_now();              // keep sol consistent with the taps
            if (!visited.insert(state_key()).second) {
                oscillation = true;   // revisited (taps, sides): control cycle
                break;
            }
            if (iter + 1 >= opts.clf_iteration_cap) {
                oscillation = true;
                break;
            }
        }

        if (oscillation) out.oscillation_times_s.push_back(t);
        detail::record_step(out, f, sol, rec, t, dg_total, st);

        Snapshot snap;
        snap.dgs = dgs;
        for (std::size_t s = 0; s < st.size(); ++s) taps[s] = st[s].tap;
        snap.taps = taps;
        snap.key = state_key();
        snap.row = out.time_s.size() - 1;
        snap.reusable = (out.events.size() == events_before) && !oscillation;
        prev = std::move(snap);
    }

    for (const SvrState& s : st) out.total_tap_ops += s.op_count;
    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    return out;
}

/// Dispatch by kind.
inline RunResult run_engine(EngineKind kind, const Feeder& f, const Scenario& scn,
                            const EngineOptions& opts = {}) {
    switch (kind) {
    case EngineKind::Clf: return run_clf(f, scn, opts);
    case EngineKind::Qsts: return run_qsts(f, scn, opts);
    case EngineKind::Dynamic: return run_dynamic(f, scn, opts);
    }
    throw Error("unknown engine");
}

} // namespace svrsim
