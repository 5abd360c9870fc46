#pragma once

// Radial power flow by backward/forward sweep with current summation.
// SVR branches are ideal ratio transformers; ZIP loads are re-evaluated at
// every iterate; DG units inject fixed active power at unity power factor.
// The solver is a pure function of its inputs and may be called
// concurrently.

#include <complex>
#include <string>
#include <vector>

#include "svrsim/feeder.hpp"

namespace svrsim {

struct SolverSettings {
    double tolerance_pu = 1e-8; // complex power mismatch at non-slack buses
    int max_iterations = 100;

    bool operator==(const SolverSettings&) const = default;
};

struct PowerFlowSolution {
    std::vector<Complex> v_pu;          // per bus, feeder order
    std::vector<Complex> line_flow_pu;  // at the file from-end, per line
    std::vector<Complex> svr_flow_pu;   // at the upstream end, per svr
    int iterations = 0;
    double max_mismatch_pu = 0.0;
};

namespace detail {

struct Injections {
    std::vector<Complex> s_load_pu; // per bus, consumption
    std::vector<double> p_dg_pu;    // per bus, injection
};

inline Injections bus_injections(const Feeder& f, const std::vector<double>& dg_mw,
                                 const std::vector<Complex>& v) {
    Injections inj;
    inj.s_load_pu.assign(f.buses.size(), Complex{});
    inj.p_dg_pu.assign(f.buses.size(), 0.0);
    for (const ZipLoad& ld : f.loads) {
        const int b = f.bus_index(ld.bus);
        inj.s_load_pu[b] += zip_power(ld, std::abs(v[b])) / f.base_mva;
    }
    for (std::size_t i = 0; i < f.dgs.size(); ++i)
        inj.p_dg_pu[f.bus_index(f.dgs[i].bus)] += dg_mw[i] / f.base_mva;
    return inj;
}

} // namespace detail

/// Solves the network for the given tap positions (one per SVR branch, in
/// feeder order) and DG injections in MW (one per DG unit). Throws
/// SolveError on non-convergence or voltage collapse (|V| < 0.5 p.u.).
inline PowerFlowSolution solve(const Feeder& f, const std::vector<int>& taps,
                               const std::vector<double>& dg_mw,
                               const SolverSettings& settings = {}) {
    if (taps.size() != f.svrs.size())
        throw Error("solve: expected " + std::to_string(f.svrs.size()) + " tap positions");
    if (dg_mw.size() != f.dgs.size())
        throw Error("solve: expected " + std::to_string(f.dgs.size()) + " dg injections");
    for (std::size_t i = 0; i < dg_mw.size(); ++i)
        if (dg_mw[i] < 0.0 || dg_mw[i] > f.dgs[i].p_max_mw)
            throw Error("solve: dg injection outside [0, p_max] at '" + f.dgs[i].bus + "'");
    if (!(settings.tolerance_pu > 0.0) || settings.max_iterations < 1)
        throw Error("solve: invalid solver settings");

    const FeederTree& tree = f.tree();
    const int n = f.bus_count();
    const int slack = f.slack_index();
    const double v_slack = f.buses[slack].slack_setpoint_pu;

    std::vector<double> ratio(f.svrs.size());
    for (std::size_t i = 0; i < taps.size(); ++i)
        ratio[i] = tap_ratio(taps[i]);

    // Flat start at the slack setpoint for deterministic results.
    std::vector<Complex> v(n, Complex{v_slack, 0.0});
    std::vector<Complex> i_inj(n);        // injection current used this iterate
    std::vector<Complex> i_branch(n);     // parent-branch current at the child end
    PowerFlowSolution sol;

    auto upstream_current = [&](int bus) {
        const BranchRef& br = tree.parent_branch[bus];
        return br.kind == BranchRef::Kind::Svr ? ratio[br.index] * i_branch[bus]
                                               : i_branch[bus];
    };

    for (int iter = 1; iter <= settings.max_iterations; ++iter) {
        const detail::Injections inj = detail::bus_injections(f, dg_mw, v);

        for (int b = 0; b < n; ++b) {
            if (b == slack) { i_inj[b] = Complex{}; continue; }
            const Complex s_net = Complex{inj.p_dg_pu[b], 0.0} - inj.s_load_pu[b];
            i_inj[b] = std::conj(s_net / v[b]);
        }

        // Backward: accumulate branch currents from the leaves toward the root.
        for (auto it = tree.order.rbegin(); it != tree.order.rend(); ++it) {
            const int b = *it;
            if (b == slack) continue;
            Complex i = -i_inj[b];
            for (int c : tree.children[b]) i += upstream_current(c);
            i_branch[b] = i;
        }

        // Forward: propagate voltages from the slack outward.
        for (int b : tree.order) {
            if (b == slack) { v[b] = Complex{v_slack, 0.0}; continue; }
            const int p = tree.parent[b];
            const BranchRef& br = tree.parent_branch[b];
            if (br.kind == BranchRef::Kind::Svr) {
                v[b] = ratio[br.index] * v[p];
            } else {
                const LineBranch& l = f.lines[br.index];
                v[b] = v[p] - Complex{l.r_pu, l.x_pu} * i_branch[b];
            }
            if (std::abs(v[b]) < 0.5)
                throw SolveError("voltage collapse at bus '" + f.buses[b].id +
                                 "' (|V| = " + std::to_string(std::abs(v[b])) +
                                 " p.u. during iteration " + std::to_string(iter) + ")");
        }

        // Mismatch between the specified injection at the new voltages and
        // the power actually delivered by the currents of this iterate. The
        // sum is bounded together with the max so that network-wide
        // conservation holds to the same tolerance.
        const detail::Injections now = detail::bus_injections(f, dg_mw, v);
        double max_mis = 0.0, sum_mis = 0.0;
        int worst = -1;
        for (int b = 0; b < n; ++b) {
            if (b == slack) continue;
            const Complex s_spec = Complex{now.p_dg_pu[b], 0.0} - now.s_load_pu[b];
            const double mis = std::abs(s_spec - v[b] * std::conj(i_inj[b]));
            sum_mis += mis;
            if (mis > max_mis) { max_mis = mis; worst = b; }
        }

        if (max_mis < settings.tolerance_pu && sum_mis < settings.tolerance_pu) {
            sol.v_pu = v;
            sol.iterations = iter;
            sol.max_mismatch_pu = max_mis;
            sol.line_flow_pu.assign(f.lines.size(), Complex{});
            sol.svr_flow_pu.assign(f.svrs.size(), Complex{});
            for (int b = 0; b < n; ++b) {
                if (b == slack) continue;
                const BranchRef& br = tree.parent_branch[b];
                const int p = tree.parent[b];
                if (br.kind == BranchRef::Kind::Svr) {
                    sol.svr_flow_pu[br.index] =
                        v[p] * std::conj(ratio[br.index] * i_branch[b]);
                } else if (!br.reversed) {
                    sol.line_flow_pu[br.index] = v[p] * std::conj(i_branch[b]);
                } else {
                    // File orientation points child -> parent; flow at that
                    // from-end is the current toward the parent.
                    sol.line_flow_pu[br.index] = v[b] * std::conj(-i_branch[b]);
                }
            }
            return sol;
        }
        if (iter == settings.max_iterations)
            throw SolveError("power flow did not converge after " +
                             std::to_string(iter) + " iterations (worst mismatch " +
                             std::to_string(max_mis) + " p.u. at bus '" +
                             (worst >= 0 ? f.buses[worst].id : std::string("?")) + "')");
    }
    throw SolveError("power flow did not converge"); // unreachable
}

/// Signed active power in MW through the branch from->to, measured at the
/// from end. Positive means power flowing from `from` toward `to`.
inline double branch_active_power_mw(const Feeder& f, const PowerFlowSolution& sol,
                                     const std::string& from, const std::string& to) {
    for (std::size_t i = 0; i < f.svrs.size(); ++i)
        if (f.svrs[i].from == from && f.svrs[i].to == to)
            return sol.svr_flow_pu[i].real() * f.base_mva;
    for (std::size_t i = 0; i < f.lines.size(); ++i)
        if (f.lines[i].from == from && f.lines[i].to == to)
            return sol.line_flow_pu[i].real() * f.base_mva;
    throw Error("unknown branch '" + from + "'-'" + to + "'");
}

inline double svr_active_power_mw(const Feeder& f, const PowerFlowSolution& sol,
                                  std::size_t svr_index) {
    return sol.svr_flow_pu.at(svr_index).real() * f.base_mva;
}

inline double bus_voltage_pu(const Feeder& f, const PowerFlowSolution& sol,
                             const std::string& id) {
    return std::abs(sol.v_pu[f.bus_index(id)]);
}

/// Complex conservation residual of a converged solution, in per unit:
/// slack output + DG - loads(V) - series losses. Ideal SVR branches are
/// lossless and drop out of the sum.
inline Complex power_balance_residual(const Feeder& f, const PowerFlowSolution& sol,
                                      const std::vector<double>& dg_mw) {
    const FeederTree& tree = f.tree();
    const int slack = f.slack_index();

    // Parent->child current of the branch above bus b, recovered from the
    // stored from-end flow.
    auto branch_current = [&](int b) {
        const BranchRef& br = tree.parent_branch[b];
        if (br.kind == BranchRef::Kind::Svr)
            return std::conj(sol.svr_flow_pu[br.index] / sol.v_pu[tree.parent[b]]);
        if (!br.reversed)
            return std::conj(sol.line_flow_pu[br.index] / sol.v_pu[tree.parent[b]]);
        return -std::conj(sol.line_flow_pu[br.index] / sol.v_pu[b]);
    };

    Complex slack_out{};
    for (int c : tree.children[slack])
        slack_out += sol.v_pu[slack] * std::conj(branch_current(c));

    Complex loads{};
    for (const ZipLoad& ld : f.loads)
        loads += zip_power(ld, std::abs(sol.v_pu[f.bus_index(ld.bus)])) / f.base_mva;

    Complex dg{};
    for (std::size_t i = 0; i < f.dgs.size(); ++i)
        dg += Complex{dg_mw[i] / f.base_mva, 0.0};

    Complex losses{};
    for (int b : tree.order) {
        if (b == slack) continue;
        const BranchRef& br = tree.parent_branch[b];
        if (br.kind != BranchRef::Kind::Line) continue;
        const LineBranch& l = f.lines[br.index];
        losses += Complex{l.r_pu, l.x_pu} * std::norm(branch_current(b));
    }

    return slack_out + dg - loads - losses;
}

} // namespace svrsim
