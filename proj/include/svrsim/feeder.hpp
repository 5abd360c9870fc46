#pragma once

// Feeder data model: buses, branches, voltage-dependent ZIP loads and DG
// units, plus radial-topology validation. Values are immutable after
// validate() and safe to share across concurrent engine runs.

#include <cmath>
#include <complex>
#include <string>
#include <unordered_map>
#include <vector>

#include "svrsim/errors.hpp"
#include "svrsim/svr_control.hpp"

namespace svrsim {

using Complex = std::complex<double>;

struct Bus {
    std::string id;
    double base_kv = 0.0;
    bool is_slack = false;
    double slack_setpoint_pu = 1.0; // meaningful only when is_slack

    bool operator==(const Bus&) const = default;
};

struct LineBranch {
    std::string from;
    std::string to;
    double r_pu = 0.0;
    double x_pu = 0.0;

    bool operator==(const LineBranch&) const = default;
};

/// Ideal ratio transformer: downstream voltage = ratio x upstream voltage,
/// no series impedance. `from` is the source side (point 1), `to` the load
/// side (point 2).
struct SvrBranch {
    std::string from;
    std::string to;
    SvrConfig controller;

    bool operator==(const SvrBranch&) const = default;
};

/// Static load: weighted constant-impedance / constant-current /
/// constant-power polynomial in voltage magnitude.
struct ZipLoad {
    std::string bus;
    double p0_mw = 0.0;
    double q0_mvar = 0.0;
    double zp = 0.4, ip = 0.3, pp = 0.3;
    double zq = 0.4, iq = 0.3, pq = 0.3;

    bool operator==(const ZipLoad&) const = default;
};

/// Distributed generator at unity power factor: pure active injection.
struct DgUnit {
    std::string bus;
    double p_max_mw = 0.0;

    bool operator==(const DgUnit&) const = default;
};

/// Load power drawn at voltage magnitude v (per unit). Returns MW + j MVAr.
inline Complex zip_power(const ZipLoad& load, double v) {
    if (!(v > 0.0))
        throw Error("zip_power: voltage must be positive");
    const double p = load.p0_mw * (load.zp * v * v + load.ip * v + load.pp);
    const double q = load.q0_mvar * (load.zq * v * v + load.iq * v + load.pq);
    return {p, q};
}

struct BranchRef {
    enum class Kind { Line, Svr };
    Kind kind = Kind::Line;
    int index = -1;
    bool reversed = false; // file `from` is the child end (lines only)

    bool operator==(const BranchRef&) const = default;
};

/// Rooted-tree view of a feeder: BFS order from the slack bus, parent
/// pointers and the branch joining each bus to its parent.
struct FeederTree {
    std::vector<int> order;              // bus indices, slack first
    std::vector<int> parent;             // -1 at slack
    std::vector<BranchRef> parent_branch;
    std::vector<std::vector<int>> children;
};

class Feeder {
public:
    double base_mva = 10.0;
    std::vector<Bus> buses;
    std::vector<LineBranch> lines;
    std::vector<SvrBranch> svrs;
    std::vector<ZipLoad> loads;
    std::vector<DgUnit> dgs;

    /// Checks every invariant and builds the derived index/tree. Must be
    /// called before the feeder is handed to the solver or engines.
    void validate() {
        build_index();
        check_buses();
        check_branches();
        check_loads_and_dgs();
        tree_ = build_tree();
    }

    int bus_count() const { return static_cast<int>(buses.size()); }
    int slack_index() const { return slack_; }

    int bus_index(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end())
            throw TopologyError("reference to undefined bus '" + id + "'");
        return it->second;
    }

    const FeederTree& tree() const {
        if (tree_.order.empty())
            throw Error("feeder used before validate()");
        return tree_;
    }

    bool operator==(const Feeder& other) const {
        return base_mva == other.base_mva && buses == other.buses &&
               lines == other.lines && svrs == other.svrs &&
               loads == other.loads && dgs == other.dgs;
    }

private:
    void build_index() {
        index_.clear();
        slack_ = -1;
        if (buses.empty())
            throw TopologyError("feeder has no buses");
        for (int i = 0; i < bus_count(); ++i) {
            const Bus& b = buses[i];
            if (b.id.empty())
                throw TopologyError("bus with empty id");
            if (!index_.emplace(b.id, i).second)
                throw TopologyError("duplicate bus id '" + b.id + "'");
        }
    }

    void check_buses() {
        if (!(base_mva > 0.0))
            throw TopologyError("base_mva must be positive");
        for (int i = 0; i < bus_count(); ++i) {
            const Bus& b = buses[i];
            if (!(b.base_kv > 0.0))
                throw TopologyError("bus '" + b.id + "': base_kv must be positive");
            if (b.is_slack) {
                if (slack_ >= 0)
                    throw TopologyError("multiple slack buses ('" +
                                        buses[slack_].id + "' and '" + b.id + "')");
                slack_ = i;
                if (b.slack_setpoint_pu < 0.8 || b.slack_setpoint_pu > 1.2)
                    throw TopologyError("bus '" + b.id +
                                        "': slack setpoint outside [0.8, 1.2] p.u.");
            }
        }
        if (slack_ < 0)
            throw TopologyError("no slack bus defined");
    }

    void check_branches() {
        for (const LineBranch& l : lines) {
            bus_index(l.from);
            bus_index(l.to);
            if (l.r_pu < 0.0)
                throw TopologyError("line " + l.from + "-" + l.to +
                                    ": negative resistance");
            if (std::hypot(l.r_pu, l.x_pu) <= 0.0)
                throw TopologyError("line " + l.from + "-" + l.to +
                                    ": zero impedance");
        }
        for (const SvrBranch& s : svrs) {
            bus_index(s.from);
            bus_index(s.to);
            const SvrConfig& c = s.controller;
            if (!(c.v_ref_pu > 0.0))
                throw TopologyError("svr " + s.from + "-" + s.to + ": v_ref must be positive");
            if (c.deadband_pu < 0.0 || c.hysteresis_pu < 0.0)
                throw TopologyError("svr " + s.from + "-" + s.to +
                                    ": band parameters must be non-negative");
            if (c.hysteresis_pu != 0.0 && c.hysteresis_pu >= c.band_halfwidth())
                throw TopologyError("svr " + s.from + "-" + s.to +
                                    ": hysteresis must be smaller than the deadband");
            if (c.t2_s < 0.0 || c.t1_s < c.t2_s)
                throw TopologyError("svr " + s.from + "-" + s.to +
                                    ": delays must satisfy t1 >= t2 >= 0");
        }
    }

    void check_loads_and_dgs() {
        for (const ZipLoad& ld : loads) {
            int b = bus_index(ld.bus);
            if (b == slack_)
                throw TopologyError("load at slack bus '" + ld.bus + "' is not supported");
            if (ld.p0_mw < 0.0)
                throw TopologyError("load at '" + ld.bus + "': p0 must be non-negative");
            if (std::abs(ld.zp + ld.ip + ld.pp - 1.0) > 1e-9)
                throw TopologyError("load at '" + ld.bus + "': active ZIP fractions must sum to 1");
            if (std::abs(ld.zq + ld.iq + ld.pq - 1.0) > 1e-9)
                throw TopologyError("load at '" + ld.bus + "': reactive ZIP fractions must sum to 1");
        }
        for (const DgUnit& dg : dgs) {
            int b = bus_index(dg.bus);
            if (b == slack_)
                throw TopologyError("dg at slack bus '" + dg.bus + "' is not supported");
            if (dg.p_max_mw < 0.0)
                throw TopologyError("dg at '" + dg.bus + "': p_max must be non-negative");
        }
    }

    FeederTree build_tree() const {
        const int n = bus_count();
        const int n_edges = static_cast<int>(lines.size() + svrs.size());
        if (n_edges != n - 1)
            throw TopologyError("feeder is not radial: " + std::to_string(n) +
                                " buses require " + std::to_string(n - 1) +
                                " branches, found " + std::to_string(n_edges));

        struct Adj { BranchRef ref; int other; };
        std::vector<std::vector<Adj>> adj(n);
        for (int i = 0; i < static_cast<int>(lines.size()); ++i) {
            int f = bus_index(lines[i].from), t = bus_index(lines[i].to);
            adj[f].push_back({{BranchRef::Kind::Line, i, false}, t});
            adj[t].push_back({{BranchRef::Kind::Line, i, true}, f});
        }
        for (int i = 0; i < static_cast<int>(svrs.size()); ++i) {
            int f = bus_index(svrs[i].from), t = bus_index(svrs[i].to);
            adj[f].push_back({{BranchRef::Kind::Svr, i, false}, t});
            adj[t].push_back({{BranchRef::Kind::Svr, i, true}, f});
        }

        FeederTree tree;
        tree.parent.assign(n, -1);
        tree.parent_branch.assign(n, {});
        tree.children.assign(n, {});
        std::vector<bool> seen(n, false);

        tree.order.push_back(slack_);
        seen[slack_] = true;
        for (std::size_t head = 0; head < tree.order.size(); ++head) {
            int u = tree.order[head];
            for (const Adj& a : adj[u]) {
                if (a.other == tree.parent[u] &&
                    a.ref.index == tree.parent_branch[u].index &&
                    a.ref.kind == tree.parent_branch[u].kind)
                    continue; // the branch we came in on
                if (seen[a.other])
                    throw TopologyError("feeder contains a cycle through bus '" +
                                        buses[a.other].id + "'");
                if (a.ref.kind == BranchRef::Kind::Svr && a.ref.reversed)
                    throw TopologyError("svr " + svrs[a.ref.index].from + "-" +
                                        svrs[a.ref.index].to +
                                        " must be oriented source side -> load side");
                seen[a.other] = true;
                tree.parent[a.other] = u;
                tree.parent_branch[a.other] = a.ref;
                tree.children[u].push_back(a.other);
                tree.order.push_back(a.other);
            }
        }
        for (int i = 0; i < n; ++i)
            if (!seen[i])
                throw TopologyError("bus '" + buses[i].id +
                                    "' is disconnected from the slack bus");
        return tree;
    }

    std::unordered_map<std::string, int> index_;
    int slack_ = -1;
    FeederTree tree_;
};

} // namespace svrsim
