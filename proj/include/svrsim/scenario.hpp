#pragma once

// DG ramp profile and simulation time grid. Scenario files are key-value
// text (`key = value`); missing keys take the defaults below, unknown keys
// are errors.

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "svrsim/errors.hpp"

namespace svrsim {

/// Piecewise-linear active-power ramp: zero before t_start, linear up to
/// p_max at t_end, constant afterwards until t_stop.
struct RampProfile {
    double t_start_s = 10.0;
    double t_end_s = 200.0;
    double p_max_mw = 0.0;
    double t_stop_s = 350.0;

    bool operator==(const RampProfile&) const = default;
};

struct Scenario {
    RampProfile ramp;                  // applied to every DG unit
    double qsts_dt_s = 1.0;
    double dyn_h_s = 0.1;
    double dyn_tau_m_s = 0.0;          // measurement lag; 0 disables
    std::vector<double> clf_instants_s; // empty = the QSTS grid

    void validate() const {
        if (!(ramp.t_start_s >= 0.0) || !(ramp.t_start_s < ramp.t_end_s) ||
            !(ramp.t_end_s <= ramp.t_stop_s))
            throw Error("scenario: need 0 <= t_start < t_end <= t_stop");
        if (!(ramp.p_max_mw > 0.0))
            throw Error("scenario: ramp p_max must be positive");
        if (!(qsts_dt_s > 0.0) || !(dyn_h_s > 0.0))
            throw Error("scenario: step sizes must be positive");
        if (dyn_h_s > qsts_dt_s)
            throw Error("scenario: dyn.h must not exceed qsts.dt");
        if (dyn_tau_m_s < 0.0)
            throw Error("scenario: dyn.tau_m must be non-negative");
    }

    bool operator==(const Scenario&) const = default;
};

/// Ramp evaluation at time t. Exact at the break points: returns 0 before
/// t_start and precisely p_max from t_end on.
inline double dg_power(const RampProfile& ramp, double t_s) {
    if (t_s < 0.0 || t_s > ramp.t_stop_s)
        throw Error("dg_power: t = " + std::to_string(t_s) + " outside [0, " +
                    std::to_string(ramp.t_stop_s) + "]");
    if (t_s <= ramp.t_start_s) return 0.0;
    if (t_s >= ramp.t_end_s) return ramp.p_max_mw;
    return ramp.p_max_mw * (t_s - ramp.t_start_s) / (ramp.t_end_s - ramp.t_start_s);
}

inline Scenario parse_scenario(std::istream& in, const std::string& name) {
    Scenario s;
    bool p_max_seen = false;
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (auto hash = raw.find('#'); hash != std::string::npos)
            raw.erase(hash);
        std::istringstream is(raw);
        std::string key, eq, value;
        if (!(is >> key)) continue;
        if (!(is >> eq >> value) || eq != "=" || (is >> std::ws, !is.eof()))
            throw ParseError(name, lineno, "expected 'key = value'");
        double num = 0.0;
        try {
            std::size_t pos = 0;
            num = std::stod(value, &pos);
            if (pos != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
            throw ParseError(name, lineno, "expected a number, got '" + value + "'");
        }
        if (key == "ramp.t_start") s.ramp.t_start_s = num;
        else if (key == "ramp.t_end") s.ramp.t_end_s = num;
        else if (key == "ramp.p_max_mw") { s.ramp.p_max_mw = num; p_max_seen = true; }
        else if (key == "t_stop") s.ramp.t_stop_s = num;
        else if (key == "qsts.dt") s.qsts_dt_s = num;
        else if (key == "dyn.h") s.dyn_h_s = num;
        else if (key == "dyn.tau_m") s.dyn_tau_m_s = num;
        else throw ParseError(name, lineno, "unknown key '" + key + "'");
    }
    if (!p_max_seen)
        throw ParseError(name, lineno, "missing required key ramp.p_max_mw");
    s.validate();
    return s;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open scenario file '" + path + "'");
    return parse_scenario(in, path);
}

} // namespace svrsim
