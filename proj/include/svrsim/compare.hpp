#pragma once

// Cross-engine comparison: final-state table, voltage error against the
// dynamic reference, tap-event alignment and wall-clock summary. Works on
// RunSeries, the CSV-faithful view of a run (values quantized exactly as
// the CSV writer prints them), so comparing freshly written files
// reproduces the in-memory report bit for bit.

#include <algorithm>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "svrsim/engines.hpp"

namespace svrsim {

struct RunSeries {
    std::string engine;
    std::string feeder_tag;
    std::string scenario_tag;
    double wall_seconds = 0.0;
    std::vector<std::string> bus_ids;
    std::vector<double> time_s;
    std::vector<double> dg_mw;
    std::vector<double> p_svr_mw; // first SVR
    std::vector<int> tap;         // first SVR
    std::vector<std::vector<double>> v; // [row][bus]

    bool operator==(const RunSeries&) const = default;
};

namespace detail {

inline double quant6(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return std::strtod(buf, nullptr);
}

} // namespace detail

/// CSV-faithful view of an engine run (first SVR, 6-decimal values).
inline RunSeries to_series(const RunResult& r) {
    RunSeries s;
    s.engine = engine_name(r.engine);
    s.feeder_tag = r.feeder_tag;
    s.scenario_tag = r.scenario_tag;
    s.wall_seconds = detail::quant6(r.wall_seconds);
    s.bus_ids = r.bus_ids;
    s.time_s.reserve(r.time_s.size());
    for (std::size_t i = 0; i < r.time_s.size(); ++i) {
        s.time_s.push_back(detail::quant6(r.time_s[i]));
        s.dg_mw.push_back(detail::quant6(r.dg_mw[i]));
        s.p_svr_mw.push_back(r.p_svr_mw[i].empty() ? 0.0
                                                   : detail::quant6(r.p_svr_mw[i][0]));
        s.tap.push_back(r.tap[i].empty() ? 0 : r.tap[i][0]);
        std::vector<double> row(r.v_pu[i].size());
        for (std::size_t j = 0; j < row.size(); ++j)
            row[j] = detail::quant6(r.v_pu[i][j]);
        s.v.push_back(std::move(row));
    }
    return s;
}

struct DerivedEvent {
    double time_s = 0.0;
    int old_tap = 0;
    int new_tap = 0;

    bool operator==(const DerivedEvent&) const = default;
};

/// Unit-step tap events reconstructed from the tap column: a change between
/// consecutive rows yields one event per step, all stamped with the time of
/// the row where the new tap first appears. Runs start from the neutral
/// position, so a non-zero tap in the first row (a snapshot engine settling
/// within it) also counts as events at that row's time.
inline std::vector<DerivedEvent> derive_events(const RunSeries& s) {
    std::vector<DerivedEvent> ev;
    int prev = 0;
    for (std::size_t i = 0; i < s.tap.size(); ++i) {
        int a = prev;
        const int b = s.tap[i];
        const int step = (b > a) ? 1 : -1;
        while (a != b) {
            ev.push_back({s.time_s[i], a, a + step});
            a += step;
        }
        prev = b;
    }
    return ev;
}

struct EngineSummary {
    std::string engine;
    int final_tap = 0;
    double final_v = 0.0; // designated bus
    std::size_t event_count = 0;
    double wall_seconds = 0.0;

    bool operator==(const EngineSummary&) const = default;
};

struct ComparisonReport {
    std::string feeder_tag;
    std::string scenario_tag;
    std::string designated_bus;
    std::vector<EngineSummary> engines;
    // err% = 100 * (V_dyn - V_other) / V_dyn at the designated bus, present
    // when a dynamic run participates.
    std::vector<std::pair<std::string, double>> err_percent;
    std::vector<std::vector<std::optional<DerivedEvent>>> alignment; // [idx][run]

    bool operator==(const ComparisonReport&) const = default;
};

inline ComparisonReport compare(const std::vector<RunSeries>& runs,
                                const std::string& designated_bus) {
    if (runs.size() < 2)
        throw Error("compare: need at least two runs");
    for (const RunSeries& r : runs) {
        if (r.feeder_tag != runs[0].feeder_tag || r.scenario_tag != runs[0].scenario_tag)
            throw Error("compare: runs come from different feeders/scenarios ('" +
                        r.feeder_tag + "'/'" + r.scenario_tag + "' vs '" +
                        runs[0].feeder_tag + "'/'" + runs[0].scenario_tag + "')");
        if (r.time_s.empty())
            throw Error("compare: run '" + r.engine + "' has no data rows");
    }

    ComparisonReport rep;
    rep.feeder_tag = runs[0].feeder_tag;
    rep.scenario_tag = runs[0].scenario_tag;
    rep.designated_bus = designated_bus;

    auto bus_col = [&](const RunSeries& r) {
        auto it = std::find(r.bus_ids.begin(), r.bus_ids.end(), designated_bus);
        if (it == r.bus_ids.end())
            throw Error("compare: bus '" + designated_bus + "' not recorded in run '" +
                        r.engine + "'");
        return static_cast<std::size_t>(it - r.bus_ids.begin());
    };

    std::vector<std::vector<DerivedEvent>> events;
    std::optional<double> v_dyn_final;
    for (const RunSeries& r : runs) {
        EngineSummary s;
        s.engine = r.engine;
        s.final_tap = r.tap.back();
        s.final_v = r.v.back()[bus_col(r)];
        s.wall_seconds = r.wall_seconds;
        events.push_back(derive_events(r));
        s.event_count = events.back().size();
        rep.engines.push_back(s);
        if (r.engine == engine_name(EngineKind::Dynamic))
            v_dyn_final = s.final_v;
    }

    if (v_dyn_final) {
        for (const EngineSummary& s : rep.engines) {
            if (s.engine == engine_name(EngineKind::Dynamic)) continue;
            rep.err_percent.emplace_back(
                s.engine, 100.0 * (*v_dyn_final - s.final_v) / *v_dyn_final);
        }
    }

    std::size_t max_events = 0;
    for (const auto& ev : events) max_events = std::max(max_events, ev.size());
    rep.alignment.resize(max_events);
    for (std::size_t i = 0; i < max_events; ++i) {
        rep.alignment[i].resize(runs.size());
        for (std::size_t r = 0; r < runs.size(); ++r)
            if (i < events[r].size()) rep.alignment[i][r] = events[r][i];
    }
    return rep;
}

namespace detail {

inline std::string fmt6(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

} // namespace detail

inline std::string render_report_text(const ComparisonReport& rep) {
    std::ostringstream os;
    os << "Comparison report\n";
    os << "  feeder:   " << rep.feeder_tag << "\n";
    os << "  scenario: " << rep.scenario_tag << "\n";
    os << "  bus:      " << rep.designated_bus << "\n\n";

    os << "  engine     final_tap  V(" << rep.designated_bus
       << ")    events  wall_s\n";
    for (const EngineSummary& s : rep.engines) {
        char line[160];
        std::snprintf(line, sizeof line, "  %-9s  %+9d  %-9s %6zu  %s\n",
                      s.engine.c_str(), s.final_tap, detail::fmt6(s.final_v).c_str(),
                      s.event_count, detail::fmt6(s.wall_seconds).c_str());
        os << line;
    }

    if (!rep.err_percent.empty()) {
        os << "\n  voltage error vs dynamic at " << rep.designated_bus << ":\n";
        for (const auto& [eng, err] : rep.err_percent) {
            char line[80];
            std::snprintf(line, sizeof line, "  %-9s  %+.4f %%\n", eng.c_str(), err);
            os << line;
        }
    }

    os << "\n  tap events (time_s: old->new)\n  #";
    for (const EngineSummary& s : rep.engines) {
        char cell[40];
        std::snprintf(cell, sizeof cell, "  %-22s", s.engine.c_str());
        os << cell;
    }
    os << "\n";
    for (std::size_t i = 0; i < rep.alignment.size(); ++i) {
        char idx[16];
        std::snprintf(idx, sizeof idx, "  %-3zu", i + 1);
        os << idx;
        for (const auto& cell : rep.alignment[i]) {
            char buf[48];
            if (cell)
                std::snprintf(buf, sizeof buf, "%10.3f: %+3d->%+3d  ", cell->time_s,
                              cell->old_tap, cell->new_tap);
            else
                std::snprintf(buf, sizeof buf, "%22s  ", "-");
            os << buf;
        }
        os << "\n";
    }
    return os.str();
}

inline std::string render_report_csv(const ComparisonReport& rep) {
    std::ostringstream os;
    os << "# feeder=" << rep.feeder_tag << "\n";
    os << "# scenario=" << rep.scenario_tag << "\n";
    os << "# bus=" << rep.designated_bus << "\n";
    os << "section,engine,final_tap,final_v,events,wall_s,err_percent\n";
    for (const EngineSummary& s : rep.engines) {
        std::string err;
        for (const auto& [eng, e] : rep.err_percent)
            if (eng == s.engine) err = detail::fmt6(e);
        os << "summary," << s.engine << "," << s.final_tap << ","
           << detail::fmt6(s.final_v) << "," << s.event_count << ","
           << detail::fmt6(s.wall_seconds) << "," << err << "\n";
    }
    os << "section,index";
    for (const EngineSummary& s : rep.engines)
        os << "," << s.engine << "_time," << s.engine << "_old," << s.engine << "_new";
    os << "\n";
    for (std::size_t i = 0; i < rep.alignment.size(); ++i) {
        os << "event," << (i + 1);
        for (const auto& cell : rep.alignment[i]) {
            if (cell)
                os << "," << detail::fmt6(cell->time_s) << "," << cell->old_tap << ","
                   << cell->new_tap;
            else
                os << ",,,";
        }
        os << "\n";
    }
    return os.str();
}

} // namespace svrsim
