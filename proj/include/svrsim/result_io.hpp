#pragma once

// Time-series CSV emission and parsing.
//
// Schema: comment header lines (`# feeder=`, `# scenario=`, `# engine=`,
// `# wall_s=`), one column-name row, then data rows with 6-decimal values:
//
//   time_s,dg_mw,p_svr_mw,tap,v_<busid>,...
//
// Feeders with several SVRs append p_svr<k>_mw,tap<k> columns after the
// voltages; the reader keeps the first SVR and the voltage columns.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "svrsim/compare.hpp"
#include "svrsim/engines.hpp"

namespace svrsim {

inline std::string run_csv_text(const RunResult& r) {
    std::ostringstream os;
    os << "# feeder=" << r.feeder_tag << "\n";
    os << "# scenario=" << r.scenario_tag << "\n";
    os << "# engine=" << engine_name(r.engine) << "\n";
    os << "# wall_s=" << detail::fmt6(r.wall_seconds) << "\n";

    const std::size_t n_svr = r.tap.empty() ? 1 : std::max<std::size_t>(1, r.tap[0].size());
    os << "time_s,dg_mw,p_svr_mw,tap";
    for (const std::string& id : r.bus_ids) os << ",v_" << id;
    for (std::size_t s = 1; s < n_svr; ++s)
        os << ",p_svr" << (s + 1) << "_mw,tap" << (s + 1);
    os << "\n";

    for (std::size_t i = 0; i < r.time_s.size(); ++i) {
        os << detail::fmt6(r.time_s[i]) << "," << detail::fmt6(r.dg_mw[i]) << ","
           << detail::fmt6(r.p_svr_mw[i].empty() ? 0.0 : r.p_svr_mw[i][0]) << ","
           << (r.tap[i].empty() ? 0 : r.tap[i][0]);
        for (double v : r.v_pu[i]) os << "," << detail::fmt6(v);
        for (std::size_t s = 1; s < n_svr; ++s)
            os << "," << detail::fmt6(r.p_svr_mw[i][s]) << "," << r.tap[i][s];
        os << "\n";
    }
    return os.str();
}

inline void write_run_csv(const RunResult& r, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write '" + path + "'");
    out << run_csv_text(r);
}

inline void write_events_csv(const RunResult& r, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write '" + path + "'");
    out << "# feeder=" << r.feeder_tag << "\n";
    out << "# scenario=" << r.scenario_tag << "\n";
    out << "# engine=" << engine_name(r.engine) << "\n";
    out << "time_s,svr,old_tap,new_tap,side\n";
    for (const TapEvent& e : r.events)
        out << detail::fmt6(e.time_s) << "," << e.svr << "," << e.old_tap << ","
            << e.new_tap << ","
            << (e.side == RegulatedSide::Upstream ? "upstream" : "downstream") << "\n";
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

} // namespace detail

/// Parses a run CSV produced by this tool.
inline RunSeries read_run_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open result file '" + path + "'");

    RunSeries s;
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    std::size_t n_v = 0;

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            const auto body = line.substr(1);
            const auto eq = body.find('=');
            if (eq == std::string::npos) continue;
            std::string key = body.substr(0, eq);
            key.erase(0, key.find_first_not_of(' '));
            const std::string value = body.substr(eq + 1);
            if (key == "feeder") s.feeder_tag = value;
            else if (key == "scenario") s.scenario_tag = value;
            else if (key == "engine") s.engine = value;
            else if (key == "wall_s") s.wall_seconds = std::strtod(value.c_str(), nullptr);
            continue;
        }
        auto cells = detail::split_csv(line);
        if (!header_seen) {
            if (cells.size() < 4 || cells[0] != "time_s" || cells[1] != "dg_mw" ||
                cells[2] != "p_svr_mw" || cells[3] != "tap")
                throw ParseError(path, lineno,
                                 "expected header time_s,dg_mw,p_svr_mw,tap,v_...");
            for (std::size_t c = 4; c < cells.size(); ++c) {
                if (cells[c].rfind("v_", 0) == 0) {
                    if (n_v != c - 4)
                        throw ParseError(path, lineno, "voltage columns must be contiguous");
                    s.bus_ids.push_back(cells[c].substr(2));
                    ++n_v;
                }
            }
            header_seen = true;
            continue;
        }
        if (cells.size() < 4 + n_v)
            throw ParseError(path, lineno, "row has too few columns");
        auto num = [&](std::size_t c) {
            char* end = nullptr;
            const double v = std::strtod(cells[c].c_str(), &end);
            if (end == cells[c].c_str() || *end != '\0')
                throw ParseError(path, lineno, "bad number '" + cells[c] + "'");
            return v;
        };
        s.time_s.push_back(num(0));
        s.dg_mw.push_back(num(1));
        s.p_svr_mw.push_back(num(2));
        s.tap.push_back(static_cast<int>(num(3)));
        std::vector<double> vrow(n_v);
        for (std::size_t c = 0; c < n_v; ++c) vrow[c] = num(4 + c);
        s.v.push_back(std::move(vrow));
    }
    if (!header_seen)
        throw Error("'" + path + "' has no column header");
    return s;
}

} // namespace svrsim
