#pragma once

// Line-oriented feeder definition files.
//
// Grammar: `#` starts a comment, blank lines are ignored, `[section]`
// headers switch context, data rows are whitespace-separated fields in the
// column order listed below. Unknown sections and wrong field counts are
// errors.
//
//   [base]   base_mva                                        (single row)
//   [buses]  id base_kv is_slack(0|1) [slack_setpoint_pu]    (4th iff slack)
//   [lines]  from to r_pu x_pu
//   [svr]    from to v_ref_pu deadband_pu hysteresis_pu t1_s t2_s [half|full]
//   [loads]  bus p_mw q_mvar [zp ip pp zq iq pq]
//   [dg]     bus p_max_mw

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "svrsim/feeder.hpp"

namespace svrsim {

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

inline double parse_double(const std::string& tok, const std::string& file, int line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw ParseError(file, line, "expected a number, got '" + tok + "'");
    return v;
}

inline int parse_flag(const std::string& tok, const std::string& file, int line) {
    if (tok == "0") return 0;
    if (tok == "1") return 1;
    throw ParseError(file, line, "expected 0 or 1, got '" + tok + "'");
}

} // namespace detail

/// Parses a feeder definition from a stream. `name` is used in diagnostics.
inline Feeder parse_feeder(std::istream& in, const std::string& name) {
    using detail::parse_double;
    using detail::parse_flag;

    Feeder f;
    enum class Section { None, Base, Buses, Lines, Svr, Loads, Dg };
    Section section = Section::None;
    bool base_seen = false;

    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (auto hash = raw.find('#'); hash != std::string::npos)
            raw.erase(hash);
        auto fields = detail::split_fields(raw);
        if (fields.empty()) continue;

        if (fields[0].front() == '[') {
            if (fields.size() != 1 || fields[0].back() != ']')
                throw ParseError(name, lineno, "malformed section header");
            const std::string sec = fields[0].substr(1, fields[0].size() - 2);
            if (sec == "base") section = Section::Base;
            else if (sec == "buses") section = Section::Buses;
            else if (sec == "lines") section = Section::Lines;
            else if (sec == "svr") section = Section::Svr;
            else if (sec == "loads") section = Section::Loads;
            else if (sec == "dg") section = Section::Dg;
            else throw ParseError(name, lineno, "unknown section [" + sec + "]");
            continue;
        }

        switch (section) {
        case Section::None:
            throw ParseError(name, lineno, "data before any section header");
        case Section::Base: {
            if (fields.size() != 1)
                throw ParseError(name, lineno, "[base] takes exactly one field: base_mva");
            if (base_seen)
                throw ParseError(name, lineno, "duplicate [base] entry");
            f.base_mva = parse_double(fields[0], name, lineno);
            base_seen = true;
            break;
        }
        case Section::Buses: {
            Bus b;
            if (fields.size() != 3 && fields.size() != 4)
                throw ParseError(name, lineno, "[buses] row needs 3 or 4 fields");
            b.id = fields[0];
            b.base_kv = parse_double(fields[1], name, lineno);
            b.is_slack = parse_flag(fields[2], name, lineno) != 0;
            if (b.is_slack != (fields.size() == 4))
                throw ParseError(name, lineno,
                                 "slack_setpoint_pu must be given exactly for the slack bus");
            if (b.is_slack)
                b.slack_setpoint_pu = parse_double(fields[3], name, lineno);
            f.buses.push_back(b);
            break;
        }
        case Section::Lines: {
            if (fields.size() != 4)
                throw ParseError(name, lineno, "[lines] row needs 4 fields: from to r_pu x_pu");
            LineBranch l;
            l.from = fields[0];
            l.to = fields[1];
            l.r_pu = parse_double(fields[2], name, lineno);
            l.x_pu = parse_double(fields[3], name, lineno);
            f.lines.push_back(l);
            break;
        }
        case Section::Svr: {
            if (fields.size() != 7 && fields.size() != 8)
                throw ParseError(name, lineno,
                                 "[svr] row needs 7 fields (plus optional half|full)");
            SvrBranch s;
            s.from = fields[0];
            s.to = fields[1];
            s.controller.v_ref_pu = parse_double(fields[2], name, lineno);
            s.controller.deadband_pu = parse_double(fields[3], name, lineno);
            s.controller.hysteresis_pu = parse_double(fields[4], name, lineno);
            s.controller.t1_s = parse_double(fields[5], name, lineno);
            s.controller.t2_s = parse_double(fields[6], name, lineno);
            if (fields.size() == 8) {
                if (fields[7] == "half") s.controller.band_is_full_width = false;
                else if (fields[7] == "full") s.controller.band_is_full_width = true;
                else throw ParseError(name, lineno, "band mode must be 'half' or 'full'");
            }
            f.svrs.push_back(s);
            break;
        }
        case Section::Loads: {
            if (fields.size() != 3 && fields.size() != 9)
                throw ParseError(name, lineno,
                                 "[loads] row needs 3 fields, or 9 with ZIP fractions");
            ZipLoad ld;
            ld.bus = fields[0];
            ld.p0_mw = parse_double(fields[1], name, lineno);
            ld.q0_mvar = parse_double(fields[2], name, lineno);
            if (fields.size() == 9) {
                ld.zp = parse_double(fields[3], name, lineno);
                ld.ip = parse_double(fields[4], name, lineno);
                ld.pp = parse_double(fields[5], name, lineno);
                ld.zq = parse_double(fields[6], name, lineno);
                ld.iq = parse_double(fields[7], name, lineno);
                ld.pq = parse_double(fields[8], name, lineno);
            }
            f.loads.push_back(ld);
            break;
        }
        case Section::Dg: {
            if (fields.size() != 2)
                throw ParseError(name, lineno, "[dg] row needs 2 fields: bus p_max_mw");
            DgUnit dg;
            dg.bus = fields[0];
            dg.p_max_mw = parse_double(fields[1], name, lineno);
            f.dgs.push_back(dg);
            break;
        }
        }
    }

    f.validate();
    return f;
}

/// Loads and validates a feeder definition file.
inline Feeder load_feeder(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open feeder file '" + path + "'");
    return parse_feeder(in, path);
}

namespace detail {

inline std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

/// Canonical text form; parsing it back yields a field-identical feeder.
inline std::string serialize_feeder(const Feeder& f) {
    using detail::fmt_full;
    std::ostringstream os;
    os << "[base]\n" << fmt_full(f.base_mva) << "\n";
    os << "[buses]\n";
    for (const Bus& b : f.buses) {
        os << b.id << " " << fmt_full(b.base_kv) << " " << (b.is_slack ? 1 : 0);
        if (b.is_slack) os << " " << fmt_full(b.slack_setpoint_pu);
        os << "\n";
    }
    if (!f.lines.empty()) {
        os << "[lines]\n";
        for (const LineBranch& l : f.lines)
            os << l.from << " " << l.to << " " << fmt_full(l.r_pu) << " "
               << fmt_full(l.x_pu) << "\n";
    }
    if (!f.svrs.empty()) {
        os << "[svr]\n";
        for (const SvrBranch& s : f.svrs)
            os << s.from << " " << s.to << " " << fmt_full(s.controller.v_ref_pu)
               << " " << fmt_full(s.controller.deadband_pu) << " "
               << fmt_full(s.controller.hysteresis_pu) << " "
               << fmt_full(s.controller.t1_s) << " " << fmt_full(s.controller.t2_s)
               << " " << (s.controller.band_is_full_width ? "full" : "half") << "\n";
    }
    if (!f.loads.empty()) {
        os << "[loads]\n";
        for (const ZipLoad& ld : f.loads)
            os << ld.bus << " " << fmt_full(ld.p0_mw) << " " << fmt_full(ld.q0_mvar)
               << " " << fmt_full(ld.zp) << " " << fmt_full(ld.ip) << " "
               << fmt_full(ld.pp) << " " << fmt_full(ld.zq) << " " << fmt_full(ld.iq)
               << " " << fmt_full(ld.pq) << "\n";
    }
    if (!f.dgs.empty()) {
        os << "[dg]\n";
        for (const DgUnit& dg : f.dgs)
            os << dg.bus << " " << fmt_full(dg.p_max_mw) << "\n";
    }
    return os.str();
}

inline void save_feeder(const Feeder& f, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write feeder file '" + path + "'");
    out << serialize_feeder(f);
}

} // namespace svrsim
