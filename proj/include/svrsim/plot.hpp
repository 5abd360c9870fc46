#pragma once

// Standalone SVG figures from run series: tap staircases and voltage
// profiles. Files are self-contained vector graphics; no external plotting
// tool is invoked.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "svrsim/compare.hpp"

namespace svrsim {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool staircase = false;
};

namespace detail {

inline const char* plot_color(std::size_t i) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                    "#bcbd22", "#17becf"};
    return palette[i % (sizeof palette / sizeof palette[0])];
}

inline double nice_step(double range, int target_ticks) {
    if (range <= 0.0) return 1.0;
    const double raw = range / target_ticks;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    double m = 10.0;
    if (norm <= 1.0) m = 1.0;
    else if (norm <= 2.0) m = 2.0;
    else if (norm <= 5.0) m = 5.0;
    return m * mag;
}

inline std::string fmt_tick(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", (std::abs(v) < 1e-12 ? 0.0 : v));
    return buf;
}

} // namespace detail

/// Renders series into an SVG file. Throws (and writes nothing) when there
/// is no data to plot.
inline void write_svg_plot(const std::string& path, const std::string& title,
                           const std::string& x_label, const std::string& y_label,
                           const std::vector<PlotSeries>& series) {
    bool any = false;
    for (const PlotSeries& s : series) any = any || !s.x.empty();
    if (series.empty() || !any)
        throw Error("plot '" + title + "': no data to plot");

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const PlotSeries& s : series) {
        if (s.x.size() != s.y.size())
            throw Error("plot '" + title + "': series '" + s.label + "' length mismatch");
        for (double v : s.x) { xmin = std::min(xmin, v); xmax = std::max(xmax, v); }
        for (double v : s.y) { ymin = std::min(ymin, v); ymax = std::max(ymax, v); }
    }
    if (xmax <= xmin) xmax = xmin + 1.0;
    if (ymax <= ymin) { ymax += 0.5; ymin -= 0.5; }
    const double ypad = 0.04 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    const double W = 860, H = 560;
    const double ml = 72, mr = 24, mt = 40, mb = 56;
    const double pw = W - ml - mr, ph = H - mt - mb;
    auto X = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto Y = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * ph; };

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
       << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\""
       << " text-anchor=\"middle\">" << title << "</text>\n";

    // grid + ticks
    const double xstep = detail::nice_step(xmax - xmin, 8);
    const double ystep = detail::nice_step(ymax - ymin, 8);
    os << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    for (double x = std::ceil(xmin / xstep) * xstep; x <= xmax + 1e-9; x += xstep) {
        os << "<line x1=\"" << X(x) << "\" y1=\"" << mt << "\" x2=\"" << X(x)
           << "\" y2=\"" << mt + ph << "\" stroke=\"#e0e0e0\"/>\n";
        os << "<text x=\"" << X(x) << "\" y=\"" << mt + ph + 16
           << "\" text-anchor=\"middle\">" << detail::fmt_tick(x) << "</text>\n";
    }
    for (double y = std::ceil(ymin / ystep) * ystep; y <= ymax + 1e-9; y += ystep) {
        os << "<line x1=\"" << ml << "\" y1=\"" << Y(y) << "\" x2=\"" << ml + pw
           << "\" y2=\"" << Y(y) << "\" stroke=\"#e0e0e0\"/>\n";
        os << "<text x=\"" << ml - 6 << "\" y=\"" << Y(y) + 4
           << "\" text-anchor=\"end\">" << detail::fmt_tick(y) << "</text>\n";
    }
    os << "</g>\n";

    os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\""
       << ph << "\" fill=\"none\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << H - 14
       << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">"
       << x_label << "</text>\n";
    os << "<text x=\"18\" y=\"" << mt + ph / 2
       << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\""
       << " transform=\"rotate(-90 18 " << mt + ph / 2 << ")\">" << y_label
       << "</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const PlotSeries& s = series[i];
        if (s.x.empty()) continue;
        os << "<polyline fill=\"none\" stroke=\"" << detail::plot_color(i)
           << "\" stroke-width=\"1.6\" points=\"";
        char buf[64];
        for (std::size_t j = 0; j < s.x.size(); ++j) {
            if (s.staircase && j > 0) {
                std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(s.x[j]), Y(s.y[j - 1]));
                os << buf;
            }
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(s.x[j]), Y(s.y[j]));
            os << buf;
        }
        os << "\"/>\n";
    }

    // legend
    os << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    const double lx = ml + pw - 170, ly0 = mt + 12;
    for (std::size_t i = 0; i < series.size() && i < 12; ++i) {
        const double ly = ly0 + 16.0 * static_cast<double>(i);
        os << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 22
           << "\" y2=\"" << ly - 4 << "\" stroke=\"" << detail::plot_color(i)
           << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << lx + 28 << "\" y=\"" << ly << "\">" << series[i].label
           << "</text>\n";
    }
    os << "</g>\n</svg>\n";

    std::ofstream out(path);
    if (!out)
        throw Error("cannot write '" + path + "'");
    out << os.str();
}

/// Tap position staircase per run.
inline void plot_tap_evolution(const std::vector<RunSeries>& runs,
                               const std::string& path) {
    std::vector<PlotSeries> series;
    for (const RunSeries& r : runs) {
        PlotSeries s;
        s.label = r.engine;
        s.staircase = true;
        s.x = r.time_s;
        s.y.reserve(r.tap.size());
        for (int t : r.tap) s.y.push_back(t);
        series.push_back(std::move(s));
    }
    write_svg_plot(path, "SVR tap evolution", "time [s]", "tap position", series);
}

/// Voltage magnitudes over time; one series per (run, bus). An empty bus
/// filter plots every bus recorded in the first run.
inline void plot_voltage_profiles(const std::vector<RunSeries>& runs,
                                  std::vector<std::string> buses,
                                  const std::string& path) {
    if (runs.empty())
        throw Error("plot: no runs given");
    if (buses.empty()) buses = runs[0].bus_ids;
    std::vector<PlotSeries> series;
    for (const RunSeries& r : runs) {
        for (const std::string& bus : buses) {
            auto it = std::find(r.bus_ids.begin(), r.bus_ids.end(), bus);
            if (it == r.bus_ids.end()) continue;
            const std::size_t col = static_cast<std::size_t>(it - r.bus_ids.begin());
            PlotSeries s;
            s.label = r.engine + " " + bus;
            s.x = r.time_s;
            s.y.reserve(r.v.size());
            for (const auto& row : r.v) s.y.push_back(row[col]);
            series.push_back(std::move(s));
        }
    }
    write_svg_plot(path, "Voltage profiles", "time [s]", "voltage [p.u.]", series);
}

} // namespace svrsim
