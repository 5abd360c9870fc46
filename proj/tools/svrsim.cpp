// svrsim command-line front end: run the engines over a feeder + scenario,
// emit CSV time series, comparison reports and SVG figures.
//
// Exit status: 0 all requested artifacts written, 2 input problem (missing
// or malformed file, unknown bus), 3 simulation failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "svrsim/compare.hpp"
#include "svrsim/engines.hpp"
#include "svrsim/feeder_io.hpp"
#include "svrsim/plot.hpp"
#include "svrsim/result_io.hpp"
#include "svrsim/scenario.hpp"

namespace fs = std::filesystem;
using namespace svrsim;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitEngine = 3;

void print_run_summary(const Feeder& f, const RunResult& r) {
    std::printf("%-8s final tap %+d, %d tap ops, wall %.3f s\n",
                engine_name(r.engine), r.tap.back().empty() ? 0 : r.tap.back()[0],
                r.total_tap_ops, r.wall_seconds);
    for (const SvrBranch& s : f.svrs) {
        auto v_of = [&](const std::string& id) {
            for (std::size_t i = 0; i < r.bus_ids.size(); ++i)
                if (r.bus_ids[i] == id) return r.v_pu.back()[i];
            return 0.0;
        };
        std::printf("         V(%s) = %.6f p.u., V(%s) = %.6f p.u.\n", s.from.c_str(),
                    v_of(s.from), s.to.c_str(), v_of(s.to));
    }
    if (!r.oscillation_times_s.empty())
        std::printf("         %zu instants flagged as control oscillation\n",
                    r.oscillation_times_s.size());
}

int cmd_run(const std::string& engine, const std::string& feeder_path,
            const std::string& scenario_path, const std::string& out_dir,
            const std::vector<std::string>& buses, const std::string& format) {
    Feeder feeder;
    Scenario scenario;
    try {
        feeder = load_feeder(feeder_path);
        scenario = load_scenario(scenario_path);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }

    std::vector<EngineKind> kinds;
    if (engine == "all")
        kinds = {EngineKind::Clf, EngineKind::Qsts, EngineKind::Dynamic};
    else if (engine == "clf") kinds = {EngineKind::Clf};
    else if (engine == "qsts") kinds = {EngineKind::Qsts};
    else if (engine == "dynamic") kinds = {EngineKind::Dynamic};
    else {
        std::cerr << "error: unknown engine '" << engine << "'\n";
        return kExitInput;
    }

    EngineOptions opts;
    opts.record_buses = buses;
    opts.feeder_tag = feeder_path;
    opts.scenario_tag = scenario_path;

    try {
        fs::create_directories(out_dir);
        std::vector<std::string> csv_paths;
        for (EngineKind k : kinds) {
            const RunResult r = run_engine(k, feeder, scenario, opts);
            const std::string base = (fs::path(out_dir) / engine_name(k)).string();
            write_run_csv(r, base + ".csv");
            write_events_csv(r, base + "_events.csv");
            csv_paths.push_back(base + ".csv");
            print_run_summary(feeder, r);
        }
        if (kinds.size() > 1) {
            std::vector<RunSeries> series;
            for (const std::string& p : csv_paths) series.push_back(read_run_csv(p));
            std::string designated = !buses.empty() ? buses.front()
                                     : !feeder.svrs.empty() ? feeder.svrs[0].to
                                                            : feeder.buses[0].id;
            const ComparisonReport rep = compare(series, designated);
            const bool csv_fmt = (format == "csv");
            const std::string rep_path =
                (fs::path(out_dir) / (csv_fmt ? "compare.csv" : "compare.txt")).string();
            std::ofstream out(rep_path);
            if (!out) throw Error("cannot write '" + rep_path + "'");
            out << (csv_fmt ? render_report_csv(rep) : render_report_text(rep));
            std::printf("comparison report written to %s\n", rep_path.c_str());
        }
    } catch (const SolveError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEngine;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return 0;
}

int cmd_compare(const std::vector<std::string>& paths, std::string bus,
                const std::string& out_path, const std::string& format) {
    try {
        std::vector<RunSeries> series;
        for (const std::string& p : paths) series.push_back(read_run_csv(p));
        if (bus.empty()) {
            if (series.front().bus_ids.empty())
                throw Error("'" + paths.front() + "' records no bus voltages");
            bus = series.front().bus_ids.front();
        }
        const ComparisonReport rep = compare(series, bus);
        const std::string text =
            (format == "csv") ? render_report_csv(rep) : render_report_text(rep);
        if (!out_path.empty()) {
            std::ofstream out(out_path);
            if (!out) throw Error("cannot write '" + out_path + "'");
            out << text;
        }
        std::cout << text;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return 0;
}

int cmd_plot(const std::vector<std::string>& paths, const std::vector<std::string>& buses,
             const std::string& out_dir) {
    try {
        std::vector<RunSeries> series;
        for (const std::string& p : paths) {
            RunSeries s = read_run_csv(p);
            if (s.time_s.empty())
                throw Error("'" + p + "' contains no data rows");
            series.push_back(std::move(s));
        }
        fs::create_directories(out_dir);
        const std::string tap_path = (fs::path(out_dir) / "tap_evolution.svg").string();
        const std::string volt_path =
            (fs::path(out_dir) / "voltage_profiles.svg").string();
        plot_tap_evolution(series, tap_path);
        plot_voltage_profiles(series, buses, volt_path);
        std::printf("wrote %s and %s\n", tap_path.c_str(), volt_path.c_str());
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distribution-feeder workbench: step voltage regulator runaway "
                 "analysis with CLF, QSTS and dynamic engines"};
    app.require_subcommand(1);

    // run
    std::string engine = "all", feeder_path, scenario_path, out_dir = "out";
    std::string format = "text";
    std::vector<std::string> buses;
    CLI::App* run = app.add_subcommand("run", "run one or all engines");
    run->add_option("--engine", engine, "clf | qsts | dynamic | all")
        ->check(CLI::IsMember({"clf", "qsts", "dynamic", "all"}));
    run->add_option("--feeder", feeder_path, "feeder definition file")->required();
    run->add_option("--scenario", scenario_path, "scenario file")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--bus", buses, "bus ids to record (default: all)")->take_all();
    run->add_option("--format", format, "comparison report format")
        ->check(CLI::IsMember({"text", "csv"}));

    // compare
    std::vector<std::string> cmp_paths;
    std::string cmp_bus, cmp_out;
    std::string cmp_format = "text";
    CLI::App* cmp = app.add_subcommand("compare", "compare result CSVs");
    cmp->add_option("csvs", cmp_paths, "result CSV files")->required()->expected(-2);
    cmp->add_option("--bus", cmp_bus, "designated bus (default: first recorded)");
    cmp->add_option("--out", cmp_out, "write the report here as well");
    cmp->add_option("--format", cmp_format, "report format")
        ->check(CLI::IsMember({"text", "csv"}));

    // plot
    std::vector<std::string> plot_paths, plot_buses;
    std::string plot_out = "out";
    CLI::App* plt = app.add_subcommand("plot", "render SVG figures from result CSVs");
    plt->add_option("csvs", plot_paths, "result CSV files")->required();
    plt->add_option("--bus", plot_buses, "buses for the voltage figure")->take_all();
    plt->add_option("--out", plot_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed())
        return cmd_run(engine, feeder_path, scenario_path, out_dir, buses, format);
    if (cmp->parsed())
        return cmd_compare(cmp_paths, cmp_bus, cmp_out, cmp_format);
    if (plt->parsed())
        return cmd_plot(plot_paths, plot_buses, plot_out);
    return 0;
}
