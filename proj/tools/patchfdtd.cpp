// Copyright 2026 The patchfdtd Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Exit status: 0 success, 1 other failure,
// 2 configuration or input schema error, 3 solver instability.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "patchfdtd/error.hpp"
#include "patchfdtd/farfield.hpp"
#include "patchfdtd/netan.hpp"
#include "patchfdtd/port.hpp"
#include "patchfdtd/run.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace patchfdtd;

namespace {

constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitUnstable = 3;

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return (v && *v) ? std::string(v) : fallback;
}

void write_json(const fs::path& p, const json& j) {
    std::ofstream out(p);
    if (!out) throw Error("cannot write " + p.string());
    out << j.dump(2) << "\n";
}

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        while (used < item.size() && (item[used] == ' ' || item[used] == '\t')) ++used;
        if (used != item.size()) throw ConfigError("--values: '" + item + "' is not a number");
        out.push_back(v);
    }
    return out;
}

RunConfig config_with_env(const std::string& path) {
    RunConfig c = load_run_config(path);
    c.output_dir = env_or("PATCHFDTD_OUTPUT_DIR", c.output_dir);
    return c;
}

void print_summary(const RunSummary& s, const std::string& dir) {
    std::printf("output: %s\n", dir.c_str());
    if (s.band.f_res) {
        std::printf("f_res: %.6f GHz\n", *s.band.f_res / 1e9);
    } else {
        std::printf("f_res: no resonance in the analysed band\n");
    }
    std::printf("rl_min: %.2f dB at %.6f GHz\n", s.band.rl_min_db, s.band.f_rl_min / 1e9);
    if (const auto bw = s.band.bandwidth()) {
        std::printf("bandwidth(-10 dB): %.2f MHz%s\n", *bw / 1e6, s.band.band_clipped ? " (clipped)" : "");
    } else {
        std::printf("bandwidth(-10 dB): none\n");
    }
    if (s.pattern) {
        std::printf("peak gain: %.2f dB at theta %.0f deg, phi %.0f deg\n", s.pattern->peak_gain_db,
                    s.pattern->peak_theta_deg, s.pattern->peak_phi_deg);
        std::printf("azimuth ripple (theta %.0f deg): %.2f dB\n", s.pattern->ripple_theta_deg,
                    s.pattern->azimuth_ripple_db);
    }
    if (s.efficiency) std::printf("total efficiency: %.3f\n", s.efficiency->total);
    std::printf("steps: %lld (%s)\n", s.steps, termination_name(s.termination));
}

int cmd_simulate(const std::string& config_path, int workers) {
    const RunConfig c = config_with_env(config_path);
    const RunOutputs out = run(c, workers);
    write_artifacts(c, out);
    print_summary(out.summary, c.output_dir);
    return 0;
}

int cmd_analyze(const std::string& csv, double zs, const std::string& out_dir, double f_start,
                double f_stop, int points, bool fit) {
    const PortRecord rec = read_port_csv(csv, zs);
    if (!(f_start > 0) || !(f_stop > f_start) || points < 3) {
        throw ConfigError("frequency grid needs 0 < --f-start < --f-stop and --points >= 3");
    }
    const FrequencyResponse r = analyze_port(rec, linear_grid(f_start, f_stop, points), zs);
    const BandReport band = band_metrics(r);
    fs::create_directories(out_dir);
    write_response_csv((fs::path(out_dir) / "impedance.csv").string(), r);
    write_json(fs::path(out_dir) / "band_report.json", to_json(band));
    if (fit) {
        try {
            write_json(fs::path(out_dir) / "rlc_fit.json", to_json(fit_parallel_rlc(r.z, r.f)));
        } catch (const FitError& e) {
            write_json(fs::path(out_dir) / "rlc_fit.json", json{{"error", e.what()}});
        }
    }
    std::cout << to_json(band).dump(2) << "\n";
    return 0;
}

int cmd_pattern(const std::string& run_dir, double freq, const std::vector<std::string>& cuts,
                const std::string& out_dir) {
    const fs::path dir(run_dir);
    PatternRequest req;
    double zs = 50.0;
    if (fs::exists(dir / "config_resolved.json")) {
        const RunConfig c = load_run_config((dir / "config_resolved.json").string());
        req = c.pattern;
        zs = c.source_impedance;
    }
    if (!cuts.empty()) req.cuts = cuts;
    const HuygensSurface s = HuygensSurface::load((dir / "surface.bin").string());
    const PortRecord rec = read_port_csv((dir / "port.csv").string(), zs);
    if (!s.frequency_index(freq)) {
        std::fprintf(stderr, "note: %.9g Hz not accumulated; using the nearest surface frequency\n", freq);
    }
    const FarFieldPattern p = pattern_at(s, rec, freq, req);
    const auto g = p.p_in > 0 ? gain(p) : directivity(p);
    fs::create_directories(out_dir);
    write_pattern_csv((fs::path(out_dir) / "pattern.csv").string(), p);
    for (const auto& cut : req.cuts) {
        std::string name = cut;
        for (auto& ch : name) {
            if (ch == ':') ch = '_';
        }
        write_cut_csv((fs::path(out_dir) / ("cut_" + name + ".csv")).string(), make_cut(p, g, cut));
    }
    const PatternMetrics m = pattern_metrics(p, req.ripple_theta_deg);
    write_json(fs::path(out_dir) / "pattern_metrics.json", to_json(m));
    std::cout << to_json(m).dump(2) << "\n";
    return 0;
}

int cmd_fit(const std::string& csv, double zs, const std::string& out_dir) {
    const FrequencyResponse r = read_response_csv(csv, zs);
    const RlcFit fit = fit_parallel_rlc(r.z, r.f);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_json(fs::path(out_dir) / "rlc_fit.json", to_json(fit));
    }
    std::cout << to_json(fit).dump(2) << "\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& param, const std::string& values,
              bool parallel, int workers) {
    const RunConfig c = config_with_env(config_path);
    const auto rows = sweep(c, param, parse_values(values), parallel, workers);
    std::printf("value,f_res_hz,rl_min_db,bandwidth_hz\n");
    std::ifstream table(fs::path(c.output_dir) / "sweep.csv");
    std::string line;
    std::getline(table, line);
    while (std::getline(table, line)) std::printf("%s\n", line.c_str());
    for (const auto& r : rows) {
        if (!r.ok) std::fprintf(stderr, "value %.17g failed: %s\n", r.value, r.error.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FDTD solver and one-port antenna toolkit"};
    app.require_subcommand(1);
    int workers = 0;
    app.add_option("--workers", workers, "Engine threads (default: PATCHFDTD_WORKERS or all cores)")
        ->check(CLI::NonNegativeNumber);

    std::string config_path;
    auto* sim = app.add_subcommand("simulate", "Run one simulation and write all artifacts");
    sim->add_option("config", config_path, "Run configuration (JSON)")->required();

    std::string port_csv, analyze_out;
    double zs = 50.0, f_start = 2.0e9, f_stop = 3.0e9;
    int points = 501;
    bool no_fit = false;
    auto* an = app.add_subcommand("analyze", "Re-analyse a stored port record");
    an->add_option("port_csv", port_csv, "port.csv written by simulate")->required();
    an->add_option("--zs", zs, "Reference impedance in ohms")->check(CLI::PositiveNumber);
    an->add_option("--f-start", f_start, "First analysis frequency (Hz)");
    an->add_option("--f-stop", f_stop, "Last analysis frequency (Hz)");
    an->add_option("--points", points, "Number of analysis frequencies");
    an->add_option("--out", analyze_out, "Output directory (default: <csv dir>/analyze)");
    an->add_flag("--no-fit", no_fit, "Skip the parallel RLC fit");

    std::string run_dir, pattern_out;
    double freq = 2.45e9;
    std::vector<std::string> cuts;
    auto* pat = app.add_subcommand("pattern", "Far-field pattern from a stored Huygens surface");
    pat->add_option("run_dir", run_dir, "Directory written by simulate")->required();
    pat->add_option("--freq", freq, "Frequency (Hz); the nearest accumulated one is used");
    pat->add_option("--cut", cuts, "xz, yz or azimuth:<theta> (repeatable)");
    pat->add_option("--out", pattern_out, "Output directory (default: <run_dir>/pattern)");

    std::string imp_csv, fit_out;
    double fit_zs = 50.0;
    auto* fit = app.add_subcommand("fit-rlc", "Fit a parallel RLC to an impedance table");
    fit->add_option("impedance_csv", imp_csv, "impedance.csv")->required();
    fit->add_option("--zs", fit_zs, "Reference impedance in ohms")->check(CLI::PositiveNumber);
    fit->add_option("--out", fit_out, "Also write rlc_fit.json here");

    std::string sweep_config, param, values;
    bool parallel = false;
    auto* sw = app.add_subcommand("sweep", "One run per value of a geometry parameter");
    sw->add_option("config", sweep_config, "Run configuration (JSON)")->required();
    sw->add_option("--param", param, "Sweep parameter, e.g. feed_pin.x")->required();
    sw->add_option("--values", values, "Comma-separated SI values")->required();
    sw->add_flag("--parallel", parallel, "One simulation per worker thread");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*sim) return cmd_simulate(config_path, workers);
        if (*an) {
            const std::string out =
                !analyze_out.empty()
                    ? analyze_out
                    : env_or("PATCHFDTD_OUTPUT_DIR",
                             (fs::path(port_csv).parent_path() / "analyze").string());
            return cmd_analyze(port_csv, zs, out, f_start, f_stop, points, !no_fit);
        }
        if (*pat) {
            const std::string out =
                !pattern_out.empty()
                    ? pattern_out
                    : env_or("PATCHFDTD_OUTPUT_DIR", (fs::path(run_dir) / "pattern").string());
            return cmd_pattern(run_dir, freq, cuts, out);
        }
        if (*fit) return cmd_fit(imp_csv, fit_zs, fit_out);
        if (*sw) return cmd_sweep(sweep_config, param, values, parallel, workers);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const InstabilityError& e) {
        std::fprintf(stderr, "solver instability at step %lld: %s\n", e.time_index(), e.what());
        return kExitUnstable;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitError;
    }
    return kExitError;
}
