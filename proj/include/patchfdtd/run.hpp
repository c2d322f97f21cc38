// Copyright 2026 The patchfdtd Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PATCHFDTD_RUN_HPP
#define PATCHFDTD_RUN_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "patchfdtd/cpml.hpp"
#include "patchfdtd/farfield.hpp"
#include "patchfdtd/geometry.hpp"
#include "patchfdtd/netan.hpp"
#include "patchfdtd/port.hpp"

namespace patchfdtd {

inline constexpr int kRunSchemaVersion = 1;

struct PatternRequest {
    bool enabled = true;
    double start_hz = 2.30e9;
    double stop_hz = 2.60e9;
    double step_hz = 10e6;
    int stride = 4;
    int margin_cells = 5;
    double theta_step_deg = 2.0;
    double phi_step_deg = 2.0;
    std::vector<std::string> cuts{"xz", "yz", "azimuth:45"};
    double ripple_theta_deg = 45.0;
};

struct RunConfig {
    AntennaSpec antenna = build_default_antenna();
    // Sweep-parameter overrides applied on top of `antenna` (name, value).
    std::vector<std::pair<std::string, double>> antenna_overrides;
    double resolution = 0.5e-3;
    int padding_cells = 10;
    int pml_cells = 10;
    double cfl_factor = 0.99;
    CpmlParams cpml;
    double f0 = 2.5e9;
    double f_span = 0.75e9;
    double amplitude = 1.0;
    double delay_tau = 4.0;
    double f_start = 2.0e9;
    double f_stop = 3.0e9;
    int f_points = 501;
    double source_impedance = 50.0;
    double flux_fraction = 1e-7;
    long long max_steps = 200000;
    int nan_check_interval = 100;
    bool write_port_csv = true;
    bool write_impedance_csv = true;
    bool band_report = true;
    bool rlc_fit = true;
    PatternRequest pattern;
    // tan delta of the paired run used for the conduction/dielectric split.
    std::optional<double> efficiency_pair_tan_delta;
    std::string output_dir = "patchfdtd_out";
    unsigned long long seed = 0;
};

// Parses and validates a config document; unknown keys and out-of-range
// values throw ConfigError naming the field. `base_dir` resolves a relative
// "antenna_file".
RunConfig run_config_from_json(const nlohmann::json& doc, const std::string& base_dir = ".");
RunConfig load_run_config(const std::string& path);
nlohmann::json to_json(const RunConfig& c);
// Cross-field checks (frequencies inside the excitation band, Nyquist,
// grid feasibility). Throws ConfigError.
void validate(const RunConfig& c);
// `antenna` with the overrides applied.
AntennaSpec effective_antenna(const RunConfig& c);

struct SimulationResult {
    VoxelModel model;
    Waveform waveform;
    PortRecord record;
    std::optional<HuygensSurface> surface;
    long long steps = 0;
    Termination termination = Termination::MaxSteps;
    double flux_peak = 0.0;
};

// Runs the time loop for one antenna. workers = 0 uses default_workers().
SimulationResult simulate(const RunConfig& config, int workers = 0);

struct RunSummary {
    BandReport band;
    std::optional<RlcFit> rlc;
    std::string rlc_error;
    std::optional<PatternMetrics> pattern;
    std::optional<EfficiencyReport> efficiency;
    double efficiency_frequency = 0.0;
    long long steps = 0;
    Termination termination = Termination::MaxSteps;
    double wall_clock_s = 0.0;
    std::map<std::string, std::string> assumptions;
    std::vector<std::string> notes;
};

struct RunOutputs {
    SimulationResult sim;
    FrequencyResponse response;
    std::optional<FarFieldPattern> pattern;
    RunSummary summary;
};

// Simulation plus analyses. Writes nothing.
RunOutputs run(const RunConfig& config, int workers = 0);

// Writes every requested artifact into config.output_dir (created).
void write_artifacts(const RunConfig& config, const RunOutputs& out);

nlohmann::json to_json(const RunSummary& s);

struct SweepRow {
    double value = 0.0;
    bool ok = false;
    std::string error;
    RunSummary summary;
};

// One run per value (validated up front), artifacts under
// output_dir/<param>=<value>/, table output_dir/sweep.csv sorted by value.
// parallel runs use one simulation per worker thread.
std::vector<SweepRow> sweep(const RunConfig& config, const std::string& param,
                            std::vector<double> values, bool parallel, int workers = 0);
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);
std::string sweep_dir_name(const std::string& param, double value);

// Pattern and efficiency at the accumulated frequency nearest `f`, with
// accepted power from the port record.
FarFieldPattern pattern_at(const HuygensSurface& surface, const PortRecord& record, double f,
                           const PatternRequest& req);

}  // namespace patchfdtd

#endif  // PATCHFDTD_RUN_HPP
