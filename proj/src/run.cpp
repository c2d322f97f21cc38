// Copyright 2026 The patchfdtd Authors
// SPDX-License-Identifier: Apache-2.0

#include "patchfdtd/run.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "patchfdtd/constants.hpp"
#include "patchfdtd/engine.hpp"
#include "patchfdtd/error.hpp"

namespace patchfdtd {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Config parsing

namespace {

class Reader {
public:
    Reader(const json& obj, std::string where, std::initializer_list<const char*> keys)
        : obj_(obj), where_(std::move(where)) {
        if (!obj.is_object()) throw ConfigError(where_ + " must be a JSON object");
        for (const auto& [k, _] : obj.items()) {
            if (std::none_of(keys.begin(), keys.end(), [&](const char* s) { return k == s; })) {
                throw ConfigError("unknown key '" + field(k) + "'");
            }
        }
    }

    std::string field(const std::string& k) const { return where_.empty() ? k : where_ + "." + k; }
    bool has(const char* k) const { return obj_.contains(k); }
    const json& at(const char* k) const { return obj_.at(k); }

    void number(const char* k, double& out) const {
        if (!has(k)) return;
        if (!obj_.at(k).is_number()) throw ConfigError(field(k) + " must be a number");
        out = obj_.at(k).get<double>();
        if (!std::isfinite(out)) throw ConfigError(field(k) + " must be finite");
    }
    template <class Int>
    void integer(const char* k, Int& out) const {
        if (!has(k)) return;
        if (!obj_.at(k).is_number_integer()) throw ConfigError(field(k) + " must be an integer");
        out = obj_.at(k).get<Int>();
    }
    void boolean(const char* k, bool& out) const {
        if (!has(k)) return;
        if (!obj_.at(k).is_boolean()) throw ConfigError(field(k) + " must be true or false");
        out = obj_.at(k).get<bool>();
    }
    void string(const char* k, std::string& out) const {
        if (!has(k)) return;
        if (!obj_.at(k).is_string()) throw ConfigError(field(k) + " must be a string");
        out = obj_.at(k).get<std::string>();
    }

private:
    const json& obj_;
    std::string where_;
};

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw ConfigError(field + " " + what);
}

}  // namespace

AntennaSpec effective_antenna(const RunConfig& c) {
    AntennaSpec a = c.antenna;
    for (const auto& [name, value] : c.antenna_overrides) set_parameter(a, name, value);
    return a;
}

RunConfig run_config_from_json(const json& doc, const std::string& base_dir) {
    Reader top(doc, "",
               {"schema_version", "antenna", "antenna_file", "antenna_overrides", "grid", "waveform",
                "frequency_grid", "source_impedance_ohm", "termination", "outputs", "output_dir",
                "seed"});
    if (!top.has("schema_version")) throw ConfigError("schema_version is required");
    if (!top.at("schema_version").is_number_integer() ||
        top.at("schema_version").get<int>() != kRunSchemaVersion) {
        throw ConfigError("schema_version must be " + std::to_string(kRunSchemaVersion));
    }
    RunConfig c;
    if (top.has("antenna") && top.has("antenna_file")) {
        throw ConfigError("antenna and antenna_file are mutually exclusive");
    }
    try {
        if (top.has("antenna")) c.antenna = antenna_from_json(top.at("antenna"));
        if (top.has("antenna_file")) {
            std::string rel;
            top.string("antenna_file", rel);
            const fs::path p = fs::path(rel).is_absolute() ? fs::path(rel) : fs::path(base_dir) / rel;
            std::ifstream in(p);
            if (!in) throw ConfigError("antenna_file: cannot open " + p.string());
            c.antenna = antenna_from_json(json::parse(in));
        }
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("antenna: ") + e.what());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("antenna_file: ") + e.what());
    } catch (const Error& e) {
        throw ConfigError(std::string("antenna: ") + e.what());
    }
    if (top.has("antenna_overrides")) {
        const json& o = top.at("antenna_overrides");
        if (!o.is_object()) throw ConfigError("antenna_overrides must be an object");
        const auto& names = sweep_parameter_names();
        for (const auto& [k, v] : o.items()) {
            if (std::find(names.begin(), names.end(), k) == names.end()) {
                throw ConfigError("unknown key 'antenna_overrides." + k + "'");
            }
            if (!v.is_number()) throw ConfigError("antenna_overrides." + k + " must be a number");
            c.antenna_overrides.emplace_back(k, v.get<double>());
        }
    }
    if (top.has("grid")) {
        Reader g(top.at("grid"), "grid",
                 {"resolution_m", "padding_cells", "pml_cells", "cfl_factor", "cpml"});
        g.number("resolution_m", c.resolution);
        g.integer("padding_cells", c.padding_cells);
        g.integer("pml_cells", c.pml_cells);
        g.number("cfl_factor", c.cfl_factor);
        if (g.has("cpml")) {
            Reader p(g.at("cpml"), "grid.cpml", {"order", "sigma_factor", "kappa_max", "alpha_max"});
            p.integer("order", c.cpml.order);
            p.number("sigma_factor", c.cpml.sigma_factor);
            p.number("kappa_max", c.cpml.kappa_max);
            p.number("alpha_max", c.cpml.alpha_max);
        }
    }
    if (top.has("waveform")) {
        Reader w(top.at("waveform"), "waveform", {"f0_hz", "f_span_hz", "amplitude_v", "delay_tau"});
        w.number("f0_hz", c.f0);
        w.number("f_span_hz", c.f_span);
        w.number("amplitude_v", c.amplitude);
        w.number("delay_tau", c.delay_tau);
    }
    if (top.has("frequency_grid")) {
        Reader f(top.at("frequency_grid"), "frequency_grid", {"start_hz", "stop_hz", "points"});
        f.number("start_hz", c.f_start);
        f.number("stop_hz", c.f_stop);
        f.integer("points", c.f_points);
    }
    top.number("source_impedance_ohm", c.source_impedance);
    if (top.has("termination")) {
        Reader t(top.at("termination"), "termination",
                 {"flux_fraction", "max_steps", "nan_check_interval"});
        t.number("flux_fraction", c.flux_fraction);
        t.integer("max_steps", c.max_steps);
        t.integer("nan_check_interval", c.nan_check_interval);
    }
    if (top.has("outputs")) {
        Reader o(top.at("outputs"), "outputs",
                 {"port_csv", "impedance_csv", "band_report", "rlc_fit", "pattern",
                  "efficiency_pair_tan_delta"});
        o.boolean("port_csv", c.write_port_csv);
        o.boolean("impedance_csv", c.write_impedance_csv);
        o.boolean("band_report", c.band_report);
        o.boolean("rlc_fit", c.rlc_fit);
        if (o.has("efficiency_pair_tan_delta") && !o.at("efficiency_pair_tan_delta").is_null()) {
            double v = 0.0;
            o.number("efficiency_pair_tan_delta", v);
            c.efficiency_pair_tan_delta = v;
        }
        if (o.has("pattern")) {
            Reader p(o.at("pattern"), "outputs.pattern",
                     {"enabled", "start_hz", "stop_hz", "step_hz", "stride", "margin_cells",
                      "theta_step_deg", "phi_step_deg", "cuts", "ripple_theta_deg"});
            PatternRequest& r = c.pattern;
            p.boolean("enabled", r.enabled);
            p.number("start_hz", r.start_hz);
            p.number("stop_hz", r.stop_hz);
            p.number("step_hz", r.step_hz);
            p.integer("stride", r.stride);
            p.integer("margin_cells", r.margin_cells);
            p.number("theta_step_deg", r.theta_step_deg);
            p.number("phi_step_deg", r.phi_step_deg);
            p.number("ripple_theta_deg", r.ripple_theta_deg);
            if (p.has("cuts")) {
                const json& cuts = p.at("cuts");
                if (!cuts.is_array()) throw ConfigError("outputs.pattern.cuts must be an array");
                r.cuts.clear();
                for (const auto& v : cuts) {
                    if (!v.is_string()) throw ConfigError("outputs.pattern.cuts entries must be strings");
                    r.cuts.push_back(v.get<std::string>());
                }
            }
        }
    }
    top.string("output_dir", c.output_dir);
    top.integer("seed", c.seed);
    validate(c);
    return c;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    const fs::path base = fs::path(path).parent_path();
    return run_config_from_json(doc, base.empty() ? "." : base.string());
}

void validate(const RunConfig& c) {
    require(c.resolution > 0, "grid.resolution_m", "must be positive");
    require(c.padding_cells >= 10, "grid.padding_cells", "must be >= 10");
    require(c.pml_cells >= 0, "grid.pml_cells", "must be >= 0");
    require(c.cfl_factor > 0 && c.cfl_factor <= 1, "grid.cfl_factor", "must lie in (0, 1]");
    require(c.cpml.order >= 1, "grid.cpml.order", "must be >= 1");
    require(c.cpml.sigma_factor >= 0, "grid.cpml.sigma_factor", "must be >= 0");
    require(c.cpml.kappa_max >= 1, "grid.cpml.kappa_max", "must be >= 1");
    require(c.cpml.alpha_max >= 0, "grid.cpml.alpha_max", "must be >= 0");
    require(c.f0 > 0, "waveform.f0_hz", "must be positive");
    require(c.f_span > 0 && c.f_span < c.f0, "waveform.f_span_hz", "must lie in (0, f0)");
    require(c.delay_tau >= 4, "waveform.delay_tau", "must be >= 4");
    require(c.amplitude != 0, "waveform.amplitude_v", "must be non-zero");
    require(c.f_points >= 3, "frequency_grid.points", "must be >= 3");
    require(c.f_stop > c.f_start && c.f_start > 0, "frequency_grid", "needs 0 < start_hz < stop_hz");
    require(c.source_impedance > 0, "source_impedance_ohm", "must be positive");
    require(c.flux_fraction > 0 && c.flux_fraction < 1, "termination.flux_fraction",
            "must lie in (0, 1)");
    require(c.max_steps > 0, "termination.max_steps", "must be positive");
    require(c.nan_check_interval >= 0, "termination.nan_check_interval", "must be >= 0");

    AntennaSpec a;
    try {
        a = effective_antenna(c);
        validate(a);
    } catch (const Error& e) {
        throw ConfigError(std::string("antenna: ") + e.what());
    }
    if (c.resolution > a.substrate_thickness / 3.0 + 1e-15) {
        throw ConfigError("grid.resolution_m must be <= substrate_thickness / 3");
    }
    const int nsub = static_cast<int>(std::ceil(a.substrate_thickness / c.resolution - 1e-9));
    const double dz = a.substrate_thickness / nsub;
    const double dt = courant_timestep(c.resolution, c.resolution, dz, c.cfl_factor);
    const double nyquist = 0.5 / dt;
    const double lo = c.f0 - c.f_span, hi = c.f0 + c.f_span;
    auto in_band = [&](double f, const std::string& field) {
        if (f >= nyquist) {
            std::ostringstream m;
            m << field << " = " << f << " Hz is above the Nyquist limit " << nyquist << " Hz";
            throw ConfigError(m.str());
        }
        if (f < lo * (1 - 1e-12) || f > hi * (1 + 1e-12)) {
            std::ostringstream m;
            m << field << " = " << f << " Hz lies outside the excitation band [" << lo << ", " << hi
              << "] Hz";
            throw ConfigError(m.str());
        }
    };
    in_band(c.f_start, "frequency_grid.start_hz");
    in_band(c.f_stop, "frequency_grid.stop_hz");
    const PatternRequest& p = c.pattern;
    if (p.enabled) {
        require(p.step_hz > 0 && p.stop_hz >= p.start_hz, "outputs.pattern",
                "needs step_hz > 0 and stop_hz >= start_hz");
        in_band(p.start_hz, "outputs.pattern.start_hz");
        in_band(p.stop_hz, "outputs.pattern.stop_hz");
        require(p.stride >= 1, "outputs.pattern.stride", "must be >= 1");
        if (p.stop_hz >= 0.5 / (dt * p.stride)) {
            throw ConfigError("outputs.pattern.stride is too large for stop_hz (Nyquist)");
        }
        require(p.margin_cells >= 1 && p.margin_cells < c.padding_cells, "outputs.pattern.margin_cells",
                "must lie in [1, padding_cells)");
        require(p.theta_step_deg > 0 && p.theta_step_deg <= 30, "outputs.pattern.theta_step_deg",
                "must lie in (0, 30]");
        require(p.phi_step_deg > 0 && p.phi_step_deg <= 30, "outputs.pattern.phi_step_deg",
                "must lie in (0, 30]");
        require(std::abs(180.0 / p.theta_step_deg - std::round(180.0 / p.theta_step_deg)) < 1e-9,
                "outputs.pattern.theta_step_deg", "must divide 180");
        require(std::abs(90.0 / p.phi_step_deg - std::round(90.0 / p.phi_step_deg)) < 1e-9,
                "outputs.pattern.phi_step_deg", "must divide 90");
        for (const auto& cut : p.cuts) {
            if (cut == "xz" || cut == "yz") continue;
            if (cut.rfind("azimuth:", 0) == 0) {
                try {
                    std::size_t used = 0;
                    const double th = std::stod(cut.substr(8), &used);
                    if (used == cut.size() - 8 && th >= 0 && th <= 180) continue;
                } catch (const std::exception&) {
                }
            }
            throw ConfigError("outputs.pattern.cuts: bad cut '" + cut + "'");
        }
        require(p.ripple_theta_deg >= 0 && p.ripple_theta_deg <= 180, "outputs.pattern.ripple_theta_deg",
                "must lie in [0, 180]");
    }
    if (c.efficiency_pair_tan_delta) {
        require(*c.efficiency_pair_tan_delta >= 0 && *c.efficiency_pair_tan_delta < 1,
                "outputs.efficiency_pair_tan_delta", "must lie in [0, 1)");
        require(p.enabled, "outputs.efficiency_pair_tan_delta", "requires outputs.pattern.enabled");
    }
    require(!c.output_dir.empty(), "output_dir", "must not be empty");
    try {
        voxelize(a, c.resolution, c.padding_cells, c.pml_cells, c.cfl_factor);
    } catch (const GeometryError& e) {
        throw ConfigError(std::string("antenna: ") + e.what() + " (grid.resolution_m = " +
                          std::to_string(c.resolution) + ")");
    }
}

json to_json(const RunConfig& c) {
    json overrides = json::object();
    for (const auto& [k, v] : c.antenna_overrides) overrides[k] = v;
    return {
        {"schema_version", kRunSchemaVersion},
        {"antenna", to_json(c.antenna)},
        {"antenna_overrides", overrides},
        {"grid",
         {{"resolution_m", c.resolution},
          {"padding_cells", c.padding_cells},
          {"pml_cells", c.pml_cells},
          {"cfl_factor", c.cfl_factor},
          {"cpml",
           {{"order", c.cpml.order},
            {"sigma_factor", c.cpml.sigma_factor},
            {"kappa_max", c.cpml.kappa_max},
            {"alpha_max", c.cpml.alpha_max}}}}},
        {"waveform",
         {{"f0_hz", c.f0}, {"f_span_hz", c.f_span}, {"amplitude_v", c.amplitude}, {"delay_tau", c.delay_tau}}},
        {"frequency_grid", {{"start_hz", c.f_start}, {"stop_hz", c.f_stop}, {"points", c.f_points}}},
        {"source_impedance_ohm", c.source_impedance},
        {"termination",
         {{"flux_fraction", c.flux_fraction},
          {"max_steps", c.max_steps},
          {"nan_check_interval", c.nan_check_interval}}},
        {"outputs",
         {{"port_csv", c.write_port_csv},
          {"impedance_csv", c.write_impedance_csv},
          {"band_report", c.band_report},
          {"rlc_fit", c.rlc_fit},
          {"efficiency_pair_tan_delta",
           c.efficiency_pair_tan_delta ? json(*c.efficiency_pair_tan_delta) : json(nullptr)},
          {"pattern",
           {{"enabled", c.pattern.enabled},
            {"start_hz", c.pattern.start_hz},
            {"stop_hz", c.pattern.stop_hz},
            {"step_hz", c.pattern.step_hz},
            {"stride", c.pattern.stride},
            {"margin_cells", c.pattern.margin_cells},
            {"theta_step_deg", c.pattern.theta_step_deg},
            {"phi_step_deg", c.pattern.phi_step_deg},
            {"cuts", c.pattern.cuts},
            {"ripple_theta_deg", c.pattern.ripple_theta_deg}}}}},
        {"output_dir", c.output_dir},
        {"seed", c.seed},
    };
}

// ---------------------------------------------------------------------------
// Simulation

namespace {

std::vector<double> pattern_freqs(const PatternRequest& p) {
    std::vector<double> f;
    const int n = static_cast<int>(std::floor((p.stop_hz - p.start_hz) / p.step_hz + 1e-9));
    for (int k = 0; k <= n; ++k) f.push_back(p.start_hz + k * p.step_hz);
    return f;
}

}  // namespace

SimulationResult simulate(const RunConfig& c, int workers) {
    validate(c);
    const AntennaSpec spec = effective_antenna(c);
    SimulationResult r{voxelize(spec, c.resolution, c.padding_cells, c.pml_cells, c.cfl_factor),
                       make_waveform(c.f0, c.f_span, c.amplitude, c.delay_tau), {}, std::nullopt, 0,
                       Termination::MaxSteps, 0.0};
    const GridSpec& g = r.model.grid;
    EngineOptions opt;
    opt.nan_check_interval = c.nan_check_interval;
    opt.workers = workers;
    const Engine engine(g, r.model.materials, c.cpml, opt);
    FieldState state = engine.make_state();
    PortRecorder rec(g.dt, r.model.port.resistance);
    rec.observe(state, g, r.model.port, waveform_sample(r.waveform, 0.0));
    if (c.pattern.enabled) {
        std::array<int, 3> lo{}, hi{};
        for (int a = 0; a < 3; ++a) {
            lo[a] = r.model.structure_lo[a] - c.pattern.margin_cells;
            hi[a] = r.model.structure_hi[a] + c.pattern.margin_cells;
        }
        r.surface.emplace(g, lo, hi, pattern_freqs(c.pattern), c.pattern.stride);
    }
    // Two periods of the lowest analysed frequency.
    const auto window = static_cast<std::size_t>(std::ceil(2.0 / (c.f_start * g.dt)));
    FluxMonitor monitor(c.flux_fraction, window);
    const double t_off = waveform_end(r.waveform);
    long long n = 0;
    for (; n < c.max_steps; ++n) {
        engine.step(state);
        apply_port(state, engine, r.model.port, r.waveform, (static_cast<double>(n) + 0.5) * g.dt);
        const double t = static_cast<double>(n + 1) * g.dt;
        rec.observe(state, g, r.model.port, waveform_sample(r.waveform, t));
        if (r.surface) r.surface->accumulate(state);
        const PortSample s = record_port(state, g, r.model.port);
        monitor.push(s.v * s.i);
        if (t > t_off && monitor.decayed()) {
            ++n;
            r.termination = Termination::FluxDecay;
            break;
        }
    }
    engine.check_finite(state);
    r.steps = n;
    r.flux_peak = monitor.peak();
    r.record = rec.record();
    return r;
}

FarFieldPattern pattern_at(const HuygensSurface& s, const PortRecord& rec, double f,
                           const PatternRequest& req) {
    const auto& fs_ = s.freqs();
    std::size_t q = 0;
    for (std::size_t k = 1; k < fs_.size(); ++k) {
        if (std::abs(fs_[k] - f) < std::abs(fs_[q] - f)) q = k;
    }
    FarFieldPattern p = ntff(s, fs_[q], theta_grid(req.theta_step_deg), phi_grid(req.phi_step_deg));
    const auto v = dft_at(rec.v, rec.dt, {fs_[q]});
    const auto i = dft_at(rec.i, rec.dt, {fs_[q]});
    p.p_in = 0.5 * (v[0] * std::conj(i[0])).real();
    return p;
}

namespace {

// P_rad / P_in interpolated linearly between the accumulated frequencies
// bracketing f.
double cd_at(const HuygensSurface& s, const PortRecord& rec, double f, const PatternRequest& req) {
    const auto& fs_ = s.freqs();
    if (fs_.size() == 1 || f <= fs_.front()) {
        const auto p = pattern_at(s, rec, fs_.front(), req);
        return p.p_rad / p.p_in;
    }
    if (f >= fs_.back()) {
        const auto p = pattern_at(s, rec, fs_.back(), req);
        return p.p_rad / p.p_in;
    }
    std::size_t k = 1;
    while (fs_[k] < f) ++k;
    const auto a = pattern_at(s, rec, fs_[k - 1], req);
    const auto b = pattern_at(s, rec, fs_[k], req);
    const double u = (f - fs_[k - 1]) / (fs_[k] - fs_[k - 1]);
    return (1 - u) * a.p_rad / a.p_in + u * b.p_rad / b.p_in;
}

std::map<std::string, std::string> assumption_ledger(const AntennaSpec& a, const RunConfig& c) {
    std::map<std::string, std::string> m = a.provenance;
    for (const auto& [name, _] : c.antenna_overrides) m["override:" + name] = "assumed";
    return m;
}

}  // namespace

RunOutputs run(const RunConfig& c, int workers) {
    const auto t0 = std::chrono::steady_clock::now();
    RunOutputs out{simulate(c, workers), {}, std::nullopt, {}};
    const AntennaSpec spec = effective_antenna(c);
    RunSummary& s = out.summary;
    s.steps = out.sim.steps;
    s.termination = out.sim.termination;
    s.assumptions = assumption_ledger(spec, c);
    {
        std::ostringstream eps;
        eps << "FR4 eps_r = " << spec.eps_r << " (not stated by the source; config parameter)";
        s.notes.push_back(eps.str());
    }
    s.notes.push_back("copper modeled as PEC; conduction efficiency is 1 by construction");
    s.notes.push_back("dielectric loss as constant conductivity 2 pi f eps0 eps_r tan_delta at f_design");
    s.notes.push_back("pins are single-edge PEC columns; pin radius is not resolved");

    const auto freqs = linear_grid(c.f_start, c.f_stop, c.f_points);
    out.response = analyze_port(out.sim.record, freqs, c.source_impedance);
    s.band = band_metrics(out.response);
    if (c.rlc_fit) {
        try {
            s.rlc = fit_parallel_rlc(out.response.z, out.response.f);
        } catch (const FitError& e) {
            s.rlc_error = e.what();
        }
    }
    if (out.sim.surface) {
        const double f_target = s.band.f_res.value_or(s.band.f_rl_min);
        out.pattern = pattern_at(*out.sim.surface, out.sim.record, f_target, c.pattern);
        s.pattern = pattern_metrics(*out.pattern, c.pattern.ripple_theta_deg);
        const auto& fs_ = out.sim.surface->freqs();
        if (f_target < fs_.front() || f_target > fs_.back()) {
            s.notes.push_back("resonance outside the pattern frequency range; nearest accumulated "
                              "frequency used");
        }
        const double cd = cd_at(*out.sim.surface, out.sim.record, f_target, c.pattern);
        const cplx gamma = interpolate(out.response.f, out.response.gamma, f_target);
        std::optional<double> cd_ref;
        if (c.efficiency_pair_tan_delta) {
            RunConfig pair = c;
            pair.antenna_overrides.emplace_back("tan_delta", *c.efficiency_pair_tan_delta);
            pair.rlc_fit = false;
            const SimulationResult ps = simulate(pair, workers);
            cd_ref = cd_at(*ps.surface, ps.record, f_target, c.pattern);
        }
        s.efficiency_frequency = f_target;
        try {
            // P_in normalised to 1 W: the report takes the ratio.
            s.efficiency = efficiency_report(cd, 1.0, gamma, cd_ref);
        } catch (const Error& e) {
            s.notes.push_back(std::string("efficiency unavailable: ") + e.what());
        }
    }
    s.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

json to_json(const RunSummary& s) {
    json j;
    const auto bw = s.band.bandwidth();
    j["f_res_hz"] = s.band.f_res ? json(*s.band.f_res) : json(nullptr);
    j["resonance"] = s.band.f_res ? "found" : "no_resonance";
    j["rl_min_db"] = s.band.rl_min_db;
    j["f_rl_min_hz"] = s.band.f_rl_min;
    j["bandwidth_hz"] = bw ? json(*bw) : json(nullptr);
    j["band_low_hz"] = s.band.band_low ? json(*s.band.band_low) : json(nullptr);
    j["band_high_hz"] = s.band.band_high ? json(*s.band.band_high) : json(nullptr);
    j["band_clipped"] = s.band.band_clipped;
    if (s.rlc) {
        j["rlc_fit"] = to_json(*s.rlc);
    } else {
        j["rlc_fit"] = nullptr;
        if (!s.rlc_error.empty()) j["rlc_fit_error"] = s.rlc_error;
    }
    if (s.pattern) {
        j["pattern_frequency_hz"] = s.pattern->frequency;
        j["peak_gain_db"] = std::isfinite(s.pattern->peak_gain_db) ? json(s.pattern->peak_gain_db)
                                                                   : json(nullptr);
        j["peak_gain_theta_deg"] = s.pattern->peak_theta_deg;
        j["peak_gain_phi_deg"] = s.pattern->peak_phi_deg;
        j["peak_directivity_dbi"] = s.pattern->peak_directivity_dbi;
        j["hpbw_xz_deg"] = s.pattern->hpbw_xz.width_deg;
        j["hpbw_yz_deg"] = s.pattern->hpbw_yz.width_deg;
        j["azimuth_ripple_db"] = s.pattern->azimuth_ripple_db;
        j["azimuth_ripple_theta_deg"] = s.pattern->ripple_theta_deg;
    }
    if (s.efficiency) {
        j["efficiency"] = to_json(*s.efficiency);
        j["efficiency_frequency_hz"] = s.efficiency_frequency;
    }
    j["steps"] = s.steps;
    j["termination"] = termination_name(s.termination);
    j["assumptions"] = s.assumptions;
    j["notes"] = s.notes;
    return j;
}

namespace {

void write_json(const fs::path& p, const json& j) {
    std::ofstream out(p);
    if (!out) throw Error("cannot write " + p.string());
    out << j.dump(2) << "\n";
}

std::string cut_file_name(const std::string& cut) {
    std::string s = cut;
    std::replace(s.begin(), s.end(), ':', '_');
    return "cut_" + s + ".csv";
}

}  // namespace

void write_artifacts(const RunConfig& c, const RunOutputs& out) {
    const fs::path dir(c.output_dir);
    fs::create_directories(dir);
    write_json(dir / "config_resolved.json", to_json(c));
    if (c.write_port_csv) write_port_csv((dir / "port.csv").string(), out.sim.record);
    if (c.write_impedance_csv) write_response_csv((dir / "impedance.csv").string(), out.response);
    if (c.band_report) write_json(dir / "band_report.json", to_json(out.summary.band));
    if (c.rlc_fit) {
        write_json(dir / "rlc_fit.json", out.summary.rlc ? to_json(*out.summary.rlc)
                                                        : json{{"error", out.summary.rlc_error}});
    }
    if (out.pattern) {
        out.sim.surface->save((dir / "surface.bin").string());
        write_pattern_csv((dir / "pattern.csv").string(), *out.pattern);
        const auto g = out.pattern->p_in > 0 ? gain(*out.pattern) : directivity(*out.pattern);
        for (const auto& cut : c.pattern.cuts) {
            write_cut_csv((dir / cut_file_name(cut)).string(), make_cut(*out.pattern, g, cut));
        }
        write_json(dir / "pattern_metrics.json", to_json(*out.summary.pattern));
    }
    if (out.summary.efficiency) write_json(dir / "efficiency.json", to_json(*out.summary.efficiency));
    write_json(dir / "summary.json", to_json(out.summary));
    write_json(dir / "run_log.json", {{"wall_clock_s", out.summary.wall_clock_s},
                                      {"steps", out.summary.steps},
                                      {"termination", termination_name(out.summary.termination)}});
}

// ---------------------------------------------------------------------------
// Sweeps

std::string sweep_dir_name(const std::string& param, double value) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, value);
    return param + "=" + std::string(buf, r.ptr);
}

std::vector<SweepRow> sweep(const RunConfig& base, const std::string& param,
                            std::vector<double> values, bool parallel, int workers) {
    const auto& names = sweep_parameter_names();
    if (std::find(names.begin(), names.end(), param) == names.end()) {
        throw ConfigError("unknown sweep parameter '" + param + "'");
    }
    std::sort(values.begin(), values.end());
    std::vector<RunConfig> configs;
    for (double v : values) {
        RunConfig c = base;
        c.antenna_overrides.emplace_back(param, v);
        c.output_dir = (fs::path(base.output_dir) / sweep_dir_name(param, v)).string();
        try {
            validate(c);
        } catch (const ConfigError& e) {
            std::ostringstream m;
            m << "sweep value " << v << " for " << param << ": " << e.what();
            throw ConfigError(m.str());
        }
        configs.push_back(std::move(c));
    }
    std::vector<SweepRow> rows(values.size());
    auto one = [&](std::size_t k, int engine_workers) {
        rows[k].value = values[k];
        try {
            const RunOutputs o = run(configs[k], engine_workers);
            write_artifacts(configs[k], o);
            rows[k].summary = o.summary;
            rows[k].ok = true;
        } catch (const std::exception& e) {
            rows[k].error = e.what();
        }
    };
    const int nw = workers > 0 ? workers : default_workers();
    if (parallel && nw > 1 && values.size() > 1) {
        std::size_t next = 0;
        std::mutex mu;
        std::vector<std::thread> pool;
        for (int w = 0; w < std::min<int>(nw, static_cast<int>(values.size())); ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t k;
                    {
                        std::lock_guard<std::mutex> lock(mu);
                        if (next >= values.size()) return;
                        k = next++;
                    }
                    one(k, 1);
                }
            });
        }
        for (auto& t : pool) t.join();
    } else {
        for (std::size_t k = 0; k < values.size(); ++k) one(k, workers);
    }
    fs::create_directories(base.output_dir);
    write_sweep_csv((fs::path(base.output_dir) / "sweep.csv").string(), rows);
    return rows;
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw Error("cannot write " + path);
    std::fputs("value,f_res_hz,rl_min_db,bandwidth_hz\n", f);
    for (const auto& r : rows) {
        std::fprintf(f, "%.17g,", r.value);
        if (!r.ok) {
            std::fputs("failed,failed,failed\n", f);
            continue;
        }
        if (r.summary.band.f_res) {
            std::fprintf(f, "%.17g,", *r.summary.band.f_res);
        } else {
            std::fputs("no_resonance,", f);
        }
        std::fprintf(f, "%.17g,", r.summary.band.rl_min_db);
        if (const auto bw = r.summary.band.bandwidth()) {
            std::fprintf(f, "%.17g\n", *bw);
        } else {
            std::fputs("no_band\n", f);
        }
    }
    std::fclose(f);
}

}  // namespace patchfdtd
