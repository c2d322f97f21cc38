// Copyright 2026 The patchfdtd Authors
// SPDX-License-Identifier: Apache-2.0

#include "patchfdtd/port.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "patchfdtd/constants.hpp"
#include "patchfdtd/error.hpp"

namespace patchfdtd {

Waveform make_waveform(double f0, double f_span, double amplitude, double delay_in_tau) {
    Waveform w;
    w.f0 = f0;
    w.f_span = f_span;
    w.amplitude = amplitude;
    w.tau = std::sqrt(std::log(10.0)) / (kPi * f_span);
    w.t0 = delay_in_tau * w.tau;
    validate(w);
    return w;
}

void validate(const Waveform& w) {
    if (!(w.f0 > 0) || !(w.f_span > 0)) throw InvalidParameter("waveform f0 and f_span must be > 0");
    if (!(w.f_span < w.f0)) throw InvalidParameter("waveform f_span must be below f0");
    if (!(w.tau > 0)) throw InvalidParameter("waveform tau must be > 0");
    if (w.t0 < 4.0 * w.tau * (1 - 1e-12)) throw InvalidParameter("waveform needs t0 >= 4 tau");
    if (!std::isfinite(w.amplitude)) throw InvalidParameter("waveform amplitude must be finite");
}

double waveform_sample(const Waveform& w, double t) {
    const double u = (t - w.t0) / w.tau;
    return w.amplitude * std::exp(-u * u) * std::cos(2.0 * kPi * w.f0 * (t - w.t0));
}

double waveform_end(const Waveform& w) { return w.t0 + 4.0 * w.tau; }

void apply_port(FieldState& state, const Engine& engine, const PortEdge& port, double vs) {
    if (vs == 0.0) return;
    const GridSpec& g = engine.grid();
    const std::size_t idx = g.index(port.i, port.j, port.k);
    const int a = static_cast<int>(port.axis);
    const double area = g.dx * g.dy * g.dz / g.spacing(port.axis);
    state.f[a][idx] -= engine.cb(port.axis, idx) * vs / (port.resistance * area);
}

void apply_port(FieldState& state, const Engine& engine, const PortEdge& port, const Waveform& w,
                double t) {
    apply_port(state, engine, port, waveform_sample(w, t));
}

PortSample record_port(const FieldState& state, const GridSpec& g, const PortEdge& p) {
    const int a = static_cast<int>(p.axis);
    const int b = (a + 1) % 3, c = (a + 2) % 3;
    std::array<int, 3> n{p.i, p.j, p.k};
    auto at = [&](int comp, int db, int dc) {
        std::array<int, 3> m = n;
        m[b] += db;
        m[c] += dc;
        if (m[b] < 0 && g.periodic(static_cast<Axis>(b))) m[b] += g.cells(static_cast<Axis>(b));
        if (m[c] < 0 && g.periodic(static_cast<Axis>(c))) m[c] += g.cells(static_cast<Axis>(c));
        if (m[b] < 0 || m[c] < 0) return 0.0;
        return state.f[3 + comp][g.index(m[0], m[1], m[2])];
    };
    const double db = g.spacing(static_cast<Axis>(b)), dc = g.spacing(static_cast<Axis>(c));
    // For Ez: (Hy(i) - Hy(i-1)) dy - (Hx(j) - Hx(j-1)) dx.
    PortSample s;
    s.v = -state.f[a][g.index(p.i, p.j, p.k)] * g.spacing(p.axis);
    s.i = (at(c, 0, 0) - at(c, -1, 0)) * dc - (at(b, 0, 0) - at(b, 0, -1)) * db;
    return s;
}

PortRecorder::PortRecorder(double dt, double port_resistance) {
    rec_.dt = dt;
    rec_.port_resistance = port_resistance;
}

void PortRecorder::observe(const FieldState& state, const GridSpec& grid, const PortEdge& port,
                           double source) {
    const PortSample s = record_port(state, grid, port);
    if (has_pending_) {
        rec_.t.push_back(pending_t_);
        rec_.v.push_back(pending_v_);
        rec_.i.push_back(0.5 * (prev_half_i_ + s.i));
        rec_.source.push_back(pending_s_);
    }
    has_pending_ = true;
    pending_t_ = static_cast<double>(state.time_index) * rec_.dt;
    pending_v_ = s.v;
    pending_s_ = source;
    prev_half_i_ = s.i;
}

const char* termination_name(Termination t) {
    return t == Termination::FluxDecay ? "flux_decay" : "max_steps";
}

FluxMonitor::FluxMonitor(double fraction, std::size_t window)
    : fraction_(fraction), window_(std::max<std::size_t>(window, 1)), ring_(window_, 0.0) {
    if (!(fraction > 0) || fraction >= 1) throw InvalidParameter("flux fraction must lie in (0, 1)");
}

void FluxMonitor::push(double flux) {
    const double a = std::abs(flux);
    peak_ = std::max(peak_, a);
    ring_[pos_] = a;
    pos_ = (pos_ + 1) % window_;
    ++seen_;
}

bool FluxMonitor::decayed() const {
    if (seen_ < window_ || peak_ <= 0.0) return false;
    return *std::max_element(ring_.begin(), ring_.end()) < fraction_ * peak_;
}

void write_port_csv(const std::string& path, const PortRecord& r) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw Error("cannot write " + path);
    std::fputs("t,v,i,source\n", f);
    for (std::size_t n = 0; n < r.v.size(); ++n) {
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", r.t[n], r.v[n], r.i[n], r.source[n]);
    }
    std::fclose(f);
}

PortRecord read_port_csv(const std::string& path, double port_resistance) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open port record " + path);
    std::string line;
    if (!std::getline(in, line) || line != "t,v,i,source") {
        throw ConfigError(path + ": row 1: expected header 't,v,i,source'");
    }
    PortRecord r;
    r.port_resistance = port_resistance;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        double x[4];
        int used = 0;
        char tail = 0;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf%n%c", &x[0], &x[1], &x[2], &x[3], &used,
                        &tail) != 4 ||
            static_cast<std::size_t>(used) != line.size()) {
            throw ConfigError(path + ": row " + std::to_string(row) + ": expected 4 numbers");
        }
        for (double v : x) {
            if (!std::isfinite(v)) {
                throw ConfigError(path + ": row " + std::to_string(row) + ": non-finite value");
            }
        }
        r.t.push_back(x[0]);
        r.v.push_back(x[1]);
        r.i.push_back(x[2]);
        r.source.push_back(x[3]);
    }
    if (r.t.size() < 2) throw ConfigError(path + ": fewer than 2 samples");
    r.dt = r.t[1] - r.t[0];
    if (!(r.dt > 0)) throw ConfigError(path + ": row 3: time must increase");
    for (std::size_t n = 1; n < r.t.size(); ++n) {
        if (std::abs(r.t[n] - r.t[n - 1] - r.dt) > 1e-6 * r.dt) {
            throw ConfigError(path + ": row " + std::to_string(n + 2) + ": non-uniform time step");
        }
    }
    return r;
}

}  // namespace patchfdtd
