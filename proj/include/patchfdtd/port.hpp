// Copyright 2026 The patchfdtd Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PATCHFDTD_PORT_HPP
#define PATCHFDTD_PORT_HPP

#include <string>
#include <vector>

#include "patchfdtd/engine.hpp"
#include "patchfdtd/geometry.hpp"

namespace patchfdtd {

// Gaussian-modulated cosine s(t) = A exp(-((t-t0)/tau)^2) cos(2 pi f0 (t-t0)).
// The envelope spectrum falls to -20 dB at f0 +- f_span when
// tau = sqrt(ln 10) / (pi f_span).
struct Waveform {
    double f0 = 2.5e9;
    double f_span = 0.75e9;
    double tau = 0.0;
    double t0 = 0.0;
    double amplitude = 1.0;
};

Waveform make_waveform(double f0 = 2.5e9, double f_span = 0.75e9, double amplitude = 1.0,
                       double delay_in_tau = 4.0);
void validate(const Waveform& w);
double waveform_sample(const Waveform& w, double t);
// Time after which |s| stays below e^-16 A.
double waveform_end(const Waveform& w);

// Port sign convention: v = -Ez dz is the potential of the top of the gap
// relative to the ground plane; i is the +z current through the gap, i.e.
// the current delivered into the feed pin.
struct PortSample {
    double v = 0.0;
    double i = 0.0;
};

// Thevenin source in series with the port resistor. The resistor is part of
// the material map (voxelize adds it); this adds the source current density
// Vs / (R dx dy) at the E half step, evaluated at t = (n + 1/2) dt.
void apply_port(FieldState& state, const Engine& engine, const PortEdge& port, double vs);
void apply_port(FieldState& state, const Engine& engine, const PortEdge& port, const Waveform& w,
                double t);

// Instantaneous gap voltage (E time level) and H circulation around the
// port edge (H time level, half a step earlier than v).
PortSample record_port(const FieldState& state, const GridSpec& grid, const PortEdge& port);

struct PortRecord {
    double dt = 0.0;
    double port_resistance = 50.0;
    std::vector<double> t;
    std::vector<double> v;
    std::vector<double> i;
    std::vector<double> source;
};

// Collects samples after every step. The H circulation from step n + 1/2 is
// averaged with the one from n - 1/2 to place i on the E time grid, so
// sample n is only complete once step n + 1 has been observed.
class PortRecorder {
public:
    PortRecorder(double dt, double port_resistance);

    // Call once before the first step and after every step (with the source
    // applied). `source` is the Thevenin voltage at the state's E time.
    void observe(const FieldState& state, const GridSpec& grid, const PortEdge& port,
                 double source);

    const PortRecord& record() const { return rec_; }
    std::size_t size() const { return rec_.v.size(); }

private:
    PortRecord rec_;
    bool has_pending_ = false;
    double pending_t_ = 0.0, pending_v_ = 0.0, pending_s_ = 0.0;
    double prev_half_i_ = 0.0;
};

enum class Termination { FluxDecay, MaxSteps };

const char* termination_name(Termination t);

// Stops when the windowed peak of |v i| has decayed below `fraction` of the
// overall peak, after the source has switched off.
class FluxMonitor {
public:
    FluxMonitor(double fraction, std::size_t window);

    void push(double flux);
    bool decayed() const;
    double peak() const { return peak_; }

private:
    double fraction_;
    std::size_t window_;
    double peak_ = 0.0;
    std::vector<double> ring_;
    std::size_t pos_ = 0;
    std::size_t seen_ = 0;
};

void write_port_csv(const std::string& path, const PortRecord& record);
// Throws ConfigError naming the first bad row.
PortRecord read_port_csv(const std::string& path, double port_resistance = 50.0);

}  // namespace patchfdtd

#endif  // PATCHFDTD_PORT_HPP
