// Copyright 2026 The patchfdtd Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include "patchfdtd/constants.hpp"
#include "patchfdtd/engine.hpp"
#include "patchfdtd/error.hpp"
#include "patchfdtd/port.hpp"

using namespace patchfdtd;

namespace {

// A lone 50 ohm gap at the centre of a small CPML-bounded box, with short
// PEC arms above and below so the port sees a small dipole.
struct Rig {
    GridSpec g;
    MaterialMap m;
    PortEdge port;

    Rig() : g(make_grid(24, 24, 24, 1e-3, 1e-3, 1e-3, 8)), m(g) {
        port = {Axis::Z, 12, 12, 12, 50.0};
        m.add_lumped_resistor(Axis::Z, 12, 12, 12, 50.0);
        for (int k = 9; k < 12; ++k) m.set_pec(Axis::Z, 12, 12, k);
        for (int k = 13; k < 16; ++k) m.set_pec(Axis::Z, 12, 12, k);
    }
};

// Runs `steps` steps with Thevenin voltage vs(t) and returns the record.
PortRecord drive(const Rig& r, const std::function<double(double)>& vs, int steps) {
    const Engine engine(r.g, r.m, CpmlParams{}, EngineOptions{});
    FieldState s = engine.make_state();
    PortRecorder rec(r.g.dt, r.port.resistance);
    rec.observe(s, r.g, r.port, vs(0.0));
    for (int n = 0; n < steps; ++n) {
        engine.step(s);
        apply_port(s, engine, r.port, vs((n + 0.5) * r.g.dt));
        rec.observe(s, r.g, r.port, vs((n + 1) * r.g.dt));
    }
    return rec.record();
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("patchfdtd_test_port_" + name);
}

}  // namespace

TEST(Waveform, PeakAndOnset) {
    const Waveform w = make_waveform();
    EXPECT_DOUBLE_EQ(waveform_sample(w, w.t0), w.amplitude);
    EXPECT_NEAR(w.t0, 4.0 * w.tau, 1e-24);
    EXPECT_LE(std::abs(waveform_sample(w, 0.0)), std::exp(-16.0) * w.amplitude);
    EXPECT_NEAR(w.tau, std::sqrt(std::log(10.0)) / (kPi * 0.75e9), 1e-22);
    EXPECT_LE(std::abs(waveform_sample(w, waveform_end(w))), std::exp(-16.0) * w.amplitude);
}

TEST(Waveform, InvalidParameters) {
    EXPECT_THROW(make_waveform(-1.0), InvalidParameter);
    EXPECT_THROW(make_waveform(2.5e9, 3e9), InvalidParameter);
    EXPECT_THROW(make_waveform(2.5e9, 0.75e9, 1.0, 2.0), InvalidParameter);
}

TEST(Waveform, SampledSpectrumCoversBand) {
    const Waveform w = make_waveform();
    const double dt = 1e-12;
    const int n = static_cast<int>(waveform_end(w) / dt) + 1;
    auto mag = [&](double f) {
        std::complex<double> acc{0.0, 0.0};
        for (int k = 0; k < n; ++k) {
            acc += waveform_sample(w, k * dt) * std::polar(1.0, -2.0 * kPi * f * k * dt);
        }
        return std::abs(acc);
    };
    double peak = 0.0;
    for (double f = 1.0e9; f <= 4.0e9; f += 5e6) peak = std::max(peak, mag(f));
    for (double f = 2.0e9; f <= 3.0e9 + 1; f += 10e6) {
        EXPECT_GE(20.0 * std::log10(mag(f) / peak), -20.0) << f;
    }
}

TEST(PortProbe, GapVoltageIsLineIntegral) {
    const GridSpec g = make_grid(6, 6, 6, 0.5e-3, 0.5e-3, 0.5e-3, 0);
    FieldState s(g);
    const PortEdge port{Axis::Z, 3, 3, 2, 50.0};
    EXPECT_EQ(record_port(s, g, port).i, 0.0);
    s[Component::Ez][g.index(3, 3, 2)] = -1.0;
    EXPECT_NEAR(record_port(s, g, port).v, 0.5e-3, 1e-18);
}

TEST(PortProbe, CurrentIsDiscreteCirculation) {
    const double d = 0.5e-3, h = 0.25;
    const GridSpec g = make_grid(6, 6, 6, d, d, d, 0);
    FieldState s(g);
    const PortEdge port{Axis::Z, 3, 3, 2, 50.0};
    s[Component::Hy][g.index(3, 3, 2)] = h;
    s[Component::Hy][g.index(2, 3, 2)] = -h;
    s[Component::Hx][g.index(3, 3, 2)] = -h;
    s[Component::Hx][g.index(3, 2, 2)] = h;
    EXPECT_NEAR(record_port(s, g, port).i, 4.0 * h * d, 1e-18);
}

TEST(PortDrive, ZeroSourceMatchesFreeStepping) {
    const Rig r;
    const Engine engine(r.g, r.m);
    FieldState a = engine.make_state(), b = engine.make_state();
    a[Component::Ez][r.g.index(10, 10, 10)] = 1.0;
    b[Component::Ez][r.g.index(10, 10, 10)] = 1.0;
    for (int n = 0; n < 50; ++n) {
        engine.step(a);
        engine.step(b);
        apply_port(b, engine, r.port, 0.0);
    }
    EXPECT_EQ(a.f, b.f);
}

TEST(PortDrive, LinearInAmplitude) {
    const Rig r;
    const Waveform w1 = make_waveform(10e9, 5e9, 1.0);
    const Waveform w2 = make_waveform(10e9, 5e9, 2.0);
    const PortRecord a = drive(r, [&](double t) { return waveform_sample(w1, t); }, 300);
    const PortRecord b = drive(r, [&](double t) { return waveform_sample(w2, t); }, 300);
    ASSERT_EQ(a.v.size(), b.v.size());
    for (std::size_t n = 0; n < a.v.size(); ++n) {
        ASSERT_EQ(2.0 * a.v[n], b.v[n]) << n;
        ASSERT_EQ(2.0 * a.i[n], b.i[n]) << n;
    }
}

TEST(PortDrive, CausalAtDistantProbe) {
    const Rig r;
    const Engine engine(r.g, r.m);
    FieldState s = engine.make_state();
    const Waveform w = make_waveform(10e9, 5e9);
    const PortEdge probe{Axis::Z, 12, 12 + 8, 12, 50.0};
    double peak = 0.0, early = 0.0;
    for (int n = 0; n < 200; ++n) {
        engine.step(s);
        apply_port(s, engine, r.port, w, (n + 0.5) * r.g.dt);
        const PortSample p = record_port(s, r.g, probe);
        // The stencil moves information at most one cell per step.
        if (n < 7) early = std::max(early, std::abs(p.v) + std::abs(p.i));
        peak = std::max(peak, std::abs(p.v));
    }
    EXPECT_GT(peak, 0.0);
    EXPECT_LE(early, 1e-12 * peak);
}

TEST(PortDrive, DcStepSettlesToSourceVoltage) {
    const Rig r;
    const double rise = 100e-12;
    auto step = [&](double t) {
        if (t >= rise) return 1.0;
        return 0.5 - 0.5 * std::cos(kPi * t / rise);
    };
    const PortRecord rec = drive(r, step, 4000);
    const std::size_t n = rec.v.size();
    for (std::size_t k = n - 100; k < n; ++k) {
        EXPECT_NEAR(rec.v[k], 1.0, 0.01) << k;
        EXPECT_LT(std::abs(rec.i[k]), 0.01 / 50.0) << k;
    }
}

TEST(PortRecorder, CurrentOnEmTimeGrid) {
    const Rig r;
    const Waveform w = make_waveform(10e9, 5e9);
    const PortRecord rec = drive(r, [&](double t) { return waveform_sample(w, t); }, 200);
    ASSERT_EQ(rec.v.size(), rec.t.size());
    for (std::size_t n = 0; n < rec.t.size(); ++n) {
        EXPECT_NEAR(rec.t[n], n * r.g.dt, 1e-24);
        EXPECT_DOUBLE_EQ(rec.source[n], waveform_sample(w, n * r.g.dt));
    }
}

TEST(FluxMonitor, FiresAfterWindowedDecay) {
    FluxMonitor m(1e-3, 4);
    for (double f : {0.1, 1.0, 0.5, 0.1}) m.push(f);
    EXPECT_FALSE(m.decayed());
    for (double f : {1e-4, 1e-4, 1e-4}) m.push(f);
    EXPECT_FALSE(m.decayed());
    m.push(-1e-4);
    EXPECT_TRUE(m.decayed());
    EXPECT_EQ(m.peak(), 1.0);
    EXPECT_THROW(FluxMonitor(0.0, 4), InvalidParameter);
}

TEST(PortCsv, RoundTripIsExact) {
    const Rig r;
    const Waveform w = make_waveform(10e9, 5e9);
    const PortRecord a = drive(r, [&](double t) { return waveform_sample(w, t); }, 120);
    const auto path = temp_file("roundtrip.csv");
    write_port_csv(path.string(), a);
    const PortRecord b = read_port_csv(path.string(), 50.0);
    EXPECT_EQ(a.t, b.t);
    EXPECT_EQ(a.v, b.v);
    EXPECT_EQ(a.i, b.i);
    EXPECT_EQ(a.source, b.source);
    EXPECT_DOUBLE_EQ(a.dt, b.dt);
    std::filesystem::remove(path);
}

TEST(PortCsv, SchemaErrorsNameTheRow) {
    const auto path = temp_file("bad.csv");
    {
        std::ofstream out(path);
        out << "t,v,i,source\n0,0,0,0\n1e-12,1,2\n";
    }
    try {
        read_port_csv(path.string());
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos) << e.what();
    }
    {
        std::ofstream out(path);
        out << "time,v,i,source\n0,0,0,0\n";
    }
    EXPECT_THROW(read_port_csv(path.string()), ConfigError);
    std::filesystem::remove(path);
}
