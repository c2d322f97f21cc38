// Copyright 2026 The patchfdtd Authors
// SPDX-License-Identifier: Apache-2.0

// Test-only measurement helpers. They drive the engine but compute every
// reference quantity (spectral peaks, time of flight, analytic modes) on
// their own, without touching the analysis modules under test.

#ifndef PATCHFDTD_TESTS_ORACLES_HPP
#define PATCHFDTD_TESTS_ORACLES_HPP

#include <cmath>
#include <complex>
#include <vector>

#include "patchfdtd/constants.hpp"
#include "patchfdtd/engine.hpp"

namespace oracle {

using patchfdtd::kPi;
using patchfdtd::kSpeedOfLight;

// |sum w[n] x[n] exp(-j 2 pi f n dt)| with a Hann window.
inline double hann_magnitude(const std::vector<double>& x, double dt, double f) {
    const std::size_t n = x.size();
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / (n - 1));
        const double ph = -2.0 * kPi * f * static_cast<double>(i) * dt;
        acc += w * x[i] * std::complex<double>(std::cos(ph), std::sin(ph));
    }
    return std::abs(acc);
}

// Frequency of the strongest spectral line in [f_lo, f_hi]: coarse scan then
// golden-section refinement of the windowed DTFT magnitude.
inline double spectral_peak(const std::vector<double>& x, double dt, double f_lo, double f_hi) {
    const int coarse = 400;
    double best_f = f_lo, best = -1.0;
    for (int i = 0; i <= coarse; ++i) {
        const double f = f_lo + (f_hi - f_lo) * i / coarse;
        const double m = hann_magnitude(x, dt, f);
        if (m > best) {
            best = m;
            best_f = f;
        }
    }
    const double step = (f_hi - f_lo) / coarse;
    double a = best_f - step, b = best_f + step;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = -hann_magnitude(x, dt, c), fd = -hann_magnitude(x, dt, d);
    for (int it = 0; it < 80 && (b - a) > 1e-9 * best_f; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = -hann_magnitude(x, dt, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = -hann_magnitude(x, dt, d);
        }
    }
    return 0.5 * (a + b);
}

// Analytic TM110 resonance of an a x b x c PEC box (c the shortest side).
inline double cavity_tm110(double a, double b) {
    return 0.5 * kSpeedOfLight * std::sqrt(1.0 / (a * a) + 1.0 / (b * b));
}

// Lowest resonance of the 30 x 20 x 10 mm air box meshed at `cell` metres,
// measured from the ring-down after a soft Ez pulse at the box centre.
inline double measured_cavity_resonance(double cell, double record_time = 40e-9) {
    using namespace patchfdtd;
    const int nx = static_cast<int>(std::lround(0.030 / cell));
    const int ny = static_cast<int>(std::lround(0.020 / cell));
    const int nz = static_cast<int>(std::lround(0.010 / cell));
    const GridSpec g = make_grid(nx, ny, nz, cell, cell, cell, 0, 0.99);
    MaterialMap mats(g);
    Engine engine(g, mats);
    FieldState s = engine.make_state();
    const double f0 = 9e9, tau = 1.0 / (kPi * 3e9), t0 = 4.0 * tau;
    const std::size_t src = g.index(nx / 2, ny / 2, nz / 2);
    const std::size_t probe = g.index(nx / 3, ny / 3, nz / 2);
    const auto src_steps = static_cast<long long>(std::ceil(2.0 * t0 / g.dt));
    const auto rec_steps = static_cast<long long>(std::ceil(record_time / g.dt));
    std::vector<double> trace;
    trace.reserve(static_cast<std::size_t>(rec_steps));
    for (long long n = 0; n < src_steps + rec_steps; ++n) {
        engine.step(s);
        if (n < src_steps) {
            const double t = (n + 0.5) * g.dt;
            const double u = (t - t0) / tau;
            s[Component::Ez][src] += std::exp(-u * u) * std::cos(2.0 * kPi * f0 * (t - t0));
        } else {
            trace.push_back(s[Component::Ez][probe]);
        }
    }
    return spectral_peak(trace, g.dt, 7e9, 11e9);
}

// Time-of-flight speed of a plane-wave pulse at `cells_per_wavelength`
// between two probe planes of a y-periodic, z-bounded guide (TEM).
inline double measured_plane_wave_speed(double cells_per_wavelength = 20.0) {
    using namespace patchfdtd;
    const double dx = 1e-3;
    GridSpec g;
    g.nx = 800;
    g.ny = 4;
    g.nz = 4;
    g.dx = g.dy = g.dz = dx;
    g.cfl_factor = 0.99;
    g.boundary[1] = Boundary::Periodic;
    g.dt = courant_timestep(dx, dx, dx, g.cfl_factor);
    validate(g);
    MaterialMap mats(g);
    Engine engine(g, mats);
    FieldState s = engine.make_state();
    const double f = kSpeedOfLight / (cells_per_wavelength * dx);
    const double tau = 2.0 / f, t0 = 4.0 * tau;
    const int i_src = 200, i_a = 300, i_b = 450;
    const double t_end = t0 + 4.0 * tau + (i_b - i_src) * dx / kSpeedOfLight;
    const auto steps = static_cast<long long>(std::ceil(t_end / g.dt));
    std::vector<double> a, b;
    for (long long n = 0; n < steps; ++n) {
        engine.step(s);
        const double t = (n + 0.5) * g.dt;
        const double u = (t - t0) / tau;
        const double v = std::exp(-u * u) * std::cos(2.0 * kPi * f * (t - t0));
        for (int j = 0; j < g.ny; ++j)
            for (int k = 0; k < g.nz; ++k) s[Component::Ez][g.index(i_src, j, k)] += v;
        a.push_back(s[Component::Ez][g.index(i_a, 0, 1)]);
        b.push_back(s[Component::Ez][g.index(i_b, 0, 1)]);
    }
    // Cross-correlation lag with parabolic refinement.
    const long long n = static_cast<long long>(a.size());
    auto xc = [&](long long lag) {
        double acc = 0.0;
        for (long long i = 0; i + lag < n; ++i) acc += a[i] * b[i + lag];
        return acc;
    };
    long long best = 0;
    double best_v = -1e300;
    for (long long lag = 0; lag < n; ++lag) {
        const double v = xc(lag);
        if (v > best_v) {
            best_v = v;
            best = lag;
        }
    }
    const double ym = xc(best - 1), y0 = best_v, yp = xc(best + 1);
    const double frac = 0.5 * (ym - yp) / (ym - 2.0 * y0 + yp);
    const double lag_t = (static_cast<double>(best) + frac) * g.dt;
    return (i_b - i_a) * dx / lag_t;
}

}  // namespace oracle

#endif  // PATCHFDTD_TESTS_ORACLES_HPP
