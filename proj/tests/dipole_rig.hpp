// Copyright 2026 The patchfdtd Authors
// SPDX-License-Identifier: Apache-2.0

// Short gap-fed z dipole in a CPML box, shared by the far-field unit tests
// and the acceptance binary.

#ifndef PATCHFDTD_TESTS_DIPOLE_RIG_HPP
#define PATCHFDTD_TESTS_DIPOLE_RIG_HPP

#include <array>
#include <vector>

#include "patchfdtd/engine.hpp"
#include "patchfdtd/farfield.hpp"
#include "patchfdtd/netan.hpp"
#include "patchfdtd/port.hpp"

namespace rig {

struct DipoleRun {
    patchfdtd::GridSpec grid;
    std::vector<double> freqs;
    // Huygens boxes `margins[b]` cells inside the CPML.
    std::vector<patchfdtd::HuygensSurface> surfaces;
    patchfdtd::PortRecord record;
};

// Cubic lattice of n cells at 1 mm, PEC arms of `arm` cells either side of
// a 50 ohm gap at the centre, Gaussian pulse around 10 GHz.
inline DipoleRun run_dipole(const std::vector<double>& freqs, const std::vector<int>& margins,
                            int n = 50, int pml = 10, int arm = 2, int steps = 4000) {
    using namespace patchfdtd;
    DipoleRun out;
    out.grid = make_grid(n, n, n, 1e-3, 1e-3, 1e-3, pml);
    out.freqs = freqs;
    const GridSpec& g = out.grid;
    MaterialMap m(g);
    const int c = n / 2;
    for (int k = c - arm; k <= c + arm; ++k)
        if (k != c) m.set_pec(Axis::Z, c, c, k);
    m.add_lumped_resistor(Axis::Z, c, c, c, 50.0);
    const PortEdge port{Axis::Z, c, c, c, 50.0};
    const Engine engine(g, m);
    FieldState s = engine.make_state();
    const Waveform w = make_waveform(10e9, 4e9);
    for (int mg : margins) {
        const int lo = pml + mg, hi = n - pml - mg;
        out.surfaces.emplace_back(g, std::array<int, 3>{lo, lo, lo}, std::array<int, 3>{hi, hi, hi},
                                  freqs, 2);
    }
    PortRecorder rec(g.dt, 50.0);
    rec.observe(s, g, port, 0.0);
    for (int k = 0; k < steps; ++k) {
        engine.step(s);
        apply_port(s, engine, port, w, (k + 0.5) * g.dt);
        rec.observe(s, g, port, waveform_sample(w, (k + 1) * g.dt));
        for (auto& hs : out.surfaces) hs.accumulate(s);
    }
    out.record = rec.record();
    return out;
}

// Net power accepted by the port at f: 1/2 Re(V I*).
inline double port_power(const patchfdtd::PortRecord& r, double f) {
    const auto v = patchfdtd::dft_at(r.v, r.dt, {f});
    const auto i = patchfdtd::dft_at(r.i, r.dt, {f});
    return 0.5 * (v[0] * std::conj(i[0])).real();
}

}  // namespace rig

#endif  // PATCHFDTD_TESTS_DIPOLE_RIG_HPP
