// Copyright 2026 The patchfdtd Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PATCHFDTD_ENGINE_HPP
#define PATCHFDTD_ENGINE_HPP

#include <string>
#include <vector>

#include "patchfdtd/cpml.hpp"
#include "patchfdtd/field_state.hpp"
#include "patchfdtd/grid.hpp"
#include "patchfdtd/materials.hpp"

namespace patchfdtd {

struct EnergyReport {
    long long time_index = 0;
    double electric = 0.0;  // J
    double magnetic = 0.0;  // J
    double total = 0.0;     // J
};

struct EngineOptions {
    int nan_check_interval = 100;  // steps; 0 disables the scan
    int workers = 0;               // 0: PATCHFDTD_WORKERS or the OpenMP default
};

// Worker count from PATCHFDTD_WORKERS (>= 1) or the OpenMP default.
int default_workers();

// Leapfrog Yee update with lossy dielectrics, PEC edges and CPML walls.
//
// step() advances E^n, H^(n-1/2) to E^(n+1), H^(n+1/2): H half step, CPML H
// correction, E half step, CPML E correction, periodic plane copies. The
// lattice is split into x slabs across workers; each cell is written by one
// worker with a fixed operation order, so trajectories are bit-identical
// for any worker count.
class Engine {
public:
    Engine(const GridSpec& grid, const MaterialMap& materials, const CpmlParams& cpml = {},
           const EngineOptions& options = {});

    const GridSpec& grid() const { return grid_; }
    const CompiledMaterials& materials() const { return compiled_; }
    const CpmlParams& cpml_params() const { return cpml_params_; }
    int workers() const { return workers_; }

    FieldState make_state() const;
    void step(FieldState& state) const;

    // Scans all components; throws InstabilityError naming the first
    // non-finite entry.
    void check_finite(const FieldState& state) const;

    // Discrete energy 1/2 sum(eps E^n.E^n + mu0 H^(n-1/2).H^(n+1/2)) dV.
    // H^(n+1/2) is obtained by a side-effect-free curl update (CPML
    // convolution terms are not included). This pairing is exactly
    // conserved by the lossless scheme and non-increasing with losses.
    EnergyReport energy(const FieldState& state) const;

    // Cb of an E edge (already divided by eps, not by the edge length).
    double cb(Axis a, std::size_t idx) const { return compiled_.at(a, idx).cb; }

private:
    void update_h(FieldState& s) const;
    void update_e(FieldState& s) const;
    void cpml_h(FieldState& s) const;
    void cpml_e(FieldState& s) const;
    void copy_periodic(FieldState& s) const;

    GridSpec grid_;
    CompiledMaterials compiled_;
    CpmlParams cpml_params_;
    EngineOptions options_;
    int workers_ = 1;
    double db_ = 0.0;
    CpmlAxisProfile prof_[3];
    PsiLayout psi_[3];
    std::vector<double> ca_tab_, cb_tab_;
};

// Free-function forms of the engine operations (build an Engine internally).
void step(FieldState& state, const MaterialMap& materials, const GridSpec& grid);
EnergyReport field_energy(const FieldState& state, const MaterialMap& materials,
                          const GridSpec& grid);

// Launches a broadband pulse towards the +x absorbing face of a domain sized
// like `grid` and returns 20*log10(max reflected / max incident) at a probe
// two cells in front of the CPML, using a much larger domain as the
// reflection-free reference.
double cpml_reflection_test(const GridSpec& grid, const CpmlParams& params = {});

// Writes one component as CSV (header i,j,k,value; k outermost, then j,
// then i), only over the component's valid index range.
void write_component_csv(const std::string& path, const FieldState& state, const GridSpec& grid,
                         Component c);

}  // namespace patchfdtd

#endif  // PATCHFDTD_ENGINE_HPP
