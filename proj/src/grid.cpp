// Copyright 2026 The patchfdtd Authors
// SPDX-License-Identifier: Apache-2.0

#include "patchfdtd/grid.hpp"

#include <cmath>
#include <string>

#include "patchfdtd/constants.hpp"
#include "patchfdtd/error.hpp"

namespace patchfdtd {

double courant_timestep(double dx, double dy, double dz, double cfl_factor) {
    if (!(dx > 0) || !(dy > 0) || !(dz > 0)) {
        throw InvalidParameter("cell sizes must be positive");
    }
    if (!(cfl_factor > 0.0) || cfl_factor > 1.0) {
        throw InvalidParameter("cfl_factor must lie in (0, 1], got " + std::to_string(cfl_factor));
    }
    const double inv = std::sqrt(1.0 / (dx * dx) + 1.0 / (dy * dy) + 1.0 / (dz * dz));
    return cfl_factor / (kSpeedOfLight * inv);
}

GridSpec make_grid(int nx, int ny, int nz, double dx, double dy, double dz, int pml_thickness,
                   double cfl_factor) {
    GridSpec g;
    g.nx = nx;
    g.ny = ny;
    g.nz = nz;
    g.dx = dx;
    g.dy = dy;
    g.dz = dz;
    g.pml_thickness = pml_thickness;
    g.cfl_factor = cfl_factor;
    g.dt = courant_timestep(dx, dy, dz, cfl_factor);
    validate(g);
    return g;
}

void validate(const GridSpec& g) {
    if (g.pml_thickness < 0) throw InvalidParameter("pml_thickness must be >= 0");
    const int min_cells = 2 * g.pml_thickness + 4;
    const char* names[3] = {"nx", "ny", "nz"};
    for (int a = 0; a < 3; ++a) {
        const auto axis = static_cast<Axis>(a);
        const int n = g.cells(axis);
        const int need = g.periodic(axis) ? 1 : min_cells;
        if (n < need) {
            throw InvalidParameter(std::string(names[a]) + " = " + std::to_string(n) +
                                   " leaves no interior region (need >= " + std::to_string(need) +
                                   ")");
        }
    }
    if (g.periodic(Axis::Z)) throw InvalidParameter("periodic boundary is not supported along z");
    if (!(g.cfl_factor > 0.0) || g.cfl_factor > 1.0) {
        throw InvalidParameter("cfl_factor must lie in (0, 1]");
    }
    const double bound = courant_timestep(g.dx, g.dy, g.dz, g.cfl_factor);
    if (!(g.dt > 0) || g.dt > bound * (1.0 + 1e-12)) {
        throw InvalidParameter("dt = " + std::to_string(g.dt) + " s exceeds the Courant bound " +
                               std::to_string(bound) + " s");
    }
}

}  // namespace patchfdtd
