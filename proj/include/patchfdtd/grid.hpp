// Copyright 2026 The patchfdtd Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PATCHFDTD_GRID_HPP
#define PATCHFDTD_GRID_HPP

#include <array>
#include <cstddef>

namespace patchfdtd {

/*
 * Yee lattice index convention (used by every module).
 *
 * The domain holds nx x ny x nz cells; nodes are (i, j, k) with 0 <= i <= nx,
 * 0 <= j <= ny, 0 <= k <= nz, at position (i*dx, j*dy, k*dz).
 *
 *   Ex(i,j,k)  edge (i+1/2, j,     k    )   valid for i < nx
 *   Ey(i,j,k)  edge (i,     j+1/2, k    )   valid for j < ny
 *   Ez(i,j,k)  edge (i,     j,     k+1/2)   valid for k < nz
 *   Hx(i,j,k)  face (i,     j+1/2, k+1/2)   valid for j < ny, k < nz
 *   Hy(i,j,k)  face (i+1/2, j,     k+1/2)   valid for i < nx, k < nz
 *   Hz(i,j,k)  face (i+1/2, j+1/2, k    )   valid for i < nx, j < ny
 *
 * Every component is stored in an array of (nx+1)(ny+1)(nz+1) doubles with
 * k fastest: idx = (i*(ny+1) + j)*(nz+1) + k. Entries outside a component's
 * valid range are padding and stay zero.
 *
 * Time: E lives at integer steps n*dt, H at (n+1/2)*dt. After `step` has
 * advanced time_index from n to n+1 the state holds E^(n+1) and H^(n+1/2).
 *
 * The outermost domain wall is a perfect conductor (tangential E fixed at 0)
 * unless an axis is periodic; the CPML occupies pml_thickness cells in front
 * of every non-periodic wall.
 */

enum class Axis : int { X = 0, Y = 1, Z = 2 };

enum class Boundary { Pec, Periodic };

struct GridSpec {
    int nx = 0, ny = 0, nz = 0;
    double dx = 0, dy = 0, dz = 0;
    double dt = 0;
    int pml_thickness = 0;
    double cfl_factor = 0.99;
    // Periodic wrap is supported along x and y only.
    std::array<Boundary, 3> boundary{Boundary::Pec, Boundary::Pec, Boundary::Pec};

    std::size_t stride_j() const { return static_cast<std::size_t>(nz + 1); }
    std::size_t stride_i() const {
        return static_cast<std::size_t>(ny + 1) * static_cast<std::size_t>(nz + 1);
    }
    std::size_t size() const { return static_cast<std::size_t>(nx + 1) * stride_i(); }
    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) * stride_i() + static_cast<std::size_t>(j) * stride_j() +
               static_cast<std::size_t>(k);
    }
    int cells(Axis a) const { return a == Axis::X ? nx : (a == Axis::Y ? ny : nz); }
    double spacing(Axis a) const { return a == Axis::X ? dx : (a == Axis::Y ? dy : dz); }
    bool periodic(Axis a) const { return boundary[static_cast<int>(a)] == Boundary::Periodic; }
    double cell_volume() const { return dx * dy * dz; }
};

// Largest stable step scaled by cfl_factor; throws InvalidParameter when
// cfl_factor is outside (0, 1] or a spacing is not positive.
double courant_timestep(double dx, double dy, double dz, double cfl_factor);

// Builds a GridSpec with dt at cfl_factor of the Courant limit and validates it.
GridSpec make_grid(int nx, int ny, int nz, double dx, double dy, double dz, int pml_thickness,
                   double cfl_factor = 0.99);

// Rejects grids without an interior region or with dt above the Courant bound.
void validate(const GridSpec& grid);

}  // namespace patchfdtd

#endif  // PATCHFDTD_GRID_HPP
