// Copyright 2026 The patchfdtd Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PATCHFDTD_MATERIALS_HPP
#define PATCHFDTD_MATERIALS_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "patchfdtd/grid.hpp"

namespace patchfdtd {

struct UpdateCoefficients {
    double ca = 1.0;
    double cb = 0.0;
};

// Semi-implicit lossy-dielectric coefficients. Cb still has to be divided by
// the local edge length (done through the engine's inverse-spacing tables).
UpdateCoefficients material_coefficients(double eps_r, double sigma, double dt);

// sigma_eff = 2*pi*f*eps0*eps_r*tan_delta, the constant conductivity used to
// model a loss tangent around frequency f.
double effective_conductivity(double eps_r, double tan_delta, double f);

// One entry of the compiled coefficient table shared by many edges.
struct EdgeMaterial {
    double eps_r = 1.0;
    double sigma = 0.0;
    bool pec = false;
    double ca = 1.0;
    double cb = 0.0;
};

// Per-edge coefficient indices into a small table.
struct CompiledMaterials {
    std::vector<EdgeMaterial> table;
    std::vector<std::uint16_t> index[3];  // per E component, grid.size() entries

    const EdgeMaterial& at(Axis a, std::size_t idx) const {
        return table[index[static_cast<int>(a)][idx]];
    }
};

// Cell-centred permittivity and conductivity, per-edge PEC mask and lumped
// resistors. Edge coefficients average the (up to) four cells sharing the
// edge; PEC edges get Ca = Cb = 0 so their field is exactly zero after every
// update.
class MaterialMap {
public:
    explicit MaterialMap(const GridSpec& grid);

    const GridSpec& grid() const { return grid_; }

    void set_cell(int i, int j, int k, double eps_r, double sigma);
    // Fills cells [i0,i1) x [j0,j1) x [k0,k1).
    void fill_cells(int i0, int i1, int j0, int j1, int k0, int k1, double eps_r, double sigma);
    double eps_r(int i, int j, int k) const { return eps_r_[cell_index(i, j, k)]; }
    double sigma(int i, int j, int k) const { return sigma_[cell_index(i, j, k)]; }

    void set_pec(Axis a, int i, int j, int k, bool value = true);
    bool pec(Axis a, int i, int j, int k) const;
    std::size_t pec_count() const;
    const std::vector<std::uint8_t>& pec_mask(Axis a) const { return pec_[static_cast<int>(a)]; }

    // A lumped resistor (ohms) along edge (a, i, j, k); its conductance is
    // folded into the edge's effective conductivity.
    void add_lumped_resistor(Axis a, int i, int j, int k, double ohms);
    const std::vector<std::pair<std::size_t, double>>& lumped_resistors(Axis a) const {
        return resistors_[static_cast<int>(a)];
    }

    CompiledMaterials compile(double dt) const;

    bool operator==(const MaterialMap& other) const;

private:
    std::size_t cell_index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * grid_.ny + j) * grid_.nz + k;
    }

    GridSpec grid_;
    std::vector<double> eps_r_;
    std::vector<double> sigma_;
    std::vector<std::uint8_t> pec_[3];
    std::vector<std::pair<std::size_t, double>> resistors_[3];
};

}  // namespace patchfdtd

#endif  // PATCHFDTD_MATERIALS_HPP
