// Copyright 2026 The patchfdtd Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PATCHFDTD_CPML_HPP
#define PATCHFDTD_CPML_HPP

#include <vector>

#include "patchfdtd/grid.hpp"

namespace patchfdtd {

// Polynomial-graded convolutional PML. sigma_max = sigma_factor * 0.8(m+1)/(eta0*d).
struct CpmlParams {
    int order = 3;
    double sigma_factor = 1.0;
    double kappa_max = 5.0;
    double alpha_max = 0.05;  // S/m
};

// Per-axis grading tables. Entry i of the `e` arrays belongs to node i, entry
// i of the `h` arrays to the half node i+1/2. inv_* already include 1/kappa.
struct CpmlAxisProfile {
    std::vector<double> e_b, e_c, e_inv;
    std::vector<double> h_b, h_c, h_inv;
};

CpmlAxisProfile make_cpml_profile(const GridSpec& grid, Axis axis, const CpmlParams& params);

}  // namespace patchfdtd

#endif  // PATCHFDTD_CPML_HPP
