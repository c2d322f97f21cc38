// Copyright 2026 The patchfdtd Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PATCHFDTD_FIELD_STATE_HPP
#define PATCHFDTD_FIELD_STATE_HPP

#include <array>
#include <cstddef>
#include <vector>

#include "patchfdtd/grid.hpp"

namespace patchfdtd {

enum class Component : int { Ex = 0, Ey, Ez, Hx, Hy, Hz };

const char* component_name(Component c);

// Auxiliary CPML convolution arrays. Slot s = 2*field_axis + deriv_slot
// where deriv_slot 0/1 enumerates the two derivative axes of that component
// in cyclic order (Ex: y,z; Ey: z,x; Ez: x,y). Along the derivative axis
// only the two boundary slabs are stored (2*(p+1) planes).
struct CpmlState {
    std::array<std::vector<double>, 6> e_psi;
    std::array<std::vector<double>, 6> h_psi;
};

// Mutable E/H fields of one simulation run. See grid.hpp for layout.
struct FieldState {
    FieldState() = default;
    explicit FieldState(const GridSpec& grid);

    std::vector<double>& operator[](Component c) { return f[static_cast<int>(c)]; }
    const std::vector<double>& operator[](Component c) const { return f[static_cast<int>(c)]; }

    std::array<std::vector<double>, 6> f;
    long long time_index = 0;
    CpmlState cpml;

    bool operator==(const FieldState& o) const {
        return f == o.f && time_index == o.time_index;
    }
};

// Index of a CPML slab entry: the coordinate along `axis` is compacted so
// positions [0, p] and [n-p, n] map to [0, 2p+2).
struct PsiLayout {
    int p = 0;
    int n = 0;
    std::array<std::size_t, 3> ext{};  // extents after compaction

    PsiLayout() = default;
    PsiLayout(const GridSpec& grid, Axis axis);
    std::size_t size() const { return ext[0] * ext[1] * ext[2]; }
    int compact(int pos) const { return pos <= p ? pos : pos - (n - p) + (p + 1); }
};

}  // namespace patchfdtd

#endif  // PATCHFDTD_FIELD_STATE_HPP
