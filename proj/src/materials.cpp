// Copyright 2026 The patchfdtd Authors
// SPDX-License-Identifier: Apache-2.0

#include "patchfdtd/materials.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <tuple>

#include "patchfdtd/constants.hpp"
#include "patchfdtd/error.hpp"

namespace patchfdtd {

UpdateCoefficients material_coefficients(double eps_r, double sigma, double dt) {
    if (!(eps_r >= 1.0)) throw InvalidParameter("eps_r must be >= 1");
    if (!(sigma >= 0.0)) throw InvalidParameter("sigma must be >= 0");
    if (!(dt > 0.0)) throw InvalidParameter("dt must be positive");
    const double eps = kEpsilon0 * eps_r;
    const double loss = sigma * dt / (2.0 * eps);
    return {(1.0 - loss) / (1.0 + loss), (dt / eps) / (1.0 + loss)};
}

double effective_conductivity(double eps_r, double tan_delta, double f) {
    return 2.0 * kPi * f * kEpsilon0 * eps_r * tan_delta;
}

MaterialMap::MaterialMap(const GridSpec& grid)
    : grid_(grid),
      eps_r_(static_cast<std::size_t>(grid.nx) * grid.ny * grid.nz, 1.0),
      sigma_(eps_r_.size(), 0.0) {
    for (auto& m : pec_) m.assign(grid.size(), 0);
}

void MaterialMap::set_cell(int i, int j, int k, double eps_r, double sigma) {
    if (i < 0 || j < 0 || k < 0 || i >= grid_.nx || j >= grid_.ny || k >= grid_.nz) {
        throw InvalidParameter("cell index out of range");
    }
    if (!(eps_r >= 1.0) || !(sigma >= 0.0)) {
        throw InvalidParameter("material requires eps_r >= 1 and sigma >= 0");
    }
    eps_r_[cell_index(i, j, k)] = eps_r;
    sigma_[cell_index(i, j, k)] = sigma;
}

void MaterialMap::fill_cells(int i0, int i1, int j0, int j1, int k0, int k1, double eps_r,
                             double sigma) {
    for (int i = i0; i < i1; ++i)
        for (int j = j0; j < j1; ++j)
            for (int k = k0; k < k1; ++k) set_cell(i, j, k, eps_r, sigma);
}

void MaterialMap::set_pec(Axis a, int i, int j, int k, bool value) {
    const int ext[3] = {grid_.nx, grid_.ny, grid_.nz};
    int lim[3] = {ext[0], ext[1], ext[2]};
    lim[static_cast<int>(a)] -= 1;
    if (i < 0 || j < 0 || k < 0 || i > lim[0] || j > lim[1] || k > lim[2]) {
        throw InvalidParameter("edge index out of range");
    }
    pec_[static_cast<int>(a)][grid_.index(i, j, k)] = value ? 1 : 0;
}

bool MaterialMap::pec(Axis a, int i, int j, int k) const {
    return pec_[static_cast<int>(a)][grid_.index(i, j, k)] != 0;
}

std::size_t MaterialMap::pec_count() const {
    std::size_t n = 0;
    for (const auto& m : pec_) n += static_cast<std::size_t>(std::count(m.begin(), m.end(), 1));
    return n;
}

void MaterialMap::add_lumped_resistor(Axis a, int i, int j, int k, double ohms) {
    if (!(ohms > 0)) throw InvalidParameter("lumped resistance must be positive");
    resistors_[static_cast<int>(a)].emplace_back(grid_.index(i, j, k), ohms);
}

CompiledMaterials MaterialMap::compile(double dt) const {
    CompiledMaterials out;
    std::map<std::tuple<double, double, bool>, std::uint16_t> lookup;
    auto intern = [&](double eps, double sigma, bool pec) -> std::uint16_t {
        auto key = std::make_tuple(pec ? 1.0 : eps, pec ? 0.0 : sigma, pec);
        auto it = lookup.find(key);
        if (it != lookup.end()) return it->second;
        if (out.table.size() >= 65535) throw InvalidParameter("too many distinct edge materials");
        EdgeMaterial m;
        m.pec = pec;
        if (pec) {
            m.ca = 0.0;
            m.cb = 0.0;
        } else {
            m.eps_r = eps;
            m.sigma = sigma;
            const auto c = material_coefficients(eps, sigma, dt);
            m.ca = c.ca;
            m.cb = c.cb;
        }
        const auto id = static_cast<std::uint16_t>(out.table.size());
        out.table.push_back(m);
        lookup.emplace(key, id);
        return id;
    };

    const int nx = grid_.nx, ny = grid_.ny, nz = grid_.nz;
    auto clampi = [](int v, int hi) { return std::clamp(v, 0, hi - 1); };
    auto wrap_or_clamp = [&](int v, int n, Axis ax) {
        if (grid_.periodic(ax)) return (v % n + n) % n;
        return clampi(v, n);
    };
    // Average over the four cells touching an edge along `a`.
    auto edge_average = [&](Axis a, int i, int j, int k) {
        double eps = 0.0, sig = 0.0;
        for (int u = 0; u < 2; ++u) {
            for (int v = 0; v < 2; ++v) {
                int ci = i, cj = j, ck = k;
                if (a == Axis::X) {
                    cj = j - u;
                    ck = k - v;
                } else if (a == Axis::Y) {
                    ci = i - u;
                    ck = k - v;
                } else {
                    ci = i - u;
                    cj = j - v;
                }
                ci = wrap_or_clamp(ci, nx, Axis::X);
                cj = wrap_or_clamp(cj, ny, Axis::Y);
                ck = clampi(ck, nz);
                eps += eps_r_[cell_index(ci, cj, ck)];
                sig += sigma_[cell_index(ci, cj, ck)];
            }
        }
        return std::make_pair(eps / 4.0, sig / 4.0);
    };

    for (int a = 0; a < 3; ++a) {
        const auto ax = static_cast<Axis>(a);
        auto& idx = out.index[a];
        idx.assign(grid_.size(), 0);
        const int ie = (ax == Axis::X) ? nx - 1 : nx;
        const int je = (ax == Axis::Y) ? ny - 1 : ny;
        const int ke = (ax == Axis::Z) ? nz - 1 : nz;
        std::map<std::size_t, double> extra_sigma;
        for (const auto& [e, ohms] : resistors_[a]) {
            // Conductance of the resistor spread over the edge's dual face.
            const double len = grid_.spacing(ax);
            const double area = grid_.cell_volume() / len;
            extra_sigma[e] += len / (ohms * area);
        }
        for (int i = 0; i <= ie; ++i) {
            for (int j = 0; j <= je; ++j) {
                for (int k = 0; k <= ke; ++k) {
                    const std::size_t e = grid_.index(i, j, k);
                    auto [eps, sig] = edge_average(ax, i, j, k);
                    if (auto it = extra_sigma.find(e); it != extra_sigma.end()) sig += it->second;
                    idx[e] = intern(eps, sig, pec_[a][e] != 0);
                }
            }
        }
    }
    return out;
}

bool MaterialMap::operator==(const MaterialMap& o) const {
    if (grid_.nx != o.grid_.nx || grid_.ny != o.grid_.ny || grid_.nz != o.grid_.nz) return false;
    for (int a = 0; a < 3; ++a) {
        if (pec_[a] != o.pec_[a] || resistors_[a] != o.resistors_[a]) return false;
    }
    return eps_r_ == o.eps_r_ && sigma_ == o.sigma_;
}

}  // namespace patchfdtd
