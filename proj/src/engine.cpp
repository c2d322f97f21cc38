// Copyright 2026 The patchfdtd Authors
// SPDX-License-Identifier: Apache-2.0

#include "patchfdtd/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "patchfdtd/constants.hpp"
#include "patchfdtd/error.hpp"

#if PATCHFDTD_HAS_OPENMP
#include <omp.h>
#endif

namespace patchfdtd {

const char* component_name(Component c) {
    switch (c) {
        case Component::Ex: return "Ex";
        case Component::Ey: return "Ey";
        case Component::Ez: return "Ez";
        case Component::Hx: return "Hx";
        case Component::Hy: return "Hy";
        case Component::Hz: return "Hz";
    }
    return "?";
}

PsiLayout::PsiLayout(const GridSpec& grid, Axis axis)
    : p(grid.periodic(axis) ? 0 : grid.pml_thickness), n(grid.cells(axis)) {
    ext = {static_cast<std::size_t>(grid.nx + 1), static_cast<std::size_t>(grid.ny + 1),
           static_cast<std::size_t>(grid.nz + 1)};
    ext[static_cast<int>(axis)] = p > 0 ? static_cast<std::size_t>(2 * (p + 1)) : 0;
}

FieldState::FieldState(const GridSpec& grid) {
    for (auto& c : f) c.assign(grid.size(), 0.0);
    for (int slot = 0; slot < 6; ++slot) {
        const int field_axis = slot / 2;
        const auto d = static_cast<Axis>((field_axis + 1 + slot % 2) % 3);
        const PsiLayout layout(grid, d);
        cpml.e_psi[slot].assign(layout.size(), 0.0);
        cpml.h_psi[slot].assign(layout.size(), 0.0);
    }
}

int default_workers() {
    if (const char* env = std::getenv("PATCHFDTD_WORKERS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
#if PATCHFDTD_HAS_OPENMP
    return std::max(1, omp_get_max_threads());
#else
    return 1;
#endif
}

Engine::Engine(const GridSpec& grid, const MaterialMap& materials, const CpmlParams& cpml,
               const EngineOptions& options)
    : grid_(grid), cpml_params_(cpml), options_(options) {
    validate(grid_);
    const GridSpec& mg = materials.grid();
    if (mg.nx != grid.nx || mg.ny != grid.ny || mg.nz != grid.nz) {
        throw InvalidParameter("material map does not match the grid extents");
    }
    compiled_ = materials.compile(grid_.dt);
    workers_ = options.workers > 0 ? options.workers : default_workers();
    db_ = grid_.dt / kMu0;
    for (int a = 0; a < 3; ++a) {
        prof_[a] = make_cpml_profile(grid_, static_cast<Axis>(a), cpml);
        psi_[a] = PsiLayout(grid_, static_cast<Axis>(a));
    }
    for (const auto& m : compiled_.table) {
        ca_tab_.push_back(m.ca);
        cb_tab_.push_back(m.cb);
    }
}

FieldState Engine::make_state() const { return FieldState(grid_); }

void Engine::step(FieldState& s) const {
    update_h(s);
    cpml_h(s);
    update_e(s);
    cpml_e(s);
    copy_periodic(s);
    ++s.time_index;
    if (options_.nan_check_interval > 0 && s.time_index % options_.nan_check_interval == 0) {
        check_finite(s);
    }
}

void Engine::update_h(FieldState& s) const {
    const int nx = grid_.nx, ny = grid_.ny, nz = grid_.nz;
    const std::size_t si = grid_.stride_i(), sj = grid_.stride_j();
    const double db = db_;
    const double* __restrict ex = s.f[0].data();
    const double* __restrict ey = s.f[1].data();
    const double* __restrict ez = s.f[2].data();
    double* __restrict hx = s.f[3].data();
    double* __restrict hy = s.f[4].data();
    double* __restrict hz = s.f[5].data();
    const double* __restrict hinv_z = prof_[2].h_inv.data();

#pragma omp parallel for schedule(static) num_threads(workers_)
    for (int i = 0; i < nx; ++i) {
        const double hix = prof_[0].h_inv[i];
        for (int j = 0; j < ny; ++j) {
            const double hiy = prof_[1].h_inv[j];
            const std::size_t base = i * si + j * sj;
            for (int k = 0; k < nz; ++k) {
                const std::size_t e = base + k;
                hx[e] -= db * ((ez[e + sj] - ez[e]) * hiy - (ey[e + 1] - ey[e]) * hinv_z[k]);
                hy[e] -= db * ((ex[e + 1] - ex[e]) * hinv_z[k] - (ez[e + si] - ez[e]) * hix);
                hz[e] -= db * ((ey[e + si] - ey[e]) * hix - (ex[e + sj] - ex[e]) * hiy);
            }
        }
    }
}

void Engine::update_e(FieldState& s) const {
    const int nx = grid_.nx, ny = grid_.ny, nz = grid_.nz;
    const bool px = grid_.periodic(Axis::X), py = grid_.periodic(Axis::Y);
    const std::size_t si = grid_.stride_i(), sj = grid_.stride_j();
    double* __restrict ex = s.f[0].data();
    double* __restrict ey = s.f[1].data();
    double* __restrict ez = s.f[2].data();
    const double* __restrict hx = s.f[3].data();
    const double* __restrict hy = s.f[4].data();
    const double* __restrict hz = s.f[5].data();
    const std::uint16_t* __restrict mx = compiled_.index[0].data();
    const std::uint16_t* __restrict my = compiled_.index[1].data();
    const std::uint16_t* __restrict mz = compiled_.index[2].data();
    const double* __restrict ca = ca_tab_.data();
    const double* __restrict cb = cb_tab_.data();
    const double* __restrict einv_z = prof_[2].e_inv.data();

#pragma omp parallel for schedule(static) num_threads(workers_)
    for (int i = 0; i < nx; ++i) {
        const bool x_ok = i > 0 || px;
        const int im = i > 0 ? i - 1 : nx - 1;
        const double eix = prof_[0].e_inv[i];
        for (int j = 0; j < ny; ++j) {
            const bool y_ok = j > 0 || py;
            const int jm = j > 0 ? j - 1 : ny - 1;
            const double eiy = prof_[1].e_inv[j];
            const std::size_t base = i * si + j * sj;
            const std::size_t base_jm = i * si + jm * sj;
            const std::size_t base_im = im * si + j * sj;
            if (y_ok) {
                for (int k = 1; k < nz; ++k) {
                    const std::size_t e = base + k;
                    const double curl =
                        (hz[e] - hz[base_jm + k]) * eiy - (hy[e] - hy[e - 1]) * einv_z[k];
                    const auto m = mx[e];
                    ex[e] = ca[m] * ex[e] + cb[m] * curl;
                }
            }
            if (x_ok) {
                for (int k = 1; k < nz; ++k) {
                    const std::size_t e = base + k;
                    const double curl =
                        (hx[e] - hx[e - 1]) * einv_z[k] - (hz[e] - hz[base_im + k]) * eix;
                    const auto m = my[e];
                    ey[e] = ca[m] * ey[e] + cb[m] * curl;
                }
            }
            if (x_ok && y_ok) {
                for (int k = 0; k < nz; ++k) {
                    const std::size_t e = base + k;
                    const double curl =
                        (hy[e] - hy[base_im + k]) * eix - (hx[e] - hx[base_jm + k]) * eiy;
                    const auto m = mz[e];
                    ez[e] = ca[m] * ez[e] + cb[m] * curl;
                }
            }
        }
    }
}

namespace {

// Slab positions along an axis with p CPML cells: E nodes [1, p] and
// [n-p, n-1]; H half nodes [0, p) and [n-p, n).
template <class F>
void for_e_slab(int n, int p, F&& f) {
    for (int i = 1; i <= p; ++i) f(i);
    for (int i = n - p; i <= n - 1; ++i) f(i);
}

template <class F>
void for_h_slab(int n, int p, F&& f) {
    for (int i = 0; i < p; ++i) f(i);
    for (int i = n - p; i < n; ++i) f(i);
}

}  // namespace

void Engine::cpml_h(FieldState& s) const {
    const int nx = grid_.nx, ny = grid_.ny, nz = grid_.nz;
    const std::size_t si = grid_.stride_i(), sj = grid_.stride_j();
    const double db = db_;
    const double* ex = s.f[0].data();
    const double* ey = s.f[1].data();
    const double* ez = s.f[2].data();
    double* hx = s.f[3].data();
    double* hy = s.f[4].data();
    double* hz = s.f[5].data();
    auto& psi = s.cpml.h_psi;

    // x derivatives: Hy (slot 3, dEz/dx) and Hz (slot 4, dEy/dx).
    if (psi_[0].p > 0) {
        const PsiLayout& L = psi_[0];
        const double inv = 1.0 / grid_.dx;
        const auto& P = prof_[0];
        double* p_hy = psi[3].data();
        double* p_hz = psi[4].data();
        for_h_slab(nx, L.p, [&](int i) {
            const double b = P.h_b[i], c = P.h_c[i];
            const std::size_t ci = static_cast<std::size_t>(L.compact(i));
            for (int j = 0; j < ny; ++j) {
                for (int k = 0; k < nz; ++k) {
                    const std::size_t e = i * si + j * sj + k;
                    const std::size_t q = (ci * L.ext[1] + j) * L.ext[2] + k;
                    p_hy[q] = b * p_hy[q] + c * (ez[e + si] - ez[e]) * inv;
                    hy[e] += db * p_hy[q];
                    p_hz[q] = b * p_hz[q] + c * (ey[e + si] - ey[e]) * inv;
                    hz[e] -= db * p_hz[q];
                }
            }
        });
    }
    // y derivatives: Hz (slot 5, dEx/dy) and Hx (slot 0, dEz/dy).
    if (psi_[1].p > 0) {
        const PsiLayout& L = psi_[1];
        const double inv = 1.0 / grid_.dy;
        const auto& P = prof_[1];
        double* p_hz = psi[5].data();
        double* p_hx = psi[0].data();
        for (int i = 0; i < nx; ++i) {
            for_h_slab(ny, L.p, [&](int j) {
                const double b = P.h_b[j], c = P.h_c[j];
                const std::size_t cj = static_cast<std::size_t>(L.compact(j));
                for (int k = 0; k < nz; ++k) {
                    const std::size_t e = i * si + j * sj + k;
                    const std::size_t q = (i * L.ext[1] + cj) * L.ext[2] + k;
                    p_hz[q] = b * p_hz[q] + c * (ex[e + sj] - ex[e]) * inv;
                    hz[e] += db * p_hz[q];
                    p_hx[q] = b * p_hx[q] + c * (ez[e + sj] - ez[e]) * inv;
                    hx[e] -= db * p_hx[q];
                }
            });
        }
    }
    // z derivatives: Hx (slot 1, dEy/dz) and Hy (slot 2, dEx/dz).
    if (psi_[2].p > 0) {
        const PsiLayout& L = psi_[2];
        const double inv = 1.0 / grid_.dz;
        const auto& P = prof_[2];
        double* p_hx = psi[1].data();
        double* p_hy = psi[2].data();
        for (int i = 0; i < nx; ++i) {
            for (int j = 0; j < ny; ++j) {
                for_h_slab(nz, L.p, [&](int k) {
                    const double b = P.h_b[k], c = P.h_c[k];
                    const std::size_t e = i * si + j * sj + k;
                    const std::size_t q =
                        (static_cast<std::size_t>(i) * L.ext[1] + j) * L.ext[2] + L.compact(k);
                    p_hx[q] = b * p_hx[q] + c * (ey[e + 1] - ey[e]) * inv;
                    hx[e] += db * p_hx[q];
                    p_hy[q] = b * p_hy[q] + c * (ex[e + 1] - ex[e]) * inv;
                    hy[e] -= db * p_hy[q];
                });
            }
        }
    }
}

void Engine::cpml_e(FieldState& s) const {
    const int nx = grid_.nx, ny = grid_.ny, nz = grid_.nz;
    const bool px = grid_.periodic(Axis::X), py = grid_.periodic(Axis::Y);
    const std::size_t si = grid_.stride_i(), sj = grid_.stride_j();
    double* ex = s.f[0].data();
    double* ey = s.f[1].data();
    double* ez = s.f[2].data();
    const double* hx = s.f[3].data();
    const double* hy = s.f[4].data();
    const double* hz = s.f[5].data();
    const auto& mx = compiled_.index[0];
    const auto& my = compiled_.index[1];
    const auto& mz = compiled_.index[2];
    const double* cb = cb_tab_.data();
    auto& psi = s.cpml.e_psi;
    const int j_lo = py ? 0 : 1;
    const int i_lo = px ? 0 : 1;

    // x derivatives: Ey (slot 3, -dHz/dx) and Ez (slot 4, +dHy/dx).
    if (psi_[0].p > 0) {
        const PsiLayout& L = psi_[0];
        const double inv = 1.0 / grid_.dx;
        const auto& P = prof_[0];
        double* p_ey = psi[3].data();
        double* p_ez = psi[4].data();
        for_e_slab(nx, L.p, [&](int i) {
            const double b = P.e_b[i], c = P.e_c[i];
            const std::size_t ci = static_cast<std::size_t>(L.compact(i));
            for (int j = 0; j < ny; ++j) {
                for (int k = 1; k < nz; ++k) {
                    const std::size_t e = i * si + j * sj + k;
                    const std::size_t q = (ci * L.ext[1] + j) * L.ext[2] + k;
                    p_ey[q] = b * p_ey[q] + c * (hz[e] - hz[e - si]) * inv;
                    ey[e] -= cb[my[e]] * p_ey[q];
                }
            }
            for (int j = j_lo; j < ny; ++j) {
                for (int k = 0; k < nz; ++k) {
                    const std::size_t e = i * si + j * sj + k;
                    const std::size_t q = (ci * L.ext[1] + j) * L.ext[2] + k;
                    p_ez[q] = b * p_ez[q] + c * (hy[e] - hy[e - si]) * inv;
                    ez[e] += cb[mz[e]] * p_ez[q];
                }
            }
        });
    }
    // y derivatives: Ez (slot 5, -dHx/dy) and Ex (slot 0, +dHz/dy).
    if (psi_[1].p > 0) {
        const PsiLayout& L = psi_[1];
        const double inv = 1.0 / grid_.dy;
        const auto& P = prof_[1];
        double* p_ez = psi[5].data();
        double* p_ex = psi[0].data();
        for (int i = 0; i < nx; ++i) {
            for_e_slab(ny, L.p, [&](int j) {
                const double b = P.e_b[j], c = P.e_c[j];
                const std::size_t cj = static_cast<std::size_t>(L.compact(j));
                for (int k = 1; k < nz; ++k) {
                    const std::size_t e = i * si + j * sj + k;
                    const std::size_t q = (i * L.ext[1] + cj) * L.ext[2] + k;
                    p_ex[q] = b * p_ex[q] + c * (hz[e] - hz[e - sj]) * inv;
                    ex[e] += cb[mx[e]] * p_ex[q];
                }
                if (i >= i_lo) {
                    for (int k = 0; k < nz; ++k) {
                        const std::size_t e = i * si + j * sj + k;
                        const std::size_t q = (i * L.ext[1] + cj) * L.ext[2] + k;
                        p_ez[q] = b * p_ez[q] + c * (hx[e] - hx[e - sj]) * inv;
                        ez[e] -= cb[mz[e]] * p_ez[q];
                    }
                }
            });
        }
    }
    // z derivatives: Ex (slot 1, -dHy/dz) and Ey (slot 2, +dHx/dz).
    if (psi_[2].p > 0) {
        const PsiLayout& L = psi_[2];
        const double inv = 1.0 / grid_.dz;
        const auto& P = prof_[2];
        double* p_ex = psi[1].data();
        double* p_ey = psi[2].data();
        for (int i = 0; i < nx; ++i) {
            for (int j = 0; j < ny; ++j) {
                const bool do_ex = j >= j_lo;
                const bool do_ey = i >= i_lo;
                for_e_slab(nz, L.p, [&](int k) {
                    const double b = P.e_b[k], c = P.e_c[k];
                    const std::size_t e = i * si + j * sj + k;
                    const std::size_t q =
                        (static_cast<std::size_t>(i) * L.ext[1] + j) * L.ext[2] + L.compact(k);
                    if (do_ex) {
                        p_ex[q] = b * p_ex[q] + c * (hy[e] - hy[e - 1]) * inv;
                        ex[e] -= cb[mx[e]] * p_ex[q];
                    }
                    if (do_ey) {
                        p_ey[q] = b * p_ey[q] + c * (hx[e] - hx[e - 1]) * inv;
                        ey[e] += cb[my[e]] * p_ey[q];
                    }
                });
            }
        }
    }
}

void Engine::copy_periodic(FieldState& s) const {
    const int nx = grid_.nx, ny = grid_.ny, nz = grid_.nz;
    if (grid_.periodic(Axis::Y)) {
        for (int i = 0; i <= nx; ++i) {
            for (int k = 0; k <= nz; ++k) {
                s.f[0][grid_.index(i, ny, k)] = s.f[0][grid_.index(i, 0, k)];
                s.f[2][grid_.index(i, ny, k)] = s.f[2][grid_.index(i, 0, k)];
            }
        }
    }
    if (grid_.periodic(Axis::X)) {
        for (int j = 0; j <= ny; ++j) {
            for (int k = 0; k <= nz; ++k) {
                s.f[1][grid_.index(nx, j, k)] = s.f[1][grid_.index(0, j, k)];
                s.f[2][grid_.index(nx, j, k)] = s.f[2][grid_.index(0, j, k)];
            }
        }
    }
}

void Engine::check_finite(const FieldState& s) const {
    for (int c = 0; c < 6; ++c) {
        const auto& v = s.f[c];
        for (std::size_t e = 0; e < v.size(); ++e) {
            if (!std::isfinite(v[e])) {
                const std::size_t si = grid_.stride_i(), sj = grid_.stride_j();
                std::ostringstream msg;
                msg << "solver instability: non-finite " << component_name(static_cast<Component>(c))
                    << " at (" << e / si << ", " << (e % si) / sj << ", " << e % sj
                    << ") detected at time step " << s.time_index;
                throw InstabilityError(msg.str(), s.time_index);
            }
        }
    }
}

EnergyReport Engine::energy(const FieldState& s) const {
    const int nx = grid_.nx, ny = grid_.ny, nz = grid_.nz;
    const bool px = grid_.periodic(Axis::X), py = grid_.periodic(Axis::Y);
    const std::size_t si = grid_.stride_i(), sj = grid_.stride_j();
    const double dv = grid_.cell_volume();
    const double db = db_;
    const auto& ex = s.f[0];
    const auto& ey = s.f[1];
    const auto& ez = s.f[2];
    const auto& hx = s.f[3];
    const auto& hy = s.f[4];
    const auto& hz = s.f[5];
    const auto& P = prof_;

    // Valid (non-duplicate) E ranges.
    const int ie_x = nx - 1, ie_yz = px ? nx - 1 : nx;
    const int je_y = ny - 1, je_xz = py ? ny - 1 : ny;

    std::vector<double> we(nx + 1, 0.0), wm(nx + 1, 0.0);
#pragma omp parallel for schedule(static) num_threads(workers_)
    for (int i = 0; i <= nx; ++i) {
        double acc = 0.0;
        for (int j = 0; j <= ny; ++j) {
            for (int k = 0; k <= nz; ++k) {
                const std::size_t e = i * si + j * sj + k;
                if (i <= ie_x && j <= je_xz)
                    acc += compiled_.at(Axis::X, e).eps_r * ex[e] * ex[e];
                if (i <= ie_yz && j <= je_y)
                    acc += compiled_.at(Axis::Y, e).eps_r * ey[e] * ey[e];
                if (i <= ie_yz && j <= je_xz && k < nz)
                    acc += compiled_.at(Axis::Z, e).eps_r * ez[e] * ez[e];
            }
        }
        we[i] = 0.5 * kEpsilon0 * acc * dv;
        if (i == nx) continue;
        double accm = 0.0;
        const double hix = P[0].h_inv[i];
        for (int j = 0; j < ny; ++j) {
            const double hiy = P[1].h_inv[j];
            for (int k = 0; k < nz; ++k) {
                const std::size_t e = i * si + j * sj + k;
                const double hiz = P[2].h_inv[k];
                const double nhx =
                    hx[e] - db * ((ez[e + sj] - ez[e]) * hiy - (ey[e + 1] - ey[e]) * hiz);
                const double nhy =
                    hy[e] - db * ((ex[e + 1] - ex[e]) * hiz - (ez[e + si] - ez[e]) * hix);
                const double nhz =
                    hz[e] - db * ((ey[e + si] - ey[e]) * hix - (ex[e + sj] - ex[e]) * hiy);
                accm += hx[e] * nhx + hy[e] * nhy + hz[e] * nhz;
            }
        }
        wm[i] = 0.5 * kMu0 * accm * dv;
    }
    EnergyReport r;
    r.time_index = s.time_index;
    for (int i = 0; i <= nx; ++i) {
        r.electric += we[i];
        r.magnetic += wm[i];
    }
    r.total = r.electric + r.magnetic;
    return r;
}

void step(FieldState& state, const MaterialMap& materials, const GridSpec& grid) {
    Engine(grid, materials).step(state);
}

EnergyReport field_energy(const FieldState& state, const MaterialMap& materials,
                          const GridSpec& grid) {
    return Engine(grid, materials).energy(state);
}

void write_component_csv(const std::string& path, const FieldState& state, const GridSpec& g,
                         Component c) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "i,j,k,value\n";
    int ie = g.nx, je = g.ny, ke = g.nz;
    switch (c) {
        case Component::Ex: ie = g.nx - 1; break;
        case Component::Ey: je = g.ny - 1; break;
        case Component::Ez: ke = g.nz - 1; break;
        case Component::Hx: je = g.ny - 1; ke = g.nz - 1; break;
        case Component::Hy: ie = g.nx - 1; ke = g.nz - 1; break;
        case Component::Hz: ie = g.nx - 1; je = g.ny - 1; break;
    }
    const auto& v = state[c];
    char buf[96];
    for (int k = 0; k <= ke; ++k) {
        for (int j = 0; j <= je; ++j) {
            for (int i = 0; i <= ie; ++i) {
                double x = v[g.index(i, j, k)];
                if (x == 0.0) x = 0.0;
                std::snprintf(buf, sizeof buf, "%d,%d,%d,%.17g\n", i, j, k, x);
                out << buf;
            }
        }
    }
}

}  // namespace patchfdtd
