// Copyright 2026 The patchfdtd Authors
// SPDX-License-Identifier: Apache-2.0

#include "patchfdtd/cpml.hpp"

#include <cmath>

#include "patchfdtd/constants.hpp"
#include "patchfdtd/error.hpp"

namespace patchfdtd {

namespace {

struct Grade {
    double b = 0.0, c = 0.0, kappa = 1.0;
};

Grade grade(double depth, const CpmlParams& prm, double sigma_max, double dt) {
    if (depth <= 0.0) return {};
    const double xm = std::pow(depth, prm.order);
    const double sigma = sigma_max * xm;
    const double kappa = 1.0 + (prm.kappa_max - 1.0) * xm;
    const double alpha = prm.alpha_max * (1.0 - depth);
    Grade g;
    g.kappa = kappa;
    g.b = std::exp(-(sigma / kappa + alpha) * dt / kEpsilon0);
    const double denom = sigma * kappa + kappa * kappa * alpha;
    g.c = denom > 0.0 ? sigma * (g.b - 1.0) / denom : 0.0;
    return g;
}

}  // namespace

CpmlAxisProfile make_cpml_profile(const GridSpec& grid, Axis axis, const CpmlParams& prm) {
    if (prm.order < 1) throw InvalidParameter("CPML grading order must be >= 1");
    if (!(prm.kappa_max >= 1.0)) throw InvalidParameter("CPML kappa_max must be >= 1");
    if (!(prm.alpha_max >= 0.0) || !(prm.sigma_factor >= 0.0)) {
        throw InvalidParameter("CPML alpha_max and sigma_factor must be >= 0");
    }
    const int n = grid.cells(axis);
    const double d = grid.spacing(axis);
    const int p = grid.periodic(axis) ? 0 : grid.pml_thickness;
    const double sigma_max = prm.sigma_factor * 0.8 * (prm.order + 1) / (kEta0 * d);

    CpmlAxisProfile out;
    out.e_b.assign(n + 1, 0.0);
    out.e_c.assign(n + 1, 0.0);
    out.e_inv.assign(n + 1, 1.0 / d);
    out.h_b.assign(n + 1, 0.0);
    out.h_c.assign(n + 1, 0.0);
    out.h_inv.assign(n + 1, 1.0 / d);
    if (p == 0) return out;

    auto depth = [&](double pos) {
        if (pos < p) return (p - pos) / p;
        if (pos > n - p) return (pos - (n - p)) / p;
        return 0.0;
    };
    for (int i = 0; i <= n; ++i) {
        const Grade ge = grade(depth(i), prm, sigma_max, grid.dt);
        out.e_b[i] = ge.b;
        out.e_c[i] = ge.c;
        out.e_inv[i] = 1.0 / (ge.kappa * d);
        if (i < n) {
            const Grade gh = grade(depth(i + 0.5), prm, sigma_max, grid.dt);
            out.h_b[i] = gh.b;
            out.h_c[i] = gh.c;
            out.h_inv[i] = 1.0 / (gh.kappa * d);
        }
    }
    return out;
}

}  // namespace patchfdtd
