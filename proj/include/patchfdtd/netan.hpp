// Copyright 2026 The patchfdtd Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PATCHFDTD_NETAN_HPP
#define PATCHFDTD_NETAN_HPP

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "patchfdtd/port.hpp"

namespace patchfdtd {

using cplx = std::complex<double>;

inline constexpr double kReturnLossFloorDb = -120.0;

// X(f) = dt * sum_n x[n] exp(-j 2 pi f n dt). Throws InvalidParameter for
// f >= 1 / (2 dt) or f < 0.
std::vector<cplx> dft_at(const std::vector<double>& samples, double dt,
                         const std::vector<double>& freqs);

// Za = V / I. Throws SingularityError naming the first bin with |I| < 1e-30.
std::vector<cplx> impedance(const std::vector<cplx>& v, const std::vector<cplx>& i,
                            const std::vector<double>& freqs = {});

// (Za - Zs) / (Za + Zs); SingularityError when Za + Zs == 0.
cplx reflection_coefficient(cplx za, cplx zs);

// 10 log10 |gamma|^2, clamped at kReturnLossFloorDb. Throws PassivityError
// when |gamma| > 1 + 1e-6.
double return_loss(cplx gamma);

// `count` evenly spaced points over [lo, hi].
std::vector<double> linear_grid(double lo, double hi, int count);

struct FrequencyResponse {
    std::vector<double> f;
    std::vector<cplx> v;
    std::vector<cplx> i;
    std::vector<cplx> z;
    cplx zs{50.0, 0.0};
    std::vector<cplx> gamma;
    std::vector<double> rl_db;
};

FrequencyResponse make_response(const std::vector<double>& freqs, const std::vector<cplx>& v,
                                const std::vector<cplx>& i, cplx zs = 50.0);
FrequencyResponse make_response(const std::vector<double>& freqs, const std::vector<cplx>& z,
                                cplx zs = 50.0);
FrequencyResponse analyze_port(const PortRecord& record, const std::vector<double>& freqs,
                               cplx zs = 50.0);

// Interpolated value of a sampled complex quantity at f (linear).
cplx interpolate(const std::vector<double>& f, const std::vector<cplx>& y, double at);

struct BandReport {
    double rl_min_db = 0.0;
    double f_rl_min = 0.0;
    // Empty when RL never drops below the threshold (no-band variant).
    std::optional<double> band_low;
    std::optional<double> band_high;
    // True when an edge ran into the end of the frequency grid.
    bool band_clipped = false;
    // Empty when Im Za has no sign change (no-resonance variant).
    std::optional<double> f_res;
    double threshold_db = -10.0;

    std::optional<double> bandwidth() const {
        if (!band_low || !band_high) return std::nullopt;
        return *band_high - *band_low;
    }
};

BandReport band_metrics(const FrequencyResponse& r, double threshold_db = -10.0);

struct RlcModel {
    double r = 0.0;  // ohms
    double l = 0.0;  // henries
    double c = 0.0;  // farads
    double f0() const;
};

cplx parallel_rlc_impedance(const RlcModel& m, double f);

struct RlcFit {
    RlcModel model;
    double residual = 0.0;  // sqrt(mean |Zm - Za|^2 / |Za|^2)
    int iterations = 0;
};

// Levenberg-Marquardt on (log R, log L, log C), starting from the
// resonance estimate. Throws FitError without an Im Za sign change or when
// the iteration cap is hit.
RlcFit fit_parallel_rlc(const std::vector<cplx>& za, const std::vector<double>& freqs,
                        int max_iterations = 400);

// Largest distance (m) with p + gt + gr - FSPL(d) >= sensitivity. Throws
// NoLinkError when the budget never reaches the sensitivity.
double friis_range(double p_tx_dbm, double g_tx_db, double g_rx_db, double sensitivity_dbm,
                   double f);

void write_response_csv(const std::string& path, const FrequencyResponse& r);
// Reads f_hz, re_z, im_z (other columns ignored but required by the header).
FrequencyResponse read_response_csv(const std::string& path, cplx zs = 50.0);

nlohmann::json to_json(const BandReport& b);
nlohmann::json to_json(const RlcFit& fit);

}  // namespace patchfdtd

#endif  // PATCHFDTD_NETAN_HPP
