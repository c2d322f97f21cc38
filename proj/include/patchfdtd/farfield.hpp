// Copyright 2026 The patchfdtd Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PATCHFDTD_FARFIELD_HPP
#define PATCHFDTD_FARFIELD_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "patchfdtd/field_state.hpp"
#include "patchfdtd/grid.hpp"

namespace patchfdtd {

using cplx = std::complex<double>;

// Running DFT of tangential E and H on the six node-plane faces of a box.
//
// On a face normal to axis a, the tangential fields split into two
// sub-grids whose samples share a position: (E_c, H_b) and (E_b, H_c),
// with b, c the cyclic successors of a. H is averaged over the two
// half-cells either side of the plane. Both transforms use dt * stride *
// sum x exp(-j w t) with t = n dt for E and (n - 1/2) dt for H, matching
// the port spectra normalization.
class HuygensSurface {
public:
    HuygensSurface() = default;
    HuygensSurface(const GridSpec& grid, std::array<int, 3> lo, std::array<int, 3> hi,
                   std::vector<double> freqs, int stride = 1);

    // Adds the state's contribution when time_index is a multiple of the
    // stride. Call once after every step.
    void accumulate(const FieldState& state);

    const std::vector<double>& freqs() const { return freqs_; }
    std::size_t points() const { return w_.size(); }
    int stride() const { return stride_; }
    std::array<int, 3> lo() const { return lo_; }
    std::array<int, 3> hi() const { return hi_; }
    // Index into freqs() or nullopt.
    std::optional<std::size_t> frequency_index(double f) const;

    // Equivalent currents at sample p for frequency slot q.
    struct Currents {
        std::array<cplx, 3> j{};
        std::array<cplx, 3> m{};
    };
    Currents currents(std::size_t q, std::size_t p) const;
    // Position in metres relative to the box centre.
    std::array<double, 3> position(std::size_t p) const;
    double area(std::size_t p) const { return w_[p]; }
    // Position in half cells relative to the box centre.
    const std::array<std::int32_t, 3>& half_index(std::size_t p) const { return pos2_[p]; }
    const std::array<double, 3>& spacing() const { return d_; }

    // 1/2 Re oint (E x H*) . n dS over the box.
    double poynting_flux(std::size_t q) const;

    void save(const std::string& path) const;
    static HuygensSurface load(const std::string& path);

    bool operator==(const HuygensSurface& o) const;

private:
    void add_face(const GridSpec& g, int a, int side);

    std::vector<double> freqs_;
    int stride_ = 1;
    double dt_ = 0.0;
    std::array<double, 3> d_{};
    std::array<int, 3> lo_{}, hi_{};
    // Per sample: twice the node coordinate relative to the box centre.
    std::vector<std::array<std::int32_t, 3>> pos2_;
    std::vector<double> w_;
    std::vector<std::uint8_t> e_comp_, h_comp_;
    std::vector<std::int8_t> j_sign_, m_sign_;
    std::vector<std::size_t> e_idx_, h_idx0_, h_idx1_;
    // [q * points + p]
    std::vector<cplx> e_dft_, h_dft_;
    std::vector<double> scratch_e_, scratch_h_;
};

// Regular angular grids in degrees (theta in [0, 180], phi in [0, 360)).
std::vector<double> theta_grid(double step_deg = 2.0);
std::vector<double> phi_grid(double step_deg = 2.0);

struct FarFieldPattern {
    double frequency = 0.0;
    std::vector<double> theta_deg;
    std::vector<double> phi_deg;
    // r * E far-field phasors (volts), [t * phi.size() + p].
    std::vector<cplx> e_theta;
    std::vector<cplx> e_phi;
    // Radiation intensity U (W/sr), same layout.
    std::vector<double> u;
    double p_rad = 0.0;
    // Net accepted port power at `frequency`; zero when unknown.
    double p_in = 0.0;

    std::size_t at(std::size_t t, std::size_t p) const { return t * phi_deg.size() + p; }
};

FarFieldPattern ntff(const HuygensSurface& surface, double f, const std::vector<double>& theta_deg,
                     const std::vector<double>& phi_deg);

// Builds a pattern from an intensity table (tests, synthetic patterns).
FarFieldPattern pattern_from_intensity(const std::vector<double>& theta_deg,
                                       const std::vector<double>& phi_deg,
                                       const std::vector<double>& u, double p_in = 0.0);

// Quadrature weights: theta bands [t - h/2, t + h/2] clipped to [0, pi]
// integrated exactly in sin(theta); phi midpoint rule.
std::vector<double> theta_weights(const std::vector<double>& theta_deg);
double phi_weight(const std::vector<double>& phi_deg);
double radiated_power(const std::vector<double>& theta_deg, const std::vector<double>& phi_deg,
                      const std::vector<double>& u);

// 10 log10(4 pi U / P_rad). Throws InvalidParameter when P_rad == 0.
std::vector<double> directivity(const FarFieldPattern& p);
// 10 log10(4 pi U / P_in). Throws InvalidParameter when P_in <= 0.
std::vector<double> gain(const FarFieldPattern& p);
// oint D / 4 pi dOmega.
double closure(const FarFieldPattern& p);

struct Cut {
    std::vector<double> angle_deg;
    std::vector<double> value_db;
};

// "xz", "yz" (signed angle in (-180, 180], negative on the phi + 180 half)
// or "azimuth:<theta>" (phi sweep at fixed theta).
Cut make_cut(const FarFieldPattern& p, const std::vector<double>& grid_db, const std::string& cut);

struct Beamwidth {
    double width_deg = 0.0;
    bool open = false;  // no -3 dB crossing on at least one side
    double low_deg = 0.0;
    double high_deg = 0.0;
    double peak_deg = 0.0;
};

// Width between the -3 dB crossings around the cut maximum (linear in dB).
Beamwidth hpbw(const Cut& cut);

// max - min of the gain around phi at fixed theta (linear interpolation in
// theta between grid rows).
double azimuth_ripple(const FarFieldPattern& p, const std::vector<double>& grid_db, double theta_deg);

struct PatternMetrics {
    double frequency = 0.0;
    double peak_gain_db = 0.0;
    double peak_theta_deg = 0.0;
    double peak_phi_deg = 0.0;
    double peak_directivity_dbi = 0.0;
    Beamwidth hpbw_xz;
    Beamwidth hpbw_yz;
    double ripple_theta_deg = 45.0;
    double azimuth_ripple_db = 0.0;
    double front_to_back_db = 0.0;
    double closure = 0.0;
};

PatternMetrics pattern_metrics(const FarFieldPattern& p, double ripple_theta_deg = 45.0);

struct EfficiencyReport {
    double match = 0.0;       // 1 - |Gamma|^2
    double cd = 0.0;          // P_rad / P_accepted
    double conduction = 1.0;  // PEC conductors
    double dielectric = 0.0;
    double total = 0.0;       // match * cd
    bool paired = false;
};

// Throws EnergyViolation when P_rad > P_in (1 + 1e-3). `cd_lossless` is
// P_rad / P_in of the paired tan delta = 0 run: eps_d = eps_cd / cd_lossless
// and eps_c = cd_lossless. Without it eps_c = 1 and eps_d = eps_cd.
EfficiencyReport efficiency_report(double p_rad, double p_in, cplx gamma,
                                   std::optional<double> cd_lossless = std::nullopt);

void write_pattern_csv(const std::string& path, const FarFieldPattern& p);
void write_cut_csv(const std::string& path, const Cut& cut);
nlohmann::json to_json(const PatternMetrics& m);
nlohmann::json to_json(const EfficiencyReport& e);

}  // namespace patchfdtd

#endif  // PATCHFDTD_FARFIELD_HPP
