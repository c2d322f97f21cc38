// Copyright 2026 The patchfdtd Authors
// SPDX-License-Identifier: Apache-2.0

#include "patchfdtd/netan.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/LevenbergMarquardt>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "patchfdtd/constants.hpp"
#include "patchfdtd/error.hpp"

namespace patchfdtd {

std::vector<cplx> dft_at(const std::vector<double>& x, double dt, const std::vector<double>& freqs) {
    if (!(dt > 0)) throw InvalidParameter("dft_at: dt must be positive");
    const double nyquist = 0.5 / dt;
    std::vector<cplx> out(freqs.size());
    for (std::size_t q = 0; q < freqs.size(); ++q) {
        const double f = freqs[q];
        if (!(f >= 0) || f >= nyquist) {
            std::ostringstream m;
            m << "dft_at: frequency " << f << " Hz is not below the Nyquist limit " << nyquist
              << " Hz";
            throw InvalidParameter(m.str());
        }
        // Phasor recurrence, re-anchored every 256 samples.
        const double w = -2.0 * kPi * f * dt;
        const cplx rot = std::polar(1.0, w);
        cplx acc = 0.0, ph = 1.0;
        for (std::size_t n = 0; n < x.size(); ++n) {
            if ((n & 255u) == 0) ph = std::polar(1.0, w * static_cast<double>(n));
            acc += x[n] * ph;
            ph *= rot;
        }
        out[q] = acc * dt;
    }
    return out;
}

std::vector<cplx> impedance(const std::vector<cplx>& v, const std::vector<cplx>& i,
                            const std::vector<double>& freqs) {
    if (v.size() != i.size()) throw InvalidParameter("impedance: V and I lengths differ");
    std::vector<cplx> z(v.size());
    for (std::size_t n = 0; n < v.size(); ++n) {
        if (std::abs(i[n]) < 1e-30) {
            std::ostringstream m;
            m << "impedance: |I| below 1e-30 at bin " << n;
            if (n < freqs.size()) m << " (" << freqs[n] << " Hz)";
            throw SingularityError(m.str());
        }
        z[n] = v[n] / i[n];
    }
    return z;
}

cplx reflection_coefficient(cplx za, cplx zs) {
    const cplx den = za + zs;
    if (den == cplx(0.0, 0.0)) throw SingularityError("reflection coefficient: Za + Zs = 0");
    return (za - zs) / den;
}

double return_loss(cplx gamma) {
    const double mag = std::abs(gamma);
    if (!(mag <= 1.0 + 1e-6)) {
        std::ostringstream m;
        m << "passivity violation: |gamma| = " << mag;
        throw PassivityError(m.str());
    }
    if (mag == 0.0) return kReturnLossFloorDb;
    return std::max(kReturnLossFloorDb, 10.0 * std::log10(mag * mag));
}

std::vector<double> linear_grid(double lo, double hi, int count) {
    if (count < 1 || !(hi >= lo)) throw InvalidParameter("linear_grid: need count >= 1, hi >= lo");
    std::vector<double> f(static_cast<std::size_t>(count));
    for (int n = 0; n < count; ++n) {
        f[static_cast<std::size_t>(n)] = count == 1 ? lo : lo + (hi - lo) * n / (count - 1);
    }
    return f;
}

FrequencyResponse make_response(const std::vector<double>& freqs, const std::vector<cplx>& z,
                                cplx zs) {
    if (freqs.size() != z.size()) throw InvalidParameter("make_response: length mismatch");
    FrequencyResponse r;
    r.f = freqs;
    r.z = z;
    r.zs = zs;
    r.gamma.resize(z.size());
    r.rl_db.resize(z.size());
    for (std::size_t n = 0; n < z.size(); ++n) {
        r.gamma[n] = reflection_coefficient(z[n], zs);
        r.rl_db[n] = return_loss(r.gamma[n]);
    }
    return r;
}

FrequencyResponse make_response(const std::vector<double>& freqs, const std::vector<cplx>& v,
                                const std::vector<cplx>& i, cplx zs) {
    FrequencyResponse r = make_response(freqs, impedance(v, i, freqs), zs);
    r.v = v;
    r.i = i;
    return r;
}

FrequencyResponse analyze_port(const PortRecord& rec, const std::vector<double>& freqs, cplx zs) {
    return make_response(freqs, dft_at(rec.v, rec.dt, freqs), dft_at(rec.i, rec.dt, freqs), zs);
}

cplx interpolate(const std::vector<double>& f, const std::vector<cplx>& y, double at) {
    if (f.empty() || f.size() != y.size()) throw InvalidParameter("interpolate: bad input");
    if (at <= f.front()) return y.front();
    if (at >= f.back()) return y.back();
    const auto it = std::upper_bound(f.begin(), f.end(), at);
    const std::size_t k = static_cast<std::size_t>(it - f.begin());
    const double u = (at - f[k - 1]) / (f[k] - f[k - 1]);
    return y[k - 1] + u * (y[k] - y[k - 1]);
}

namespace {

double cross(double f0, double y0, double f1, double y1, double level) {
    return f0 + (level - y0) / (y1 - y0) * (f1 - f0);
}

}  // namespace

BandReport band_metrics(const FrequencyResponse& r, double threshold_db) {
    const std::size_t n = r.f.size();
    if (n < 3 || r.rl_db.size() != n || r.z.size() != n) {
        throw InvalidParameter("band_metrics: need >= 3 frequency points");
    }
    for (std::size_t k = 1; k < n; ++k) {
        if (!(r.f[k] > r.f[k - 1])) throw InvalidParameter("band_metrics: f must be ascending");
    }
    BandReport b;
    b.threshold_db = threshold_db;
    const std::size_t m = static_cast<std::size_t>(
        std::min_element(r.rl_db.begin(), r.rl_db.end()) - r.rl_db.begin());
    b.rl_min_db = r.rl_db[m];
    b.f_rl_min = r.f[m];

    if (b.rl_min_db < threshold_db) {
        std::size_t lo = m;
        while (lo > 0 && r.rl_db[lo - 1] < threshold_db) --lo;
        if (lo == 0) {
            b.band_low = r.f.front();
            b.band_clipped = true;
        } else {
            b.band_low = cross(r.f[lo - 1], r.rl_db[lo - 1], r.f[lo], r.rl_db[lo], threshold_db);
        }
        std::size_t hi = m;
        while (hi + 1 < n && r.rl_db[hi + 1] < threshold_db) ++hi;
        if (hi + 1 == n) {
            b.band_high = r.f.back();
            b.band_clipped = true;
        } else {
            b.band_high = cross(r.f[hi], r.rl_db[hi], r.f[hi + 1], r.rl_db[hi + 1], threshold_db);
        }
    }

    double best = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        const double a = r.z[k - 1].imag(), c = r.z[k].imag();
        if ((a < 0) == (c < 0) && a != 0.0) continue;
        if (a == 0.0 && c == 0.0) continue;
        const double f = a == c ? r.f[k - 1] : cross(r.f[k - 1], a, r.f[k], c, 0.0);
        if (!b.f_res || std::abs(f - b.f_rl_min) < best) {
            b.f_res = f;
            best = std::abs(f - b.f_rl_min);
        }
    }
    return b;
}

double RlcModel::f0() const { return 1.0 / (2.0 * kPi * std::sqrt(l * c)); }

cplx parallel_rlc_impedance(const RlcModel& m, double f) {
    if (!(f > 0)) throw InvalidParameter("parallel_rlc_impedance: f must be positive");
    const double w = 2.0 * kPi * f;
    const cplx y = 1.0 / m.r + 1.0 / cplx(0.0, w * m.l) + cplx(0.0, w * m.c);
    return 1.0 / y;
}

namespace {

struct RlcResidual : Eigen::DenseFunctor<double> {
    const std::vector<cplx>& za;
    const std::vector<double>& f;

    RlcResidual(const std::vector<cplx>& z, const std::vector<double>& fr)
        : Eigen::DenseFunctor<double>(3, static_cast<int>(2 * z.size())), za(z), f(fr) {}

    RlcModel model(const Eigen::VectorXd& p) const {
        return {std::exp(p[0]), std::exp(p[1]), std::exp(p[2])};
    }

    int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& out) const {
        const RlcModel m = model(p);
        for (std::size_t k = 0; k < za.size(); ++k) {
            const cplx e = (parallel_rlc_impedance(m, f[k]) - za[k]) / std::abs(za[k]);
            out[2 * k] = e.real();
            out[2 * k + 1] = e.imag();
        }
        return 0;
    }

    int df(const Eigen::VectorXd& p, Eigen::MatrixXd& jac) const {
        const RlcModel m = model(p);
        for (std::size_t k = 0; k < za.size(); ++k) {
            const double w = 2.0 * kPi * f[k];
            const cplx z = parallel_rlc_impedance(m, f[k]);
            const cplx s = -z * z / std::abs(za[k]);
            const cplx d[3] = {s * (-1.0 / m.r), s * (-1.0 / cplx(0.0, w * m.l)),
                               s * cplx(0.0, w * m.c)};
            for (int q = 0; q < 3; ++q) {
                jac(static_cast<Eigen::Index>(2 * k), q) = d[q].real();
                jac(static_cast<Eigen::Index>(2 * k + 1), q) = d[q].imag();
            }
        }
        return 0;
    }
};

}  // namespace

RlcFit fit_parallel_rlc(const std::vector<cplx>& za, const std::vector<double>& f,
                        int max_iterations) {
    if (za.size() != f.size() || f.size() < 8) {
        throw FitError("fit_parallel_rlc: need >= 8 points with matching lengths");
    }
    for (const auto& z : za) {
        if (!(std::abs(z) > 0) || !std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw FitError("fit_parallel_rlc: impedance samples must be finite and non-zero");
        }
    }
    // Resonance from the admittance: B(w) = Im(1/Z) crosses zero upwards.
    std::size_t k0 = f.size();
    for (std::size_t k = 1; k < f.size(); ++k) {
        const double a = (1.0 / za[k - 1]).imag(), b = (1.0 / za[k]).imag();
        if (a <= 0 && b > 0) {
            k0 = k;
            break;
        }
    }
    if (k0 == f.size()) throw FitError("fit_parallel_rlc: no Im Za sign change in the data");
    const double b0 = (1.0 / za[k0 - 1]).imag(), b1 = (1.0 / za[k0]).imag();
    const double w0 = 2.0 * kPi * f[k0 - 1], w1 = 2.0 * kPi * f[k0];
    const double wr = w0 + (0.0 - b0) / (b1 - b0) * (w1 - w0);
    const double c0 = 0.5 * (b1 - b0) / (w1 - w0);
    const double l0 = 1.0 / (wr * wr * c0);
    const double g0 = (1.0 / interpolate(f, za, wr / (2.0 * kPi))).real();
    if (!(c0 > 0) || !(g0 > 0)) throw FitError("fit_parallel_rlc: degenerate initial guess");

    Eigen::VectorXd p(3);
    p << std::log(1.0 / g0), std::log(l0), std::log(c0);
    RlcResidual fn(za, f);
    Eigen::LevenbergMarquardt<RlcResidual> lm(fn);
    lm.setMaxfev(max_iterations);
    lm.setXtol(1e-14);
    lm.setFtol(1e-14);
    const auto status = lm.minimize(p);
    if (status == Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation ||
        status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters ||
        !p.allFinite()) {
        std::ostringstream m;
        m << "fit_parallel_rlc: no convergence after " << lm.nfev() << " evaluations (status "
          << static_cast<int>(status) << ", R=" << std::exp(p[0]) << " L=" << std::exp(p[1])
          << " C=" << std::exp(p[2]) << ")";
        throw FitError(m.str());
    }
    RlcFit out;
    out.model = fn.model(p);
    const double f_fit = 1.0 / (2.0 * kPi * std::sqrt(out.model.l * out.model.c));
    if (!(f_fit >= f.front() && f_fit <= f.back())) {
        std::ostringstream m;
        m << "fit_parallel_rlc: fitted resonance " << f_fit << " Hz left the data span ["
          << f.front() << ", " << f.back() << "] Hz (R=" << out.model.r << " L=" << out.model.l
          << " C=" << out.model.c << ")";
        throw FitError(m.str());
    }
    out.iterations = static_cast<int>(lm.iterations());
    Eigen::VectorXd res(2 * static_cast<Eigen::Index>(za.size()));
    fn(p, res);
    out.residual = std::sqrt(res.squaredNorm() / static_cast<double>(za.size()));
    return out;
}

double friis_range(double p_tx_dbm, double g_tx_db, double g_rx_db, double sensitivity_dbm,
                   double f) {
    if (!(f > 0)) throw InvalidParameter("friis_range: f must be positive");
    const double margin = p_tx_dbm + g_tx_db + g_rx_db - sensitivity_dbm;
    if (!(margin > 0)) throw NoLinkError("no link: sensitivity is not below the link budget");
    const double lambda = kSpeedOfLight / f;
    return lambda / (4.0 * kPi) * std::pow(10.0, margin / 20.0);
}

void write_response_csv(const std::string& path, const FrequencyResponse& r) {
    std::FILE* out = std::fopen(path.c_str(), "w");
    if (!out) throw Error("cannot write " + path);
    std::fputs("f_hz,re_z,im_z,abs_z,re_gamma,im_gamma,rl_db\n", out);
    for (std::size_t k = 0; k < r.f.size(); ++k) {
        std::fprintf(out, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.f[k], r.z[k].real(),
                     r.z[k].imag(), std::abs(r.z[k]), r.gamma[k].real(), r.gamma[k].imag(),
                     r.rl_db[k]);
    }
    std::fclose(out);
}

FrequencyResponse read_response_csv(const std::string& path, cplx zs) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open impedance table " + path);
    std::string line;
    if (!std::getline(in, line) || line != "f_hz,re_z,im_z,abs_z,re_gamma,im_gamma,rl_db") {
        throw ConfigError(path + ": row 1: unexpected header");
    }
    std::vector<double> f;
    std::vector<cplx> z;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        double x[7];
        int used = 0;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf%n", &x[0], &x[1], &x[2], &x[3],
                        &x[4], &x[5], &x[6], &used) != 7 ||
            static_cast<std::size_t>(used) != line.size()) {
            throw ConfigError(path + ": row " + std::to_string(row) + ": expected 7 numbers");
        }
        f.push_back(x[0]);
        z.emplace_back(x[1], x[2]);
    }
    return make_response(f, z, zs);
}

nlohmann::json to_json(const BandReport& b) {
    nlohmann::json j = {
        {"rl_min_db", b.rl_min_db},
        {"f_rl_min_hz", b.f_rl_min},
        {"threshold_db", b.threshold_db},
        {"band_clipped", b.band_clipped},
    };
    j["has_band"] = b.band_low.has_value();
    j["band_low_hz"] = b.band_low ? nlohmann::json(*b.band_low) : nlohmann::json(nullptr);
    j["band_high_hz"] = b.band_high ? nlohmann::json(*b.band_high) : nlohmann::json(nullptr);
    j["bandwidth_hz"] = b.bandwidth() ? nlohmann::json(*b.bandwidth()) : nlohmann::json(nullptr);
    j["has_resonance"] = b.f_res.has_value();
    j["f_res_hz"] = b.f_res ? nlohmann::json(*b.f_res) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const RlcFit& fit) {
    return {{"r_ohm", fit.model.r},         {"l_h", fit.model.l},
            {"c_f", fit.model.c},           {"f0_hz", fit.model.f0()},
            {"relative_rms_residual", fit.residual}, {"iterations", fit.iterations}};
}

}  // namespace patchfdtd
