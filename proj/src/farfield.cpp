// Copyright 2026 The patchfdtd Authors
// SPDX-License-Identifier: Apache-2.0

#include "patchfdtd/farfield.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <sstream>

#include "patchfdtd/constants.hpp"
#include "patchfdtd/error.hpp"

namespace patchfdtd {

namespace {

constexpr double kDeg = kPi / 180.0;

std::size_t node_index(const GridSpec& g, const std::array<int, 3>& n) {
    return g.index(n[0], n[1], n[2]);
}

}  // namespace

HuygensSurface::HuygensSurface(const GridSpec& g, std::array<int, 3> lo, std::array<int, 3> hi,
                               std::vector<double> freqs, int stride)
    : freqs_(std::move(freqs)), stride_(stride), dt_(g.dt), d_{g.dx, g.dy, g.dz}, lo_(lo), hi_(hi) {
    if (stride < 1) throw InvalidParameter("Huygens surface stride must be >= 1");
    const std::array<int, 3> n{g.nx, g.ny, g.nz};
    for (int a = 0; a < 3; ++a) {
        if (lo[a] < 1 || hi[a] > n[a] - 1 || hi[a] - lo[a] < 1) {
            throw GeometryError("Huygens box must lie strictly inside the lattice");
        }
        if (g.pml_thickness > 0 && !g.periodic(static_cast<Axis>(a)) &&
            (lo[a] <= g.pml_thickness || hi[a] >= n[a] - g.pml_thickness)) {
            throw GeometryError("Huygens box must lie strictly inside the CPML inner boundary");
        }
    }
    const double nyquist = 0.5 / (g.dt * stride);
    for (double f : freqs_) {
        if (!(f > 0) || f >= nyquist) {
            throw InvalidParameter("Huygens surface frequency above the sampling Nyquist limit");
        }
    }
    for (int a = 0; a < 3; ++a) {
        add_face(g, a, -1);
        add_face(g, a, +1);
    }
    e_dft_.assign(freqs_.size() * w_.size(), cplx(0.0, 0.0));
    h_dft_.assign(freqs_.size() * w_.size(), cplx(0.0, 0.0));
    scratch_e_.resize(w_.size());
    scratch_h_.resize(w_.size());
}

void HuygensSurface::add_face(const GridSpec& g, int a, int side) {
    const int b = (a + 1) % 3, c = (a + 2) % 3;
    const int na = side < 0 ? lo_[a] : hi_[a];
    auto trap = [&](int axis, int v) {
        return (v == lo_[axis] || v == hi_[axis]) ? 0.5 * d_[axis] : d_[axis];
    };
    // Sub-grid 1: E_c (node in b, half in c) with H_b; J_c = s H_b, M_b = s E_c.
    // Sub-grid 2: E_b (half in b, node in c) with H_c; J_b = -s H_c, M_c = -s E_b.
    for (int sub = 0; sub < 2; ++sub) {
        const int e_axis = sub == 0 ? c : b;
        const int h_axis = sub == 0 ? b : c;
        const int b_end = sub == 0 ? hi_[b] : hi_[b] - 1;
        const int c_end = sub == 0 ? hi_[c] - 1 : hi_[c];
        for (int vb = lo_[b]; vb <= b_end; ++vb) {
            for (int vc = lo_[c]; vc <= c_end; ++vc) {
                std::array<int, 3> n{};
                n[a] = na;
                n[b] = vb;
                n[c] = vc;
                std::array<std::int32_t, 3> p2{};
                p2[a] = 2 * na - (lo_[a] + hi_[a]);
                p2[b] = 2 * vb + (sub == 1 ? 1 : 0) - (lo_[b] + hi_[b]);
                p2[c] = 2 * vc + (sub == 0 ? 1 : 0) - (lo_[c] + hi_[c]);
                const double wb = sub == 0 ? trap(b, vb) : d_[b];
                const double wc = sub == 0 ? d_[c] : trap(c, vc);
                std::array<int, 3> m = n;
                m[a] = na - 1;
                pos2_.push_back(p2);
                w_.push_back(wb * wc);
                e_comp_.push_back(static_cast<std::uint8_t>(e_axis));
                h_comp_.push_back(static_cast<std::uint8_t>(3 + h_axis));
                j_sign_.push_back(static_cast<std::int8_t>(sub == 0 ? side : -side));
                m_sign_.push_back(static_cast<std::int8_t>(sub == 0 ? side : -side));
                e_idx_.push_back(node_index(g, n));
                h_idx0_.push_back(node_index(g, m));
                h_idx1_.push_back(node_index(g, n));
            }
        }
    }
}

void HuygensSurface::accumulate(const FieldState& s) {
    if (s.time_index % stride_ != 0) return;
    const std::size_t np = w_.size();
    for (std::size_t p = 0; p < np; ++p) {
        scratch_e_[p] = s.f[e_comp_[p]][e_idx_[p]];
        const auto& h = s.f[h_comp_[p]];
        scratch_h_[p] = 0.5 * (h[h_idx0_[p]] + h[h_idx1_[p]]);
    }
    const double te = static_cast<double>(s.time_index) * dt_;
    const double th = te - 0.5 * dt_;
    const double scale = dt_ * stride_;
    const long long nq = static_cast<long long>(freqs_.size());
#pragma omp parallel for schedule(static)
    for (long long q = 0; q < nq; ++q) {
        const double w = 2.0 * kPi * freqs_[static_cast<std::size_t>(q)];
        const cplx pe = std::polar(scale, -w * te);
        const cplx ph = std::polar(scale, -w * th);
        cplx* ed = e_dft_.data() + static_cast<std::size_t>(q) * np;
        cplx* hd = h_dft_.data() + static_cast<std::size_t>(q) * np;
        const double per = pe.real(), pei = pe.imag(), phr = ph.real(), phi = ph.imag();
        double* edr = reinterpret_cast<double*>(ed);
        double* hdr = reinterpret_cast<double*>(hd);
        for (std::size_t p = 0; p < np; ++p) {
            edr[2 * p] += scratch_e_[p] * per;
            edr[2 * p + 1] += scratch_e_[p] * pei;
            hdr[2 * p] += scratch_h_[p] * phr;
            hdr[2 * p + 1] += scratch_h_[p] * phi;
        }
    }
}

std::optional<std::size_t> HuygensSurface::frequency_index(double f) const {
    for (std::size_t q = 0; q < freqs_.size(); ++q) {
        if (std::abs(freqs_[q] - f) <= 1e-9 * std::max(1.0, std::abs(f))) return q;
    }
    return std::nullopt;
}

HuygensSurface::Currents HuygensSurface::currents(std::size_t q, std::size_t p) const {
    const std::size_t np = w_.size();
    const cplx e = e_dft_[q * np + p], h = h_dft_[q * np + p];
    Currents out;
    const int e_axis = e_comp_[p];
    const int h_axis = h_comp_[p] - 3;
    out.j[static_cast<std::size_t>(e_axis)] = static_cast<double>(j_sign_[p]) * h;
    out.m[static_cast<std::size_t>(h_axis)] = static_cast<double>(m_sign_[p]) * e;
    return out;
}

std::array<double, 3> HuygensSurface::position(std::size_t p) const {
    return {0.5 * pos2_[p][0] * d_[0], 0.5 * pos2_[p][1] * d_[1], 0.5 * pos2_[p][2] * d_[2]};
}

double HuygensSurface::poynting_flux(std::size_t q) const {
    const std::size_t np = w_.size();
    double acc = 0.0;
    for (std::size_t p = 0; p < np; ++p) {
        const cplx e = e_dft_[q * np + p], h = h_dft_[q * np + p];
        acc -= static_cast<double>(j_sign_[p]) * (e * std::conj(h)).real() * w_[p];
    }
    return 0.5 * acc;
}

bool HuygensSurface::operator==(const HuygensSurface& o) const {
    return freqs_ == o.freqs_ && stride_ == o.stride_ && dt_ == o.dt_ && d_ == o.d_ &&
           lo_ == o.lo_ && hi_ == o.hi_ && pos2_ == o.pos2_ && w_ == o.w_ && e_comp_ == o.e_comp_ &&
           h_comp_ == o.h_comp_ && j_sign_ == o.j_sign_ && m_sign_ == o.m_sign_ &&
           e_dft_ == o.e_dft_ && h_dft_ == o.h_dft_;
}

namespace {

constexpr char kSurfaceMagic[8] = {'P', 'F', 'H', 'S', 'U', 'R', 'F', '1'};

template <class T>
void put(std::FILE* f, const std::vector<T>& v) {
    const std::uint64_t n = v.size();
    std::fwrite(&n, sizeof n, 1, f);
    if (n) std::fwrite(v.data(), sizeof(T), n, f);
}

template <class T>
void put1(std::FILE* f, const T& v) {
    std::fwrite(&v, sizeof v, 1, f);
}

template <class T>
void get(std::FILE* f, std::vector<T>& v, const std::string& path) {
    std::uint64_t n = 0;
    if (std::fread(&n, sizeof n, 1, f) != 1 || n > (1ull << 34)) throw ConfigError(path + ": truncated surface file");
    v.resize(n);
    if (n && std::fread(v.data(), sizeof(T), n, f) != n) throw ConfigError(path + ": truncated surface file");
}

template <class T>
void get1(std::FILE* f, T& v, const std::string& path) {
    if (std::fread(&v, sizeof v, 1, f) != 1) throw ConfigError(path + ": truncated surface file");
}

}  // namespace

void HuygensSurface::save(const std::string& path) const {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw Error("cannot write " + path);
    std::fwrite(kSurfaceMagic, 1, sizeof kSurfaceMagic, f);
    put1(f, stride_);
    put1(f, dt_);
    put1(f, d_);
    put1(f, lo_);
    put1(f, hi_);
    put(f, freqs_);
    put(f, pos2_);
    put(f, w_);
    put(f, e_comp_);
    put(f, h_comp_);
    put(f, j_sign_);
    put(f, m_sign_);
    put(f, e_dft_);
    put(f, h_dft_);
    std::fclose(f);
}

HuygensSurface HuygensSurface::load(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw ConfigError("cannot open " + path);
    HuygensSurface s;
    try {
        char magic[8];
        if (std::fread(magic, 1, 8, f) != 8 || std::memcmp(magic, kSurfaceMagic, 8) != 0) {
            throw ConfigError(path + ": not a surface spectrum file");
        }
        get1(f, s.stride_, path);
        get1(f, s.dt_, path);
        get1(f, s.d_, path);
        get1(f, s.lo_, path);
        get1(f, s.hi_, path);
        get(f, s.freqs_, path);
        get(f, s.pos2_, path);
        get(f, s.w_, path);
        get(f, s.e_comp_, path);
        get(f, s.h_comp_, path);
        get(f, s.j_sign_, path);
        get(f, s.m_sign_, path);
        get(f, s.e_dft_, path);
        get(f, s.h_dft_, path);
    } catch (...) {
        std::fclose(f);
        throw;
    }
    std::fclose(f);
    const std::size_t np = s.w_.size();
    if (s.pos2_.size() != np || s.e_comp_.size() != np || s.e_dft_.size() != np * s.freqs_.size() ||
        s.h_dft_.size() != np * s.freqs_.size()) {
        throw ConfigError(path + ": inconsistent surface file");
    }
    return s;
}

std::vector<double> theta_grid(double step) {
    const int n = static_cast<int>(std::lround(180.0 / step));
    std::vector<double> t(static_cast<std::size_t>(n + 1));
    for (int k = 0; k <= n; ++k) t[static_cast<std::size_t>(k)] = k * step;
    return t;
}

std::vector<double> phi_grid(double step) {
    const int n = static_cast<int>(std::lround(360.0 / step));
    std::vector<double> p(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) p[static_cast<std::size_t>(k)] = k * step;
    return p;
}

std::vector<double> theta_weights(const std::vector<double>& t) {
    const std::size_t n = t.size();
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double lo_half = k > 0 ? 0.5 * (t[k] - t[k - 1]) : (n > 1 ? 0.5 * (t[1] - t[0]) : 90.0);
        const double hi_half = k + 1 < n ? 0.5 * (t[k + 1] - t[k]) : lo_half;
        const double a = std::max(0.0, t[k] - lo_half) * kDeg;
        const double b = std::min(180.0, t[k] + hi_half) * kDeg;
        w[k] = std::cos(a) - std::cos(b);
    }
    return w;
}

double phi_weight(const std::vector<double>& phi) {
    if (phi.empty()) throw InvalidParameter("empty phi grid");
    return 2.0 * kPi / static_cast<double>(phi.size());
}

double radiated_power(const std::vector<double>& theta, const std::vector<double>& phi,
                      const std::vector<double>& u) {
    const auto wt = theta_weights(theta);
    const double wp = phi_weight(phi);
    double acc = 0.0;
    for (std::size_t t = 0; t < theta.size(); ++t) {
        double row = 0.0;
        for (std::size_t p = 0; p < phi.size(); ++p) row += u[t * phi.size() + p];
        acc += wt[t] * row;
    }
    return acc * wp;
}

FarFieldPattern ntff(const HuygensSurface& s, double f, const std::vector<double>& theta,
                     const std::vector<double>& phi) {
    const auto q = s.frequency_index(f);
    if (!q) {
        std::ostringstream m;
        m << "ntff: frequency " << f << " Hz was not accumulated on the Huygens surface";
        throw InvalidParameter(m.str());
    }
    const double k = 2.0 * kPi * s.freqs()[*q] / kSpeedOfLight;
    const std::size_t np = s.points();

    // Phase factors are products of per-axis tables indexed by half cells.
    std::array<int, 3> half{};
    std::array<double, 3> dh{};
    for (int a = 0; a < 3; ++a) {
        half[a] = s.hi()[a] - s.lo()[a];
        dh[a] = 0.5 * s.spacing()[a];
    }
    std::vector<std::array<cplx, 3>> jv(np), mv(np);
    for (std::size_t p = 0; p < np; ++p) {
        const auto c = s.currents(*q, p);
        for (int a = 0; a < 3; ++a) {
            jv[p][a] = c.j[a] * s.area(p);
            mv[p][a] = c.m[a] * s.area(p);
        }
    }

    FarFieldPattern out;
    out.frequency = s.freqs()[*q];
    out.theta_deg = theta;
    out.phi_deg = phi;
    const std::size_t nt = theta.size(), nph = phi.size();
    out.e_theta.assign(nt * nph, 0.0);
    out.e_phi.assign(nt * nph, 0.0);
    out.u.assign(nt * nph, 0.0);
    const double eta = kEta0;
    const long long ndir = static_cast<long long>(nt * nph);
#pragma omp parallel for schedule(dynamic, 16)
    for (long long di = 0; di < ndir; ++di) {
        const std::size_t t = static_cast<std::size_t>(di) / nph;
        const std::size_t ph = static_cast<std::size_t>(di) % nph;
        const double th = theta[t] * kDeg, fi = phi[ph] * kDeg;
        const double st = std::sin(th), ct = std::cos(th), sp = std::sin(fi), cp = std::cos(fi);
        const std::array<double, 3> rhat{st * cp, st * sp, ct};
        std::array<std::vector<cplx>, 3> tab;
        for (int a = 0; a < 3; ++a) {
            tab[a].resize(static_cast<std::size_t>(2 * half[a] + 1));
            for (int v = -half[a]; v <= half[a]; ++v) {
                tab[a][static_cast<std::size_t>(v + half[a])] = std::polar(1.0, k * rhat[a] * v * dh[a]);
            }
        }
        std::array<cplx, 3> n{}, l{};
        for (std::size_t p = 0; p < np; ++p) {
            const auto& h2 = s.half_index(p);
            const cplx e = tab[0][static_cast<std::size_t>(h2[0] + half[0])] *
                           tab[1][static_cast<std::size_t>(h2[1] + half[1])] *
                           tab[2][static_cast<std::size_t>(h2[2] + half[2])];
            for (int a = 0; a < 3; ++a) {
                n[a] += jv[p][a] * e;
                l[a] += mv[p][a] * e;
            }
        }
        const cplx nth = n[0] * ct * cp + n[1] * ct * sp - n[2] * st;
        const cplx nph_ = -n[0] * sp + n[1] * cp;
        const cplx lth = l[0] * ct * cp + l[1] * ct * sp - l[2] * st;
        const cplx lph = -l[0] * sp + l[1] * cp;
        const cplx j(0.0, 1.0);
        const cplx et = -j * k / (4.0 * kPi) * (lph + eta * nth);
        const cplx ep = j * k / (4.0 * kPi) * (lth - eta * nph_);
        const std::size_t idx = t * nph + ph;
        out.e_theta[idx] = et;
        out.e_phi[idx] = ep;
        out.u[idx] = (std::norm(et) + std::norm(ep)) / (2.0 * eta);
    }
    out.p_rad = radiated_power(theta, phi, out.u);
    return out;
}

FarFieldPattern pattern_from_intensity(const std::vector<double>& theta,
                                       const std::vector<double>& phi,
                                       const std::vector<double>& u, double p_in) {
    if (u.size() != theta.size() * phi.size()) throw InvalidParameter("intensity size mismatch");
    FarFieldPattern p;
    p.theta_deg = theta;
    p.phi_deg = phi;
    p.u = u;
    p.e_theta.assign(u.size(), 0.0);
    p.e_phi.assign(u.size(), 0.0);
    p.p_rad = radiated_power(theta, phi, u);
    p.p_in = p_in;
    return p;
}

namespace {

std::vector<double> to_db(const FarFieldPattern& p, double ref) {
    std::vector<double> out(p.u.size());
    for (std::size_t k = 0; k < p.u.size(); ++k) {
        const double v = 4.0 * kPi * p.u[k] / ref;
        out[k] = v > 0 ? 10.0 * std::log10(v) : -std::numeric_limits<double>::infinity();
    }
    return out;
}

}  // namespace

std::vector<double> directivity(const FarFieldPattern& p) {
    if (!(p.p_rad > 0)) throw InvalidParameter("undefined pattern: radiated power is zero");
    return to_db(p, p.p_rad);
}

std::vector<double> gain(const FarFieldPattern& p) {
    if (!(p.p_in > 0)) throw InvalidParameter("gain: accepted input power must be positive");
    return to_db(p, p.p_in);
}

double closure(const FarFieldPattern& p) {
    if (!(p.p_rad > 0)) throw InvalidParameter("undefined pattern: radiated power is zero");
    std::vector<double> d(p.u.size());
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = p.u[k] / p.p_rad;  // (4 pi U / P) / 4 pi
    return radiated_power(p.theta_deg, p.phi_deg, d);
}

namespace {

std::size_t find_angle(const std::vector<double>& grid, double v, const char* what) {
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (std::abs(grid[k] - v) < 1e-9) return k;
    }
    throw InvalidParameter(std::string("cut: ") + what + " grid has no sample at " + std::to_string(v));
}

// Linear interpolation of a dB table row at fractional theta.
std::vector<double> theta_row(const FarFieldPattern& p, const std::vector<double>& db, double theta) {
    const auto& t = p.theta_deg;
    if (theta < t.front() - 1e-9 || theta > t.back() + 1e-9) {
        throw InvalidParameter("theta outside the pattern grid");
    }
    std::size_t k = 0;
    while (k + 1 < t.size() && t[k + 1] < theta - 1e-12) ++k;
    const std::size_t k1 = std::min(k + 1, t.size() - 1);
    const double u = k1 == k ? 0.0 : std::clamp((theta - t[k]) / (t[k1] - t[k]), 0.0, 1.0);
    const std::size_t np = p.phi_deg.size();
    std::vector<double> row(np);
    for (std::size_t q = 0; q < np; ++q) {
        const double a = db[k * np + q], b = db[k1 * np + q];
        row[q] = u == 0.0 ? a : (u == 1.0 ? b : a + u * (b - a));
    }
    return row;
}

}  // namespace

Cut make_cut(const FarFieldPattern& p, const std::vector<double>& db, const std::string& cut) {
    Cut out;
    const std::size_t np = p.phi_deg.size();
    if (cut == "xz" || cut == "yz") {
        const double phi0 = cut == "xz" ? 0.0 : 90.0;
        const std::size_t a = find_angle(p.phi_deg, phi0, "phi");
        const std::size_t b = find_angle(p.phi_deg, phi0 + 180.0, "phi");
        std::vector<std::pair<double, double>> pts;
        for (std::size_t t = 0; t < p.theta_deg.size(); ++t) {
            const double th = p.theta_deg[t];
            pts.emplace_back(th, db[t * np + a]);
            if (th > 1e-9 && th < 180.0 - 1e-9) pts.emplace_back(-th, db[t * np + b]);
        }
        std::sort(pts.begin(), pts.end());
        for (const auto& [ang, v] : pts) {
            out.angle_deg.push_back(ang);
            out.value_db.push_back(v);
        }
        return out;
    }
    if (cut.rfind("azimuth:", 0) == 0) {
        const double th = std::stod(cut.substr(8));
        out.angle_deg = p.phi_deg;
        out.value_db = theta_row(p, db, th);
        return out;
    }
    throw InvalidParameter("unknown cut '" + cut + "' (use xz, yz or azimuth:<theta>)");
}

Beamwidth hpbw(const Cut& c) {
    const std::size_t n = c.value_db.size();
    if (n < 3) throw InvalidParameter("hpbw: cut needs >= 3 samples");
    const std::size_t m = static_cast<std::size_t>(
        std::max_element(c.value_db.begin(), c.value_db.end()) - c.value_db.begin());
    const double peak = c.value_db[m], level = peak - 3.0;
    Beamwidth bw;
    bw.peak_deg = c.angle_deg[m];
    auto step_angle = [&](std::size_t from, std::size_t to, int dir) {
        double d = c.angle_deg[to] - c.angle_deg[from];
        if (dir > 0 && d <= 0) d += 360.0;
        if (dir < 0 && d >= 0) d -= 360.0;
        return d;
    };
    auto walk = [&](int dir, double& edge) {
        std::size_t cur = m;
        double ang = c.angle_deg[m];
        for (std::size_t s = 0; s < n; ++s) {
            const std::size_t nxt = (cur + n + static_cast<std::size_t>(dir + static_cast<int>(n))) % n;
            const double nang = ang + step_angle(cur, nxt, dir);
            const double v0 = c.value_db[cur], v1 = c.value_db[nxt];
            if (v1 <= level) {
                edge = v0 == v1 ? nang : ang + (level - v0) / (v1 - v0) * (nang - ang);
                return true;
            }
            cur = nxt;
            ang = nang;
        }
        return false;
    };
    double lo = 0, hi = 0;
    const bool ok_hi = walk(+1, hi);
    const bool ok_lo = walk(-1, lo);
    if (!ok_hi || !ok_lo || hi - lo > 360.0) {
        bw.open = true;
        bw.width_deg = 360.0;
        bw.low_deg = c.angle_deg.front();
        bw.high_deg = c.angle_deg.back();
        return bw;
    }
    bw.low_deg = lo;
    bw.high_deg = hi;
    bw.width_deg = hi - lo;
    return bw;
}

double azimuth_ripple(const FarFieldPattern& p, const std::vector<double>& db, double theta) {
    const auto row = theta_row(p, db, theta);
    const auto [mn, mx] = std::minmax_element(row.begin(), row.end());
    return *mx - *mn;
}

PatternMetrics pattern_metrics(const FarFieldPattern& p, double ripple_theta) {
    PatternMetrics m;
    m.frequency = p.frequency;
    const auto d = directivity(p);
    const bool has_gain = p.p_in > 0;
    const auto g = has_gain ? gain(p) : d;
    const std::size_t np = p.phi_deg.size();
    const std::size_t k = static_cast<std::size_t>(std::max_element(g.begin(), g.end()) - g.begin());
    m.peak_gain_db = has_gain ? g[k] : std::numeric_limits<double>::quiet_NaN();
    m.peak_theta_deg = p.theta_deg[k / np];
    m.peak_phi_deg = p.phi_deg[k % np];
    m.peak_directivity_dbi = *std::max_element(d.begin(), d.end());
    m.hpbw_xz = hpbw(make_cut(p, g, "xz"));
    m.hpbw_yz = hpbw(make_cut(p, g, "yz"));
    m.ripple_theta_deg = ripple_theta;
    m.azimuth_ripple_db = azimuth_ripple(p, g, ripple_theta);
    // Opposite direction (180 - theta, phi + 180) on the grid.
    const std::size_t nt = p.theta_deg.size();
    const std::size_t tb = nt - 1 - k / np;
    const std::size_t pb = (k % np + np / 2) % np;
    m.front_to_back_db = g[k] - g[tb * np + pb];
    m.closure = closure(p);
    return m;
}

EfficiencyReport efficiency_report(double p_rad, double p_in, cplx gamma,
                                   std::optional<double> cd_lossless) {
    if (!(p_rad > 0) || !(p_in > 0)) throw InvalidParameter("efficiency: powers must be positive");
    if (std::abs(gamma) > 1.0 + 1e-6) throw PassivityError("efficiency: |gamma| > 1");
    if (p_rad > p_in * (1.0 + 1e-3)) {
        std::ostringstream m;
        m << "energy violation: P_rad = " << p_rad << " W exceeds accepted power " << p_in << " W";
        throw EnergyViolation(m.str());
    }
    EfficiencyReport e;
    e.match = 1.0 - std::norm(gamma);
    e.cd = p_rad / p_in;
    if (cd_lossless) {
        if (!(*cd_lossless > 0)) throw InvalidParameter("efficiency: lossless reference must be > 0");
        e.paired = true;
        e.dielectric = e.cd / *cd_lossless;
        e.conduction = e.cd / e.dielectric;
    } else {
        e.conduction = 1.0;
        e.dielectric = e.cd;
    }
    e.total = e.match * e.cd;
    return e;
}

void write_pattern_csv(const std::string& path, const FarFieldPattern& p) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw Error("cannot write " + path);
    const auto d = directivity(p);
    const auto g = p.p_in > 0 ? gain(p) : std::vector<double>(d.size(), std::nan(""));
    std::fputs("theta_deg,phi_deg,gain_db,directivity_dbi\n", f);
    const std::size_t np = p.phi_deg.size();
    for (std::size_t t = 0; t < p.theta_deg.size(); ++t) {
        for (std::size_t q = 0; q < np; ++q) {
            std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", p.theta_deg[t], p.phi_deg[q], g[t * np + q],
                         d[t * np + q]);
        }
    }
    std::fclose(f);
}

void write_cut_csv(const std::string& path, const Cut& c) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw Error("cannot write " + path);
    std::fputs("angle_deg,gain_db\n", f);
    for (std::size_t k = 0; k < c.angle_deg.size(); ++k) {
        std::fprintf(f, "%.17g,%.17g\n", c.angle_deg[k], c.value_db[k]);
    }
    std::fclose(f);
}

namespace {

nlohmann::json bw_json(const Beamwidth& b) {
    return {{"width_deg", b.width_deg},
            {"open_beam", b.open},
            {"low_deg", b.low_deg},
            {"high_deg", b.high_deg},
            {"peak_deg", b.peak_deg}};
}

nlohmann::json num_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const PatternMetrics& m) {
    return {{"coordinates", "theta from +z (zenith), phi from +x (azimuth)"},
            {"frequency_hz", m.frequency},
            {"peak_gain_db", num_or_null(m.peak_gain_db)},
            {"peak_theta_deg", m.peak_theta_deg},
            {"peak_phi_deg", m.peak_phi_deg},
            {"peak_directivity_dbi", m.peak_directivity_dbi},
            {"hpbw_xz", bw_json(m.hpbw_xz)},
            {"hpbw_yz", bw_json(m.hpbw_yz)},
            {"ripple_theta_deg", m.ripple_theta_deg},
            {"azimuth_ripple_db", m.azimuth_ripple_db},
            {"front_to_back_db", m.front_to_back_db},
            {"closure", m.closure}};
}

nlohmann::json to_json(const EfficiencyReport& e) {
    return {{"match", e.match},         {"conduction_dielectric", e.cd},
            {"conduction", e.conduction}, {"dielectric", e.dielectric},
            {"total", e.total},         {"paired", e.paired}};
}

}  // namespace patchfdtd
