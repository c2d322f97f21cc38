// Copyright 2026 The patchfdtd Authors
// SPDX-License-Identifier: Apache-2.0

#include "patchfdtd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "patchfdtd/constants.hpp"
#include "patchfdtd/error.hpp"

namespace patchfdtd {

namespace {

std::string mm(double v) {
    std::ostringstream s;
    s << v * 1e3 << " mm";
    return s.str();
}

bool inside_rect(double x, double y, double half_x, double half_y, double margin = 0.0) {
    const double tol = 1e-12;
    return std::abs(x) + margin <= half_x + tol && std::abs(y) + margin <= half_y + tol;
}

// Strip rectangle [x0,x1] x [y0,y1] in centre-relative metres.
std::array<double, 4> strip_rect(const AntennaSpec& s, const Strip& st) {
    const double px = s.top_plate_x / 2, py = s.top_plate_y / 2;
    if (st.edge == "+y") {
        return {st.offset - st.length / 2, st.offset + st.length / 2, py + st.gap,
                py + st.gap + st.width};
    }
    if (st.edge == "-y") {
        return {st.offset - st.length / 2, st.offset + st.length / 2, -py - st.gap - st.width,
                -py - st.gap};
    }
    if (st.edge == "+x") {
        return {px + st.gap, px + st.gap + st.width, st.offset - st.length / 2,
                st.offset + st.length / 2};
    }
    if (st.edge == "-x") {
        return {-px - st.gap - st.width, -px - st.gap, st.offset - st.length / 2,
                st.offset + st.length / 2};
    }
    throw GeometryError("strip edge must be one of +x, -x, +y, -y (got '" + st.edge + "')");
}

}  // namespace

AntennaSpec build_default_antenna(double f_design) {
    if (!(f_design > 0)) throw InvalidParameter("f_design must be positive");
    const double scale = 2.45e9 / f_design;
    const double lambda = kSpeedOfLight / f_design;
    AntennaSpec s;
    s.f_design = f_design;
    s.footprint_x = 20e-3 * scale;
    s.footprint_y = 20e-3 * scale;
    s.substrate_thickness = 0.026 * lambda;
    s.eps_r = 4.4;
    s.tan_delta = 0.02;
    s.top_plate_x = 15e-3 * scale;
    s.top_plate_y = 15e-3 * scale;
    s.feed_pin = {0.5e-3 * scale, 0.0, 0.2e-3 * scale};
    for (int n = 0; n < 3; ++n) {
        s.ground_pins[n] = {0.0, (n - 1) * 3e-3 * scale, 0.2e-3 * scale};
    }
    s.strips[0] = {"+y", 0.0, 16e-3 * scale, 1e-3 * scale, 1.5e-3 * scale};
    s.strips[1] = {"-y", 0.0, 16e-3 * scale, 1e-3 * scale, 1.5e-3 * scale};
    s.port_resistance = 50.0;
    s.provenance = {
        {"f_design_hz", "paper"},          {"footprint_x_m", "paper"},
        {"footprint_y_m", "paper"},        {"substrate_thickness_m", "paper"},
        {"eps_r", "assumed"},              {"tan_delta", "paper"},
        {"top_plate_x_m", "assumed"},      {"top_plate_y_m", "assumed"},
        {"feed_pin", "assumed"},           {"ground_pins", "assumed"},
        {"strips", "assumed"},             {"port_resistance_ohm", "paper"},
    };
    return s;
}

void validate(const AntennaSpec& s) {
    if (!(s.f_design > 0)) throw InvalidParameter("f_design must be positive");
    if (!(s.footprint_x > 0) || !(s.footprint_y > 0)) {
        throw InvalidParameter("footprint must be positive");
    }
    if (!(s.substrate_thickness > 0)) throw InvalidParameter("substrate_thickness must be > 0");
    if (!(s.eps_r >= 1.0)) throw InvalidParameter("eps_r must be >= 1");
    if (!(s.tan_delta >= 0.0) || !(s.tan_delta < 1.0)) {
        throw InvalidParameter("tan_delta must lie in [0, 1)");
    }
    if (!(s.port_resistance > 0)) throw InvalidParameter("port_resistance must be positive");
    const double hx = s.footprint_x / 2, hy = s.footprint_y / 2;
    if (!(s.top_plate_x > 0) || !(s.top_plate_y > 0) || s.top_plate_x > s.footprint_x + 1e-12 ||
        s.top_plate_y > s.footprint_y + 1e-12) {
        throw GeometryError("top_plate (" + mm(s.top_plate_x) + " x " + mm(s.top_plate_y) +
                            ") does not fit the footprint");
    }
    const double px = s.top_plate_x / 2, py = s.top_plate_y / 2;
    auto check_pin = [&](const Pin& p, const std::string& name) {
        if (!(p.radius > 0)) throw GeometryError(name + " radius must be positive");
        if (!inside_rect(p.x, p.y, hx, hy, p.radius)) {
            throw GeometryError(name + " at (" + mm(p.x) + ", " + mm(p.y) +
                                ") lies outside the footprint");
        }
        if (!inside_rect(p.x, p.y, px, py)) {
            throw GeometryError(name + " at (" + mm(p.x) + ", " + mm(p.y) +
                                ") does not reach the top plate");
        }
    };
    check_pin(s.feed_pin, "feed_pin");
    for (int n = 0; n < 3; ++n) {
        const std::string name = "ground_pins[" + std::to_string(n) + "]";
        check_pin(s.ground_pins[n], name);
        const double d = std::hypot(s.ground_pins[n].x - s.feed_pin.x,
                                    s.ground_pins[n].y - s.feed_pin.y);
        if (d < s.ground_pins[n].radius + s.feed_pin.radius) {
            throw GeometryError(name + " overlaps feed_pin");
        }
    }
    for (int n = 0; n < 2; ++n) {
        const Strip& st = s.strips[n];
        const std::string name = "strips[" + std::to_string(n) + "]";
        if (!(st.gap > 0)) throw GeometryError(name + " gap must be positive, got " + mm(st.gap));
        if (!(st.width > 0) || !(st.length > 0)) {
            throw GeometryError(name + " needs positive width and length");
        }
        const auto r = strip_rect(s, st);
        if (!inside_rect(r[0], r[2], hx, hy) || !inside_rect(r[1], r[3], hx, hy)) {
            throw GeometryError(name + " extends outside the footprint");
        }
    }
}

const std::vector<std::string>& sweep_parameter_names() {
    static const std::vector<std::string> names = {
        "feed_pin.x",     "feed_pin.y",         "ground_pins.x", "ground_pins.y",
        "ground_pins.spacing", "strip.gap",     "strip.length",  "strip.width",
        "top_plate.x",    "top_plate.y",        "top_plate.size", "eps_r",
        "tan_delta",      "substrate_thickness", "pin.radius",
    };
    return names;
}

void set_parameter(AntennaSpec& s, const std::string& name, double v) {
    auto mean_y = [&] {
        return (s.ground_pins[0].y + s.ground_pins[1].y + s.ground_pins[2].y) / 3.0;
    };
    if (name == "feed_pin.x") {
        s.feed_pin.x = v;
    } else if (name == "feed_pin.y") {
        s.feed_pin.y = v;
    } else if (name == "ground_pins.x") {
        for (auto& p : s.ground_pins) p.x = v;
    } else if (name == "ground_pins.y") {
        const double shift = v - mean_y();
        for (auto& p : s.ground_pins) p.y += shift;
    } else if (name == "ground_pins.spacing") {
        const double c = mean_y();
        for (int n = 0; n < 3; ++n) s.ground_pins[n].y = c + (n - 1) * v;
    } else if (name == "pin.radius") {
        s.feed_pin.radius = v;
        for (auto& p : s.ground_pins) p.radius = v;
    } else if (name == "strip.gap") {
        for (auto& st : s.strips) st.gap = v;
    } else if (name == "strip.length") {
        for (auto& st : s.strips) st.length = v;
    } else if (name == "strip.width") {
        for (auto& st : s.strips) st.width = v;
    } else if (name == "top_plate.x") {
        s.top_plate_x = v;
    } else if (name == "top_plate.y") {
        s.top_plate_y = v;
    } else if (name == "top_plate.size") {
        s.top_plate_x = s.top_plate_y = v;
    } else if (name == "eps_r") {
        s.eps_r = v;
    } else if (name == "tan_delta") {
        s.tan_delta = v;
    } else if (name == "substrate_thickness") {
        s.substrate_thickness = v;
    } else {
        throw InvalidParameter("unknown sweep parameter '" + name + "'");
    }
}

double get_parameter(const AntennaSpec& s, const std::string& name) {
    if (name == "feed_pin.x") return s.feed_pin.x;
    if (name == "feed_pin.y") return s.feed_pin.y;
    if (name == "ground_pins.x") return s.ground_pins[0].x;
    if (name == "ground_pins.y") {
        return (s.ground_pins[0].y + s.ground_pins[1].y + s.ground_pins[2].y) / 3.0;
    }
    if (name == "ground_pins.spacing") return s.ground_pins[1].y - s.ground_pins[0].y;
    if (name == "pin.radius") return s.feed_pin.radius;
    if (name == "strip.gap") return s.strips[0].gap;
    if (name == "strip.length") return s.strips[0].length;
    if (name == "strip.width") return s.strips[0].width;
    if (name == "top_plate.x" || name == "top_plate.size") return s.top_plate_x;
    if (name == "top_plate.y") return s.top_plate_y;
    if (name == "eps_r") return s.eps_r;
    if (name == "tan_delta") return s.tan_delta;
    if (name == "substrate_thickness") return s.substrate_thickness;
    throw InvalidParameter("unknown sweep parameter '" + name + "'");
}

std::vector<AntennaSpec> sweep_parameter(const AntennaSpec& spec, const std::string& name,
                                         const std::vector<double>& values) {
    std::vector<AntennaSpec> out;
    (void)get_parameter(spec, name);
    for (double v : values) {
        AntennaSpec s = spec;
        set_parameter(s, name, v);
        validate(s);
        out.push_back(std::move(s));
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<const char*> keys,
                    const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [k, _] : obj.items()) {
        if (std::find_if(keys.begin(), keys.end(), [&](const char* s) { return k == s; }) ==
            keys.end()) {
            throw ConfigError("unknown key '" + k + "' in " + where);
        }
    }
}

double num(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError("missing '" + std::string(key) + "' in " + where);
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError("'" + std::string(key) + "' in " + where + " must be a number");
    return v.get<double>();
}

json pin_json(const Pin& p) { return {{"x_m", p.x}, {"y_m", p.y}, {"radius_m", p.radius}}; }

Pin pin_from(const json& j, const std::string& where) {
    reject_unknown(j, {"x_m", "y_m", "radius_m"}, where);
    return {num(j, "x_m", where), num(j, "y_m", where), num(j, "radius_m", where)};
}

}  // namespace

nlohmann::json to_json(const AntennaSpec& s) {
    json strips = json::array();
    for (const auto& st : s.strips) {
        strips.push_back({{"edge", st.edge},
                          {"offset_m", st.offset},
                          {"length_m", st.length},
                          {"width_m", st.width},
                          {"gap_m", st.gap}});
    }
    json pins = json::array();
    for (const auto& p : s.ground_pins) pins.push_back(pin_json(p));
    json doc = {
        {"schema_version", kAntennaSchemaVersion},
        {"f_design_hz", s.f_design},
        {"footprint_x_m", s.footprint_x},
        {"footprint_y_m", s.footprint_y},
        {"substrate_thickness_m", s.substrate_thickness},
        {"eps_r", s.eps_r},
        {"tan_delta", s.tan_delta},
        {"top_plate_x_m", s.top_plate_x},
        {"top_plate_y_m", s.top_plate_y},
        {"feed_pin", pin_json(s.feed_pin)},
        {"ground_pins", pins},
        {"strips", strips},
        {"port_resistance_ohm", s.port_resistance},
    };
    if (!s.provenance.empty()) doc["provenance"] = s.provenance;
    return doc;
}

AntennaSpec antenna_from_json(const nlohmann::json& j) {
    const std::string where = "antenna";
    reject_unknown(j,
                   {"schema_version", "f_design_hz", "footprint_x_m", "footprint_y_m",
                    "substrate_thickness_m", "eps_r", "tan_delta", "top_plate_x_m",
                    "top_plate_y_m", "feed_pin", "ground_pins", "strips", "port_resistance_ohm",
                    "provenance"},
                   where);
    if (!j.contains("schema_version") || !j["schema_version"].is_number_integer() ||
        j["schema_version"].get<int>() != kAntennaSchemaVersion) {
        throw ConfigError("antenna.schema_version must be " + std::to_string(kAntennaSchemaVersion));
    }
    AntennaSpec s;
    s.f_design = num(j, "f_design_hz", where);
    s.footprint_x = num(j, "footprint_x_m", where);
    s.footprint_y = num(j, "footprint_y_m", where);
    s.substrate_thickness = num(j, "substrate_thickness_m", where);
    s.eps_r = num(j, "eps_r", where);
    s.tan_delta = num(j, "tan_delta", where);
    s.top_plate_x = num(j, "top_plate_x_m", where);
    s.top_plate_y = num(j, "top_plate_y_m", where);
    s.port_resistance = num(j, "port_resistance_ohm", where);
    if (!j.contains("feed_pin")) throw ConfigError("missing 'feed_pin' in antenna");
    s.feed_pin = pin_from(j["feed_pin"], "antenna.feed_pin");
    if (!j.contains("ground_pins") || !j["ground_pins"].is_array() || j["ground_pins"].size() != 3) {
        throw ConfigError("antenna.ground_pins must list exactly 3 pins");
    }
    for (int n = 0; n < 3; ++n) {
        s.ground_pins[n] = pin_from(j["ground_pins"][n], "antenna.ground_pins[" + std::to_string(n) + "]");
    }
    if (!j.contains("strips") || !j["strips"].is_array() || j["strips"].size() != 2) {
        throw ConfigError("antenna.strips must list exactly 2 strips");
    }
    for (int n = 0; n < 2; ++n) {
        const auto& st = j["strips"][n];
        const std::string w = "antenna.strips[" + std::to_string(n) + "]";
        reject_unknown(st, {"edge", "offset_m", "length_m", "width_m", "gap_m"}, w);
        if (!st.contains("edge") || !st["edge"].is_string()) throw ConfigError(w + ".edge must be a string");
        s.strips[n] = {st["edge"].get<std::string>(), num(st, "offset_m", w), num(st, "length_m", w),
                       num(st, "width_m", w), num(st, "gap_m", w)};
    }
    if (j.contains("provenance")) {
        s.provenance = j["provenance"].get<std::map<std::string, std::string>>();
    }
    validate(s);
    return s;
}

// ---------------------------------------------------------------------------
// Rasterization

const FeatureBounds* VoxelModel::feature(const std::string& name) const {
    for (const auto& f : features)
        if (f.name == name) return &f;
    return nullptr;
}

bool VoxelModel::operator==(const VoxelModel& o) const {
    return grid.nx == o.grid.nx && grid.ny == o.grid.ny && grid.nz == o.grid.nz &&
           grid.dx == o.grid.dx && grid.dy == o.grid.dy && grid.dz == o.grid.dz &&
           grid.dt == o.grid.dt && grid.pml_thickness == o.grid.pml_thickness &&
           materials == o.materials && port == o.port && features == o.features &&
           structure_lo == o.structure_lo && structure_hi == o.structure_hi;
}

VoxelModel voxelize(const AntennaSpec& spec, double resolution, int padding_cells, int pml_cells,
                    double cfl_factor) {
    validate(spec);
    if (!(resolution > 0) || resolution > spec.substrate_thickness / 3.0 + 1e-15) {
        throw InvalidParameter("resolution " + mm(resolution) +
                               " is too coarse: need >= 3 cells through the " +
                               mm(spec.substrate_thickness) + " substrate");
    }
    if (padding_cells < 10) throw InvalidParameter("padding_cells must be >= 10");
    if (pml_cells < 0) throw InvalidParameter("pml_cells must be >= 0");

    const double d = resolution;
    const int nfx = static_cast<int>(std::lround(spec.footprint_x / d));
    const int nfy = static_cast<int>(std::lround(spec.footprint_y / d));
    const int nsub = static_cast<int>(std::ceil(spec.substrate_thickness / d - 1e-9));
    const double dz = spec.substrate_thickness / nsub;
    const int margin = pml_cells + padding_cells;

    const int i0 = margin, j0 = margin, kg = margin, kt = kg + nsub;
    GridSpec g;
    g.nx = nfx + 2 * margin;
    g.ny = nfy + 2 * margin;
    g.nz = nsub + 2 * margin;
    g.dx = d;
    g.dy = d;
    g.dz = dz;
    g.pml_thickness = pml_cells;
    g.cfl_factor = cfl_factor;
    g.dt = courant_timestep(g.dx, g.dy, g.dz, cfl_factor);
    validate(g);

    VoxelModel vm{g, MaterialMap(g), {}, {}, {}, {}};
    MaterialMap& m = vm.materials;
    auto node_x = [&](double x) {
        return i0 + static_cast<int>(std::lround((x + spec.footprint_x / 2) / d));
    };
    auto node_y = [&](double y) {
        return j0 + static_cast<int>(std::lround((y + spec.footprint_y / 2) / d));
    };
    auto sheet = [&](const std::string& name, int ia, int ib, int ja, int jb, int k) {
        for (int i = ia; i < ib; ++i)
            for (int j = ja; j <= jb; ++j) m.set_pec(Axis::X, i, j, k);
        for (int i = ia; i <= ib; ++i)
            for (int j = ja; j < jb; ++j) m.set_pec(Axis::Y, i, j, k);
        vm.features.push_back({name, {ia, ja, k}, {ib, jb, k}});
    };

    const double sigma = effective_conductivity(spec.eps_r, spec.tan_delta, spec.f_design);
    m.fill_cells(i0, i0 + nfx, j0, j0 + nfy, kg, kt, spec.eps_r, sigma);
    vm.features.push_back({"substrate", {i0, j0, kg}, {i0 + nfx, j0 + nfy, kt}});
    vm.structure_lo = {i0, j0, kg};
    vm.structure_hi = {i0 + nfx, j0 + nfy, kt};

    sheet("ground_plane", i0, i0 + nfx, j0, j0 + nfy, kg);

    const int npx = static_cast<int>(std::lround(spec.top_plate_x / d));
    const int npy = static_cast<int>(std::lround(spec.top_plate_y / d));
    const int pa = node_x(-spec.top_plate_x / 2), pb = pa + npx;
    const int qa = node_y(-spec.top_plate_y / 2), qb = qa + npy;
    sheet("top_plate", pa, pb, qa, qb, kt);

    for (int n = 0; n < 2; ++n) {
        const Strip& st = spec.strips[n];
        const int gap = std::max(1, static_cast<int>(std::lround(st.gap / d)));
        const int wid = std::max(1, static_cast<int>(std::lround(st.width / d)));
        const int len = std::max(1, static_cast<int>(std::lround(st.length / d)));
        int ia, ib, ja, jb;
        if (st.edge == "+y" || st.edge == "-y") {
            ia = node_x(st.offset - st.length / 2);
            ib = ia + len;
            ja = st.edge == "+y" ? qb + gap : qa - gap - wid;
            jb = ja + wid;
        } else {
            ja = node_y(st.offset - st.length / 2);
            jb = ja + len;
            ia = st.edge == "+x" ? pb + gap : pa - gap - wid;
            ib = ia + wid;
        }
        if (ia < i0 || ib > i0 + nfx || ja < j0 || jb > j0 + nfy) {
            throw GeometryError("strips[" + std::to_string(n) +
                                "] falls outside the footprint on this lattice");
        }
        sheet("strips[" + std::to_string(n) + "]", ia, ib, ja, jb, kt);
    }

    auto column = [&](const std::string& name, const Pin& p, bool feed) {
        const int i = node_x(p.x), j = node_y(p.y);
        if (i < pa || i > pb || j < qa || j > qb) {
            throw GeometryError(name + " misses the top plate on this lattice");
        }
        for (int k = kg; k < kt; ++k) {
            if (feed && k == kg) continue;
            m.set_pec(Axis::Z, i, j, k);
        }
        vm.features.push_back({name, {i, j, kg}, {i, j, kt}});
        return std::array<int, 2>{i, j};
    };
    std::vector<std::array<int, 2>> columns;
    for (int n = 0; n < 3; ++n) {
        columns.push_back(column("ground_pins[" + std::to_string(n) + "]", spec.ground_pins[n], false));
    }
    const auto feed = column("feed_pin", spec.feed_pin, true);
    for (const auto& c : columns) {
        if (c == feed) throw GeometryError("feed_pin and a ground pin share a lattice column");
    }
    vm.port = {Axis::Z, feed[0], feed[1], kg, spec.port_resistance};
    m.add_lumped_resistor(Axis::Z, feed[0], feed[1], kg, spec.port_resistance);
    return vm;
}

}  // namespace patchfdtd
