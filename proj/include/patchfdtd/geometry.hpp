// Copyright 2026 The patchfdtd Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PATCHFDTD_GEOMETRY_HPP
#define PATCHFDTD_GEOMETRY_HPP

#include <array>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "patchfdtd/grid.hpp"
#include "patchfdtd/materials.hpp"

namespace patchfdtd {

inline constexpr int kAntennaSchemaVersion = 1;

// Coordinates are metres relative to the footprint centre; the ground plane
// is the z = 0 layer and the top plate sits at z = substrate_thickness.
struct Pin {
    double x = 0.0;
    double y = 0.0;
    double radius = 0.0;
    bool operator==(const Pin&) const = default;
};

// Coplanar strip beside one edge of the top plate. `edge` is one of "+x",
// "-x", "+y", "-y"; `offset` is the strip centre along that edge.
struct Strip {
    std::string edge = "+y";
    double offset = 0.0;
    double length = 0.0;
    double width = 0.0;
    double gap = 0.0;
    bool operator==(const Strip&) const = default;
};

struct AntennaSpec {
    double f_design = 2.45e9;
    double footprint_x = 20e-3;
    double footprint_y = 20e-3;
    double substrate_thickness = 0.0;
    double eps_r = 4.4;
    double tan_delta = 0.02;
    double top_plate_x = 15e-3;
    double top_plate_y = 15e-3;
    Pin feed_pin;
    std::array<Pin, 3> ground_pins;
    std::array<Strip, 2> strips;
    double port_resistance = 50.0;
    // "paper" or "assumed" per defaulted field.
    std::map<std::string, std::string> provenance;

    bool operator==(const AntennaSpec&) const = default;
};

// Default geometry for a design frequency. Lengths scale with 2.45 GHz / f.
AntennaSpec build_default_antenna(double f_design = 2.45e9);

// Throws GeometryError naming the offending feature, InvalidParameter for
// out-of-range scalars.
void validate(const AntennaSpec& spec);

// Names accepted by sweep_parameter / the CLI.
const std::vector<std::string>& sweep_parameter_names();
void set_parameter(AntennaSpec& spec, const std::string& name, double value);
double get_parameter(const AntennaSpec& spec, const std::string& name);

// One validated copy of `spec` per value with `name` replaced.
std::vector<AntennaSpec> sweep_parameter(const AntennaSpec& spec, const std::string& name,
                                         const std::vector<double>& values);

nlohmann::json to_json(const AntennaSpec& spec);
AntennaSpec antenna_from_json(const nlohmann::json& doc);

// Axis-aligned node-index bounds of a rasterized feature (inclusive).
struct FeatureBounds {
    std::string name;
    std::array<int, 3> lo{};
    std::array<int, 3> hi{};
    bool operator==(const FeatureBounds&) const = default;
};

struct PortEdge {
    Axis axis = Axis::Z;
    int i = 0, j = 0, k = 0;
    double resistance = 50.0;
    bool operator==(const PortEdge&) const = default;
};

struct VoxelModel {
    GridSpec grid;
    MaterialMap materials;
    PortEdge port;
    std::vector<FeatureBounds> features;
    // Node ranges of the substrate box (for Huygens surface placement).
    std::array<int, 3> structure_lo{};
    std::array<int, 3> structure_hi{};

    const FeatureBounds* feature(const std::string& name) const;
    bool operator==(const VoxelModel& o) const;
};

// Rasterizes the antenna on a lattice with dx = dy = resolution and dz the
// largest spacing <= resolution that divides the substrate thickness.
VoxelModel voxelize(const AntennaSpec& spec, double resolution, int padding_cells, int pml_cells,
                    double cfl_factor = 0.99);

}  // namespace patchfdtd

#endif  // PATCHFDTD_GEOMETRY_HPP
