// Copyright 2026 The patchfdtd Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PATCHFDTD_CONSTANTS_HPP
#define PATCHFDTD_CONSTANTS_HPP

#include <numbers>

namespace patchfdtd {

inline constexpr double kSpeedOfLight = 299792458.0;        // m/s
inline constexpr double kEpsilon0 = 8.8541878128e-12;       // F/m
inline constexpr double kMu0 = 1.25663706212e-6;            // H/m
inline constexpr double kEta0 = 376.730313668;              // ohm
inline constexpr double kPi = std::numbers::pi;

}  // namespace patchfdtd

#endif  // PATCHFDTD_CONSTANTS_HPP
