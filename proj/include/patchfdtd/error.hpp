// Copyright 2026 The patchfdtd Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PATCHFDTD_ERROR_HPP
#define PATCHFDTD_ERROR_HPP

#include <stdexcept>
#include <string>

namespace patchfdtd {

// Root of every error raised by the library. The CLI maps the concrete type
// onto an exit status (see tools/patchfdtd.cpp).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

// NaN/Inf detected while time stepping.
class InstabilityError : public Error {
public:
    InstabilityError(const std::string& what, long long time_index)
        : Error(what), time_index_(time_index) {}
    long long time_index() const noexcept { return time_index_; }

private:
    long long time_index_;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

class SingularityError : public Error {
public:
    using Error::Error;
};

class PassivityError : public Error {
public:
    using Error::Error;
};

class FitError : public Error {
public:
    using Error::Error;
};

class NoLinkError : public Error {
public:
    using Error::Error;
};

class EnergyViolation : public Error {
public:
    using Error::Error;
};

// Malformed configuration or input file.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace patchfdtd

#endif  // PATCHFDTD_ERROR_HPP
