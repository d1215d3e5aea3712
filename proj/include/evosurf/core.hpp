#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace evosurf {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The first fundamental form is (numerically) singular at a non-pole point.
class DegenerateMetric : public Error {
public:
    using Error::Error;
};

/// Two boundary edges declared as a shared interface do not map to the same curve.
class PairingMismatch : public Error {
public:
    using Error::Error;
};

/// e'(r) < 0 was encountered while assembling diffusive fluxes.
class NonparabolicEnergy : public Error {
public:
    using Error::Error;
};

/// Explicit step requested above the stability bound.
class CflViolation : public Error {
public:
    using Error::Error;
};

/// Double-bubble parameters violate 0 < m < a < b < 2m.
class GeometryInvalid : public Error {
public:
    using Error::Error;
};

/// Invalid scenario configuration (carries a field/line diagnostic).
class ConfigError : public Error {
public:
    using Error::Error;
};

inline constexpr double pi = 3.14159265358979323846;

}  // namespace evosurf
