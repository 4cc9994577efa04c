#pragma once

// Shared vector types, error hierarchy and small rotation helpers.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace cavitydyn {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Process exit codes used by the command line front-end.
enum class ExitCode : int { ok = 0, config_error = 2, numerical_failure = 3, verification_failure = 4 };

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
    virtual ExitCode exit_code() const noexcept { return ExitCode::numerical_failure; }
};

/// Invalid user input: geometry, run configuration, tolerance overrides.
class ConfigError : public Error {
  public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::config_error; }
};

/// A numerical method could not honour its contract (CFL, CG, Picard, NaN).
class NumericalError : public Error {
  public:
    using Error::Error;
};

class CflError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

class SolverDivergence : public NumericalError {
  public:
    SolverDivergence(const std::string& what, std::vector<double> history)
        : NumericalError(what), history_(std::move(history)) {}
    const std::vector<double>& residual_history() const noexcept { return history_; }

  private:
    std::vector<double> history_;
};

/// Skew matrix S with S*v == w.cross(v).
inline Mat3 cross_matrix(const Vec3& w) {
    Mat3 s;
    s << 0.0, -w.z(), w.y(),
         w.z(), 0.0, -w.x(),
        -w.y(), w.x(), 0.0;
    return s;
}

/// Rodrigues rotation matrix for the rotation vector theta (angle |theta| about theta/|theta|).
inline Mat3 rodrigues(const Vec3& theta) {
    const double angle = theta.norm();
    if (angle == 0.0) {
        return Mat3::Identity();
    }
    const Vec3 k = theta / angle;
    const Mat3 kx = cross_matrix(k);
    return Mat3::Identity() + std::sin(angle) * kx + (1.0 - std::cos(angle)) * (kx * kx);
}

/// Rotates v by the rotation vector theta without forming the matrix.
inline Vec3 rodrigues_apply(const Vec3& theta, const Vec3& v) {
    const double angle = theta.norm();
    if (angle == 0.0) {
        return v;
    }
    const Vec3 k = theta / angle;
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return v * c + k.cross(v) * s + k * (k.dot(v) * (1.0 - c));
}

inline double degrees(double radians) { return radians * 180.0 / std::numbers::pi; }

/// Angle between the line spanned by axis and the vector v, in [0, 90] degrees.
/// NaN when v vanishes.
inline double angle_to_axis_deg(const Vec3& v, const Vec3& axis) {
    const double nv = v.norm();
    const double na = axis.norm();
    if (nv == 0.0 || na == 0.0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    // atan2 of |cross| and |dot| stays accurate near 0 and 90 degrees.
    return degrees(std::atan2(v.cross(axis).norm(), std::abs(v.dot(axis))));
}

} // namespace cavitydyn
