#pragma once

// Mass properties of a brick-shaped rigid body enclosing a brick-shaped,
// fluid-filled cavity. All quantities are expressed in the body frame whose
// origin is the center of mass of the rigid part alone. The fluid density is 1.

#include "cavitydyn/core.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <optional>
#include <string>

namespace cavitydyn {

struct GeometrySpec {
    Vec3 outer_half_extents{1.0, 1.0, 1.0};
    Vec3 cavity_half_extents{0.5, 0.5, 0.5};
    /// Cavity center relative to the outer brick center.
    Vec3 cavity_offset{0.0, 0.0, 0.0};
    double rho_B = 1.0;
    double nu = 0.5;

    /// Throws ConfigError naming the first violated constraint.
    void validate() const {
        for (int i = 0; i < 3; ++i) {
            if (!(outer_half_extents[i] > 0.0) || !(cavity_half_extents[i] > 0.0)) {
                throw ConfigError("geometry: half extents must be strictly positive (axis " +
                                  std::to_string(i + 1) + ")");
            }
            if (!(std::abs(cavity_offset[i]) + cavity_half_extents[i] < outer_half_extents[i])) {
                throw ConfigError("geometry: cavity leaks through the outer brick on axis " +
                                  std::to_string(i + 1));
            }
        }
        if (!(rho_B > 0.0)) {
            throw ConfigError("geometry: rho_B must be strictly positive");
        }
        if (!(nu > 0.0)) {
            throw ConfigError("geometry: nu must be strictly positive");
        }
    }
};

struct InertiaData {
    double m_B = 0.0;
    double m_F = 0.0;
    double m = 0.0;
    /// Cavity center of mass (relative to the body center of mass).
    Vec3 y_F = Vec3::Zero();
    /// Center of mass of body plus fluid.
    Vec3 y_c = Vec3::Zero();
    /// Body inertia about the origin.
    Mat3 I_B = Mat3::Zero();
    /// Fluid inertia about the origin.
    Mat3 I_F = Mat3::Zero();
    /// Full-structure inertia about y_c.
    Mat3 I = Mat3::Zero();
};

struct PrincipalAxes {
    /// Ascending eigenvalues.
    Vec3 lambda = Vec3::Zero();
    /// Columns are unit eigenvectors forming a right-handed frame.
    Mat3 axes = Mat3::Identity();
    /// degenerate[0]: l1~l2, degenerate[1]: l2~l3, degenerate[2]: l1~l3.
    std::array<bool, 3> degenerate{false, false, false};

    static constexpr double degeneracy_tol = 1e-9;

    Vec3 axis(int j) const { return axes.col(j); }
    bool all_degenerate() const { return degenerate[0] && degenerate[1]; }
    bool any_degenerate() const { return degenerate[0] || degenerate[1] || degenerate[2]; }

    /// Indices of the eigenvalues equal (within tolerance) to eigenvalue j, including j.
    std::vector<int> eigenspace(int j) const {
        std::vector<int> out;
        for (int k = 0; k < 3; ++k) {
            if (k == j || std::abs(lambda[k] - lambda[j]) <= degeneracy_tol * lambda[2]) {
                out.push_back(k);
            }
        }
        return out;
    }

    /// I^{-1} v through the eigen-decomposition.
    Vec3 solve(const Vec3& v) const {
        Vec3 out = Vec3::Zero();
        for (int j = 0; j < 3; ++j) {
            out += axes.col(j) * (axes.col(j).dot(v) / lambda[j]);
        }
        return out;
    }

    /// Coordinates of a body-frame vector in the principal frame.
    Vec3 to_principal(const Vec3& v) const { return axes.transpose() * v; }
};

namespace detail {

/// Inertia of a homogeneous brick about its own center.
inline Mat3 brick_inertia_about_center(double mass, const Vec3& half) {
    const Vec3 h2 = half.cwiseProduct(half);
    return Vec3(mass * (h2.y() + h2.z()) / 3.0,
                mass * (h2.x() + h2.z()) / 3.0,
                mass * (h2.x() + h2.y()) / 3.0)
        .asDiagonal();
}

/// Parallel-axis shift: inertia about the origin of a mass whose center sits at r.
inline Mat3 shift_from_center(const Mat3& about_center, double mass, const Vec3& r) {
    Mat3 out = about_center + mass * (r.squaredNorm() * Mat3::Identity() - r * r.transpose());
    return 0.5 * (out + out.transpose());
}

inline double box_volume(const Vec3& half) { return 8.0 * half.x() * half.y() * half.z(); }

} // namespace detail

/// Returns the matrix M with M b = (I_B + I_F) b + m y_c x (y_c x b).
inline Mat3 compose_total_inertia(const Mat3& I_B, const Mat3& I_F, double m, const Vec3& y_c) {
    // y x (y x b) = y (y.b) - b |y|^2
    Mat3 M = I_B + I_F + m * (y_c * y_c.transpose() - y_c.squaredNorm() * Mat3::Identity());
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            M(j, i) = M(i, j);
        }
    }
    return M;
}

/// Closed-form mass properties: outer brick minus cavity brick at density rho_B,
/// plus the cavity brick at density 1, all moved to the body center of mass.
inline InertiaData compute_mass_properties(const GeometrySpec& spec) {
    spec.validate();
    const double m_outer = spec.rho_B * detail::box_volume(spec.outer_half_extents);
    const double m_hole = spec.rho_B * detail::box_volume(spec.cavity_half_extents);

    InertiaData out;
    out.m_B = m_outer - m_hole;
    out.m_F = detail::box_volume(spec.cavity_half_extents);
    out.m = out.m_B + out.m_F;

    // Body center of mass in outer-center coordinates.
    const Vec3 x_B = -(m_hole / out.m_B) * spec.cavity_offset;
    const Vec3 outer_center = -x_B;
    const Vec3 cavity_center = spec.cavity_offset - x_B;

    const Mat3 outer = detail::shift_from_center(
        detail::brick_inertia_about_center(m_outer, spec.outer_half_extents), m_outer, outer_center);
    const Mat3 hole = detail::shift_from_center(
        detail::brick_inertia_about_center(m_hole, spec.cavity_half_extents), m_hole, cavity_center);
    out.I_B = outer - hole;
    out.I_F = detail::shift_from_center(
        detail::brick_inertia_about_center(out.m_F, spec.cavity_half_extents), out.m_F, cavity_center);
    out.y_F = cavity_center;
    out.y_c = (out.m_F / out.m) * out.y_F;
    out.I = compose_total_inertia(out.I_B, out.I_F, out.m, out.y_c);
    return out;
}

/// Sorted eigen-decomposition of a symmetric positive definite 3x3 matrix.
inline PrincipalAxes principal_axes(const Mat3& I) {
    const double scale = I.cwiseAbs().maxCoeff();
    if (!(scale > 0.0) || !I.allFinite()) {
        throw ConfigError("principal_axes: matrix must be finite and nonzero");
    }
    if ((I - I.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw ConfigError("principal_axes: matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Mat3> solver(I);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("principal_axes: eigen-decomposition failed");
    }
    PrincipalAxes pa;
    pa.lambda = solver.eigenvalues();
    pa.axes = solver.eigenvectors();
    if (!(pa.lambda[0] > 0.0)) {
        throw ConfigError("principal_axes: matrix is not positive definite");
    }
    if (pa.axes.determinant() < 0.0) {
        pa.axes.col(2) = -pa.axes.col(2);
    }
    const double tol = PrincipalAxes::degeneracy_tol * pa.lambda[2];
    pa.degenerate = {std::abs(pa.lambda[1] - pa.lambda[0]) <= tol,
                     std::abs(pa.lambda[2] - pa.lambda[1]) <= tol,
                     std::abs(pa.lambda[2] - pa.lambda[0]) <= tol};
    return pa;
}

namespace detail {

struct BrickMoments {
    double mass = 0.0;
    Vec3 first = Vec3::Zero();   // integral of y
    Mat3 second = Mat3::Zero();  // integral of y y^T
};

/// Midpoint rule over a brick with its own aligned sample grid. Slabs are
/// accumulated separately and then summed in slab order.
inline BrickMoments midpoint_brick(const Vec3& center, const Vec3& half, int resolution) {
    const Vec3 h = 2.0 * half / resolution;
    const double dv = h.x() * h.y() * h.z();
    BrickMoments total;
    for (int k = 0; k < resolution; ++k) {
        const double z = center.z() - half.z() + (k + 0.5) * h.z();
        BrickMoments slab;
        for (int j = 0; j < resolution; ++j) {
            const double y = center.y() - half.y() + (j + 0.5) * h.y();
            for (int i = 0; i < resolution; ++i) {
                const double x = center.x() - half.x() + (i + 0.5) * h.x();
                const Vec3 p(x, y, z);
                slab.mass += 1.0;
                slab.first += p;
                slab.second += p * p.transpose();
            }
        }
        total.mass += slab.mass * dv;
        total.first += slab.first * dv;
        total.second += slab.second * dv;
    }
    return total;
}

/// Inertia from second moments about point c: int (|y-c|^2 Id - (y-c)(y-c)^T).
inline Mat3 inertia_about(const BrickMoments& mom, const Vec3& c) {
    const Mat3 S = mom.second - mom.first * c.transpose() - c * mom.first.transpose() +
                   mom.mass * c * c.transpose();
    Mat3 out = S.trace() * Mat3::Identity() - S;
    return 0.5 * (out + out.transpose());
}

} // namespace detail

/// Independent quadrature of the defining mass and inertia integrals.
inline InertiaData quadrature_inertia_oracle(const GeometrySpec& spec, int resolution) {
    spec.validate();
    if (resolution < 8) {
        throw ConfigError("quadrature_inertia_oracle: resolution must be >= 8");
    }
    // Outer-center coordinates first.
    const detail::BrickMoments outer =
        detail::midpoint_brick(Vec3::Zero(), spec.outer_half_extents, resolution);
    const detail::BrickMoments cav =
        detail::midpoint_brick(spec.cavity_offset, spec.cavity_half_extents, resolution);

    detail::BrickMoments body;
    body.mass = spec.rho_B * (outer.mass - cav.mass);
    body.first = spec.rho_B * (outer.first - cav.first);
    body.second = spec.rho_B * (outer.second - cav.second);

    InertiaData out;
    out.m_B = body.mass;
    out.m_F = cav.mass;
    out.m = out.m_B + out.m_F;
    const Vec3 x_B = body.first / body.mass;
    const Vec3 x_F = cav.first / cav.mass;
    const Vec3 x_c = (body.first + cav.first) / out.m;
    out.y_F = x_F - x_B;
    out.y_c = x_c - x_B;
    out.I_B = detail::inertia_about(body, x_B);
    out.I_F = detail::inertia_about(cav, x_B);
    out.I = detail::inertia_about(body, x_c) + detail::inertia_about(cav, x_c);
    return out;
}

// JSON schema: {"outer_half_extents": [..], "cavity_half_extents": [..],
//               "cavity_offset": [..], "rho_B": x, "nu": x}

namespace detail {

inline Vec3 vec3_from_json(const nlohmann::json& j, const std::string& key) {
    if (!j.is_array() || j.size() != 3) {
        throw ConfigError("key '" + key + "' must be an array of three numbers");
    }
    Vec3 v;
    for (int i = 0; i < 3; ++i) {
        if (!j[i].is_number()) {
            throw ConfigError("key '" + key + "' must be an array of three numbers");
        }
        v[i] = j[i].get<double>();
    }
    return v;
}

inline nlohmann::json vec3_to_json(const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

inline nlohmann::json mat3_to_json(const Mat3& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < 3; ++i) {
        rows.push_back(nlohmann::json::array({m(i, 0), m(i, 1), m(i, 2)}));
    }
    return rows;
}

inline Mat3 mat3_from_json(const nlohmann::json& j, const std::string& key) {
    if (!j.is_array() || j.size() != 3) {
        throw ConfigError("key '" + key + "' must be a 3x3 array");
    }
    Mat3 m;
    for (int i = 0; i < 3; ++i) {
        m.row(i) = vec3_from_json(j[i], key).transpose();
    }
    return m;
}

inline double number_from_json(const nlohmann::json& j, const std::string& key) {
    if (!j.is_number()) {
        throw ConfigError("key '" + key + "' must be a number");
    }
    return j.get<double>();
}

} // namespace detail

inline GeometrySpec geometry_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ConfigError("key 'geometry' must be an object");
    }
    static const std::array<const char*, 5> keys{"outer_half_extents", "cavity_half_extents",
                                                 "cavity_offset", "rho_B", "nu"};
    for (const auto& [key, value] : j.items()) {
        if (std::find_if(keys.begin(), keys.end(), [&](const char* k) { return key == k; }) == keys.end()) {
            throw ConfigError("unknown key 'geometry." + key + "'");
        }
    }
    for (const char* key : keys) {
        if (!j.contains(key)) {
            throw ConfigError(std::string("missing key 'geometry.") + key + "'");
        }
    }
    GeometrySpec spec;
    spec.outer_half_extents = detail::vec3_from_json(j["outer_half_extents"], "geometry.outer_half_extents");
    spec.cavity_half_extents = detail::vec3_from_json(j["cavity_half_extents"], "geometry.cavity_half_extents");
    spec.cavity_offset = detail::vec3_from_json(j["cavity_offset"], "geometry.cavity_offset");
    spec.rho_B = detail::number_from_json(j["rho_B"], "geometry.rho_B");
    spec.nu = detail::number_from_json(j["nu"], "geometry.nu");
    spec.validate();
    return spec;
}

inline nlohmann::json geometry_to_json(const GeometrySpec& spec) {
    return {{"outer_half_extents", detail::vec3_to_json(spec.outer_half_extents)},
            {"cavity_half_extents", detail::vec3_to_json(spec.cavity_half_extents)},
            {"cavity_offset", detail::vec3_to_json(spec.cavity_offset)},
            {"rho_B", spec.rho_B},
            {"nu", spec.nu}};
}

inline nlohmann::json inertia_to_json(const InertiaData& d) {
    return {{"m_B", d.m_B},
            {"m_F", d.m_F},
            {"m", d.m},
            {"y_F", detail::vec3_to_json(d.y_F)},
            {"y_c", detail::vec3_to_json(d.y_c)},
            {"I_B", detail::mat3_to_json(d.I_B)},
            {"I_F", detail::mat3_to_json(d.I_F)},
            {"I", detail::mat3_to_json(d.I)}};
}

inline nlohmann::json principal_axes_to_json(const PrincipalAxes& pa) {
    return {{"lambda", detail::vec3_to_json(pa.lambda)},
            {"axes", detail::mat3_to_json(pa.axes)},
            {"degenerate_12", pa.degenerate[0]},
            {"degenerate_23", pa.degenerate[1]},
            {"degenerate_13", pa.degenerate[2]}};
}

} // namespace cavitydyn
