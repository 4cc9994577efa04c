#pragma once

// Limit classification of the angular velocity, a-priori predictors of the
// terminal axis from the initial data, and the parabolic scaling of a run.

#include "cavitydyn/config.hpp"
#include "cavitydyn/geometry.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cavitydyn {

struct LimitTolerances {
    double angle_deg = 5.0;
    double residual = 1e-2;
    /// Relative to the initial fluid norm (absolute when that vanishes).
    double u_rel = 1e-2;

    void validate() const {
        if (!(angle_deg > 0.0) || !(residual > 0.0) || !(u_rel > 0.0)) {
            throw ConfigError("classify_limit: tolerances must be positive");
        }
    }
};

struct LimitSample {
    double t = 0.0;
    Vec3 omega = Vec3::Zero();
    /// ||u||_2 of the relative velocity.
    double u_norm = 0.0;
};

struct AxisVerdict {
    bool converged = false;
    /// 0-based principal-axis index; empty for a degenerate eigenspace or Omega = 0.
    std::optional<int> axis_index;
    /// Principal-axis indices spanning the attained eigenspace.
    std::vector<int> eigenspace;
    double mu = 0.0;
    double final_angle_deg = 0.0;
    /// Window maximum of |Om x I Om| / (|Om| |I Om|).
    double residual = 0.0;
    /// ||I Om(T)| - |A0|| / |A0|.
    double inertia_mismatch = 0.0;
    double max_window_angle_deg = 0.0;
    double u_window_max = 0.0;
    double u_tol = 0.0;
};

namespace detail {

/// Angle between v and the span of the given principal axes.
inline double angle_to_span_deg(const Vec3& v, const PrincipalAxes& pa, const std::vector<int>& span) {
    const double nv = v.norm();
    if (nv == 0.0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    Vec3 proj = Vec3::Zero();
    for (int j : span) {
        proj += pa.axis(j) * pa.axis(j).dot(v);
    }
    return degrees(std::atan2((v - proj).norm(), proj.norm()));
}

/// Distinct eigenspaces as groups of indices.
inline std::vector<std::vector<int>> eigenspaces(const PrincipalAxes& pa) {
    std::vector<std::vector<int>> out;
    std::vector<bool> seen(3, false);
    for (int j = 0; j < 3; ++j) {
        if (!seen[j]) {
            out.push_back(pa.eigenspace(j));
            for (int k : out.back()) {
                seen[k] = true;
            }
        }
    }
    return out;
}

inline double eigen_residual(const Vec3& omega, const Mat3& I) {
    const Vec3 Io = I * omega;
    const double den = omega.norm() * Io.norm();
    return den > 0.0 ? omega.cross(Io).norm() / den : 0.0;
}

} // namespace detail

/// Classifies the limit from the last 10% (in time) of the history.
inline AxisVerdict classify_limit(const std::vector<LimitSample>& history, const Mat3& I, double absA0,
                                  double u0_norm, LimitTolerances tol = {}) {
    tol.validate();
    if (history.empty()) {
        throw ConfigError("classify_limit: empty history");
    }
    const PrincipalAxes pa = principal_axes(I);
    const double t_end = history.back().t;
    const double t_start = t_end - 0.1 * (t_end - history.front().t);
    std::vector<const LimitSample*> window;
    for (const auto& s : history) {
        if (s.t >= t_start) {
            window.push_back(&s);
        }
    }

    AxisVerdict v;
    v.u_tol = tol.u_rel * (u0_norm > 0.0 ? u0_norm : 1.0);
    for (const auto* s : window) {
        v.u_window_max = std::max(v.u_window_max, s->u_norm);
        v.residual = std::max(v.residual, detail::eigen_residual(s->omega, I));
    }
    const Vec3& om_final = history.back().omega;
    v.inertia_mismatch = absA0 > 0.0 ? std::abs((I * om_final).norm() - absA0) / absA0 : (I * om_final).norm();

    bool omega_vanishes = false;
    for (const auto* s : window) {
        omega_vanishes = omega_vanishes || s->omega.norm() == 0.0;
    }
    if (omega_vanishes) {
        v.final_angle_deg = std::numeric_limits<double>::quiet_NaN();
        v.max_window_angle_deg = std::numeric_limits<double>::quiet_NaN();
        return v;
    }

    const auto spaces = detail::eigenspaces(pa);
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_space = 0;
    for (std::size_t e = 0; e < spaces.size(); ++e) {
        double mean = 0.0;
        for (const auto* s : window) {
            mean += detail::angle_to_span_deg(s->omega, pa, spaces[e]);
        }
        mean /= double(window.size());
        if (mean < best) {
            best = mean;
            best_space = e;
        }
    }
    v.eigenspace = spaces[best_space];
    for (const auto* s : window) {
        v.max_window_angle_deg =
            std::max(v.max_window_angle_deg, detail::angle_to_span_deg(s->omega, pa, v.eigenspace));
    }
    v.final_angle_deg = detail::angle_to_span_deg(om_final, pa, v.eigenspace);
    const double lam = pa.lambda[v.eigenspace.front()];
    if (v.eigenspace.size() == 1) {
        const int j = v.eigenspace.front();
        v.axis_index = j;
        v.mu = (om_final.dot(pa.axis(j)) >= 0.0 ? 1.0 : -1.0) * absA0 / lam;
    } else {
        v.mu = absA0 / lam;
    }
    v.converged = v.max_window_angle_deg < tol.angle_deg && v.residual < tol.residual && v.u_window_max <= v.u_tol;
    return v;
}

struct PredictionReport {
    enum class Case { sphere, egg, general };
    enum class Verdict { largest_axis_guaranteed, smallest_axis_excluded, inconclusive };

    Case kind = Case::general;
    Verdict verdict = Verdict::inconclusive;
    /// Egg case: rhs = lambda_l (lambda_l/lambda_s - 1) Om3^2 against lhs = E_tilde(0).
    double egg_lhs = 0.0;
    double egg_rhs = 0.0;
    /// General case, largest-axis condition: lhs > rhs.
    double largest_lhs = 0.0;
    double largest_rhs = 0.0;
    /// General case, instability of the smallest axis: lhs > rhs.
    double instability_lhs = 0.0;
    double instability_rhs = 0.0;
    std::optional<double> mu;
};

inline const char* to_string(PredictionReport::Case c) {
    switch (c) {
    case PredictionReport::Case::sphere: return "sphere";
    case PredictionReport::Case::egg: return "egg";
    default: return "general";
    }
}

inline const char* to_string(PredictionReport::Verdict v) {
    switch (v) {
    case PredictionReport::Verdict::largest_axis_guaranteed: return "largest_axis_guaranteed";
    case PredictionReport::Verdict::smallest_axis_excluded: return "smallest_axis_excluded";
    default: return "inconclusive";
    }
}

/// lambdas ascending; omega_bar0 in principal coordinates.
inline PredictionReport predict_axis(const Vec3& lambdas, const Vec3& omega_bar0, double E_tilde0, double absA0) {
    if (!(lambdas[0] > 0.0) || lambdas[0] > lambdas[1] || lambdas[1] > lambdas[2]) {
        throw ConfigError("predict_axis: eigenvalues must be positive and sorted ascending");
    }
    const double tol = PrincipalAxes::degeneracy_tol * lambdas[2];
    const bool d12 = lambdas[1] - lambdas[0] <= tol;
    const bool d23 = lambdas[2] - lambdas[1] <= tol;
    PredictionReport r;
    const double ls = lambdas[0], lm = lambdas[1], ll = lambdas[2];
    const Vec3 w2 = omega_bar0.cwiseProduct(omega_bar0);
    if (d12 && d23) {
        r.kind = PredictionReport::Case::sphere;
        r.verdict = PredictionReport::Verdict::largest_axis_guaranteed;
        r.mu = absA0 / ll;
        return r;
    }
    if (d12) {
        r.kind = PredictionReport::Case::egg;
        r.egg_lhs = E_tilde0;
        r.egg_rhs = ll * (ll / ls - 1.0) * w2[2];
        if (r.egg_lhs < r.egg_rhs) {
            r.verdict = PredictionReport::Verdict::largest_axis_guaranteed;
            r.mu = absA0 / ll;
        }
        return r;
    }
    r.kind = PredictionReport::Case::general;
    r.largest_lhs = ll * (ll / lm - 1.0) * w2[2];
    r.largest_rhs = E_tilde0 + ls * (1.0 - ls / lm) * w2[0];
    r.instability_lhs = lm * (lm / ls - 1.0) * w2[1] + ll * (ll / ls - 1.0) * w2[2];
    r.instability_rhs = E_tilde0;
    const bool largest = r.largest_lhs > r.largest_rhs;
    const bool unstable = r.instability_lhs > r.instability_rhs;
    if (largest && unstable) {
        r.verdict = PredictionReport::Verdict::largest_axis_guaranteed;
        r.mu = absA0 / ll;
    } else if (unstable) {
        r.verdict = PredictionReport::Verdict::smallest_axis_excluded;
    }
    return r;
}

/// Same, from the raw inertia tensor and a body-frame Omega_bar0.
inline PredictionReport predict_axis(const Mat3& I, const Vec3& omega_bar0_body, double E_tilde0) {
    const PrincipalAxes pa = principal_axes(I);
    return predict_axis(pa.lambda, pa.to_principal(omega_bar0_body), E_tilde0, (I * omega_bar0_body).norm());
}

inline nlohmann::json to_json(const PredictionReport& r) {
    nlohmann::json j{{"case", to_string(r.kind)}, {"verdict", to_string(r.verdict)}};
    j["mu"] = r.mu ? nlohmann::json(*r.mu) : nlohmann::json(nullptr);
    if (r.kind == PredictionReport::Case::egg) {
        j["inequality_lhs"] = r.egg_lhs;
        j["inequality_rhs"] = r.egg_rhs;
    } else if (r.kind == PredictionReport::Case::general) {
        j["inequality_lhs"] = {r.largest_lhs, r.instability_lhs};
        j["inequality_rhs"] = {r.largest_rhs, r.instability_rhs};
    }
    return j;
}

/// NaN-safe number for JSON output.
inline nlohmann::json json_number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

inline nlohmann::json to_json(const AxisVerdict& v) {
    nlohmann::json j;
    j["converged"] = v.converged;
    j["axis_index"] = v.axis_index ? nlohmann::json(*v.axis_index + 1) : nlohmann::json(nullptr);
    nlohmann::json space = nlohmann::json::array();
    for (int k : v.eigenspace) {
        space.push_back(k + 1);
    }
    j["eigenspace"] = space;
    j["mu"] = json_number(v.mu);
    j["final_angle_deg"] = json_number(v.final_angle_deg);
    j["max_window_angle_deg"] = json_number(v.max_window_angle_deg);
    j["residual"] = json_number(v.residual);
    j["inertia_mismatch"] = json_number(v.inertia_mismatch);
    j["u_window_max"] = json_number(v.u_window_max);
    j["u_tol"] = json_number(v.u_tol);
    return j;
}

/// Parabolic rescaling by lambda: lengths / lambda, velocities * lambda,
/// angular velocities * lambda^2, times / lambda^2 (density and viscosity fixed).
/// The scaled run at time s compares with the original at lambda^2 s:
///   Omega_bar_scaled(s) = lambda^2 Omega_bar(lambda^2 s).
inline RunConfig scaling_transform(const RunConfig& c, double lambda) {
    if (!(lambda > 0.0)) {
        throw ConfigError("scaling_transform: lambda must be positive");
    }
    if (lambda == 1.0) {
        return c;
    }
    RunConfig s = c;
    const double il = 1.0 / lambda;
    const double il2 = il * il;
    s.geometry.outer_half_extents *= il;
    s.geometry.cavity_half_extents *= il;
    s.geometry.cavity_offset *= il;
    s.velocity.amplitude *= lambda;
    if (s.omega_bar0) {
        *s.omega_bar0 *= lambda * lambda;
    }
    // A ~ mass length^2 / time ~ lambda^-5 lambda^2; L ~ mass length / time ~ lambda^-3 lambda.
    if (s.A0) {
        *s.A0 *= il2 * il;
    }
    s.L0 *= il2;
    s.T *= il2;
    if (s.dt) {
        *s.dt *= il2;
    }
    s.sample_interval *= il2;
    return s;
}

} // namespace cavitydyn
