#pragma once

// Energy ledger, conservation drifts and decay fits.
//
// Energies follow the convention without the factor 1/2:
//   E = ||u||^2 - Om~^T I Om~ + Om^T I Om   (Om = I^{-1} A, Om~ = -I^{-1} m_f)
// and the dissipation rate is 2 nu ||grad u||^2.

#include "cavitydyn/coupling.hpp"

#include <cstdio>
#include <ostream>
#include <string>

namespace cavitydyn {

struct EnergyBreakdown {
    double E = 0.0;
    double E_bar = 0.0;
    double E_tilde = 0.0;
    double u_l2sq = 0.0;
};

inline EnergyBreakdown energy_breakdown(double u_l2sq, const OmegaSplit& omega, const Mat3& I) {
    EnergyBreakdown e;
    e.u_l2sq = u_l2sq;
    e.E_bar = omega.bar.dot(I * omega.bar);
    e.E_tilde = u_l2sq - omega.tilde.dot(I * omega.tilde);
    e.E = e.E_bar + e.E_tilde;
    return e;
}

inline EnergyBreakdown energy_breakdown(const CoupledState& s, const Mat3& I) {
    const double u2 = s.fluid.u.comp[0].empty() ? 0.0 : fluid::fluid_kinetic_energy(s.fluid.u);
    return energy_breakdown(u2, s.omega, I);
}

struct TimeSeriesRecord {
    double t = 0.0;
    EnergyBreakdown energy;
    double diss_rate = 0.0;
    double diss_cum = 0.0;
    Vec3 A = Vec3::Zero();
    double absA_drift = 0.0;
    double QA_drift = 0.0;
    double absL_drift = 0.0;
    Vec3 omega = Vec3::Zero();
    Vec3 omega_bar = Vec3::Zero();
    double mean_u_abs = 0.0;
    /// Angle of Omega to each principal axis (NaN when Omega = 0).
    Vec3 angle_deg = Vec3::Zero();
    int picard_iters = 0;
};

/// Reference values the drifts are measured against.
struct DriftReference {
    Vec3 A0 = Vec3::Zero();
    Vec3 L0 = Vec3::Zero();
};

namespace detail {

/// |v|/|v0| - 1, or |v| when v0 vanishes.
inline double modulus_drift(const Vec3& v, const Vec3& v0) {
    const double n0 = v0.norm();
    return n0 > 0.0 ? std::abs(v.norm() / n0 - 1.0) : v.norm();
}

} // namespace detail

/// Builds the record for state s; `previous` supplies the running dissipation integral.
inline TimeSeriesRecord make_record(const CoupledState& s, const StepReport* report, const TimeSeriesRecord* previous,
                                    const CoupledStepper& stepper, const DriftReference& ref) {
    const Mat3& I = stepper.inertia().I;
    TimeSeriesRecord r;
    r.t = s.t;
    const bool has_fluid = !stepper.dry_run() && !s.fluid.u.comp[0].empty();
    if (report && has_fluid) {
        r.energy = energy_breakdown(report->kinetic_energy, s.omega, I);
        r.diss_rate = report->dissipation_rate;
    } else if (has_fluid) {
        r.energy = energy_breakdown(s, I);
        r.diss_rate = fluid::dissipation_rate(s.fluid.u, stepper.fluid_solver()->params().nu);
    } else {
        r.energy = energy_breakdown(0.0, s.omega, I);
    }
    r.diss_cum = previous ? previous->diss_cum + 0.5 * (s.t - previous->t) * (previous->diss_rate + r.diss_rate) : 0.0;
    r.A = s.rigid.A;
    r.absA_drift = detail::modulus_drift(s.rigid.A, ref.A0);
    const double a0 = ref.A0.norm();
    const double qa = (s.rigid.Q * s.rigid.A - ref.A0).norm();
    r.QA_drift = a0 > 0.0 ? qa / a0 : qa;
    r.absL_drift = detail::modulus_drift(s.rigid.L, ref.L0);
    r.omega = s.omega.total;
    r.omega_bar = s.omega.bar;
    r.mean_u_abs = has_fluid ? fluid::mean_velocity(s.fluid.u).norm() : 0.0;
    for (int j = 0; j < 3; ++j) {
        r.angle_deg[j] = angle_to_axis_deg(s.omega.total, stepper.axes().axis(j));
    }
    r.picard_iters = report ? report->picard_iterations : 0;
    return r;
}

struct BudgetReport {
    /// max over t of |E(t) + D(t) - E(0)| / E(0), D the trapezoid dissipation integral.
    double max_residual = 0.0;
    double final_residual = 0.0;
    /// Steps with E(t_k+1) > E(t_k) + slack.
    int monotonicity_violations = 0;
    double max_increase = 0.0;
    /// Records with E(t) + D(t) > E(0) (1 + r_tol).
    int energy_inequality_violations = 0;
    double final_cumulative_dissipation = 0.0;
    std::vector<double> residual;
};

struct BudgetOptions {
    /// Allowed per-step increase of E relative to E(0).
    double monotonic_slack = 1e-6;
    double r_tol = 0.02;
};

inline BudgetReport energy_budget(const std::vector<TimeSeriesRecord>& history, BudgetOptions opt = {}) {
    if (history.empty()) {
        throw ConfigError("energy_budget: empty history");
    }
    if (history.size() > 2) {
        const double dt0 = history[1].t - history[0].t;
        for (std::size_t k = 1; k < history.size(); ++k) {
            const double dt = history[k].t - history[k - 1].t;
            if (std::abs(dt - dt0) > 1e-9 * std::max(std::abs(dt0), std::abs(history[k].t))) {
                throw ConfigError("energy_budget: records are not evenly spaced in t");
            }
        }
    }
    BudgetReport rep;
    const double E0 = history.front().energy.E;
    const double scale = E0 > 0.0 ? E0 : 1.0;
    double cum = 0.0;
    for (std::size_t k = 0; k < history.size(); ++k) {
        if (k > 0) {
            const auto& a = history[k - 1];
            const auto& b = history[k];
            cum += 0.5 * (b.t - a.t) * (a.diss_rate + b.diss_rate);
            const double inc = b.energy.E - a.energy.E;
            rep.max_increase = std::max(rep.max_increase, inc / scale);
            if (inc > opt.monotonic_slack * scale) {
                ++rep.monotonicity_violations;
            }
        }
        const double E = history[k].energy.E;
        const double r = std::abs(E + cum - E0) / scale;
        rep.residual.push_back(r);
        rep.max_residual = std::max(rep.max_residual, r);
        if (E + cum > E0 + opt.r_tol * scale) {
            ++rep.energy_inequality_violations;
        }
    }
    rep.final_residual = rep.residual.back();
    rep.final_cumulative_dissipation = cum;
    return rep;
}

struct ConservationReport {
    double max_absA_drift = 0.0;
    double final_absA_drift = 0.0;
    double max_QA_drift = 0.0;
    double final_QA_drift = 0.0;
    double max_absL_drift = 0.0;
    double final_absL_drift = 0.0;
    double max_mean_u_abs = 0.0;
};

inline ConservationReport conservation_report(const std::vector<TimeSeriesRecord>& history) {
    ConservationReport c;
    for (const auto& r : history) {
        c.max_absA_drift = std::max(c.max_absA_drift, r.absA_drift);
        c.max_QA_drift = std::max(c.max_QA_drift, r.QA_drift);
        c.max_absL_drift = std::max(c.max_absL_drift, r.absL_drift);
        c.max_mean_u_abs = std::max(c.max_mean_u_abs, r.mean_u_abs);
    }
    if (!history.empty()) {
        c.final_absA_drift = history.back().absA_drift;
        c.final_QA_drift = history.back().QA_drift;
        c.final_absL_drift = history.back().absL_drift;
    }
    return c;
}

struct DecayFit {
    double rate = 0.0;
    double r_squared = 0.0;
    std::size_t points = 0;
};

/// Least-squares line through (t, log y).
inline DecayFit decay_fit(const std::vector<double>& t, const std::vector<double>& y) {
    if (t.size() != y.size() || t.size() < 2) {
        throw ConfigError("decay_fit: need at least two samples");
    }
    const std::size_t n = t.size();
    double st = 0.0, sl = 0.0;
    std::vector<double> l(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (!(y[k] > 0.0)) {
            throw NumericalError("decay_fit: non-positive value at t = " + std::to_string(t[k]) +
                                 " (cannot take the logarithm)");
        }
        l[k] = std::log(y[k]);
        st += t[k];
        sl += l[k];
    }
    const double tm = st / n, lm = sl / n;
    double stt = 0.0, stl = 0.0, sll = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        stt += (t[k] - tm) * (t[k] - tm);
        stl += (t[k] - tm) * (l[k] - lm);
        sll += (l[k] - lm) * (l[k] - lm);
    }
    DecayFit f;
    f.points = n;
    f.rate = stl / stt;
    f.r_squared = sll > 0.0 ? stl * stl / (stt * sll) : 1.0;
    return f;
}

/// Fit of log E_tilde over records with t in [t0, t1].
inline DecayFit decay_fit(const std::vector<TimeSeriesRecord>& history, double t0, double t1) {
    std::vector<double> t, y;
    for (const auto& r : history) {
        if (r.t >= t0 && r.t <= t1) {
            t.push_back(r.t);
            y.push_back(r.energy.E_tilde);
        }
    }
    return decay_fit(t, y);
}

inline const char* csv_header() {
    return "t,E,E_bar,E_tilde,u_l2sq,diss_rate,diss_cum,A1,A2,A3,absA_drift,QA_drift,absL_drift,Om1,Om2,Om3,"
           "Ombar1,Ombar2,Ombar3,mean_u_abs,ang1_deg,ang2_deg,ang3_deg,picard_iters";
}

inline std::string csv_row(const TimeSeriesRecord& r) {
    std::string out;
    char buf[40];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out += buf;
        out += ',';
    };
    num(r.t);
    num(r.energy.E);
    num(r.energy.E_bar);
    num(r.energy.E_tilde);
    num(r.energy.u_l2sq);
    num(r.diss_rate);
    num(r.diss_cum);
    for (int i = 0; i < 3; ++i) {
        num(r.A[i]);
    }
    num(r.absA_drift);
    num(r.QA_drift);
    num(r.absL_drift);
    for (int i = 0; i < 3; ++i) {
        num(r.omega[i]);
    }
    for (int i = 0; i < 3; ++i) {
        num(r.omega_bar[i]);
    }
    num(r.mean_u_abs);
    for (int i = 0; i < 3; ++i) {
        num(r.angle_deg[i]);
    }
    out += std::to_string(r.picard_iters);
    return out;
}

} // namespace cavitydyn
