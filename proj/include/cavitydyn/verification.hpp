#pragma once

// Verification suite behind `cavitydyn verify` and the acceptance test.
//
// Fast level: oracle and property checks plus the cheap acceptance criteria
// (1, 2, 11, 12). Full level adds the reference simulations (3 to 10).

#include "cavitydyn/simulation.hpp"

#include <boost/numeric/odeint.hpp>

#include <cstdarg>
#include <functional>
#include <map>
#include <random>

namespace cavitydyn {

struct CheckResult {
    std::string module;
    std::string name;
    bool passed = false;
    /// Observed against required.
    std::string detail;
};

struct VerifyOptions {
    bool full = false;
    int threads = 1;
    std::string config_dir;
};

using CheckCallback = std::function<void(const CheckResult&)>;

namespace detail {

inline std::string format(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

/// Omega of the torque-free rigid body, sampled at n * dt (dense dopri5).
inline std::vector<Vec3> euler_reference(const Mat3& I, const Vec3& A0, double dt, std::int64_t steps) {
    using State = std::array<double, 3>;
    const Mat3 Iinv = I.inverse();
    auto rhs = [&](const State& a, State& da, double) {
        const Vec3 A(a[0], a[1], a[2]);
        const Vec3 d = -(Iinv * A).cross(A);
        da = {d.x(), d.y(), d.z()};
    };
    namespace ode = boost::numeric::odeint;
    auto stepper = ode::make_dense_output(1e-14, 1e-14, ode::runge_kutta_dopri5<State>());
    State a{A0.x(), A0.y(), A0.z()};
    std::vector<double> times;
    for (std::int64_t n = 0; n <= steps; ++n) {
        times.push_back(double(n) * dt);
    }
    std::vector<Vec3> out;
    ode::integrate_times(stepper, rhs, a, times.begin(), times.end(), dt,
                         [&](const State& x, double) { out.push_back(Iinv * Vec3(x[0], x[1], x[2])); });
    return out;
}

/// Linear interpolation of a record quantity at time t.
template <class F>
Vec3 sample_at(const std::vector<TimeSeriesRecord>& h, double t, F&& get) {
    auto it = std::lower_bound(h.begin(), h.end(), t, [](const TimeSeriesRecord& r, double x) { return r.t < x; });
    if (it == h.begin()) {
        return get(h.front());
    }
    if (it == h.end()) {
        return get(h.back());
    }
    const auto& b = *it;
    const auto& a = *(it - 1);
    const double w = (t - a.t) / (b.t - a.t);
    return (1.0 - w) * get(a) + w * get(b);
}

inline GeometrySpec random_geometry(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    GeometrySpec s;
    for (int i = 0; i < 3; ++i) {
        s.outer_half_extents[i] = 0.5 + U(rng);
        s.cavity_half_extents[i] = (0.2 + 0.5 * U(rng)) * s.outer_half_extents[i];
        const double room = s.outer_half_extents[i] - s.cavity_half_extents[i];
        s.cavity_offset[i] = (2.0 * U(rng) - 1.0) * 0.8 * room;
    }
    s.rho_B = 0.5 + 2.0 * U(rng);
    return s;
}

} // namespace detail

/// The twelve acceptance criteria. Reference runs are cached, so criteria
/// sharing a configuration pay for it once.
class AcceptanceSuite {
  public:
    static constexpr int count = 12;

    explicit AcceptanceSuite(VerifyOptions opt) : opt_(std::move(opt)) {}

    static const char* title(int id) {
        static const char* titles[count] = {"inertia vs quadrature, composition identity",
                                            "momentum moduli over 1e5 steps",
                                            "inertial angular momentum on REF-EGG",
                                            "energy budget on REF-EGG",
                                            "relative fluid decay on REF-EGG and REF-GEN",
                                            "axis convergence on REF-EGG and REF-GEN",
                                            "predictor concordance",
                                            "REF-SPHERE constant rigid rate, exponential decay",
                                            "REF-ORTHO decay",
                                            "parabolic scaling, lambda = 2",
                                            "fixed points on each principal axis",
                                            "dry-run rigid limit vs Euler integration"};
        return titles[id - 1];
    }

    CheckResult criterion(int id) {
        CheckResult r;
        r.module = "accept";
        r.name = detail::format("criterion %d: %s", id, title(id));
        try {
            switch (id) {
            case 1: inertia(r); break;
            case 2: moduli(r); break;
            case 3: inertial_momentum(r); break;
            case 4: budget(r); break;
            case 5: decay(r); break;
            case 6: convergence(r); break;
            case 7: concordance(r); break;
            case 8: sphere(r); break;
            case 9: ortho(r); break;
            case 10: scaling(r); break;
            case 11: fixed_point(r); break;
            case 12: dry_run(r); break;
            default: throw ConfigError("no acceptance criterion " + std::to_string(id));
            }
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = std::string("error: ") + e.what();
        }
        return r;
    }

    RunConfig config(const std::string& name) const {
        return load_config((std::filesystem::path(opt_.config_dir) / (name + ".json")).string());
    }

    /// Runs (once) the named config, optionally modified; throws if the run fails.
    const RunResult& run(const std::string& key, const std::string& name,
                         const std::function<void(RunConfig&)>& tweak = {}) {
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            RunConfig c = config(name);
            if (tweak) {
                tweak(c);
            }
            RunOptions ro;
            ro.threads = opt_.threads;
            ro.write_artifacts = false;
            it = cache_.emplace(key, Simulation(c, ro).run()).first;
        }
        if (!it->second.completed) {
            throw NumericalError(key + " run failed: " + it->second.error);
        }
        return it->second;
    }

  private:
    void inertia(CheckResult& r) const {
        std::mt19937_64 rng(2024);
        double worst_q = 0.0, worst_c = 0.0;
        for (int n = 0; n < 10; ++n) {
            const GeometrySpec s = detail::random_geometry(rng);
            const InertiaData d = compute_mass_properties(s);
            const InertiaData q = quadrature_inertia_oracle(s, 128);
            for (const auto& [a, b] : {std::pair{q.I_B, d.I_B}, {q.I_F, d.I_F}, {q.I, d.I}}) {
                worst_q = std::max(worst_q, (a - b).norm() / b.norm());
            }
            std::uniform_real_distribution<double> U(-1.0, 1.0);
            const Mat3 M = compose_total_inertia(d.I_B, d.I_F, d.m, d.y_c);
            for (int t = 0; t < 10; ++t) {
                const Vec3 b(U(rng), U(rng), U(rng));
                const Vec3 rhs = (d.I_B + d.I_F) * b + d.m * d.y_c.cross(d.y_c.cross(b));
                worst_c = std::max(worst_c, (M * b - rhs).norm() / (d.I.norm() * b.norm()));
            }
        }
        r.passed = worst_q < 1e-3 && worst_c <= 1e-12;
        r.detail = detail::format("quadrature rel err %.3g (< 1e-3), composition %.3g (<= 1e-12)", worst_q, worst_c);
    }

    void moduli(CheckResult& r) const {
        // Random rotation rates, then the rigid coupled stepper on REF-GEN inertia.
        std::mt19937_64 rng(77);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        const Vec3 A0(0.7, -1.1, 2.3), L0(-0.2, 0.5, 0.1);
        Vec3 A = A0, L = L0;
        double wa = 0.0, wl = 0.0;
        for (int n = 0; n < 100000; ++n) {
            const Vec3 w(U(rng), U(rng), U(rng));
            A = advance_angular_momentum(A, 5.0 * w, 1e-2);
            L = advance_linear_momentum(L, 5.0 * w, 1e-2);
            wa = std::max(wa, std::abs(A.norm() / A0.norm() - 1.0));
            wl = std::max(wl, std::abs(L.norm() / L0.norm() - 1.0));
        }
        const RunConfig c = config("ref_gen");
        const InertiaData in = compute_mass_properties(c.geometry);
        CoupledStepper st(in, CouplingParams{});
        CoupledState s = st.initial_state({}, in.I * *c.omega_bar0, Vec3(0.3, -0.1, 0.2));
        const Vec3 sA0 = s.rigid.A, sL0 = s.rigid.L;
        double ca = 0.0, cl = 0.0;
        for (int n = 0; n < 100000; ++n) {
            s = st.step(s, 1e-4).first;
            ca = std::max(ca, std::abs(s.rigid.A.norm() / sA0.norm() - 1.0));
            cl = std::max(cl, std::abs(s.rigid.L.norm() / sL0.norm() - 1.0));
        }
        const double worst = std::max({wa, wl, ca, cl});
        r.passed = worst <= 1e-12;
        r.detail = detail::format("random steps |A| %.2g |L| %.2g; rigid stepper |A| %.2g |L| %.2g (<= 1e-12)", wa,
                                  wl, ca, cl);
    }

    void inertial_momentum(CheckResult& r) {
        const RunResult& a = run("ref_egg", "ref_egg");
        const double dt = a.dt;
        const RunResult& b = run("ref_egg_half_dt", "ref_egg", [dt](RunConfig& c) { c.dt = 0.5 * dt; });
        const double da = a.conservation.max_QA_drift, db = b.conservation.max_QA_drift;
        const double ratio = db > 0.0 ? da / db : std::numeric_limits<double>::infinity();
        r.passed = da < 1e-3 && ratio >= 1.8;
        r.detail = detail::format("max |QA - A0|/|A0| = %.3g (< 1e-3); dt/2 gives %.3g, ratio %.3g (>= 1.8)", da, db,
                                  ratio);
    }

    void budget(CheckResult& r) {
        const RunResult& a = run("ref_egg", "ref_egg");
        const RunResult& b = run("ref_egg_24", "ref_egg", [](RunConfig& c) { c.grid = {24, 24, 24}; });
        const BudgetReport& ba = *a.budget;
        const BudgetReport& bb = *b.budget;
        r.passed = ba.max_residual < 0.02 && bb.max_residual < ba.max_residual && ba.monotonicity_violations == 0 &&
                   bb.monotonicity_violations == 0;
        r.detail = detail::format("max r: 16^3 %.3g (< 0.02), 24^3 %.3g (< 16^3); E increases beyond slack: %d, %d",
                                  ba.max_residual, bb.max_residual, ba.monotonicity_violations,
                                  bb.monotonicity_violations);
    }

    void decay(CheckResult& r) {
        double worst = 0.0;
        std::string d;
        for (const char* name : {"ref_egg", "ref_gen"}) {
            const RunResult& res = run(name, name);
            const double ratio = std::sqrt(res.history.back().energy.u_l2sq) / res.u0_norm;
            worst = std::max(worst, ratio);
            d += detail::format("%s |u(T)|/|u(0)| = %.3g; ", name, ratio);
        }
        r.passed = worst <= 0.01;
        r.detail = d + "required <= 0.01";
    }

    void convergence(CheckResult& r) {
        r.passed = true;
        for (const char* name : {"ref_egg", "ref_gen"}) {
            const RunResult& res = run(name, name);
            const AxisVerdict& v = *res.verdict;
            const bool ok = v.converged && v.final_angle_deg < 5.0 && v.residual < 1e-2 && v.inertia_mismatch < 0.02;
            r.passed = r.passed && ok;
            r.detail += detail::format("%s: %s axis %s, angle %.3g deg, rho %.3g, mismatch %.3g; ", name,
                                       v.converged ? "converged" : "not converged",
                                       v.axis_index ? std::to_string(*v.axis_index + 1).c_str() : "-",
                                       v.final_angle_deg, v.residual, v.inertia_mismatch);
        }
        r.detail += "required angle < 5, rho < 1e-2, mismatch < 0.02";
    }

    void concordance(CheckResult& r) {
        r.passed = true;
        for (const char* name : {"egg_variant_1", "egg_variant_2", "egg_variant_3"}) {
            const RunResult& res = run(name, name);
            const bool satisfied = res.prediction.kind == PredictionReport::Case::egg &&
                                   res.prediction.verdict == PredictionReport::Verdict::largest_axis_guaranteed;
            const AxisVerdict& v = *res.verdict;
            const bool largest = v.converged && v.axis_index && *v.axis_index == 2;
            r.passed = r.passed && satisfied && largest;
            r.detail += detail::format("%s: criterion %s, %s axis %s; ", name, satisfied ? "holds" : "FAILS",
                                       v.converged ? "converged" : "not converged",
                                       v.axis_index ? std::to_string(*v.axis_index + 1).c_str() : "-");
        }
        const RunResult& g = run("gen_variant", "gen_variant");
        const bool unstable = g.prediction.kind == PredictionReport::Case::general &&
                              g.prediction.instability_lhs > g.prediction.instability_rhs;
        const AxisVerdict& v = *g.verdict;
        const bool smallest = v.converged && v.axis_index && *v.axis_index == 0;
        r.passed = r.passed && unstable && !smallest;
        r.detail += detail::format("gen_variant: instability condition %s, %s axis %s", unstable ? "holds" : "FAILS",
                                   v.converged ? "converged" : "not converged",
                                   v.axis_index ? std::to_string(*v.axis_index + 1).c_str() : "-");
    }

    void sphere(CheckResult& r) {
        const RunResult& res = run("ref_sphere", "ref_sphere");
        double worst = 0.0;
        for (const auto& rec : res.history) {
            worst = std::max(worst, (rec.omega_bar - res.omega_bar0).norm());
        }
        const double rel = worst / res.omega_bar0.norm();
        const DecayFit f = decay_fit(res.history, 0.0, res.config.T);
        r.passed = rel < 1e-6 && f.rate < 0.0 && f.r_squared > 0.99;
        r.detail = detail::format("max |Om_bar - Om_bar0|/|Om_bar0| = %.3g (< 1e-6); log E_tilde slope %.4g, r^2 %.6f",
                                  rel, f.rate, f.r_squared);
    }

    void ortho(CheckResult& r) {
        const RunResult& res = run("ref_ortho", "ref_ortho");
        const DecayFit f = decay_fit(res.history, 0.0, res.config.T);
        const double om0 = res.history.front().omega.norm();
        const double omT = res.history.back().omega.norm();
        r.passed = f.r_squared > 0.99 && omT < 1e-3 * om0;
        r.detail = detail::format("log E_tilde slope %.4g, r^2 %.6f (> 0.99); |Om(T)|/|Om(0)| = %.3g (< 1e-3)", f.rate,
                                  f.r_squared, omT / om0);
    }

    void scaling(CheckResult& r) {
        const double lam = 2.0;
        const RunResult& a = run("ref_egg", "ref_egg");
        const RunResult& b = run("ref_egg_scaled", "ref_egg", [lam](RunConfig& c) { c = scaling_transform(c, lam); });
        auto bar = [](const TimeSeriesRecord& x) { return x.omega_bar; };
        double worst = 0.0;
        for (int k = 1; k <= 20; ++k) {
            const double s = b.config.T * k / 20.0;
            const Vec3 ref = lam * lam * detail::sample_at(a.history, lam * lam * s, bar);
            const Vec3 got = detail::sample_at(b.history, s, bar);
            worst = std::max(worst, (got - ref).norm() / ref.norm());
        }
        r.passed = worst <= 0.05;
        r.detail = detail::format("max |Om_bar_s(s) - l^2 Om_bar(l^2 s)| / |l^2 Om_bar| = %.3g over 20 times (<= 0.05)",
                                  worst);
    }

    void fixed_point(CheckResult& r) const {
        RunConfig c = config("ref_gen");
        c.velocity = VelocityInit{};
        double worst = 0.0;
        int worst_picard = 0;
        for (int j = 0; j < 3; ++j) {
            const PrincipalAxes pa = principal_axes(compute_mass_properties(c.geometry).I);
            c.omega_bar0 = 5.0 * pa.axis(j);
            RunOptions ro;
            ro.threads = opt_.threads;
            ro.write_artifacts = false;
            const Simulation sim(c, ro);
            const CoupledStepper& st = sim.stepper();
            CoupledState s = sim.initial_state();
            const double dt = st.fluid_solver()->stable_dt(s.fluid.u);
            for (int n = 0; n < 1000; ++n) {
                auto [next, rep] = st.step(s, dt);
                double change = (next.rigid.A - s.rigid.A).norm() / s.rigid.A.norm();
                change = std::max(change, (next.rigid.L - s.rigid.L).norm());
                change = std::max(change, (next.omega.total - s.omega.total).norm() / s.omega.total.norm());
                for (int a = 0; a < 3; ++a) {
                    for (std::size_t q = 0; q < s.fluid.u.comp[a].size(); ++q) {
                        change = std::max(change, std::abs(next.fluid.u.comp[a][q] - s.fluid.u.comp[a][q]));
                    }
                }
                worst = std::max(worst, change);
                worst_picard = std::max(worst_picard, rep.picard_iterations);
                s = std::move(next);
            }
        }
        r.passed = worst < 1e-12;
        r.detail = detail::format("max per-step change %.3g over 3 x 1000 steps (< 1e-12), Picard iterations <= %d",
                                  worst, worst_picard);
    }

    void dry_run(CheckResult& r) {
        const RunResult& res = run("dry_run", "dry_run");
        const std::vector<Vec3> ref = detail::euler_reference(res.inertia.I, res.A0, res.dt, res.steps);
        double worst = 0.0;
        for (std::size_t n = 0; n < res.history.size(); ++n) {
            worst = std::max(worst, (res.history[n].omega - ref[n]).norm());
        }
        const double rel = worst / res.omega_bar0.norm();
        r.passed = res.history.size() == ref.size() && rel < 1e-6;
        r.detail = detail::format("max |Om - Om_Euler|/|Om0| = %.3g over t in [0, %g] (< 1e-6)", rel, res.config.T);
    }

    VerifyOptions opt_;
    std::map<std::string, RunResult> cache_;
};

namespace detail {

inline CheckResult make_check(const char* module, const char* name, bool passed, std::string detail) {
    return {module, name, passed, std::move(detail)};
}

/// Oracle and property checks of the individual modules.
inline std::vector<CheckResult> module_checks(const VerifyOptions& opt) {
    std::vector<CheckResult> out;
    {
        GeometrySpec s;
        s.outer_half_extents = Vec3(0.5, 0.5, 0.5);
        s.cavity_half_extents = Vec3(0.25, 0.25, 0.25);
        const InertiaData d = compute_mass_properties(s);
        const double ib = (d.I_B(0, 0)), expect = 1.0 / 6.0 - 0.125 * (2.0 * 0.0625) / 3.0;
        out.push_back(make_check("geometry", "unit brick with centred cavity", std::abs(ib - expect) < 1e-14,
                                 format("I_B11 = %.15g, expected %.15g", ib, expect)));
    }
    {
        const RunConfig c = load_config((std::filesystem::path(opt.config_dir) / "ref_gen.json").string());
        const InertiaData in = compute_mass_properties(c.geometry);
        const auto solver = std::make_shared<fluid::FluidSolver>(fluid::MacGrid::for_cavity(c.geometry, in, c.grid),
                                                                 fluid::FluidParams{}, opt.threads);
        fluid::InitSpec init{fluid::InitSpec::Kind::random_solenoidal, 1, 1.0};
        const fluid::VelocityField u = fluid::initialize_velocity(*solver, init);
        const double div = fluid::max_divergence(u), tol = fluid::divergence_tolerance(u);
        out.push_back(make_check("fluid", "random initial field is solenoidal", div <= tol,
                                 format("max div %.3g (<= %.3g)", div, tol)));
        const fluid::ProjectionResult p = solver->project(u);
        double diff = 0.0;
        for (int a = 0; a < 3; ++a) {
            for (std::size_t q = 0; q < u.comp[a].size(); ++q) {
                diff = std::max(diff, std::abs(p.u.comp[a][q] - u.comp[a][q]));
            }
        }
        out.push_back(make_check("fluid", "projection is idempotent", diff <= 1e-10,
                                 format("max change %.3g (<= 1e-10)", diff)));
        fluid::FluidState st(u, fluid::ScalarField(u.grid));
        const double e0 = fluid::fluid_kinetic_energy(u);
        const double dt = solver->stable_dt(u);
        for (int n = 0; n < 20; ++n) {
            st = solver->step(st, Vec3::Zero(), Vec3::Zero(), dt).state;
        }
        const double e1 = fluid::fluid_kinetic_energy(st.u);
        out.push_back(make_check("fluid", "kinetic energy decays without rotation", e1 < e0,
                                 format("||u||^2 %.6g -> %.6g", e0, e1)));
    }
    {
        const Mat3 I = Vec3(1, 2, 3).asDiagonal();
        const PrincipalAxes pa = principal_axes(I);
        const OmegaSplit w = omega_from_state(Vec3(0, 0, 3), Vec3(0, 0, 1), pa);
        const bool ok = (w.bar - Vec3(0, 0, 1)).norm() < 1e-15 && (w.tilde - Vec3(0, 0, -1.0 / 3.0)).norm() < 1e-15 &&
                        (w.total - Vec3(0, 0, 2.0 / 3.0)).norm() < 1e-15;
        out.push_back(make_check("coupling", "omega split on diag(1,2,3)", ok,
                                 format("Om = (%.3g, %.3g, %.3g)", w.total[0], w.total[1], w.total[2])));
        const double wdt = 0.7;
        const Vec3 A = advance_angular_momentum(Vec3(1, 0, 0), Vec3(0, 0, 1), wdt);
        const double err = (A - Vec3(std::cos(wdt), -std::sin(wdt), 0)).norm();
        out.push_back(make_check("coupling", "Rodrigues update, closed form", err < 1e-15, format("error %.3g", err)));
    }
    {
        OmegaSplit om;
        om.bar = Vec3(0, 0, std::sqrt(3.0));
        om.tilde = Vec3(std::sqrt(2.0), 0, 0);
        const EnergyBreakdown e = energy_breakdown(5.0, om, Mat3::Identity());
        out.push_back(make_check("diagnost", "energy split 5 - 2 + 3", std::abs(e.E - 6.0) < 1e-14,
                                 format("E = %.15g", e.E)));
        std::vector<double> t, y;
        for (int k = 0; k <= 50; ++k) {
            t.push_back(0.02 * k);
            y.push_back(std::exp(-3.0 * t.back()));
        }
        const DecayFit f = decay_fit(t, y);
        out.push_back(make_check("diagnost", "decay fit of exp(-3t)",
                                 std::abs(f.rate + 3.0) < 1e-12 && std::abs(f.r_squared - 1.0) < 1e-12,
                                 format("rate %.15g, r^2 %.15g", f.rate, f.r_squared)));
    }
    {
        const Mat3 I = Vec3(1, 2, 3).asDiagonal();
        std::vector<LimitSample> h1, h2;
        for (int k = 0; k <= 100; ++k) {
            h1.push_back({0.01 * k, Vec3(0, 0, 1), 0.0});
            h2.push_back({0.01 * k, Vec3(1, 1, 0) / std::sqrt(2.0), 0.0});
        }
        const AxisVerdict v1 = classify_limit(h1, I, 3.0, 0.0);
        const AxisVerdict v2 = classify_limit(h2, I, std::sqrt(2.5), 0.0);
        out.push_back(make_check("asympt", "classify: eigenvector and non-eigenvector",
                                 v1.converged && v1.axis_index == 2 && std::abs(v1.mu - 1.0) < 1e-15 && !v2.converged,
                                 format("axis 3 mu %.3g; rho of (1,1,0) = %.4g", v1.mu, v2.residual)));
        const auto p1 = predict_axis(Vec3(1, 1, 2), Vec3(0, 0, 1), 1.0, 2.0);
        const auto p2 = predict_axis(Vec3(1, 1, 2), Vec3(1, 0, 0), 1.0, 1.0);
        const auto p3 = predict_axis(Vec3(1, 2, 3), Vec3(0, 1, 1), 1.0, 1.0);
        const bool ok = p1.verdict == PredictionReport::Verdict::largest_axis_guaranteed && p1.mu == 1.0 &&
                        p2.verdict == PredictionReport::Verdict::inconclusive &&
                        p3.verdict == PredictionReport::Verdict::largest_axis_guaranteed && p3.instability_lhs == 8.0;
        out.push_back(make_check("asympt", "predictor worked examples", ok,
                                 format("egg %s, egg off-axis %s, general %s", to_string(p1.verdict),
                                        to_string(p2.verdict), to_string(p3.verdict))));
    }
    {
        nlohmann::json j = config_to_json(load_config((std::filesystem::path(opt.config_dir) / "ref_egg.json").string()));
        j["tolerances"]["angle_deg"] = -5.0;
        bool rejected = false;
        std::string msg;
        try {
            config_from_json(j);
        } catch (const ConfigError& e) {
            rejected = true;
            msg = e.what();
        }
        out.push_back(make_check("cli", "negative tolerance rejected", rejected, msg));
    }
    return out;
}

} // namespace detail

inline std::vector<CheckResult> run_verification(const VerifyOptions& opt, const CheckCallback& cb = {}) {
    std::vector<CheckResult> out;
    auto add = [&](CheckResult r) {
        if (cb) {
            cb(r);
        }
        out.push_back(std::move(r));
    };
    try {
        for (auto& r : detail::module_checks(opt)) {
            add(std::move(r));
        }
    } catch (const std::exception& e) {
        add({"verify", "module checks", false, std::string("error: ") + e.what()});
    }
    AcceptanceSuite suite(opt);
    for (int id = 1; id <= AcceptanceSuite::count; ++id) {
        const bool cheap = id == 1 || id == 2 || id == 11 || id == 12;
        if (cheap || opt.full) {
            add(suite.criterion(id));
        }
    }
    return out;
}

} // namespace cavitydyn
