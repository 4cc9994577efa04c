#pragma once

// Run driver: builds the model from a RunConfig, advances the coupled system,
// and writes the artifacts
//
//   <out>/timeseries.csv       diagnostics every sample interval
//   <out>/summary.json         verdicts and reports (also written on failure)
//   <out>/checkpoint_<step>.*  optional restart data
//
// In serial mode the CSV is bitwise reproducible, including across a restart.

#include "cavitydyn/asymptotics.hpp"
#include "cavitydyn/config.hpp"
#include "cavitydyn/coupling.hpp"
#include "cavitydyn/diagnostics.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace cavitydyn {

struct RunOptions {
    int threads = 1;
    /// Checkpoint every N steps (0: never).
    std::int64_t checkpoint_every = 0;
    /// Sidecar JSON of a checkpoint to resume from.
    std::string resume;
    bool write_artifacts = true;
    /// Keep the full per-step history in the result.
    bool keep_history = true;
    /// Stop after this many steps (negative: run to T). Used to simulate interruptions.
    std::int64_t stop_after = -1;
};

struct RunResult {
    RunConfig config;
    InertiaData inertia;
    PrincipalAxes axes;
    double dt = 0.0;
    std::int64_t steps = 0;
    Vec3 A0 = Vec3::Zero();
    Vec3 omega_bar0 = Vec3::Zero();
    double u0_norm = 0.0;
    EnergyBreakdown energy0;
    PredictionReport prediction;
    std::optional<AxisVerdict> verdict;
    std::optional<BudgetReport> budget;
    ConservationReport conservation;
    std::vector<TimeSeriesRecord> history;
    CoupledState final_state;
    double wall_seconds = 0.0;
    int max_picard_iterations = 0;
    bool completed = false;
    std::string error;
    ExitCode exit_code = ExitCode::ok;
    nlohmann::json summary;
};

namespace detail {

inline constexpr int record_width = 25;

inline void put_record(std::ostream& os, const TimeSeriesRecord& r) {
    const double v[record_width] = {r.t,
                                    r.energy.E,
                                    r.energy.E_bar,
                                    r.energy.E_tilde,
                                    r.energy.u_l2sq,
                                    r.diss_rate,
                                    r.diss_cum,
                                    r.A[0],
                                    r.A[1],
                                    r.A[2],
                                    r.absA_drift,
                                    r.QA_drift,
                                    r.absL_drift,
                                    r.omega[0],
                                    r.omega[1],
                                    r.omega[2],
                                    r.omega_bar[0],
                                    r.omega_bar[1],
                                    r.omega_bar[2],
                                    r.mean_u_abs,
                                    r.angle_deg[0],
                                    r.angle_deg[1],
                                    r.angle_deg[2],
                                    double(r.picard_iters),
                                    0.0};
    for (double x : v) {
        fluid::detail::put<double>(os, x);
    }
}

inline TimeSeriesRecord get_record(std::istream& is, const std::string& path) {
    double v[record_width];
    for (double& x : v) {
        x = fluid::detail::get<double>(is, path);
    }
    TimeSeriesRecord r;
    r.t = v[0];
    r.energy = {v[1], v[2], v[3], v[4]};
    r.diss_rate = v[5];
    r.diss_cum = v[6];
    r.A = Vec3(v[7], v[8], v[9]);
    r.absA_drift = v[10];
    r.QA_drift = v[11];
    r.absL_drift = v[12];
    r.omega = Vec3(v[13], v[14], v[15]);
    r.omega_bar = Vec3(v[16], v[17], v[18]);
    r.mean_u_abs = v[19];
    r.angle_deg = Vec3(v[20], v[21], v[22]);
    r.picard_iters = int(v[23]);
    return r;
}

inline std::string step_tag(std::int64_t step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%09lld", static_cast<long long>(step));
    return buf;
}

} // namespace detail

class Simulation {
  public:
    Simulation(RunConfig config, RunOptions options = {}) : cfg_(std::move(config)), opt_(std::move(options)) {
        cfg_.validate();
        inertia_ = compute_mass_properties(cfg_.geometry);
        axes_ = principal_axes(inertia_.I);
        CouplingParams cp;
        cp.picard_rel_tol = cfg_.tol.picard_rel_tol;
        cp.max_picard = cfg_.tol.max_picard;
        const fluid::MacGrid grid = fluid::MacGrid::for_cavity(cfg_.geometry, inertia_, cfg_.grid);
        // The fluid solver also generates the initial field in dry-run mode.
        solver_ = std::make_shared<fluid::FluidSolver>(grid, fluid::FluidParams{cfg_.geometry.nu, cfg_.dt_safety},
                                                       opt_.threads);
        if (cfg_.dry_run) {
            stepper_ = std::make_unique<CoupledStepper>(inertia_, cp);
        } else {
            stepper_ = std::make_unique<CoupledStepper>(inertia_, solver_, cp);
        }
    }

    const RunConfig& config() const { return cfg_; }
    const InertiaData& inertia() const { return inertia_; }
    const PrincipalAxes& axes() const { return axes_; }
    const CoupledStepper& stepper() const { return *stepper_; }

    fluid::VelocityField initial_velocity() const {
        fluid::InitSpec init;
        init.seed = cfg_.seed;
        init.amplitude = cfg_.velocity.amplitude;
        init.axis = cfg_.velocity.axis;
        if (cfg_.velocity.kind == "random_solenoidal") {
            init.kind = fluid::InitSpec::Kind::random_solenoidal;
        } else if (cfg_.velocity.kind == "vortex") {
            init.kind = fluid::InitSpec::Kind::vortex;
        }
        return fluid::initialize_velocity(*solver_, init);
    }

    Vec3 initial_A() const { return cfg_.A0 ? *cfg_.A0 : Vec3(inertia_.I * *cfg_.omega_bar0); }

    /// Prediction from the configured initial data, without running.
    PredictionReport predict() const {
        const CoupledState s0 = initial_state();
        const EnergyBreakdown e0 = energy_breakdown(s0, inertia_.I);
        return predict_axis(axes_.lambda, axes_.to_principal(s0.omega.bar), e0.E_tilde, s0.rigid.A.norm());
    }

    CoupledState initial_state() const {
        fluid::VelocityField u0 = cfg_.dry_run ? fluid::VelocityField{} : initial_velocity();
        return stepper_->initial_state(std::move(u0), initial_A(), cfg_.L0);
    }

    RunResult run() {
        const auto wall0 = std::chrono::steady_clock::now();
        RunResult res;
        res.config = cfg_;
        res.inertia = inertia_;
        res.axes = axes_;
        std::ofstream csv;
        try {
            if (opt_.write_artifacts) {
                std::filesystem::create_directories(cfg_.output_dir);
            }
            execute(res, csv);
        } catch (const Error& e) {
            res.error = e.what();
            res.exit_code = e.exit_code();
        } catch (const std::exception& e) {
            res.error = e.what();
            res.exit_code = ExitCode::numerical_failure;
        }
        res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
        res.summary = summarize(res);
        if (opt_.write_artifacts) {
            std::ofstream os(std::filesystem::path(cfg_.output_dir) / "summary.json");
            os << res.summary.dump(2) << '\n';
        }
        return res;
    }

  private:
    void execute(RunResult& res, std::ofstream& csv) {
        CoupledState s = initial_state();
        res.A0 = s.rigid.A;
        res.omega_bar0 = s.omega.bar;
        res.u0_norm = cfg_.dry_run ? 0.0 : std::sqrt(fluid::fluid_kinetic_energy(s.fluid.u));
        res.energy0 = energy_breakdown(s, inertia_.I);
        res.prediction = predict_axis(axes_.lambda, axes_.to_principal(s.omega.bar), res.energy0.E_tilde,
                                      s.rigid.A.norm());
        const DriftReference ref{s.rigid.A, s.rigid.L};

        res.dt = cfg_.dt ? *cfg_.dt : (cfg_.dry_run ? solver_->viscous_dt_limit() : solver_->stable_dt(s.fluid.u));
        res.steps = std::max<std::int64_t>(1, std::int64_t(std::ceil(cfg_.T / res.dt - 1e-9)));
        const std::int64_t stride =
            std::max<std::int64_t>(1, std::int64_t(std::llround(cfg_.sample_interval / res.dt)));

        std::vector<TimeSeriesRecord>& hist = res.history;
        if (!opt_.resume.empty()) {
            s = resume(res, hist);
        } else {
            hist.push_back(make_record(s, nullptr, nullptr, *stepper_, ref));
        }
        if (opt_.write_artifacts) {
            csv.open(std::filesystem::path(cfg_.output_dir) / "timeseries.csv", std::ios::trunc);
            csv << csv_header() << '\n';
            for (std::size_t k = 0; k < hist.size(); ++k) {
                if (std::int64_t(k) % stride == 0) {
                    csv << csv_row(hist[k]) << '\n';
                }
            }
        }

        std::int64_t executed = 0;
        while (s.step < res.steps) {
            if (opt_.stop_after >= 0 && executed >= opt_.stop_after) {
                res.final_state = std::move(s);
                res.error = "stopped after " + std::to_string(executed) + " steps on request";
                return;
            }
            try {
                auto [next, rep] = stepper_->step(s, res.dt);
                res.max_picard_iterations = std::max(res.max_picard_iterations, rep.picard_iterations);
                const TimeSeriesRecord& prev = hist.back();
                TimeSeriesRecord rec = make_record(next, &rep, &prev, *stepper_, ref);
                hist.push_back(rec);
                s = std::move(next);
            } catch (const Error& e) {
                std::string where = "step " + std::to_string(s.step + 1) + " (t = " + std::to_string(s.t) + ")";
                if (opt_.write_artifacts) {
                    where += "; state snapshot: " + write_checkpoint(s, res, hist, "failure_");
                }
                throw rethrow_with_context(e, where);
            }
            ++executed;
            if (csv.is_open() && s.step % stride == 0) {
                csv << csv_row(hist.back()) << '\n';
            }
            if (opt_.write_artifacts && opt_.checkpoint_every > 0 && s.step % opt_.checkpoint_every == 0) {
                write_checkpoint(s, res, hist, "checkpoint_");
            }
        }
        res.completed = true;
        res.final_state = std::move(s);
        finish(res);
    }

    static std::runtime_error rethrow_with_context(const Error& e, const std::string& where) {
        // Keep the exit-code class of the original error.
        if (e.exit_code() == ExitCode::config_error) {
            throw ConfigError(std::string(e.what()) + " at " + where);
        }
        throw NumericalError(std::string(e.what()) + " at " + where);
    }

    void finish(RunResult& res) const {
        const auto& hist = res.history;
        BudgetOptions bo;
        bo.monotonic_slack = cfg_.tol.monotonic_slack;
        bo.r_tol = cfg_.tol.budget_r_tol;
        res.budget = energy_budget(hist, bo);
        res.conservation = conservation_report(hist);
        std::vector<LimitSample> samples;
        samples.reserve(hist.size());
        for (const auto& r : hist) {
            samples.push_back({r.t, r.omega, std::sqrt(std::max(r.energy.u_l2sq, 0.0))});
        }
        LimitTolerances lt{cfg_.tol.angle_deg, cfg_.tol.residual, cfg_.tol.u_rel};
        res.verdict = classify_limit(samples, inertia_.I, res.A0.norm(), res.u0_norm, lt);
    }

    std::string write_checkpoint(const CoupledState& s, const RunResult& res,
                                 const std::vector<TimeSeriesRecord>& hist, const std::string& prefix) const {
        namespace fs = std::filesystem;
        const fs::path dir(cfg_.output_dir);
        const std::string tag = prefix + detail::step_tag(s.step);
        const fs::path vel = dir / (tag + ".vel");
        const fs::path his = dir / (tag + ".hist");
        const fs::path side = dir / (tag + ".json");
        if (!cfg_.dry_run) {
            fluid::write_velocity_checkpoint(vel.string(), s.fluid.u);
        }
        {
            std::ofstream os(his, std::ios::binary | std::ios::trunc);
            for (const auto& r : hist) {
                detail::put_record(os, r);
            }
        }
        using detail::vec3_to_json;
        nlohmann::json j;
        j["config_hash"] = config_hash(cfg_);
        j["step"] = s.step;
        j["t"] = s.t;
        j["dt"] = res.dt;
        j["A"] = vec3_to_json(s.rigid.A);
        j["L"] = vec3_to_json(s.rigid.L);
        j["Q"] = detail::mat3_to_json(s.rigid.Q);
        j["omega_prev"] = s.omega_prev ? vec3_to_json(*s.omega_prev) : nlohmann::json(nullptr);
        j["velocity_file"] = cfg_.dry_run ? nlohmann::json(nullptr) : nlohmann::json(vel.filename().string());
        j["history_file"] = his.filename().string();
        j["history_records"] = hist.size();
        std::ofstream os(side);
        os << j.dump(2) << '\n';
        return side.string();
    }

    CoupledState resume(RunResult& res, std::vector<TimeSeriesRecord>& hist) const {
        namespace fs = std::filesystem;
        std::ifstream is(opt_.resume);
        if (!is) {
            throw ConfigError("--resume: cannot open " + opt_.resume);
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(is);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError("--resume: " + opt_.resume + " is not valid JSON: " + e.what());
        }
        if (j.value("config_hash", "") != config_hash(cfg_)) {
            throw ConfigError("--resume: checkpoint " + opt_.resume + " was written for a different config");
        }
        if (j.at("dt").get<double>() != res.dt) {
            throw ConfigError("--resume: time step differs from the checkpoint");
        }
        const fs::path dir = fs::path(opt_.resume).parent_path();
        fluid::VelocityField u;
        if (!cfg_.dry_run) {
            u = fluid::read_velocity_checkpoint((dir / j.at("velocity_file").get<std::string>()).string());
            if (!(u.grid == solver_->grid())) {
                throw ConfigError("--resume: checkpoint grid does not match the config");
            }
        }
        CoupledState s = stepper_->initial_state(std::move(u), detail::vec3_from_json(j.at("A"), "A"),
                                                 detail::vec3_from_json(j.at("L"), "L"), j.at("t").get<double>());
        s.step = j.at("step").get<std::int64_t>();
        s.rigid.Q = detail::mat3_from_json(j.at("Q"), "Q");
        if (!j.at("omega_prev").is_null()) {
            s.omega_prev = detail::vec3_from_json(j.at("omega_prev"), "omega_prev");
        }
        const std::string hpath = (dir / j.at("history_file").get<std::string>()).string();
        std::ifstream hs(hpath, std::ios::binary);
        if (!hs) {
            throw ConfigError("--resume: cannot open history " + hpath);
        }
        const auto n = j.at("history_records").get<std::size_t>();
        hist.clear();
        for (std::size_t k = 0; k < n; ++k) {
            hist.push_back(detail::get_record(hs, hpath));
        }
        return s;
    }

    nlohmann::json summarize(const RunResult& res) const {
        using detail::vec3_to_json;
        nlohmann::json j;
        j["status"] = res.error.empty() ? "ok" : "failed";
        if (!res.error.empty()) {
            j["error"] = res.error;
        }
        j["exit_code"] = int(res.exit_code);
        j["config"] = config_to_json(cfg_);
        j["config_hash"] = config_hash(cfg_);
        j["inertia"] = inertia_to_json(inertia_);
        j["principal_axes"] = principal_axes_to_json(axes_);
        j["dt"] = res.dt;
        j["steps"] = res.steps;
        j["completed"] = res.completed;
        j["A0"] = vec3_to_json(res.A0);
        j["omega_bar0"] = vec3_to_json(res.omega_bar0);
        j["u0_l2"] = res.u0_norm;
        j["E0"] = {{"E", res.energy0.E},
                   {"E_bar", res.energy0.E_bar},
                   {"E_tilde", res.energy0.E_tilde},
                   {"u_l2sq", res.energy0.u_l2sq}};
        j["prediction"] = to_json(res.prediction);
        j["verdict"] = res.verdict ? to_json(*res.verdict) : nlohmann::json(nullptr);
        if (!res.history.empty()) {
            const auto& c = res.conservation;
            j["conservation"] = {{"max_absA_drift", c.max_absA_drift}, {"final_absA_drift", c.final_absA_drift},
                                 {"max_QA_drift", c.max_QA_drift},     {"final_QA_drift", c.final_QA_drift},
                                 {"max_absL_drift", c.max_absL_drift}, {"final_absL_drift", c.final_absL_drift},
                                 {"max_mean_u_abs", c.max_mean_u_abs}};
        }
        if (res.budget) {
            const auto& b = *res.budget;
            j["budget"] = {{"max_residual", b.max_residual},
                           {"final_residual", b.final_residual},
                           {"monotonicity_violations", b.monotonicity_violations},
                           {"max_increase", b.max_increase},
                           {"energy_inequality_violations", b.energy_inequality_violations},
                           {"cumulative_dissipation", b.final_cumulative_dissipation}};
        }
        j["max_picard_iterations"] = res.max_picard_iterations;
        j["wall_seconds"] = res.wall_seconds;
        return j;
    }

    RunConfig cfg_;
    RunOptions opt_;
    InertiaData inertia_;
    PrincipalAxes axes_;
    std::shared_ptr<fluid::FluidSolver> solver_;
    std::unique_ptr<CoupledStepper> stepper_;
};

} // namespace cavitydyn
