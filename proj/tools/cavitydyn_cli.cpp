// cavitydyn: command-line front end.
//
//   cavitydyn inspect --config C [--out DIR]
//   cavitydyn predict --config C [--out DIR]
//   cavitydyn run     --config C [--out DIR] [--threads N] [--checkpoint-every N] [--resume PATH]
//   cavitydyn scale   --config C --lambda L [--out FILE]
//   cavitydyn verify  [--level fast|full] [--threads N]
//
// Exit codes: 0 ok, 2 config error, 3 numerical failure, 4 verification failure.

#include "cavitydyn/cavitydyn.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace cavitydyn;

namespace {

void print_vec(const char* name, const Vec3& v) {
    std::printf("  %-22s [% .9g, % .9g, % .9g]\n", name, v[0], v[1], v[2]);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream os(path);
    if (!os) {
        throw ConfigError("cannot write " + path.string());
    }
    os << j.dump(2) << '\n';
}

RunConfig load(const std::string& path, const std::string& out) {
    RunConfig c = load_config(path);
    if (!out.empty()) {
        c.output_dir = out;
    }
    return c;
}

void print_prediction(const PredictionReport& p) {
    std::printf("prediction\n  case %s, verdict %s\n", to_string(p.kind), to_string(p.verdict));
    if (p.kind == PredictionReport::Case::egg) {
        std::printf("  E_tilde(0) = %.9g vs threshold %.9g\n", p.egg_lhs, p.egg_rhs);
    } else if (p.kind == PredictionReport::Case::general) {
        std::printf("  largest-axis condition  %.9g > %.9g\n", p.largest_lhs, p.largest_rhs);
        std::printf("  instability condition   %.9g > %.9g\n", p.instability_lhs, p.instability_rhs);
    }
    if (p.mu) {
        std::printf("  predicted mu = %.9g\n", *p.mu);
    }
}

nlohmann::json inspect_json(const Simulation& sim, const PredictionReport& p) {
    nlohmann::json j;
    j["config"] = config_to_json(sim.config());
    j["inertia"] = inertia_to_json(sim.inertia());
    j["principal_axes"] = principal_axes_to_json(sim.axes());
    j["prediction"] = to_json(p);
    return j;
}

int cmd_inspect(const std::string& config, const std::string& out, bool prediction_only) {
    const RunConfig c = load(config, out);
    Simulation sim(c);
    const InertiaData& in = sim.inertia();
    const PrincipalAxes& pa = sim.axes();
    const PredictionReport p = sim.predict();
    if (!prediction_only) {
        std::printf("mass properties\n");
        std::printf("  %-22s %.12g\n", "body mass m_B", in.m_B);
        std::printf("  %-22s %.12g\n", "fluid mass m_F", in.m_F);
        std::printf("  %-22s %.12g\n", "total mass m", in.m);
        print_vec("fluid centre y_F", in.y_F);
        print_vec("structure centre y_c", in.y_c);
        std::printf("  inertia about y_c\n");
        for (int i = 0; i < 3; ++i) {
            std::printf("    [% .12g, % .12g, % .12g]\n", in.I(i, 0), in.I(i, 1), in.I(i, 2));
        }
        print_vec("eigenvalues", pa.lambda);
        for (int j = 0; j < 3; ++j) {
            char name[32];
            const bool repeated = pa.eigenspace(j).size() > 1;
            std::snprintf(name, sizeof name, "axis %d%s", j + 1, repeated ? " (repeated)" : "");
            print_vec(name, pa.axis(j));
        }
    }
    print_prediction(p);
    const char* file = prediction_only ? "prediction.json" : "inspect.json";
    write_json(std::filesystem::path(c.output_dir) / file, inspect_json(sim, p));
    return 0;
}

int cmd_run(const std::string& config, const std::string& out, int threads, std::int64_t checkpoint_every,
            const std::string& resume) {
    const RunConfig c = load(config, out);
    RunOptions opt;
    opt.threads = threads;
    opt.checkpoint_every = checkpoint_every;
    opt.resume = resume;
    opt.keep_history = false;
    Simulation sim(c, opt);
    const RunResult r = sim.run();
    std::printf("run %s: %lld steps of dt = %.6g, wall %.1f s\n", r.error.empty() ? "completed" : "FAILED",
                static_cast<long long>(r.steps), r.dt, r.wall_seconds);
    if (!r.error.empty()) {
        std::fprintf(stderr, "error: %s\n", r.error.c_str());
    }
    print_prediction(r.prediction);
    if (r.verdict) {
        const AxisVerdict& v = *r.verdict;
        std::printf("limit\n  converged %s, axis %s, final angle %.4g deg, residual %.3g, |I Om| mismatch %.3g\n",
                    v.converged ? "yes" : "no", v.axis_index ? std::to_string(*v.axis_index + 1).c_str() : "-",
                    v.final_angle_deg, v.residual, v.inertia_mismatch);
    }
    if (r.budget) {
        std::printf("energy budget\n  max residual %.3g, monotonicity violations %d\n", r.budget->max_residual,
                    r.budget->monotonicity_violations);
    }
    std::printf("artifacts in %s\n", c.output_dir.c_str());
    return int(r.exit_code);
}

int cmd_scale(const std::string& config, double lambda, const std::string& out) {
    const RunConfig c = load_config(config);
    RunConfig s = scaling_transform(c, lambda);
    s.output_dir = c.output_dir + "_scaled";
    const nlohmann::json j = config_to_json(s);
    if (out.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        write_json(out, j);
        std::printf("scaled config written to %s\n", out.c_str());
    }
    return 0;
}

int cmd_verify(const std::string& level, int threads) {
    VerifyOptions opt;
    opt.full = level == "full";
    opt.threads = threads;
    opt.config_dir = CAVITYDYN_CONFIG_DIR;
    const auto results = run_verification(opt, [](const CheckResult& r) {
        std::printf("%s  %-8s %-44s %s\n", r.passed ? "PASS" : "FAIL", r.module.c_str(), r.name.c_str(),
                    r.detail.c_str());
        std::fflush(stdout);
    });
    int failed = 0;
    for (const auto& r : results) {
        failed += r.passed ? 0 : 1;
    }
    std::printf("%zu checks, %d failed\n", results.size(), failed);
    return failed ? int(ExitCode::verification_failure) : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rigid body with a viscous-fluid-filled cavity: simulation and analysis"};
    app.require_subcommand(1);

    std::string config, out, resume, level = "fast";
    int threads = 1;
    std::int64_t checkpoint_every = 0;
    double lambda = 2.0;

    auto* inspect = app.add_subcommand("inspect", "Mass properties, principal axes and axis prediction");
    auto* predict = app.add_subcommand("predict", "A-priori prediction of the terminal axis");
    for (auto* sub : {inspect, predict}) {
        sub->add_option("--config", config, "Run config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "Output directory (overrides output_dir)");
    }
    auto* run = app.add_subcommand("run", "Run the coupled simulation");
    run->add_option("--config", config, "Run config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out, "Output directory (overrides output_dir)");
    run->add_option("--threads", threads, "Threads for the fluid substep")->check(CLI::PositiveNumber);
    run->add_option("--checkpoint-every", checkpoint_every, "Write a checkpoint every N steps")
        ->check(CLI::NonNegativeNumber);
    run->add_option("--resume", resume, "Resume from a checkpoint sidecar (.json)")->check(CLI::ExistingFile);
    auto* scale = app.add_subcommand("scale", "Emit the parabolically rescaled config");
    scale->add_option("--config", config, "Run config (JSON)")->required()->check(CLI::ExistingFile);
    scale->add_option("--lambda", lambda, "Scale factor")->check(CLI::PositiveNumber);
    scale->add_option("--out", out, "Write the scaled config here instead of stdout");
    auto* verify = app.add_subcommand("verify", "Run the verification suite");
    verify->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));
    verify->add_option("--threads", threads, "Threads for the fluid substep")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : int(ExitCode::config_error);
    }

    try {
        if (inspect->parsed()) {
            return cmd_inspect(config, out, false);
        }
        if (predict->parsed()) {
            return cmd_inspect(config, out, true);
        }
        if (run->parsed()) {
            return cmd_run(config, out, threads, checkpoint_every, resume);
        }
        if (scale->parsed()) {
            return cmd_scale(config, lambda, out);
        }
        return cmd_verify(level, threads);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return int(e.exit_code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return int(ExitCode::numerical_failure);
    }
}
