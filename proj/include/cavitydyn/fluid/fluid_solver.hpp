#pragma once

// One explicit projection step of the relative-velocity equation in the body
// frame:
//
//   u* = u + dt (nu Lap u - (u.grad)u - 2 Omega x u - Omega' x y)
//   u+ = u* - grad phi,   -div grad phi = -div u*
//
// The step is split into a predictor (everything that does not depend on the
// rigid angular velocity) and a completion, so that the coupling can re-run
// the completion with refined Omega, Omega' without recomputing the predictor.

#include "cavitydyn/fluid/functionals.hpp"
#include "cavitydyn/fluid/operators.hpp"
#include "cavitydyn/fluid/pressure_solver.hpp"

#include <optional>
#include <sstream>

namespace cavitydyn::fluid {

struct FluidParams {
    double nu = 0.5;
    double dt_safety = 0.5;
};

struct ProjectionResult {
    VelocityField u;
    ScalarField phi;
    int iterations = 0;
};

struct FluidStepResult {
    FluidState state;
    VelocityField pre_projection;
    double dissipation_rate = 0.0;
    double kinetic_energy = 0.0;
    Vec3 angular_momentum = Vec3::Zero();
    int cg_iterations = 0;
};

class FluidSolver {
  public:
    struct Predictor {
        FaceVelocities face_velocity;
        VelocityField base;
    };

    FluidSolver(const MacGrid& grid, FluidParams params, int threads = 1,
                Preconditioner pre = Preconditioner::spectral)
        : grid_(grid), params_(params), threads_(std::max(threads, 1)), poisson_(grid, pre) {
        if (!(params_.nu > 0.0)) {
            throw ConfigError("fluid: nu must be positive");
        }
        if (!(params_.dt_safety > 0.0 && params_.dt_safety <= 1.0)) {
            throw ConfigError("fluid: dt_safety must lie in (0, 1]");
        }
    }

    const MacGrid& grid() const { return grid_; }
    const FluidParams& params() const { return params_; }
    const PressureSolver& pressure_solver() const { return poisson_; }

    double viscous_dt_limit() const {
        const double h = grid_.min_spacing();
        return params_.dt_safety * h * h / (6.0 * params_.nu);
    }

    /// Largest admissible step for the given field.
    double stable_dt(const VelocityField& u) const {
        double dt = viscous_dt_limit();
        for (int a = 0; a < 3; ++a) {
            const double umax = u.max_abs(a);
            if (umax > 0.0) {
                dt = std::min(dt, params_.dt_safety * grid_.h[a] / umax);
            }
        }
        return dt;
    }

    void check_cfl(const VelocityField& u, double dt) const {
        const double slack = 1.0 + 1e-12;
        const double visc = viscous_dt_limit();
        if (dt > visc * slack) {
            std::ostringstream msg;
            msg << "CFL violation: dt = " << dt << " exceeds the viscous limit dt_safety*h^2/(6 nu) = " << visc;
            throw CflError(msg.str());
        }
        for (int a = 0; a < 3; ++a) {
            const double umax = u.max_abs(a);
            if (umax > 0.0 && dt > params_.dt_safety * grid_.h[a] / umax * slack) {
                std::ostringstream msg;
                msg << "CFL violation: dt = " << dt << " exceeds the advective limit dt_safety*h/|u|_inf on axis "
                    << a + 1 << " (= " << params_.dt_safety * grid_.h[a] / umax << ")";
                throw CflError(msg.str());
            }
        }
    }

    /// Discrete Leray projection.
    ProjectionResult project(const VelocityField& u_star) const {
        ScalarField div = divergence(u_star);
        for (double& v : div.data) {
            v = -v;
        }
        PoissonResult sol = poisson_.solve(std::move(div.data));
        ProjectionResult out;
        out.u = u_star;
        const VelocityField grad = gradient(sol.phi);
        for (int c = 0; c < 3; ++c) {
            for (std::size_t n = 0; n < out.u.comp[c].size(); ++n) {
                out.u.comp[c][n] -= grad.comp[c][n];
            }
        }
        out.u.zero_normal_boundary();
        out.phi = std::move(sol.phi);
        out.iterations = sol.iterations;
        return out;
    }

    Predictor predict(const VelocityField& u, double dt) const {
        check_cfl(u, dt);
        Predictor pr;
        pr.face_velocity = interpolate_face_velocities(u);
        pr.base = u;
        const VelocityField lap = laplacian(u, threads_);
        const VelocityField adv = advection(u, pr.face_velocity, threads_);
        for (int c = 0; c < 3; ++c) {
            auto& b = pr.base.comp[c];
            for (std::size_t n = 0; n < b.size(); ++n) {
                b[n] += dt * (params_.nu * lap.comp[c][n] - adv.comp[c][n]);
            }
        }
        return pr;
    }

    /// With `functionals` false only the angular momentum is evaluated.
    FluidStepResult complete(const Predictor& pr, const Vec3& omega, const Vec3& omega_dot, double dt,
                             bool functionals = true) const {
        FluidStepResult out;
        out.pre_projection = pr.base;
        const VelocityField rot = rotating_frame_terms(grid_, pr.face_velocity, omega, omega_dot);
        for (int c = 0; c < 3; ++c) {
            auto& u = out.pre_projection.comp[c];
            for (std::size_t n = 0; n < u.size(); ++n) {
                u[n] -= dt * rot.comp[c][n];
            }
        }
        out.pre_projection.zero_normal_boundary();
        ProjectionResult proj = project(out.pre_projection);
        if (!proj.u.all_finite()) {
            throw NumericalError("fluid step produced non-finite velocities (NaN/Inf detected after projection)");
        }
        out.state.u = std::move(proj.u);
        out.state.p = std::move(proj.phi);
        for (double& v : out.state.p.data) {
            v /= dt;
        }
        out.cg_iterations = proj.iterations;
        if (functionals) {
            evaluate_functionals(out);
        }
        out.angular_momentum = fluid_angular_momentum(out.state.u);
        return out;
    }

    void evaluate_functionals(FluidStepResult& r) const {
        r.dissipation_rate = dissipation_rate(r.state.u, params_.nu);
        r.kinetic_energy = fluid_kinetic_energy(r.state.u);
    }

    /// Full step; functionals are evaluated at the new state.
    FluidStepResult step(const FluidState& state, const Vec3& omega, const Vec3& omega_dot, double dt) const {
        return complete(predict(state.u, dt), omega, omega_dot, dt);
    }

  private:
    MacGrid grid_;
    FluidParams params_;
    int threads_;
    PressureSolver poisson_;
};

} // namespace cavitydyn::fluid
