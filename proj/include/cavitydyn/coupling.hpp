#pragma once

// Rigid-body side of the reduced system in the body frame
//
//   A' + Omega x A = 0,   L' + Omega x L = 0,   Q' = Q [Omega]x,
//   Omega = I^{-1} (A - m_f),   m_f = integral of y x u,
//
// and the coupled step that closes the loop between Omega' and the fluid by
// Picard iteration on the end-of-step angular velocity.

#include "cavitydyn/fluid.hpp"
#include "cavitydyn/geometry.hpp"

#include <Eigen/SVD>

#include <memory>
#include <optional>
#include <sstream>

namespace cavitydyn {

struct OmegaSplit {
    /// I^{-1} A
    Vec3 bar = Vec3::Zero();
    /// -I^{-1} m_f
    Vec3 tilde = Vec3::Zero();
    /// bar + tilde
    Vec3 total = Vec3::Zero();
};

inline OmegaSplit omega_from_state(const Vec3& A, const Vec3& m_f, const PrincipalAxes& pa) {
    OmegaSplit w;
    w.bar = pa.solve(A);
    w.tilde = -pa.solve(m_f);
    w.total = pa.solve(A - m_f);
    return w;
}

/// A+ = R(-Omega_mid dt) A, the exact solution for constant Omega_mid.
inline Vec3 advance_angular_momentum(const Vec3& A, const Vec3& omega_mid, double dt) {
    return rodrigues_apply(-dt * omega_mid, A);
}

inline Vec3 advance_linear_momentum(const Vec3& L, const Vec3& omega_mid, double dt) {
    return rodrigues_apply(-dt * omega_mid, L);
}

/// Velocity of the origin recovered from L = m xi + m_F Omega x y_F.
inline Vec3 origin_velocity(const Vec3& L, const Vec3& omega, const InertiaData& in) {
    return (L - in.m_F * omega.cross(in.y_F)) / in.m;
}

/// Nearest rotation (polar factor).
inline Mat3 orthonormalize(const Mat3& Q) {
    const Eigen::JacobiSVD<Mat3> svd(Q, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().transpose();
}

inline Mat3 advance_orientation(const Mat3& Q, const Vec3& omega_mid, double dt) {
    return Q * rodrigues(dt * omega_mid);
}

struct RigidState {
    Vec3 A = Vec3::Zero();
    Vec3 L = Vec3::Zero();
    /// Body-to-inertial rotation.
    Mat3 Q = Mat3::Identity();
};

struct CoupledState {
    double t = 0.0;
    std::int64_t step = 0;
    fluid::FluidState fluid;
    RigidState rigid;
    OmegaSplit omega;
    Vec3 m_f = Vec3::Zero();
    /// Omega at the previous step, used to extrapolate the Picard start value.
    std::optional<Vec3> omega_prev;
};

struct StepReport {
    int picard_iterations = 0;
    double picard_residual = 0.0;
    std::vector<double> residual_history;
    double dt_used = 0.0;
    double dissipation_rate = 0.0;
    double kinetic_energy = 0.0;
    int cg_iterations = 0;
};

struct CouplingParams {
    /// Picard tolerance relative to max(|Omega^n|, 1).
    double picard_rel_tol = 1e-10;
    int max_picard = 50;
    int reorthonormalize_every = 100;
};

class PicardDivergence : public NumericalError {
  public:
    PicardDivergence(const std::string& what, std::vector<double> history)
        : NumericalError(what), history_(std::move(history)) {}
    const std::vector<double>& residual_history() const noexcept { return history_; }

  private:
    std::vector<double> history_;
};

class CoupledStepper {
  public:
    /// Full coupling; the fluid solver is shared with the caller.
    CoupledStepper(InertiaData inertia, std::shared_ptr<const fluid::FluidSolver> solver, CouplingParams params = {})
        : inertia_(std::move(inertia)), axes_(principal_axes(inertia_.I)), solver_(std::move(solver)),
          params_(params) {
        validate();
    }

    /// Dry-run: the fluid is switched off (u = 0, m_f = 0) and only the rigid
    /// Euler equation is integrated.
    CoupledStepper(InertiaData inertia, CouplingParams params)
        : inertia_(std::move(inertia)), axes_(principal_axes(inertia_.I)), params_(params) {
        validate();
    }

    bool dry_run() const { return solver_ == nullptr; }
    const InertiaData& inertia() const { return inertia_; }
    const PrincipalAxes& axes() const { return axes_; }
    const CouplingParams& params() const { return params_; }
    const fluid::FluidSolver* fluid_solver() const { return solver_.get(); }

    CoupledState initial_state(fluid::VelocityField u0, const Vec3& A0, const Vec3& L0, double t0 = 0.0) const {
        CoupledState s;
        s.t = t0;
        if (!dry_run()) {
            s.fluid = fluid::FluidState(std::move(u0), fluid::ScalarField(solver_->grid()));
            s.m_f = fluid::fluid_angular_momentum(s.fluid.u);
        }
        s.rigid.A = A0;
        s.rigid.L = L0;
        s.omega = omega_from_state(A0, s.m_f, axes_);
        return s;
    }

    std::pair<CoupledState, StepReport> step(const CoupledState& s, double dt) const {
        if (!(dt > 0.0)) {
            throw ConfigError("coupled step: dt must be positive");
        }
        const Vec3 omega_n = s.omega.total;
        const double tol = params_.picard_rel_tol * std::max(omega_n.norm(), 1.0);

        std::optional<fluid::FluidSolver::Predictor> pred;
        if (!dry_run()) {
            pred = solver_->predict(s.fluid.u, dt);
        }

        StepReport rep;
        rep.dt_used = dt;
        Vec3 guess = s.omega_prev ? Vec3(2.0 * omega_n - *s.omega_prev) : omega_n;
        Vec3 A_new, m_f_new = Vec3::Zero(), omega_new;
        fluid::FluidStepResult fr;
        bool converged = false;
        for (int it = 1; it <= params_.max_picard; ++it) {
            const Vec3 mid = 0.5 * (omega_n + guess);
            A_new = advance_angular_momentum(s.rigid.A, mid, dt);
            if (!dry_run()) {
                const Vec3 omega_dot = (guess - omega_n) / dt;
                fr = solver_->complete(*pred, mid, omega_dot, dt, false);
                m_f_new = fr.angular_momentum;
            }
            omega_new = axes_.solve(A_new - m_f_new);
            const double res = (omega_new - guess).norm();
            rep.residual_history.push_back(res);
            rep.picard_iterations = it;
            guess = omega_new;
            if (!std::isfinite(res)) {
                break;
            }
            if (res <= tol) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            std::ostringstream msg;
            msg << "Picard iteration did not converge in " << params_.max_picard << " iterations (tolerance " << tol
                << ", last residual " << rep.residual_history.back() << "); reduce dt";
            throw PicardDivergence(msg.str(), rep.residual_history);
        }
        rep.picard_residual = rep.residual_history.back();

        // Final midpoint from the converged end value.
        const Vec3 mid = 0.5 * (omega_n + omega_new);
        CoupledState out;
        out.t = s.t + dt;
        out.step = s.step + 1;
        out.rigid.A = A_new;
        out.rigid.L = advance_linear_momentum(s.rigid.L, mid, dt);
        out.rigid.Q = advance_orientation(s.rigid.Q, mid, dt);
        if (params_.reorthonormalize_every > 0 && out.step % params_.reorthonormalize_every == 0) {
            out.rigid.Q = orthonormalize(out.rigid.Q);
        }
        if (!dry_run()) {
            solver_->evaluate_functionals(fr);
            rep.dissipation_rate = fr.dissipation_rate;
            rep.kinetic_energy = fr.kinetic_energy;
            rep.cg_iterations = fr.cg_iterations;
            out.fluid = std::move(fr.state);
        }
        out.m_f = m_f_new;
        out.omega = omega_from_state(out.rigid.A, out.m_f, axes_);
        out.omega_prev = omega_n;
        return {std::move(out), std::move(rep)};
    }

  private:
    void validate() const {
        if (!(params_.picard_rel_tol > 0.0) || params_.max_picard < 1) {
            throw ConfigError("coupling: picard tolerance and iteration cap must be positive");
        }
    }

    InertiaData inertia_;
    PrincipalAxes axes_;
    std::shared_ptr<const fluid::FluidSolver> solver_;
    CouplingParams params_;
};

} // namespace cavitydyn
