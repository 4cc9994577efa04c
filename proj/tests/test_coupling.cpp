#include "cavitydyn/coupling.hpp"

#include <boost/numeric/odeint.hpp>
#include <gtest/gtest.h>

#include <random>

using namespace cavitydyn;

namespace {

GeometrySpec small_spec() {
    GeometrySpec s;
    s.outer_half_extents = Vec3(0.75, 0.7, 0.6);
    s.cavity_half_extents = Vec3(0.5, 0.45, 0.4);
    s.cavity_offset = Vec3(0.05, -0.03, 0.02);
    s.rho_B = 1.0;
    s.nu = 0.5;
    return s;
}

struct Rig {
    InertiaData inertia;
    std::shared_ptr<fluid::FluidSolver> solver;
};

Rig make_setup(const GeometrySpec& s, int n) {
    Rig st;
    st.inertia = compute_mass_properties(s);
    const fluid::MacGrid g = fluid::MacGrid::for_cavity(s, st.inertia, {n, n, n});
    st.solver = std::make_shared<fluid::FluidSolver>(g, fluid::FluidParams{s.nu, 0.5});
    return st;
}

fluid::VelocityField random_u(const fluid::FluidSolver& solver, double amp, std::uint64_t seed = 1) {
    fluid::InitSpec init;
    init.kind = fluid::InitSpec::Kind::random_solenoidal;
    init.amplitude = amp;
    init.seed = seed;
    return fluid::initialize_velocity(solver, init);
}

/// Rigid Euler equation in terms of A: A' = -I^{-1}A x A.
std::vector<Vec3> euler_reference(const Mat3& I, const Vec3& A0, double dt, int steps) {
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
    std::vector<Vec3> out;
    std::vector<double> times;
    for (int n = 0; n <= steps; ++n) {
        times.push_back(n * dt);
    }
    ode::integrate_times(stepper, rhs, a, times.begin(), times.end(), dt,
                         [&](const State& x, double) { out.push_back(Iinv * Vec3(x[0], x[1], x[2])); });
    return out;
}

} // namespace

TEST(Coupling, OmegaFromStateWithoutFluid) {
    const PrincipalAxes pa = principal_axes(Vec3(1, 2, 3).asDiagonal());
    const OmegaSplit w = omega_from_state(Vec3(1, 4, 6), Vec3::Zero(), pa);
    EXPECT_LT((w.total - Vec3(1, 2, 2)).norm(), 1e-15);
    EXPECT_EQ(w.tilde.norm(), 0.0);
    EXPECT_EQ(w.bar, w.total);
}

TEST(Coupling, OmegaFromStateDiagonalArithmetic) {
    const PrincipalAxes pa = principal_axes(Vec3(1, 2, 3).asDiagonal());
    const OmegaSplit w = omega_from_state(Vec3(0, 0, 3), Vec3(0, 0, 1), pa);
    EXPECT_LT((w.bar - Vec3(0, 0, 1)).norm(), 1e-15);
    EXPECT_LT((w.tilde - Vec3(0, 0, -1.0 / 3.0)).norm(), 1e-15);
    EXPECT_LT((w.total - Vec3(0, 0, 2.0 / 3.0)).norm(), 1e-15);
}

TEST(Coupling, OmegaTildeConsistency) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const InertiaData in = compute_mass_properties(small_spec());
    const PrincipalAxes pa = principal_axes(in.I);
    for (int t = 0; t < 100; ++t) {
        const Vec3 A(U(rng), U(rng), U(rng)), mf(U(rng), U(rng), U(rng));
        const OmegaSplit w = omega_from_state(A, mf, pa);
        EXPECT_LT((in.I * w.tilde + mf).norm(), 1e-13);
        EXPECT_LT((in.I * w.bar - A).norm(), 1e-13);
        EXPECT_LT((w.bar + w.tilde - w.total).norm(), 1e-13);
    }
}

TEST(Coupling, AngularMomentumParallelToOmegaIsFixed) {
    const Vec3 A(0.3, -0.4, 1.2);
    const Vec3 out = advance_angular_momentum(A, 2.5 * A, 0.01);
    EXPECT_LT((out - A).norm(), 1e-15 * A.norm() * 4);
}

TEST(Coupling, AngularMomentumClosedForm) {
    const double omega = 1.3, dt = 0.37;
    const Vec3 out = advance_angular_momentum(Vec3::UnitX(), Vec3(0, 0, omega), dt);
    EXPECT_LT((out - Vec3(std::cos(omega * dt), -std::sin(omega * dt), 0.0)).norm(), 1e-15);
    EXPECT_EQ(advance_angular_momentum(Vec3::UnitX(), Vec3::Zero(), dt), Vec3::UnitX());
}

TEST(Coupling, MomentaModuliSurviveManyRandomSteps) {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const Vec3 A0(0.7, -1.1, 2.3), L0(-0.2, 0.5, 0.1);
    Vec3 A = A0, L = L0;
    double worst_A = 0.0, worst_L = 0.0;
    for (int n = 0; n < 100000; ++n) {
        const Vec3 w(U(rng), U(rng), U(rng));
        A = advance_angular_momentum(A, 5.0 * w, 1e-2);
        L = advance_linear_momentum(L, 5.0 * w, 1e-2);
        worst_A = std::max(worst_A, std::abs(A.norm() / A0.norm() - 1.0));
        worst_L = std::max(worst_L, std::abs(L.norm() / L0.norm() - 1.0));
    }
    EXPECT_LE(worst_A, 1e-12);
    EXPECT_LE(worst_L, 1e-12);
}

TEST(Coupling, OriginVelocityWithZeroLinearMomentum) {
    const InertiaData in = compute_mass_properties(small_spec());
    const Vec3 omega(0.1, 0.2, 0.3);
    const Vec3 xi = origin_velocity(Vec3::Zero(), omega, in);
    EXPECT_LT((xi + in.m_F / in.m * omega.cross(in.y_F)).norm(), 1e-16);
    EXPECT_EQ(advance_linear_momentum(Vec3::Zero(), omega, 0.1), Vec3::Zero());
}

TEST(Coupling, OrientationUnderConstantRate) {
    const Mat3 Q0 = Mat3::Identity();
    EXPECT_EQ(advance_orientation(Q0, Vec3::Zero(), 0.1), Q0);
    const double omega = 0.8, dt = 1e-3;
    Mat3 Q = Q0;
    for (int n = 0; n < 1000; ++n) {
        Q = advance_orientation(Q, Vec3(0, 0, omega), dt);
    }
    const Mat3 want = Eigen::AngleAxisd(omega * 1.0, Vec3::UnitZ()).toRotationMatrix();
    EXPECT_LT((Q - want).norm(), 1e-12);
    EXPECT_LT((orthonormalize(Q).transpose() * orthonormalize(Q) - Mat3::Identity()).norm(), 1e-15);
}

TEST(Coupling, EquilibriumIsFixedPoint) {
    const Rig st = make_setup(small_spec(), 8);
    CoupledStepper stepper(st.inertia, st.solver);
    const PrincipalAxes& pa = stepper.axes();
    for (int j = 0; j < 3; ++j) {
        const Vec3 A0 = pa.lambda[j] * 2.0 * pa.axis(j);
        CoupledState s = stepper.initial_state(fluid::VelocityField(st.solver->grid()), A0, Vec3::Zero());
        const double dt = 1e-3;
        for (int n = 0; n < 20; ++n) {
            auto [next, rep] = stepper.step(s, dt);
            EXPECT_LE(rep.picard_iterations, 2);
            EXPECT_LT((next.rigid.A - s.rigid.A).norm(), 1e-12 * A0.norm());
            EXPECT_LT((next.omega.total - s.omega.total).norm(), 1e-12 * s.omega.total.norm());
            EXPECT_LT(next.fluid.u.max_abs(), 1e-12);
            s = std::move(next);
        }
    }
}

TEST(Coupling, CachedOmegaStaysConsistent) {
    const Rig st = make_setup(small_spec(), 8);
    CoupledStepper stepper(st.inertia, st.solver);
    CoupledState s = stepper.initial_state(random_u(*st.solver, 1.0), st.inertia.I * Vec3(0.5, 1.0, 3.0),
                                           Vec3(0.1, 0, 0));
    for (int n = 0; n < 20; ++n) {
        s = stepper.step(s, 1e-3).first;
        const OmegaSplit w = omega_from_state(s.rigid.A, s.m_f, stepper.axes());
        EXPECT_LT((w.total - s.omega.total).norm(), 1e-13 * w.total.norm());
        EXPECT_LT((s.m_f - fluid::fluid_angular_momentum(s.fluid.u)).norm(), 1e-13 * (1.0 + s.m_f.norm()));
    }
}

TEST(Coupling, PicardResidualDecreasesMonotonically) {
    const Rig st = make_setup(small_spec(), 10);
    CoupledStepper stepper(st.inertia, st.solver);
    CoupledState s =
        stepper.initial_state(random_u(*st.solver, 2.0), st.inertia.I * Vec3(2.0, -1.0, 6.0), Vec3::Zero());
    for (int n = 0; n < 10; ++n) {
        auto [next, rep] = stepper.step(s, 1e-3);
        for (std::size_t k = 1; k < rep.residual_history.size(); ++k) {
            EXPECT_LT(rep.residual_history[k], rep.residual_history[k - 1]) << "step " << n << " iteration " << k;
        }
        s = std::move(next);
    }
}

TEST(Coupling, PicardFailureAdvisesSmallerStep) {
    const Rig st = make_setup(small_spec(), 8);
    CouplingParams p;
    p.max_picard = 1;
    CoupledStepper stepper(st.inertia, st.solver, p);
    const CoupledState s =
        stepper.initial_state(random_u(*st.solver, 1.0), st.inertia.I * Vec3(1.0, 2.0, 3.0), Vec3::Zero());
    try {
        stepper.step(s, 1e-3);
        FAIL() << "expected Picard failure";
    } catch (const PicardDivergence& e) {
        EXPECT_NE(std::string(e.what()).find("reduce dt"), std::string::npos);
    }
}

TEST(Coupling, DryRunMatchesRigidEulerIntegration) {
    const InertiaData in = compute_mass_properties(small_spec());
    CoupledStepper stepper(in, CouplingParams{});
    const Vec3 omega0(0.4, 1.0, -0.3);
    const Vec3 A0 = in.I * omega0;
    const double dt = 2e-4;
    const int steps = 50000;
    const std::vector<Vec3> ref = euler_reference(in.I, A0, dt, steps);
    CoupledState s = stepper.initial_state({}, A0, Vec3::Zero());
    double worst = 0.0;
    const double e0 = omega0.dot(in.I * omega0);
    double worst_e = 0.0;
    for (int n = 1; n <= steps; ++n) {
        s = stepper.step(s, dt).first;
        worst = std::max(worst, (s.omega.total - ref[n]).norm());
        worst_e = std::max(worst_e, std::abs(s.omega.total.dot(in.I * s.omega.total) / e0 - 1.0));
    }
    EXPECT_LT(worst, 1e-6 * omega0.norm());
    EXPECT_LT(worst_e, 1e-10);
    EXPECT_LT((s.rigid.Q * s.rigid.A - A0).norm(), 1e-12 * A0.norm());
}

TEST(Coupling, FirstOrderConvergenceInDt) {
    const Rig st = make_setup(small_spec(), 8);
    CoupledStepper stepper(st.inertia, st.solver);
    const fluid::VelocityField u0 = random_u(*st.solver, 1.0, 4);
    const Vec3 A0 = st.inertia.I * Vec3(1.0, 0.5, 2.5);
    const double T = 0.2;
    auto run = [&](int steps) {
        CoupledState s = stepper.initial_state(u0, A0, Vec3::Zero());
        for (int n = 0; n < steps; ++n) {
            s = stepper.step(s, T / steps).first;
        }
        return s.omega.total;
    };
    const Vec3 w1 = run(200), w2 = run(400), w4 = run(800);
    const double order = std::log2((w1 - w2).norm() / (w2 - w4).norm());
    EXPECT_GE(order, 0.9);
}
