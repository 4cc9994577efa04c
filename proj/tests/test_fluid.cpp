#include "cavitydyn/fluid/initial_conditions.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cavitydyn;
using namespace cavitydyn::fluid;

namespace {

MacGrid cube_grid(int n, double half = 0.5, Vec3 center = Vec3::Zero()) {
    MacGrid g;
    g.n = {n, n, n};
    g.h = Vec3::Constant(2.0 * half / n);
    g.corner = center - Vec3::Constant(half);
    return g;
}

MacGrid box_grid() {
    MacGrid g;
    g.n = {8, 6, 5};
    g.h = Vec3(0.125, 0.2, 0.16);
    g.corner = Vec3(-0.45, -0.62, -0.38);
    return g;
}

InitSpec random_init(std::uint64_t seed, double amp) {
    InitSpec s;
    s.kind = InitSpec::Kind::random_solenoidal;
    s.seed = seed;
    s.amplitude = amp;
    return s;
}

bool walls_are_zero(const VelocityField& u) {
    bool ok = true;
    u.for_each_face([&](int c, int i, int j, int k) {
        const Index3 idx{i, j, k};
        if ((idx[c] == 0 || idx[c] == u.grid.n[c]) && u(c, i, j, k) != 0.0) {
            ok = false;
        }
    });
    return ok;
}

double max_diff(const VelocityField& a, const VelocityField& b) {
    double m = 0.0;
    for (int c = 0; c < 3; ++c) {
        for (std::size_t n = 0; n < a.comp[c].size(); ++n) {
            m = std::max(m, std::abs(a.comp[c][n] - b.comp[c][n]));
        }
    }
    return m;
}

} // namespace

TEST(Fluid, ZeroInitIsZero) {
    FluidSolver solver(cube_grid(8), {0.5, 0.5});
    const VelocityField u = initialize_velocity(solver, InitSpec{});
    EXPECT_EQ(u.max_abs(), 0.0);
    EXPECT_EQ(fluid_kinetic_energy(u), 0.0);
    EXPECT_EQ(mean_velocity(u).norm(), 0.0);
    EXPECT_EQ(fluid_angular_momentum(u).norm(), 0.0);
    EXPECT_EQ(dissipation_rate(u, 0.5), 0.0);
}

TEST(Fluid, RandomInitIsSolenoidalWithRequestedRms) {
    for (const MacGrid& g : {cube_grid(12), box_grid()}) {
        FluidSolver solver(g, {0.5, 0.5});
        const VelocityField u = initialize_velocity(solver, random_init(1, 0.7));
        EXPECT_LE(max_divergence(u), divergence_tolerance(u));
        EXPECT_GT(fluid_kinetic_energy(u), 0.0);
        EXPECT_NEAR(std::sqrt(fluid_kinetic_energy(u) / g.volume()), 0.7, 1e-12);
        EXPECT_TRUE(walls_are_zero(u));
        const double diam = g.extent().norm();
        EXPECT_LE(mean_velocity(u).norm(), 10.0 * divergence_tolerance(u) * diam);
    }
}

TEST(Fluid, RandomInitIsSeedDeterministic) {
    FluidSolver solver(box_grid(), {0.5, 0.5});
    const VelocityField a = initialize_velocity(solver, random_init(42, 1.0));
    const VelocityField b = initialize_velocity(solver, random_init(42, 1.0));
    const VelocityField c = initialize_velocity(solver, random_init(43, 1.0));
    EXPECT_EQ(max_diff(a, b), 0.0);
    EXPECT_GT(max_diff(a, c), 0.1);
}

TEST(Fluid, InitRejectsNonPositiveAmplitude) {
    FluidSolver solver(cube_grid(6), {0.5, 0.5});
    EXPECT_THROW(initialize_velocity(solver, random_init(1, 0.0)), ConfigError);
    InitSpec v;
    v.kind = InitSpec::Kind::vortex;
    v.amplitude = -1.0;
    EXPECT_THROW(initialize_velocity(solver, v), ConfigError);
}

TEST(Fluid, VortexAboutE3HasAxialAngularMomentum) {
    FluidSolver solver(cube_grid(12), {0.5, 0.5});
    InitSpec v;
    v.kind = InitSpec::Kind::vortex;
    v.amplitude = 1.0;
    v.axis = Vec3::UnitZ();
    const VelocityField u = initialize_velocity(solver, v);
    const Vec3 mf = fluid_angular_momentum(u);
    EXPECT_GT(std::abs(mf.z()), 0.0);
    EXPECT_LT(std::abs(mf.x()), 1e-10 * std::abs(mf.z()));
    EXPECT_LT(std::abs(mf.y()), 1e-10 * std::abs(mf.z()));
    EXPECT_LE(max_divergence(u), divergence_tolerance(u));
}

TEST(Fluid, AngularMomentumReferencePointShift) {
    const MacGrid g = box_grid();
    FluidSolver solver(g, {0.5, 0.5});
    const VelocityField u = initialize_velocity(solver, random_init(9, 1.0));
    const Vec3 ref(0.03, -0.02, 0.05);
    const Vec3 a = fluid_angular_momentum(u);
    const Vec3 b = fluid_angular_momentum_about(u, ref);
    const Vec3 shift = ref.cross(mean_velocity(u)) * g.volume();
    EXPECT_LT((a - b - shift).norm(), 1e-14 * a.norm());
    EXPECT_LT((a - b).norm(), 1e-8 * a.norm());
}

TEST(Fluid, ZeroStateStaysZeroUnderRotation) {
    FluidSolver solver(box_grid(), {0.5, 0.5});
    FluidState s{VelocityField(box_grid()), ScalarField(box_grid())};
    const double dt = 0.5 * solver.viscous_dt_limit();
    const FluidStepResult r = solver.step(s, Vec3(0.3, -2.0, 5.0), Vec3::Zero(), dt);
    EXPECT_EQ(r.state.u.max_abs(), 0.0);
}

TEST(Fluid, SingleStepMatchesHandStencil) {
    // 4^3 cells of width 1/4, nu = 1, Omega = Omega' = 0. Two isolated x-velocities:
    // one fully interior, one next to the low y wall.
    const MacGrid g = cube_grid(4);
    FluidSolver solver(g, {1.0, 0.5});
    VelocityField u(g);
    u(0, 2, 1, 1) = 1.0;
    u(0, 2, 0, 3) = -2.0;
    const double dt = 0.004;
    const FluidStepResult r = solver.step(FluidState{u, ScalarField(g)}, Vec3::Zero(), Vec3::Zero(), dt);
    const double ih2 = 16.0;
    VelocityField expect = u;
    // Interior face: -6/h^2 on itself, +1/h^2 on each of its 6 neighbours.
    expect(0, 2, 1, 1) += dt * ih2 * -6.0;
    for (auto [i, j, k] : {Index3{1, 1, 1}, Index3{3, 1, 1}, Index3{2, 2, 1}, Index3{2, 0, 1}, Index3{2, 1, 2},
                           Index3{2, 1, 0}}) {
        expect(0, i, j, k) += dt * ih2 * 1.0;
    }
    // Wall-adjacent face: the ghost -u adds a further -1/h^2; the top z wall as well.
    expect(0, 2, 0, 3) += dt * ih2 * -2.0 * -8.0;
    for (auto [i, j, k] : {Index3{1, 0, 3}, Index3{3, 0, 3}, Index3{2, 1, 3}, Index3{2, 0, 2}}) {
        expect(0, i, j, k) += dt * ih2 * -2.0;
    }
    EXPECT_LT(max_diff(r.pre_projection, expect), 1e-14);
}

TEST(Fluid, AngularAccelerationForcingBeforeAndAfterProjection) {
    const MacGrid g = box_grid();
    FluidSolver solver(g, {0.5, 0.5});
    const double dt = 0.5 * solver.viscous_dt_limit();
    const FluidStepResult r =
        solver.step(FluidState{VelocityField(g), ScalarField(g)}, Vec3(1, 2, 3), Vec3::UnitZ(), dt);
    double err = 0.0;
    r.pre_projection.for_each_face([&](int c, int i, int j, int k) {
        const Index3 idx{i, j, k};
        const double want =
            (idx[c] == 0 || idx[c] == g.n[c]) ? 0.0 : -dt * Vec3::UnitZ().cross(g.face_position(c, i, j, k))[c];
        err = std::max(err, std::abs(r.pre_projection(c, i, j, k) - want));
    });
    EXPECT_LT(err, 1e-15);
    const VelocityField proj = solver.project(r.pre_projection).u;
    EXPECT_EQ(max_diff(proj, r.state.u), 0.0);
    EXPECT_TRUE(walls_are_zero(r.state.u));
}

TEST(Fluid, ProjectionIsIdempotent) {
    const MacGrid g = box_grid();
    FluidSolver solver(g, {0.5, 0.5});
    const VelocityField u = initialize_velocity(solver, random_init(3, 1.0));
    const ProjectionResult p = solver.project(u);
    EXPECT_LT(max_diff(p.u, u), 1e-10 * u.max_abs());
    double pmax = 0.0;
    for (double v : p.phi.data) {
        pmax = std::max(pmax, std::abs(v));
    }
    EXPECT_LT(pmax, 1e-10);
}

TEST(Fluid, ProjectionAnnihilatesGradients) {
    const MacGrid g = box_grid();
    FluidSolver solver(g, {0.5, 0.5});
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    ScalarField phi(g);
    for (double& v : phi.data) {
        v = U(rng);
    }
    const VelocityField grad = gradient(phi);
    const ProjectionResult p = solver.project(grad);
    EXPECT_LT(p.u.max_abs(), 1e-9 * grad.max_abs());
}

TEST(Fluid, ProjectionReducesDivergenceOfRandomField) {
    const MacGrid g = box_grid();
    for (auto pre : {Preconditioner::spectral, Preconditioner::none}) {
        FluidSolver solver(g, {0.5, 0.5}, 1, pre);
        std::mt19937_64 rng(23);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        VelocityField u(g);
        for (auto& comp : u.comp) {
            for (double& v : comp) {
                v = U(rng);
            }
        }
        u.zero_normal_boundary();
        const ProjectionResult p = solver.project(u);
        EXPECT_LE(max_divergence(p.u), divergence_tolerance(p.u));
        EXPECT_TRUE(walls_are_zero(p.u));
        // Orthogonal projection: never increases the energy.
        EXPECT_LE(fluid_kinetic_energy(p.u), fluid_kinetic_energy(u));
        EXPECT_NEAR(inner_product(p.u, u), fluid_kinetic_energy(p.u), 1e-9 * fluid_kinetic_energy(u));
    }
}

TEST(Fluid, CgFailureReportsResidualHistory) {
    const MacGrid g = box_grid();
    PressureSolver ps(g, Preconditioner::none);
    ps.set_max_iterations(2);
    std::vector<double> b(g.cell_count());
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (double& v : b) {
        v = U(rng);
    }
    try {
        ps.solve(b);
        FAIL() << "expected non-convergence";
    } catch (const SolverDivergence& e) {
        EXPECT_EQ(e.residual_history().size(), 2u);
        EXPECT_NE(std::string(e.what()).find("residual history"), std::string::npos);
    }
}

TEST(Fluid, DefaultCgIterationCap) {
    PressureSolver ps(cube_grid(16));
    EXPECT_EQ(ps.max_iterations(), 2560);
}

TEST(Fluid, KineticEnergyOfConstantField) {
    const MacGrid g = box_grid();
    VelocityField u(g);
    const Vec3 c(0.3, -1.2, 2.0);
    u.for_each_face([&](int comp, int i, int j, int k) { u(comp, i, j, k) = c[comp]; });
    EXPECT_NEAR(fluid_kinetic_energy(u), c.squaredNorm() * g.volume(), 1e-13);
    EXPECT_LT((mean_velocity(u) - c).norm(), 1e-14);
}

TEST(Fluid, ShearFieldStencil) {
    const MacGrid g = box_grid();
    const double gamma = 1.7, nu = 0.5;
    VelocityField u(g);
    u.for_each_face([&](int c, int i, int j, int k) {
        if (c == 0) {
            u(c, i, j, k) = gamma * g.face_position(c, i, j, k).y();
        }
    });
    const double d = 2.0 * nu * gradient_norm_sq(u, WallTreatment::extrapolate);
    EXPECT_NEAR(d, 2.0 * nu * gamma * gamma * g.volume(), 1e-12);
}

TEST(Fluid, DissipationConvergesUnderRefinement) {
    // Stream function psi = sin^2(pi x) sin^2(pi y) on the unit cube, damped by sin^2(pi z).
    auto field = [](int n) {
        MacGrid g = cube_grid(n, 0.5, Vec3::Constant(0.5));
        VelocityField u(g);
        const double pi = std::numbers::pi;
        u.for_each_face([&](int c, int i, int j, int k) {
            const Vec3 y = g.face_position(c, i, j, k);
            const double sx = std::sin(pi * y.x()), sy = std::sin(pi * y.y()), sz = std::sin(pi * y.z());
            if (c == 0) {
                u(c, i, j, k) = sx * sx * 2.0 * pi * sy * std::cos(pi * y.y()) * sz * sz;
            } else if (c == 1) {
                u(c, i, j, k) = -sy * sy * 2.0 * pi * sx * std::cos(pi * y.x()) * sz * sz;
            }
        });
        u.zero_normal_boundary();
        return dissipation_rate(u, 0.5);
    };
    const double d8 = field(8), d16 = field(16), d32 = field(32);
    EXPECT_LT(std::abs(d16 - d32), std::abs(d8 - d16));
    EXPECT_LT(std::abs(d16 - d32), 0.05 * d32);
}

TEST(Fluid, LaplacianEnergyIdentity) {
    const MacGrid g = box_grid();
    FluidSolver solver(g, {0.5, 0.5});
    const VelocityField u = initialize_velocity(solver, random_init(5, 1.0));
    const double lhs = inner_product(u, laplacian(u));
    EXPECT_NEAR(lhs, -gradient_norm_sq(u), 1e-12 * gradient_norm_sq(u));
}

TEST(Fluid, CoriolisIsOrthogonalToVelocity) {
    const MacGrid g = box_grid();
    FluidSolver solver(g, {0.5, 0.5});
    const VelocityField u = initialize_velocity(solver, random_init(8, 1.0));
    const Vec3 omega(0.4, -3.0, 7.0);
    fluid::detail::for_each_cell_velocity(u, [&](int, int, int, const Vec3& v) {
        EXPECT_LE(std::abs(coriolis_acceleration(omega, v).dot(v)), 1e-15 * omega.norm() * v.squaredNorm() + 1e-300);
    });
}

TEST(Fluid, EnergyDecreasesWithoutRotation) {
    const MacGrid g = cube_grid(10);
    FluidSolver solver(g, {0.5, 0.5});
    FluidState s{initialize_velocity(solver, random_init(2, 1.0)), ScalarField(g)};
    const double dt = solver.stable_dt(s.u);
    double e = fluid_kinetic_energy(s.u);
    for (int n = 0; n < 50; ++n) {
        FluidStepResult r = solver.step(s, Vec3::Zero(), Vec3::Zero(), dt);
        EXPECT_LT(r.kinetic_energy, e) << "step " << n;
        EXPECT_LE(max_divergence(r.state.u), divergence_tolerance(r.state.u));
        EXPECT_TRUE(walls_are_zero(r.state.u));
        e = r.kinetic_energy;
        s = std::move(r.state);
    }
}

TEST(Fluid, CflViolationNamesConstraint) {
    const MacGrid g = cube_grid(8);
    FluidSolver solver(g, {0.5, 0.5});
    const VelocityField u = initialize_velocity(solver, random_init(2, 50.0));
    try {
        solver.step(FluidState{u, ScalarField(g)}, Vec3::Zero(), Vec3::Zero(), 1.01 * solver.stable_dt(u));
        FAIL() << "expected CFL error";
    } catch (const CflError& e) {
        EXPECT_NE(std::string(e.what()).find("advective"), std::string::npos);
    }
    try {
        solver.step(FluidState{VelocityField(g), ScalarField(g)}, Vec3::Zero(), Vec3::Zero(),
                    2.0 * solver.viscous_dt_limit());
        FAIL() << "expected CFL error";
    } catch (const CflError& e) {
        EXPECT_NE(std::string(e.what()).find("viscous"), std::string::npos);
    }
}

TEST(Fluid, NanIsDetected) {
    const MacGrid g = cube_grid(6);
    FluidSolver solver(g, {0.5, 0.5});
    VelocityField u(g);
    EXPECT_THROW(solver.step(FluidState{u, ScalarField(g)}, Vec3(std::nan(""), 0, 0), Vec3::Zero(), 1e-4),
                 NumericalError);
}

TEST(Fluid, ThreadedStepMatchesSerial) {
    const MacGrid g = cube_grid(12);
    FluidSolver serial(g, {0.5, 0.5}, 1);
    FluidSolver threaded(g, {0.5, 0.5}, 4);
    const FluidState s{initialize_velocity(serial, random_init(4, 1.0)), ScalarField(g)};
    const double dt = serial.stable_dt(s.u);
    const Vec3 om(1, 2, 3), omd(0.1, 0.2, 0.3);
    const FluidStepResult a = serial.step(s, om, omd, dt);
    const FluidStepResult b = threaded.step(s, om, omd, dt);
    EXPECT_LE(max_diff(a.state.u, b.state.u), 1e-12 * a.state.u.max_abs());
}
