#include "cavitydyn/geometry.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cavitydyn;

namespace {

double rel_err(const Mat3& a, const Mat3& b) { return (a - b).norm() / b.norm(); }

GeometrySpec random_spec(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    GeometrySpec s;
    for (int i = 0; i < 3; ++i) {
        s.outer_half_extents[i] = 0.5 + U(rng);
        s.cavity_half_extents[i] = (0.2 + 0.5 * U(rng)) * s.outer_half_extents[i];
        const double room = s.outer_half_extents[i] - s.cavity_half_extents[i];
        s.cavity_offset[i] = (2.0 * U(rng) - 1.0) * 0.8 * room;
    }
    s.rho_B = 0.5 + 2.0 * U(rng);
    s.nu = 0.5;
    return s;
}

GeometrySpec egg_like() {
    GeometrySpec s;
    s.outer_half_extents = Vec3(0.65, 0.65, 0.55);
    s.cavity_half_extents = Vec3(0.5, 0.5, 0.5);
    s.cavity_offset = Vec3::Zero();
    s.rho_B = 1.0;
    s.nu = 0.5;
    return s;
}

} // namespace

TEST(Geometry, UnitSolidBrickHasOneSixthDiagonal) {
    // Half-extents 0.5, density 1, mass 1: m (1 + 1) / 12.
    const Mat3 I = detail::brick_inertia_about_center(1.0, Vec3(0.5, 0.5, 0.5));
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(I(i, i), 1.0 / 6.0, 1e-15);
    }
    EXPECT_EQ(I(0, 1), 0.0);
}

TEST(Geometry, CenteredCubeHasOriginCentersAndAdditiveInertia) {
    GeometrySpec s;
    s.outer_half_extents = Vec3(1, 1, 1);
    s.cavity_half_extents = Vec3(0.5, 0.5, 0.5);
    s.cavity_offset = Vec3::Zero();
    s.rho_B = 2.0;
    const InertiaData d = compute_mass_properties(s);
    EXPECT_EQ(d.y_F.norm(), 0.0);
    EXPECT_EQ(d.y_c.norm(), 0.0);
    EXPECT_LT((d.I - (d.I_B + d.I_F)).norm(), 1e-15);
    EXPECT_EQ(d.m, d.m_B + d.m_F);
    EXPECT_NEAR(d.m_F, 1.0, 1e-15);
    EXPECT_NEAR(d.m_B, 2.0 * (8.0 - 1.0), 1e-13);
}

TEST(Geometry, ComposeWithZeroOffsetIsSum) {
    Mat3 IB;
    IB << 3, 0.1, 0, 0.1, 2, 0.2, 0, 0.2, 4;
    const Mat3 IF = Mat3::Identity();
    EXPECT_EQ(compose_total_inertia(IB, IF, 5.0, Vec3::Zero()), IB + IF);
}

TEST(Geometry, ComposeAlongE3RemovesParallelAxisTerm) {
    const Mat3 IB = Mat3::Identity() * 3.0;
    const Mat3 IF = Mat3::Identity();
    const double m = 2.0, d = 0.3;
    const Mat3 M = compose_total_inertia(IB, IF, m, Vec3(0, 0, d));
    const Vec3 Me1 = M * Vec3::UnitX();
    EXPECT_LT((Me1 - (4.0 - m * d * d) * Vec3::UnitX()).norm(), 1e-15);
    EXPECT_EQ((M - M.transpose()).norm(), 0.0);
}

TEST(Geometry, ComposeMatchesQuadratureAboutRandomCenter) {
    std::mt19937_64 rng(7);
    const GeometrySpec s = random_spec(rng);
    const InertiaData d = compute_mass_properties(s);
    const InertiaData q = quadrature_inertia_oracle(s, 128);
    EXPECT_LT(rel_err(q.I, d.I), 1e-3);
    EXPECT_LT((q.y_c - d.y_c).norm(), 1e-3 * s.outer_half_extents.norm());
}

TEST(Geometry, CompositionIdentityOnRandomSpecs) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int n = 0; n < 20; ++n) {
        const GeometrySpec s = random_spec(rng);
        const InertiaData d = compute_mass_properties(s);
        EXPECT_NEAR(d.m, d.m_B + d.m_F, 0.0);
        EXPECT_LT((d.y_c - d.m_F / d.m * d.y_F).norm(), 1e-15 * (1.0 + d.y_F.norm()));
        EXPECT_EQ((d.I - d.I.transpose()).norm(), 0.0);
        const Mat3 M = compose_total_inertia(d.I_B, d.I_F, d.m, d.y_c);
        for (int t = 0; t < 10; ++t) {
            const Vec3 b(U(rng), U(rng), U(rng));
            const Vec3 rhs = (d.I_B + d.I_F) * b + d.m * d.y_c.cross(d.y_c.cross(b));
            EXPECT_LT((d.I * b - rhs).norm(), 1e-12 * d.I.norm() * b.norm());
            EXPECT_LT((M * b - rhs).norm(), 1e-12 * d.I.norm() * b.norm());
            const Vec3 e = b.normalized();
            EXPECT_GT(e.dot(d.I * e), 0.0);
        }
    }
}

TEST(Geometry, AnalyticMatchesQuadratureOnRandomSpecs) {
    std::mt19937_64 rng(2024);
    for (int n = 0; n < 10; ++n) {
        const GeometrySpec s = random_spec(rng);
        const InertiaData d = compute_mass_properties(s);
        const InertiaData q = quadrature_inertia_oracle(s, 128);
        EXPECT_LT(rel_err(q.I_B, d.I_B), 1e-3) << "spec " << n;
        EXPECT_LT(rel_err(q.I_F, d.I_F), 1e-3) << "spec " << n;
        EXPECT_LT(rel_err(q.I, d.I), 1e-3) << "spec " << n;
    }
}

TEST(Geometry, QuadratureConvergesUnderRefinement) {
    std::mt19937_64 rng(3);
    const GeometrySpec s = random_spec(rng);
    const InertiaData d = compute_mass_properties(s);
    double prev = 1e300;
    for (int res : {32, 64, 128}) {
        const double err = rel_err(quadrature_inertia_oracle(s, res).I, d.I);
        EXPECT_LT(err, prev) << "resolution " << res;
        prev = err;
    }
}

TEST(Geometry, QuadratureCenteredCubeHasNoOffDiagonals) {
    GeometrySpec s;
    s.outer_half_extents = Vec3(1, 1, 1);
    s.cavity_half_extents = Vec3(0.5, 0.5, 0.5);
    const InertiaData q = quadrature_inertia_oracle(s, 32);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (i != j) {
                EXPECT_LT(std::abs(q.I(i, j)), 1e-12);
            }
        }
    }
}

TEST(Geometry, QuadratureRejectsCoarseResolution) {
    EXPECT_THROW(quadrature_inertia_oracle(egg_like(), 7), ConfigError);
}

TEST(Geometry, EggLikeSpecHasEqualSmallEigenvalues) {
    const InertiaData q = quadrature_inertia_oracle(egg_like(), 64);
    const PrincipalAxes pa = principal_axes(compute_mass_properties(egg_like()).I);
    EXPECT_TRUE(pa.degenerate[0]);
    EXPECT_FALSE(pa.degenerate[1]);
    EXPECT_LT(pa.lambda[1], pa.lambda[2]);
    EXPECT_NEAR(q.I(0, 0), q.I(1, 1), 1e-12 * q.I.norm());
    EXPECT_LT(q.I(0, 0), q.I(2, 2));
}

TEST(Geometry, PrincipalAxesOfDiagonal) {
    const PrincipalAxes pa = principal_axes(Vec3(1, 2, 3).asDiagonal());
    EXPECT_NEAR(pa.lambda[0], 1.0, 1e-15);
    EXPECT_NEAR(pa.lambda[2], 3.0, 1e-15);
    for (int j = 0; j < 3; ++j) {
        EXPECT_NEAR(std::abs(pa.axis(j)[j]), 1.0, 1e-15);
    }
    EXPECT_FALSE(pa.any_degenerate());
}

TEST(Geometry, PrincipalAxesOfIsotropicIsDegenerate) {
    const PrincipalAxes pa = principal_axes(Mat3::Identity() * 2.5);
    EXPECT_TRUE(pa.all_degenerate());
}

TEST(Geometry, PrincipalAxesRecoversRotatedSpectrum) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> N;
    for (int t = 0; t < 50; ++t) {
        Eigen::Quaterniond q(N(rng), N(rng), N(rng), N(rng));
        const Mat3 R = q.normalized().toRotationMatrix();
        Mat3 I = R.transpose() * Vec3(1, 2, 3).asDiagonal() * R;
        I = 0.5 * (I + I.transpose()).eval();
        const PrincipalAxes pa = principal_axes(I);
        for (int j = 0; j < 3; ++j) {
            EXPECT_NEAR(pa.lambda[j], j + 1.0, 1e-12);
            EXPECT_LT((I * pa.axis(j) - pa.lambda[j] * pa.axis(j)).norm(), 1e-12 * pa.lambda[2]);
        }
        EXPECT_LT((pa.axes.transpose() * pa.axes - Mat3::Identity()).norm(), 1e-12);
        EXPECT_NEAR(pa.axes.determinant(), 1.0, 1e-12);
    }
}

TEST(Geometry, PrincipalAxesRejectsBadInput) {
    Mat3 asym = Mat3::Identity();
    asym(0, 1) = 0.5;
    EXPECT_THROW(principal_axes(asym), ConfigError);
    EXPECT_THROW(principal_axes(Vec3(-1, 2, 3).asDiagonal()), ConfigError);
}

TEST(Geometry, SpecValidationRejectsLeaksAndNonPositive) {
    GeometrySpec s = egg_like();
    s.cavity_offset = Vec3(0.2, 0, 0);
    EXPECT_THROW(s.validate(), ConfigError);
    s = egg_like();
    s.rho_B = 0.0;
    EXPECT_THROW(s.validate(), ConfigError);
    s = egg_like();
    s.nu = -1.0;
    EXPECT_THROW(s.validate(), ConfigError);
}

TEST(Geometry, JsonRoundTripAndUnknownKey) {
    const GeometrySpec s = egg_like();
    const nlohmann::json j = geometry_to_json(s);
    const GeometrySpec r = geometry_from_json(j);
    EXPECT_EQ(r.outer_half_extents, s.outer_half_extents);
    EXPECT_EQ(r.nu, s.nu);
    nlohmann::json bad = j;
    bad["rho_F"] = 1.0;
    try {
        geometry_from_json(bad);
        FAIL() << "unknown key accepted";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("rho_F"), std::string::npos);
    }
}
