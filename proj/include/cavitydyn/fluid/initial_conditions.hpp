#pragma once

// Initial relative velocities. Every non-zero field is built with zero wall
// values, passed through the projector and then rescaled so that its RMS
// speed over the cavity equals the requested amplitude.
//
// Random fields: the 64-bit Mersenne Twister (std::mt19937_64) seeded with the
// configured seed; each draw x is mapped to 2 * (x >> 11) * 2^-53 - 1. The
// draws fill, in order, the coefficients a[b][p][q][r] (b = potential
// component 0..2, p, q, r = 1..2, r fastest) of the vector potential
//   psi_b(xi) = sum a[b][p][q][r] S_p(xi_1) S_q(xi_2) S_r(xi_3),
//   S_p(s) = sin(p pi s) sin(pi s),
// with xi the cavity coordinate normalised to [0, 1]. psi is sampled on the
// cell edges and the velocity is its discrete curl, which is solenoidal and
// vanishes on the walls.

#include "cavitydyn/fluid/fluid_solver.hpp"

#include <random>

namespace cavitydyn::fluid {

struct InitSpec {
    enum class Kind { zero, random_solenoidal, vortex };
    Kind kind = Kind::zero;
    std::uint64_t seed = 1;
    double amplitude = 0.0;
    Vec3 axis = Vec3::UnitZ();
};

namespace detail {

inline double unit_draw(std::mt19937_64& rng) {
    const std::uint64_t x = rng();
    return 2.0 * double(x >> 11) * 0x1.0p-53 - 1.0;
}

/// Vector potential component b at an edge given by mixed node/cell indices.
struct RandomPotential {
    static constexpr int modes = 2;
    std::array<std::array<double, modes * modes * modes>, 3> coeff{};

    explicit RandomPotential(std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        for (auto& comp : coeff) {
            for (double& a : comp) {
                a = unit_draw(rng);
            }
        }
    }

    static double shape(int p, double s) {
        return std::sin(p * std::numbers::pi * s) * std::sin(std::numbers::pi * s);
    }

    double value(int b, const Vec3& xi) const {
        double acc = 0.0;
        int n = 0;
        for (int p = 1; p <= modes; ++p) {
            for (int q = 1; q <= modes; ++q) {
                for (int r = 1; r <= modes; ++r) {
                    acc += coeff[b][n++] * shape(p, xi[0]) * shape(q, xi[1]) * shape(r, xi[2]);
                }
            }
        }
        return acc;
    }
};

} // namespace detail

inline VelocityField rescale_to_rms(VelocityField u, double amplitude) {
    const double rms = std::sqrt(fluid_kinetic_energy(u) / u.grid.volume());
    if (!(rms > 0.0)) {
        throw NumericalError("initial velocity: constructed field vanishes identically");
    }
    u *= amplitude / rms;
    return u;
}

/// Builds the initial relative velocity; the returned field is the realised u0.
inline VelocityField initialize_velocity(const FluidSolver& solver, const InitSpec& init) {
    const MacGrid& g = solver.grid();
    VelocityField u(g);
    if (init.kind == InitSpec::Kind::zero) {
        return u;
    }
    if (!(init.amplitude > 0.0)) {
        throw ConfigError("initial velocity: amplitude must be positive");
    }
    if (init.kind == InitSpec::Kind::random_solenoidal) {
        const detail::RandomPotential psi(init.seed);
        // Edge of potential component b: cell index along b, node index elsewhere.
        auto edge = [&](int b, Index3 idx) {
            Vec3 xi;
            for (int a = 0; a < 3; ++a) {
                xi[a] = (a == b ? idx[a] + 0.5 : double(idx[a])) / g.n[a];
            }
            return psi.value(b, xi);
        };
        for (int c = 0; c < 3; ++c) {
            const int a = (c + 1) % 3;
            const int b = (c + 2) % 3;
            const Index3 d = g.face_dims(c);
            for (int k = 0; k < d[2]; ++k) {
                for (int j = 0; j < d[1]; ++j) {
                    for (int i = 0; i < d[0]; ++i) {
                        const Index3 idx{i, j, k};
                        Index3 ia = idx;
                        ia[a] += 1;
                        Index3 ib = idx;
                        ib[b] += 1;
                        // u_c = d_a psi_b - d_b psi_a
                        u(c, i, j, k) = (edge(b, ia) - edge(b, idx)) / g.h[a] - (edge(a, ib) - edge(a, idx)) / g.h[b];
                    }
                }
            }
        }
    } else {
        const double axis_norm = init.axis.norm();
        if (!(axis_norm > 0.0)) {
            throw ConfigError("initial velocity: vortex axis must be nonzero");
        }
        const Vec3 e = init.axis / axis_norm;
        const Vec3 center = g.center();
        const double radius = 0.5 * g.extent().minCoeff();
        u.for_each_face([&](int c, int i, int j, int k) {
            const Vec3 r = g.face_position(c, i, j, k) - center;
            const double s2 = r.squaredNorm() / (radius * radius);
            const double phi = s2 < 1.0 ? (1.0 - s2) * (1.0 - s2) : 0.0;
            u(c, i, j, k) = phi * e.cross(r)[c];
        });
    }
    u.zero_normal_boundary();
    return rescale_to_rms(solver.project(u).u, init.amplitude);
}

} // namespace cavitydyn::fluid
