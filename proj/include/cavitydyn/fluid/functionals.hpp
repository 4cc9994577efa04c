#pragma once

// Integral functionals of the relative velocity used by the coupling and by
// the energy ledger.

#include "cavitydyn/fluid/mac_grid.hpp"
#include "cavitydyn/fluid/operators.hpp"

namespace cavitydyn::fluid {

namespace detail {

/// Face velocities averaged to cell centers.
template <class F>
void for_each_cell_velocity(const VelocityField& u, F&& f) {
    const MacGrid& g = u.grid;
    const std::array<Layout, 3> L{Layout(g, 0), Layout(g, 1), Layout(g, 2)};
    for (int k = 0; k < g.n[2]; ++k) {
        for (int j = 0; j < g.n[1]; ++j) {
            for (int i = 0; i < g.n[0]; ++i) {
                const Index3 idx{i, j, k};
                Vec3 v;
                for (int c = 0; c < 3; ++c) {
                    const std::ptrdiff_t f0 = L[c].at(idx);
                    v[c] = 0.5 * (u.comp[c][f0] + u.comp[c][f0 + L[c].s[c]]);
                }
                f(i, j, k, v);
            }
        }
    }
}

} // namespace detail

/// Integral of y x u over the cavity (cell-center midpoint rule).
inline Vec3 fluid_angular_momentum(const VelocityField& u) {
    const MacGrid& g = u.grid;
    Vec3 acc = Vec3::Zero();
    detail::for_each_cell_velocity(u, [&](int i, int j, int k, const Vec3& v) {
        acc += g.cell_center(i, j, k).cross(v);
    });
    return acc * g.cell_volume();
}

/// Same integral with the moment arm measured from `reference`.
inline Vec3 fluid_angular_momentum_about(const VelocityField& u, const Vec3& reference) {
    const MacGrid& g = u.grid;
    Vec3 acc = Vec3::Zero();
    detail::for_each_cell_velocity(u, [&](int i, int j, int k, const Vec3& v) {
        acc += (g.cell_center(i, j, k) - reference).cross(v);
    });
    return acc * g.cell_volume();
}

/// (1/|F|) * integral of u.
inline Vec3 mean_velocity(const VelocityField& u) {
    Vec3 acc = Vec3::Zero();
    detail::for_each_cell_velocity(u, [&](int, int, int, const Vec3& v) { acc += v; });
    return acc / double(u.grid.cell_count());
}

/// Squared L2 norm of u: face quadrature with half weight on wall-normal faces
/// (exact for constants; the inner product in which the projection is orthogonal).
inline double fluid_kinetic_energy(const VelocityField& u) {
    const MacGrid& g = u.grid;
    double acc = 0.0;
    for (int c = 0; c < 3; ++c) {
        const detail::Layout L(g, c);
        for (int k = 0; k < L.d[2]; ++k) {
            for (int j = 0; j < L.d[1]; ++j) {
                for (int i = 0; i < L.d[0]; ++i) {
                    const Index3 idx{i, j, k};
                    const double w = (idx[c] == 0 || idx[c] == L.d[c] - 1) ? 0.5 : 1.0;
                    const double v = u.comp[c][L.at(idx)];
                    acc += w * v * v;
                }
            }
        }
    }
    return acc * g.cell_volume();
}

/// Face inner product matching fluid_kinetic_energy.
inline double inner_product(const VelocityField& a, const VelocityField& b) {
    const MacGrid& g = a.grid;
    double acc = 0.0;
    for (int c = 0; c < 3; ++c) {
        const detail::Layout L(g, c);
        for (int k = 0; k < L.d[2]; ++k) {
            for (int j = 0; j < L.d[1]; ++j) {
                for (int i = 0; i < L.d[0]; ++i) {
                    const Index3 idx{i, j, k};
                    const double w = (idx[c] == 0 || idx[c] == L.d[c] - 1) ? 0.5 : 1.0;
                    acc += w * a.comp[c][L.at(idx)] * b.comp[c][L.at(idx)];
                }
            }
        }
    }
    return acc * g.cell_volume();
}

enum class WallTreatment {
    /// Zero velocity on the wall, half a cell from the adjacent tangential face.
    no_slip,
    /// Linear extrapolation through the wall; only for testing the interior stencil.
    extrapolate,
};

/// Sum of squared first differences of all components, weighted so that
/// <u, Lap u> = -gradient_norm_sq(u) holds exactly for admissible fields.
inline double gradient_norm_sq(const VelocityField& u, WallTreatment walls = WallTreatment::no_slip) {
    const MacGrid& g = u.grid;
    double acc = 0.0;
    for (int c = 0; c < 3; ++c) {
        const detail::Layout L(g, c);
        const auto& uc = u.comp[c];
        for (int k = 0; k < L.d[2]; ++k) {
            for (int j = 0; j < L.d[1]; ++j) {
                for (int i = 0; i < L.d[0]; ++i) {
                    const Index3 idx{i, j, k};
                    const std::ptrdiff_t f = L.at(idx);
                    const bool normal_wall = idx[c] == 0 || idx[c] == L.d[c] - 1;
                    const double w = normal_wall ? 0.5 : 1.0;
                    for (int a = 0; a < 3; ++a) {
                        if (a == c) {
                            // Differences between consecutive faces live at cell centers.
                            if (idx[c] < L.d[c] - 1) {
                                const double d = (uc[f + L.s[c]] - uc[f]) / g.h[c];
                                acc += d * d;
                            }
                            continue;
                        }
                        if (idx[a] < L.d[a] - 1) {
                            const double d = (uc[f + L.s[a]] - uc[f]) / g.h[a];
                            acc += w * d * d;
                        }
                        const bool low = idx[a] == 0;
                        const bool high = idx[a] == L.d[a] - 1;
                        if (low || high) {
                            double d;
                            if (walls == WallTreatment::no_slip) {
                                d = uc[f] / (0.5 * g.h[a]);
                            } else {
                                const std::ptrdiff_t inner = low ? f + L.s[a] : f - L.s[a];
                                d = (uc[inner] - uc[f]) / g.h[a];
                            }
                            // Half-cell between the face and the wall.
                            acc += 0.5 * w * d * d;
                        }
                    }
                }
            }
        }
    }
    return acc * g.cell_volume();
}

/// Viscous dissipation rate 2 nu ||grad u||^2.
inline double dissipation_rate(const VelocityField& u, double nu) { return 2.0 * nu * gradient_norm_sq(u); }

/// Per-cell maximum of |div u|.
inline double max_divergence(const VelocityField& u) {
    const ScalarField d = divergence(u);
    double m = 0.0;
    for (double v : d.data) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

/// Divergence tolerance after projection: 1e-8 * |u|_inf / min(h).
inline double divergence_tolerance(const VelocityField& u) { return 1e-8 * u.max_abs() / u.grid.min_spacing(); }

} // namespace cavitydyn::fluid
