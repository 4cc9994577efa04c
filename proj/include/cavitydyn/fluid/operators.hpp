#pragma once

// Discrete operators on the MAC grid.
//
// Tangential no-slip walls are imposed through ghost values u_ghost = -u, which
// puts the zero exactly on the wall half a cell away from the adjacent face.
// Wall-normal faces hold zero.

#include "cavitydyn/fluid/mac_grid.hpp"
#include "cavitydyn/parallel.hpp"

namespace cavitydyn::fluid {

namespace detail {

struct Layout {
    Index3 d{};
    std::array<std::ptrdiff_t, 3> s{};

    Layout(const MacGrid& g, int c) : d(g.face_dims(c)) { s = {1, d[0], std::ptrdiff_t(d[0]) * d[1]}; }
    std::ptrdiff_t at(const Index3& idx) const { return idx[0] * s[0] + idx[1] * s[1] + idx[2] * s[2]; }
};

/// Neighbour values of face f of component c along axis a, honouring walls.
inline void neighbours(const std::vector<double>& u, const Layout& L, int c, int a, const Index3& idx,
                       std::ptrdiff_t f, double& dn, double& up) {
    if (a == c) {
        dn = u[f - L.s[a]];
        up = u[f + L.s[a]];
        return;
    }
    dn = idx[a] > 0 ? u[f - L.s[a]] : -u[f];
    up = idx[a] < L.d[a] - 1 ? u[f + L.s[a]] : -u[f];
}

} // namespace detail

/// Velocity vector at every face: the stored component plus the other two
/// averaged from the four surrounding faces.
struct FaceVelocities {
    std::array<std::vector<Vec3>, 3> v;
};

inline FaceVelocities interpolate_face_velocities(const VelocityField& u) {
    const MacGrid& g = u.grid;
    FaceVelocities out;
    const std::array<detail::Layout, 3> layouts{detail::Layout(g, 0), detail::Layout(g, 1), detail::Layout(g, 2)};
    for (int c = 0; c < 3; ++c) {
        const detail::Layout& L = layouts[c];
        out.v[c].assign(g.face_count(c), Vec3::Zero());
        for (int k = 0; k < L.d[2]; ++k) {
            for (int j = 0; j < L.d[1]; ++j) {
                for (int i = 0; i < L.d[0]; ++i) {
                    const Index3 idx{i, j, k};
                    const std::ptrdiff_t f = L.at(idx);
                    Vec3 vel = Vec3::Zero();
                    vel[c] = u.comp[c][f];
                    if (idx[c] == 0 || idx[c] == L.d[c] - 1) {
                        out.v[c][f] = vel;
                        continue;
                    }
                    for (int a = 0; a < 3; ++a) {
                        if (a == c) {
                            continue;
                        }
                        const detail::Layout& La = layouts[a];
                        Index3 p = idx;
                        p[c] = idx[c] - 1;
                        const std::ptrdiff_t base = La.at(p);
                        const auto& ua = u.comp[a];
                        vel[a] = 0.25 * (ua[base] + ua[base + La.s[c]] + ua[base + La.s[a]] +
                                         ua[base + La.s[c] + La.s[a]]);
                    }
                    out.v[c][f] = vel;
                }
            }
        }
    }
    return out;
}

/// 7-point Laplacian of each component at interior faces (zero elsewhere).
inline VelocityField laplacian(const VelocityField& u, int threads = 1) {
    const MacGrid& g = u.grid;
    VelocityField out(g);
    for (int c = 0; c < 3; ++c) {
        const detail::Layout L(g, c);
        const auto& uc = u.comp[c];
        auto& oc = out.comp[c];
        parallel_for(L.d[2], threads, [&](int kb, int ke) {
            for (int k = kb; k < ke; ++k) {
                for (int j = 0; j < L.d[1]; ++j) {
                    for (int i = 0; i < L.d[0]; ++i) {
                        const Index3 idx{i, j, k};
                        if (idx[c] == 0 || idx[c] == L.d[c] - 1) {
                            continue;
                        }
                        const std::ptrdiff_t f = L.at(idx);
                        double lap = 0.0;
                        for (int a = 0; a < 3; ++a) {
                            double dn, up;
                            detail::neighbours(uc, L, c, a, idx, f, dn, up);
                            lap += (up - 2.0 * uc[f] + dn) / (g.h[a] * g.h[a]);
                        }
                        oc[f] = lap;
                    }
                }
            }
        });
    }
    return out;
}

/// Centered convective term (u.grad)u at interior faces.
inline VelocityField advection(const VelocityField& u, const FaceVelocities& fv, int threads = 1) {
    const MacGrid& g = u.grid;
    VelocityField out(g);
    for (int c = 0; c < 3; ++c) {
        const detail::Layout L(g, c);
        const auto& uc = u.comp[c];
        auto& oc = out.comp[c];
        parallel_for(L.d[2], threads, [&](int kb, int ke) {
            for (int k = kb; k < ke; ++k) {
                for (int j = 0; j < L.d[1]; ++j) {
                    for (int i = 0; i < L.d[0]; ++i) {
                        const Index3 idx{i, j, k};
                        if (idx[c] == 0 || idx[c] == L.d[c] - 1) {
                            continue;
                        }
                        const std::ptrdiff_t f = L.at(idx);
                        const Vec3& vel = fv.v[c][f];
                        double adv = 0.0;
                        for (int a = 0; a < 3; ++a) {
                            double dn, up;
                            detail::neighbours(uc, L, c, a, idx, f, dn, up);
                            adv += vel[a] * (up - dn) / (2.0 * g.h[a]);
                        }
                        oc[f] = adv;
                    }
                }
            }
        });
    }
    return out;
}

/// Pointwise Coriolis acceleration 2 Omega x v.
inline Vec3 coriolis_acceleration(const Vec3& omega, const Vec3& v) { return 2.0 * omega.cross(v); }

/// Rotating-frame forcing 2 Omega x u + Omega' x y at interior faces.
inline VelocityField rotating_frame_terms(const MacGrid& g, const FaceVelocities& fv, const Vec3& omega,
                                          const Vec3& omega_dot) {
    VelocityField out(g);
    for (int c = 0; c < 3; ++c) {
        const detail::Layout L(g, c);
        auto& oc = out.comp[c];
        for (int k = 0; k < L.d[2]; ++k) {
            for (int j = 0; j < L.d[1]; ++j) {
                for (int i = 0; i < L.d[0]; ++i) {
                    const Index3 idx{i, j, k};
                    if (idx[c] == 0 || idx[c] == L.d[c] - 1) {
                        continue;
                    }
                    const std::ptrdiff_t f = L.at(idx);
                    const Vec3 y = g.face_position(c, i, j, k);
                    oc[f] = coriolis_acceleration(omega, fv.v[c][f])[c] + omega_dot.cross(y)[c];
                }
            }
        }
    }
    return out;
}

/// Cell divergence.
inline ScalarField divergence(const VelocityField& u) {
    const MacGrid& g = u.grid;
    ScalarField out(g);
    const detail::Layout Lx(g, 0), Ly(g, 1), Lz(g, 2);
    for (int k = 0; k < g.n[2]; ++k) {
        for (int j = 0; j < g.n[1]; ++j) {
            for (int i = 0; i < g.n[0]; ++i) {
                const Index3 idx{i, j, k};
                const double dx = (u.comp[0][Lx.at(idx) + Lx.s[0]] - u.comp[0][Lx.at(idx)]) / g.h[0];
                const double dy = (u.comp[1][Ly.at(idx) + Ly.s[1]] - u.comp[1][Ly.at(idx)]) / g.h[1];
                const double dz = (u.comp[2][Lz.at(idx) + Lz.s[2]] - u.comp[2][Lz.at(idx)]) / g.h[2];
                out.data[g.cell_index(i, j, k)] = dx + dy + dz;
            }
        }
    }
    return out;
}

/// Face gradient of a cell scalar; wall-normal faces get zero (Neumann walls).
inline VelocityField gradient(const ScalarField& p) {
    const MacGrid& g = p.grid;
    VelocityField out(g);
    for (int c = 0; c < 3; ++c) {
        const detail::Layout L(g, c);
        std::array<std::ptrdiff_t, 3> cs{1, g.n[0], std::ptrdiff_t(g.n[0]) * g.n[1]};
        for (int k = 0; k < L.d[2]; ++k) {
            for (int j = 0; j < L.d[1]; ++j) {
                for (int i = 0; i < L.d[0]; ++i) {
                    const Index3 idx{i, j, k};
                    if (idx[c] == 0 || idx[c] == L.d[c] - 1) {
                        continue;
                    }
                    const std::ptrdiff_t cell = std::ptrdiff_t(g.cell_index(i, j, k));
                    out.comp[c][L.at(idx)] = (p.data[cell] - p.data[cell - cs[c]]) / g.h[c];
                }
            }
        }
    }
    return out;
}

} // namespace cavitydyn::fluid
