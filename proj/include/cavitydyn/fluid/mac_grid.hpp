#pragma once

// Staggered (MAC) discretisation of the cavity. Velocity component c lives on
// the faces normal to axis c, pressure lives at cell centers. Storage is
// x-fastest for every array.

#include "cavitydyn/core.hpp"
#include "cavitydyn/geometry.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <vector>

namespace cavitydyn::fluid {

using Index3 = std::array<int, 3>;

struct MacGrid {
    Index3 n{4, 4, 4};
    Vec3 h{1.0, 1.0, 1.0};
    /// Low corner of the cavity in body-frame coordinates.
    Vec3 corner{0.0, 0.0, 0.0};

    static MacGrid for_cavity(const GeometrySpec& spec, const InertiaData& inertia, const Index3& cells) {
        for (int a = 0; a < 3; ++a) {
            if (cells[a] < 4) {
                throw ConfigError("grid: at least 4 cells per axis are required");
            }
        }
        MacGrid g;
        g.n = cells;
        for (int a = 0; a < 3; ++a) {
            g.h[a] = 2.0 * spec.cavity_half_extents[a] / cells[a];
        }
        g.corner = inertia.y_F - spec.cavity_half_extents;
        return g;
    }

    std::size_t cell_count() const { return std::size_t(n[0]) * n[1] * n[2]; }
    double cell_volume() const { return h[0] * h[1] * h[2]; }
    double volume() const { return cell_volume() * double(cell_count()); }
    Vec3 extent() const { return Vec3(h[0] * n[0], h[1] * n[1], h[2] * n[2]); }
    Vec3 center() const { return corner + 0.5 * extent(); }
    double min_spacing() const { return h.minCoeff(); }

    std::size_t cell_index(int i, int j, int k) const {
        return std::size_t(i) + std::size_t(n[0]) * (std::size_t(j) + std::size_t(n[1]) * std::size_t(k));
    }

    Vec3 cell_center(int i, int j, int k) const {
        return corner + Vec3((i + 0.5) * h[0], (j + 0.5) * h[1], (k + 0.5) * h[2]);
    }

    /// Dimensions of the face array holding component c.
    Index3 face_dims(int c) const {
        Index3 d = n;
        d[c] += 1;
        return d;
    }

    std::size_t face_count(int c) const {
        const Index3 d = face_dims(c);
        return std::size_t(d[0]) * d[1] * d[2];
    }

    std::size_t face_index(int c, int i, int j, int k) const {
        const Index3 d = face_dims(c);
        return std::size_t(i) + std::size_t(d[0]) * (std::size_t(j) + std::size_t(d[1]) * std::size_t(k));
    }

    Vec3 face_position(int c, int i, int j, int k) const {
        Vec3 off((i + 0.5) * h[0], (j + 0.5) * h[1], (k + 0.5) * h[2]);
        off[c] -= 0.5 * h[c];
        return corner + off;
    }

    bool operator==(const MacGrid& o) const { return n == o.n && h == o.h && corner == o.corner; }
};

/// Cell-centered scalar.
struct ScalarField {
    MacGrid grid;
    std::vector<double> data;

    ScalarField() = default;
    explicit ScalarField(const MacGrid& g) : grid(g), data(g.cell_count(), 0.0) {}

    double& operator()(int i, int j, int k) { return data[grid.cell_index(i, j, k)]; }
    double operator()(int i, int j, int k) const { return data[grid.cell_index(i, j, k)]; }
};

/// Face-centered velocity. Boundary faces (index 0 and n along the component's
/// own axis) carry the wall-normal velocity, which is zero for admissible fields.
struct VelocityField {
    MacGrid grid;
    std::array<std::vector<double>, 3> comp;

    VelocityField() = default;
    explicit VelocityField(const MacGrid& g) : grid(g) {
        for (int c = 0; c < 3; ++c) {
            comp[c].assign(g.face_count(c), 0.0);
        }
    }

    double& operator()(int c, int i, int j, int k) { return comp[c][grid.face_index(c, i, j, k)]; }
    double operator()(int c, int i, int j, int k) const { return comp[c][grid.face_index(c, i, j, k)]; }

    /// Calls f(c, i, j, k) for every face of every component.
    template <class F>
    void for_each_face(F&& f) const {
        for (int c = 0; c < 3; ++c) {
            const Index3 d = grid.face_dims(c);
            for (int k = 0; k < d[2]; ++k) {
                for (int j = 0; j < d[1]; ++j) {
                    for (int i = 0; i < d[0]; ++i) {
                        f(c, i, j, k);
                    }
                }
            }
        }
    }

    void zero_normal_boundary() {
        for (int c = 0; c < 3; ++c) {
            const Index3 d = grid.face_dims(c);
            for (int k = 0; k < d[2]; ++k) {
                for (int j = 0; j < d[1]; ++j) {
                    for (int i = 0; i < d[0]; ++i) {
                        const Index3 idx{i, j, k};
                        if (idx[c] == 0 || idx[c] == d[c] - 1) {
                            (*this)(c, i, j, k) = 0.0;
                        }
                    }
                }
            }
        }
    }

    double max_abs(int c) const {
        double m = 0.0;
        for (double v : comp[c]) {
            m = std::max(m, std::abs(v));
        }
        return m;
    }

    double max_abs() const { return std::max({max_abs(0), max_abs(1), max_abs(2)}); }

    bool all_finite() const {
        for (const auto& a : comp) {
            for (double v : a) {
                if (!std::isfinite(v)) {
                    return false;
                }
            }
        }
        return true;
    }

    VelocityField& operator+=(const VelocityField& o) {
        for (int c = 0; c < 3; ++c) {
            for (std::size_t n = 0; n < comp[c].size(); ++n) {
                comp[c][n] += o.comp[c][n];
            }
        }
        return *this;
    }

    VelocityField& operator*=(double s) {
        for (auto& a : comp) {
            for (double& v : a) {
                v *= s;
            }
        }
        return *this;
    }
};

/// Velocity plus the relative pressure of the last projection.
struct FluidState {
    VelocityField u;
    ScalarField p;

    FluidState() = default;
    explicit FluidState(const MacGrid& g) : u(g), p(g) {}
    FluidState(VelocityField velocity, ScalarField pressure) : u(std::move(velocity)), p(std::move(pressure)) {}
};

} // namespace cavitydyn::fluid
