#pragma once

// Binary velocity checkpoint. Layout, little-endian:
//   int64  n[3]
//   double h[3]
//   double corner[3]
//   double u1[(n1+1) n2 n3], u2[n1 (n2+1) n3], u3[n1 n2 (n3+1)]   (x fastest)

#include "cavitydyn/fluid/mac_grid.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

namespace cavitydyn::fluid {

namespace detail {

template <class T>
T to_little(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        unsigned char b[sizeof(T)];
        std::memcpy(b, &v, sizeof(T));
        std::reverse(b, b + sizeof(T));
        std::memcpy(&v, b, sizeof(T));
    }
    return v;
}

template <class T>
void put(std::ostream& os, T v) {
    v = to_little(v);
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is, const std::string& path) {
    T v;
    if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) {
        throw Error("checkpoint: truncated file " + path);
    }
    return to_little(v);
}

} // namespace detail

inline void write_velocity_checkpoint(const std::string& path, const VelocityField& u) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw Error("checkpoint: cannot open " + path + " for writing");
    }
    const MacGrid& g = u.grid;
    for (int a = 0; a < 3; ++a) {
        detail::put<std::int64_t>(os, g.n[a]);
    }
    for (int a = 0; a < 3; ++a) {
        detail::put<double>(os, g.h[a]);
    }
    for (int a = 0; a < 3; ++a) {
        detail::put<double>(os, g.corner[a]);
    }
    for (const auto& comp : u.comp) {
        for (double v : comp) {
            detail::put<double>(os, v);
        }
    }
    if (!os) {
        throw Error("checkpoint: write failed for " + path);
    }
}

inline VelocityField read_velocity_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw Error("checkpoint: cannot open " + path);
    }
    MacGrid g;
    for (int a = 0; a < 3; ++a) {
        const auto n = detail::get<std::int64_t>(is, path);
        if (n < 4 || n > (1 << 20)) {
            throw Error("checkpoint: implausible grid size in " + path);
        }
        g.n[a] = int(n);
    }
    for (int a = 0; a < 3; ++a) {
        g.h[a] = detail::get<double>(is, path);
    }
    for (int a = 0; a < 3; ++a) {
        g.corner[a] = detail::get<double>(is, path);
    }
    VelocityField u(g);
    for (auto& comp : u.comp) {
        for (double& v : comp) {
            v = detail::get<double>(is, path);
        }
    }
    return u;
}

} // namespace cavitydyn::fluid
