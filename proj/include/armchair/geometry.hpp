#pragma once

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <tuple>
#include <vector>

#include "armchair/errors.hpp"

namespace armchair {

using Vec3 = std::array<double, 3>;

inline Vec3 operator-(const Vec3& a, const Vec3& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 operator+(const Vec3& a, const Vec3& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Edge index omega = (n, j, k): cell n along the axis, j in 1..6 within the
/// cell, k in Z_N around the circumference.
struct EdgeIndex {
    int n = 0;
    int j = 1;
    int k = 0;
    friend auto operator<=>(const EdgeIndex&, const EdgeIndex&) = default;
};

/// Armchair tube graph embedded in R^3: unit-length straight edges with both
/// endpoints on the cylinder x1^2 + x2^2 = R^2.
struct NanotubeGeometry {
    int N = 2;
    double R = 0.0, R1 = 0.0, R2 = 0.0;
    double alpha = 0.0, beta = 0.0;
    double h = 0.0; // half axial period
    int cell_lo = 0, cell_hi = 0;
    std::map<EdgeIndex, Vec3> vertices;     // r_omega (edge start points)
    std::map<EdgeIndex, Vec3> edge_vectors; // e_omega, unit length

    Vec3 start(const EdgeIndex& w) const { return vertices.at(w); }
    Vec3 edge(const EdgeIndex& w) const { return edge_vectors.at(w); }
    Vec3 end(const EdgeIndex& w) const { return vertices.at(w) + edge_vectors.at(w); }
};

/// Magnetic phase constants per unit edge for field amplitude B along the axis.
struct MagneticParams {
    double B = 0.0;
    double a1 = 0.0; // B (R2 - R1) / 4
    double a2 = 0.0; // B R2 / 4
    double a = 0.0;  // a1 + a2
};

namespace detail {

struct GeometryScalars {
    double R, R1, R2, alpha, beta, h;
};

inline GeometryScalars geometry_scalars(int N) {
    if (N < 2)
        throw GeometryUndefined("geometry requires N >= 2 (R is singular at sin(pi/N) -> 0)");
    GeometryScalars g{};
    const double phi1 = std::numbers::pi / N;
    g.R = std::sqrt(std::cos(phi1) + 1.25) / std::sin(phi1);
    g.R1 = std::sqrt(g.R * g.R - 1.0);
    g.R2 = std::sqrt(4.0 * g.R * g.R - 1.0);
    g.alpha = std::asin(1.0 / (2.0 * g.R));
    g.beta = std::asin(1.0 / g.R);
    g.h = std::sqrt(2.0 + g.R1 * g.R2 - 2.0 * g.R * g.R);
    return g;
}

} // namespace detail

inline MagneticParams magnetic_phases(double B, int N) {
    const auto g = detail::geometry_scalars(N);
    MagneticParams m;
    m.B = B;
    m.a1 = B * (g.R2 - g.R1) / 4.0;
    m.a2 = B * g.R2 / 4.0;
    m.a = m.a1 + m.a2;
    return m;
}

inline NanotubeGeometry build_geometry(int N, int cell_lo, int cell_hi) {
    if (cell_hi < cell_lo) throw UsageError("build_geometry: empty cell window");
    const auto s = detail::geometry_scalars(N);
    NanotubeGeometry geo;
    geo.N = N;
    geo.R = s.R;
    geo.R1 = s.R1;
    geo.R2 = s.R2;
    geo.alpha = s.alpha;
    geo.beta = s.beta;
    geo.h = s.h;
    geo.cell_lo = cell_lo;
    geo.cell_hi = cell_hi;

    const double phi1 = std::numbers::pi / N;
    auto ring = [&](double angle, double z) -> Vec3 {
        return {s.R * std::cos(angle), s.R * std::sin(angle), z};
    };
    // r_{n,j,k}: edge start points per the cell pattern; phi_k = pi k / N
    auto start_point = [&](int n, int j, int k) -> Vec3 {
        const double phi2k = phi1 * (2 * k);
        switch (j) {
            case 1: return ring(phi2k, 2.0 * n * s.h);
            case 2:
            case 5: return ring(s.beta - s.alpha + phi2k, (2.0 * n + 1.0) * s.h);
            case 3:
            case 6: return ring(phi1 * (2 * k + 1), (2.0 * n + 1.0) * s.h);
            case 4: return ring(2.0 * s.beta + phi2k, 2.0 * n * s.h);
        }
        throw UsageError("edge index j must lie in 1..6");
    };

    // build one extra cell of start points so every edge vector in the window
    // has its far endpoint available
    for (int n = cell_lo; n <= cell_hi + 1; ++n)
        for (int k = 0; k < N; ++k)
            for (int j = 1; j <= 6; ++j) geo.vertices[{n, j, k}] = start_point(n, j, k);

    for (int n = cell_lo; n <= cell_hi; ++n) {
        for (int k = 0; k < N; ++k) {
            const int kp = (k + 1) % N;
            geo.edge_vectors[{n, 1, k}] = start_point(n, 2, k) - start_point(n, 1, k);
            geo.edge_vectors[{n, 2, k}] = start_point(n, 3, k) - start_point(n, 2, k);
            geo.edge_vectors[{n, 3, k}] = start_point(n, 4, k) - start_point(n, 3, k);
            geo.edge_vectors[{n, 4, k}] = start_point(n, 1, kp) - start_point(n, 4, k);
            geo.edge_vectors[{n, 5, k}] = start_point(n + 1, 1, k) - start_point(n, 5, k);
            geo.edge_vectors[{n, 6, k}] = start_point(n + 1, 4, k) - start_point(n, 6, k);
        }
    }

    for (const auto& [w, e] : geo.edge_vectors) {
        if (std::abs(norm(e) - 1.0) > 1e-10)
            throw InternalInconsistency("build_geometry: non-unit edge length");
        const Vec3 p = geo.vertices.at(w);
        const Vec3 q = p + e;
        if (std::abs(p[0] * p[0] + p[1] * p[1] - s.R * s.R) > 1e-10 ||
            std::abs(q[0] * q[0] + q[1] * q[1] - s.R * s.R) > 1e-10)
            throw InternalInconsistency("build_geometry: vertex off the cylinder");
    }
    if (std::abs(s.alpha + s.beta - phi1) > 1e-12)
        throw InternalInconsistency("build_geometry: alpha + beta != pi/N");
    return geo;
}

/// Projection of the vector potential A(x) = B/2 (e3 x x) onto edge omega at
/// local coordinate t; constant in t.
inline double project_vector_potential(const NanotubeGeometry& geo, double B, const EdgeIndex& w,
                                       double t) {
    const auto it = geo.edge_vectors.find(w);
    if (it == geo.edge_vectors.end())
        throw UsageError("project_vector_potential: edge outside the cell window");
    const Vec3 e3{0.0, 0.0, 1.0};
    const Vec3 point = geo.vertices.at(w) + t * it->second;
    return 0.5 * B * dot(cross(e3, point), it->second);
}

} // namespace armchair
