#pragma once

#include "evosurf/geometry/chart.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace evosurf {

/// Cell-centered structured grid over a parameter rectangle. Cell (i, j)
/// spans [r_lo + i dr, r_lo + (i+1) dr] x [s_lo + j ds, s_lo + (j+1) ds].
struct ParamGrid {
    int nr = 0, ns = 0;
    ParamRect domain;
    std::array<EdgeRole, 4> roles{};

    ParamGrid() = default;
    ParamGrid(int nr_, int ns_, const ParamRect& d, const std::array<EdgeRole, 4>& r)
        : nr(nr_), ns(ns_), domain(d), roles(r) {
        if (nr < 1 || ns < 1) throw Error("ParamGrid needs at least one cell per direction");
    }
    ParamGrid(int nr_, int ns_, const Chart& c) : ParamGrid(nr_, ns_, c.domain, c.roles) {}

    double dr() const { return domain.extent_r() / nr; }
    double ds() const { return domain.extent_s() / ns; }
    double cell_area() const { return dr() * ds(); }
    std::size_t size() const { return static_cast<std::size_t>(nr) * ns; }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * ns + j; }

    Vec2 center(int i, int j) const {
        return {domain.r_lo + (i + 0.5) * dr(), domain.s_lo + (j + 0.5) * ds()};
    }
    /// Midpoint of the r-face between cells (i-1, j) and (i, j), i in [0, nr].
    Vec2 r_face(int i, int j) const {
        return {domain.r_lo + i * dr(), domain.s_lo + (j + 0.5) * ds()};
    }
    /// Midpoint of the s-face between cells (i, j-1) and (i, j), j in [0, ns].
    Vec2 s_face(int i, int j) const {
        return {domain.r_lo + (i + 0.5) * dr(), domain.s_lo + j * ds()};
    }

    EdgeRole role(Edge e) const { return roles[static_cast<int>(e)]; }
    bool periodic_r() const { return role(Edge::r_lo) == EdgeRole::periodic; }
    bool periodic_s() const { return role(Edge::s_lo) == EdgeRole::periodic; }

    int wrap_r(int i) const { return (i % nr + nr) % nr; }
    int wrap_s(int j) const { return (j % ns + ns) % ns; }
};

/// Scalar samples at the cell centers of a grid.
using Field = std::vector<double>;
using VectorField3 = std::vector<Vec3>;

/// Parametric derivative of cell-centered samples along X1 (axis 0) or X2
/// (axis 1): central differences in the interior, periodic wrap on periodic
/// axes, second-order one-sided differences next to other edges.
inline double param_derivative(const ParamGrid& g, std::span<const double> u, int axis, int i,
                               int j) {
    const bool periodic = axis == 0 ? g.periodic_r() : g.periodic_s();
    const int n = axis == 0 ? g.nr : g.ns;
    const double h = axis == 0 ? g.dr() : g.ds();
    const int k = axis == 0 ? i : j;
    auto at = [&](int kk) {
        return axis == 0 ? u[g.index(kk, j)] : u[g.index(i, kk)];
    };
    if (n == 1) return 0.0;
    if (periodic) {
        const int km = (k - 1 + n) % n, kp = (k + 1) % n;
        return (at(kp) - at(km)) / (2 * h);
    }
    if (n == 2) return (at(1) - at(0)) / h;
    if (k == 0) return (-3 * at(0) + 4 * at(1) - at(2)) / (2 * h);
    if (k == n - 1) return (3 * at(n - 1) - 4 * at(n - 2) + at(n - 3)) / (2 * h);
    return (at(k + 1) - at(k - 1)) / (2 * h);
}

/// Vector version of param_derivative (component-wise).
inline Vec3 param_derivative(const ParamGrid& g, std::span<const Vec3> v, int axis, int i, int j) {
    const bool periodic = axis == 0 ? g.periodic_r() : g.periodic_s();
    const int n = axis == 0 ? g.nr : g.ns;
    const double h = axis == 0 ? g.dr() : g.ds();
    const int k = axis == 0 ? i : j;
    auto at = [&](int kk) -> const Vec3& {
        return axis == 0 ? v[g.index(kk, j)] : v[g.index(i, kk)];
    };
    if (n == 1) return Vec3::Zero();
    if (periodic) {
        const int km = (k - 1 + n) % n, kp = (k + 1) % n;
        return (at(kp) - at(km)) / (2 * h);
    }
    if (n == 2) return (at(1) - at(0)) / h;
    if (k == 0) return (-3 * at(0) + 4 * at(1) - at(2)) / (2 * h);
    if (k == n - 1) return (3 * at(n - 1) - 4 * at(n - 2) + at(n - 3)) / (2 * h);
    return (at(k + 1) - at(k - 1)) / (2 * h);
}

/// Samples a callback f(X) at every cell center.
template <class F>
Field sample(const ParamGrid& g, F&& f) {
    Field out(g.size());
    for (int i = 0; i < g.nr; ++i)
        for (int j = 0; j < g.ns; ++j) out[g.index(i, j)] = f(g.center(i, j));
    return out;
}

}  // namespace evosurf
