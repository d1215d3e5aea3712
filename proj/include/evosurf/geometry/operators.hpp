#pragma once

#include "evosurf/geometry/frame.hpp"
#include "evosurf/geometry/grid.hpp"

#include <functional>

namespace evosurf {

/// An ambient vector field phi(x, t) on R^3. `jacobian` (d phi_i / d x_j) is
/// optional; without it the Jacobian is taken by central differences.
struct AmbientField {
    std::function<Vec3(const Vec3&, double)> value;
    std::function<Mat3(const Vec3&, double)> jacobian;

    Vec3 operator()(const Vec3& x, double t) const { return value(x, t); }

    Mat3 jac(const Vec3& x, double t) const {
        if (jacobian) return jacobian(x, t);
        constexpr double h = 1e-6;
        Mat3 J;
        for (int k = 0; k < 3; ++k) {
            Vec3 e = Vec3::Zero();
            e[k] = h;
            J.col(k) = (value(x + e, t) - value(x - e, t)) / (2 * h);
        }
        return J;
    }
};

/// Ambient scalar function f(x, t).
using ScalarFn = std::function<double(const Vec3&, double)>;

/// Surface divergence g^alpha . d(phi o x)/dX_alpha at a single parameter point.
inline double surface_divergence_at(const Chart& chart, const AmbientField& phi, const Vec2& X,
                                    double t) {
    const FrameData f = frame(chart, X, t);
    const Mat3 J = phi.jac(chart.map(X, t), t);
    return f.gup1.dot(J * f.g1) + f.gup2.dot(J * f.g2);
}

/// Tangential gradient g^alpha du/dX_alpha of cell-centered samples.
inline VectorField3 surface_gradient(const Chart& chart, const ParamGrid& grid,
                                     std::span<const double> u, double t) {
    VectorField3 out(grid.size());
    for (int i = 0; i < grid.nr; ++i)
        for (int j = 0; j < grid.ns; ++j) {
            const FrameData f = frame(chart, grid.center(i, j), t);
            out[grid.index(i, j)] = f.gup1 * param_derivative(grid, u, 0, i, j) +
                                    f.gup2 * param_derivative(grid, u, 1, i, j);
        }
    return out;
}

/// Surface divergence g^alpha . dphi/dX_alpha of cell-centered vector samples.
inline Field surface_divergence(const Chart& chart, const ParamGrid& grid,
                                std::span<const Vec3> phi, double t) {
    Field out(grid.size());
    for (int i = 0; i < grid.nr; ++i)
        for (int j = 0; j < grid.ns; ++j) {
            const FrameData f = frame(chart, grid.center(i, j), t);
            out[grid.index(i, j)] = f.gup1.dot(param_derivative(grid, phi, 0, i, j)) +
                                    f.gup2.dot(param_derivative(grid, phi, 1, i, j));
        }
    return out;
}

/// Midpoint rule: sum of f sqrt(G) dr ds over cell centers.
inline double surface_integral(const Chart& chart, const ParamGrid& grid,
                               std::span<const double> f, double t) {
    double sum = 0.0;
    for (int i = 0; i < grid.nr; ++i)
        for (int j = 0; j < grid.ns; ++j) {
            const auto tg = chart.tangents(grid.center(i, j), t);
            sum += f[grid.index(i, j)] * std::sqrt(metric_determinant(tg[0], tg[1]));
        }
    return sum * grid.cell_area();
}

/// Midpoint rule over `m` edge points of f(X) |n1^U g2 - n2^U g1|.
template <class F>
double boundary_integral(const Chart& chart, const BoundarySegment& seg, F&& f, double t,
                         int m) {
    const double dl = seg.length() / m;
    double sum = 0.0;
    for (int k = 0; k < m; ++k) {
        const Vec2 X = seg.point(seg.l_lo + (k + 0.5) * dl);
        const auto tg = chart.tangents(X, t);
        const double jac = (seg.param_normal[0] * tg[1] - seg.param_normal[1] * tg[0]).norm();
        if (!(jac > 1e-300)) throw DegenerateMetric("degenerate boundary line element");
        sum += f(X) * jac;
    }
    return sum * dl;
}

}  // namespace evosurf
