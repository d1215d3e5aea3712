#pragma once

#include "evosurf/geometry/chart.hpp"

#include <cmath>
#include <sstream>

namespace evosurf {

inline constexpr double default_metric_floor = 1e-14;

/// First-fundamental-form data of a chart at one parameter point.
///
/// `g1`, `g2` are the tangents dx/dX_alpha, `g` the covariant metric, `ginv`
/// its inverse, `gup1`, `gup2` the dual tangents g^alpha = g^{alpha beta} g_beta,
/// `G` the metric determinant and `n` the unit normal (g1 x g2)/|g1 x g2|.
/// At a pole point (`pole == true`) only g1, g2, g, G and sqrtG are meaningful.
struct FrameData {
    Vec3 g1 = Vec3::Zero(), g2 = Vec3::Zero();
    Mat2 g = Mat2::Zero();
    Mat2 ginv = Mat2::Zero();
    double G = 0.0;
    double sqrtG = 0.0;
    Vec3 gup1 = Vec3::Zero(), gup2 = Vec3::Zero();
    Vec3 n = Vec3::Zero();
    bool pole = false;

    const Vec3& tangent(int a) const { return a == 0 ? g1 : g2; }
    const Vec3& dual(int a) const { return a == 0 ? gup1 : gup2; }
};

/// Determinant of the metric written as the sum of the three squared 2x2
/// minors of the Jacobian [g1 g2].
inline double metric_determinant(const Vec3& g1, const Vec3& g2) {
    const double m1 = g1[1] * g2[2] - g2[1] * g1[2];
    const double m2 = g1[0] * g2[2] - g2[0] * g1[2];
    const double m3 = g1[0] * g2[1] - g2[0] * g1[1];
    return m1 * m1 + m2 * m2 + m3 * m3;
}

inline FrameData frame_from_tangents(const Vec3& g1, const Vec3& g2, bool allow_pole,
                                     double metric_floor = default_metric_floor) {
    FrameData f;
    f.g1 = g1;
    f.g2 = g2;
    f.g << g1.dot(g1), g1.dot(g2), g2.dot(g1), g2.dot(g2);
    f.G = metric_determinant(g1, g2);
    f.sqrtG = std::sqrt(f.G);
    if (!(f.G > metric_floor)) {
        if (allow_pole) {
            f.pole = true;
            return f;
        }
        std::ostringstream os;
        os << "degenerate metric: G = " << f.G;
        throw DegenerateMetric(os.str());
    }
    const double inv = 1.0 / f.G;
    f.ginv << f.g(1, 1) * inv, -f.g(0, 1) * inv, -f.g(1, 0) * inv, f.g(0, 0) * inv;
    f.gup1 = f.ginv(0, 0) * g1 + f.ginv(0, 1) * g2;
    f.gup2 = f.ginv(1, 0) * g1 + f.ginv(1, 1) * g2;
    f.n = g1.cross(g2) / f.sqrtG;
    return f;
}

/// Frame of `chart` at (X, t). Throws DegenerateMetric when G <= metric_floor
/// away from a pole edge.
inline FrameData frame(const Chart& chart, const Vec2& X, double t,
                       double metric_floor = default_metric_floor) {
    const auto tg = chart.tangents(X, t);
    return frame_from_tangents(tg[0], tg[1], chart.on_pole(X), metric_floor);
}

/// Boundary line-element vector n1^U g2 - n2^U g1 at an edge point.
inline Vec3 edge_tangent(const FrameData& f, const Vec2& param_normal) {
    return param_normal[0] * f.g2 - param_normal[1] * f.g1;
}

/// Unit outer co-normal at parameter l of `seg`:
/// (n1^U g2 - n2^U g1)/|.| x (g1 x g2)/|g1 x g2|.
inline Vec3 conormal(const Chart& chart, const BoundarySegment& seg, double l, double t) {
    const Vec2 X = seg.point(l);
    const auto tg = chart.tangents(X, t);
    const FrameData f = frame_from_tangents(tg[0], tg[1], false);
    const Vec3 tau = edge_tangent(f, seg.param_normal);
    return (tau / tau.norm()).cross(f.n);
}

/// dn/dX_alpha. Uses analytic second derivatives when the chart provides
/// them, otherwise central differences of the unit normal itself.
inline std::array<Vec3, 2> normal_derivatives(const Chart& chart, const Vec2& X, double t) {
    if (chart.second) {
        const auto tg = chart.tangents(X, t);
        const FrameData f = frame_from_tangents(tg[0], tg[1], false);
        const SecondDerivatives d = chart.second(X, t);
        std::array<Vec3, 2> out;
        for (int a = 0; a < 2; ++a) {
            const Vec3 dc = d.d(a, 0).cross(f.g2) + f.g1.cross(d.d(a, 1));
            out[a] = (dc - f.n * f.n.dot(dc)) / f.sqrtG;
        }
        return out;
    }
    const double h = chart.step();
    auto normal_at = [&](const Vec2& Y) {
        const auto tg = chart.tangents(Y, t);
        return Vec3(tg[0].cross(tg[1]).normalized());
    };
    const Vec2 er(h, 0.0), es(0.0, h);
    return {(normal_at(X + er) - normal_at(X - er)) / (2 * h),
            (normal_at(X + es) - normal_at(X - es)) / (2 * h)};
}

/// Mean curvature H = -div_Gamma n = -g^alpha . dn/dX_alpha, in the direction
/// of the chart normal (g1 x g2)/|g1 x g2|.
inline double mean_curvature(const Chart& chart, const Vec2& X, double t) {
    const FrameData f = frame(chart, X, t);
    const auto dn = normal_derivatives(chart, X, t);
    return -(f.gup1.dot(dn[0]) + f.gup2.dot(dn[1]));
}

/// Coefficients of dg3/dX1 = c1 g1 + c2 g2 and dg3/dX2 = c3 g1 + c4 g2 from
/// the closed-form quotients of the second fundamental form.
struct WeingartenCoeffs {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;

    Vec3 reconstruct(int alpha, const FrameData& f) const {
        return alpha == 0 ? Vec3(c1 * f.g1 + c2 * f.g2) : Vec3(c3 * f.g1 + c4 * f.g2);
    }
};

inline WeingartenCoeffs weingarten_coeffs(const Chart& chart, const Vec2& X, double t) {
    const FrameData f = frame(chart, X, t);
    const SecondDerivatives d = second_derivatives(chart, X, t);
    const double L11 = d.rr.dot(f.n);
    const double L12 = d.rs.dot(f.n);
    const double L22 = d.ss.dot(f.n);
    const double g11 = f.g(0, 0), g12 = f.g(0, 1), g22 = f.g(1, 1);
    WeingartenCoeffs c;
    c.c1 = (g12 * L12 - g22 * L11) / f.G;
    c.c2 = (g12 * L11 - g11 * L12) / f.G;
    c.c3 = (g12 * L22 - g22 * L12) / f.G;
    c.c4 = (g12 * L12 - g11 * L22) / f.G;
    return c;
}

/// max_alpha |dg3/dX_alpha - (reconstruction from the Weingarten coefficients)|.
inline double weingarten_residual(const Chart& chart, const Vec2& X, double t) {
    const FrameData f = frame(chart, X, t);
    const WeingartenCoeffs c = weingarten_coeffs(chart, X, t);
    const auto dn = normal_derivatives(chart, X, t);
    return std::max((dn[0] - c.reconstruct(0, f)).norm(), (dn[1] - c.reconstruct(1, f)).norm());
}

/// Surface divergence of the motion velocity, g^alpha . dw/dX_alpha.
inline double velocity_divergence(const Chart& chart, const FrameData& f, const Vec2& X,
                                  double t) {
    const auto dw = velocity_gradient(chart, X, t);
    return f.gup1.dot(dw[0]) + f.gup2.dot(dw[1]);
}

}  // namespace evosurf
