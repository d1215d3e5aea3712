#pragma once

#include "evosurf/core.hpp"

#include <array>
#include <functional>
#include <string>

namespace evosurf {

/// Role of one edge of the rectangular parameter domain.
enum class EdgeRole { physical, periodic, pole, interface };

/// Edges of the parameter rectangle [r_lo, r_hi] x [s_lo, s_hi]. X1 = r, X2 = s.
enum class Edge { r_lo = 0, r_hi = 1, s_lo = 2, s_hi = 3 };

inline constexpr std::array<Edge, 4> all_edges{Edge::r_lo, Edge::r_hi, Edge::s_lo, Edge::s_hi};

inline const char* edge_name(Edge e) {
    switch (e) {
        case Edge::r_lo: return "r_lo";
        case Edge::r_hi: return "r_hi";
        case Edge::s_lo: return "s_lo";
        case Edge::s_hi: return "s_hi";
    }
    return "?";
}

struct ParamRect {
    double r_lo = 0.0, r_hi = 1.0, s_lo = 0.0, s_hi = 1.0;

    double extent_r() const { return r_hi - r_lo; }
    double extent_s() const { return s_hi - s_lo; }
    bool contains(const Vec2& X, double slack = 0.0) const {
        return X[0] >= r_lo - slack && X[0] <= r_hi + slack && X[1] >= s_lo - slack &&
               X[1] <= s_hi + slack;
    }
};

/// Second parametric derivatives of a chart: d2x/dr2, d2x/drds, d2x/ds2.
struct SecondDerivatives {
    Vec3 rr = Vec3::Zero();
    Vec3 rs = Vec3::Zero();
    Vec3 ss = Vec3::Zero();

    /// d g_beta / d X_alpha
    const Vec3& d(int alpha, int beta) const {
        if (alpha == 0 && beta == 0) return rr;
        if (alpha == 1 && beta == 1) return ss;
        return rs;
    }
};

/// A time-dependent parametrization x(X, t) of an evolving surface patch over a
/// parameter rectangle, together with its first derivatives, its motion
/// velocity w = dx/dt and the role of each parameter edge.
///
/// `second` is optional; when empty, second derivatives are obtained by central
/// differences of `tangents` with step `fd_step` (or 1e-5 times the domain
/// extent when `fd_step` is zero).
struct Chart {
    using MapFn = std::function<Vec3(const Vec2&, double)>;
    using TangentFn = std::function<std::array<Vec3, 2>(const Vec2&, double)>;
    using SecondFn = std::function<SecondDerivatives(const Vec2&, double)>;

    std::string name;
    MapFn map;
    TangentFn tangents;
    MapFn velocity;
    SecondFn second;
    ParamRect domain;
    std::array<EdgeRole, 4> roles{EdgeRole::physical, EdgeRole::physical, EdgeRole::physical,
                                  EdgeRole::physical};
    std::array<std::string, 4> tags{};
    double fd_step = 0.0;
    /// Set when the map does not depend on t; lets solvers cache geometry.
    bool stationary = false;

    EdgeRole role(Edge e) const { return roles[static_cast<int>(e)]; }
    const std::string& tag(Edge e) const { return tags[static_cast<int>(e)]; }

    double step() const {
        if (fd_step > 0.0) return fd_step;
        return 1e-5 * std::max(domain.extent_r(), domain.extent_s());
    }

    bool has_analytic_second() const { return static_cast<bool>(second); }

    /// True when X lies on an edge tagged `pole`.
    bool on_pole(const Vec2& X, double tol = 1e-14) const {
        for (Edge e : all_edges) {
            if (role(e) != EdgeRole::pole) continue;
            switch (e) {
                case Edge::r_lo: if (std::abs(X[0] - domain.r_lo) <= tol) return true; break;
                case Edge::r_hi: if (std::abs(X[0] - domain.r_hi) <= tol) return true; break;
                case Edge::s_lo: if (std::abs(X[1] - domain.s_lo) <= tol) return true; break;
                case Edge::s_hi: if (std::abs(X[1] - domain.s_hi) <= tol) return true; break;
            }
        }
        return false;
    }
};

/// Second derivatives of a chart, analytic when available, else central
/// differences of the tangent vectors.
inline SecondDerivatives second_derivatives(const Chart& chart, const Vec2& X, double t) {
    if (chart.second) return chart.second(X, t);
    const double h = chart.step();
    const Vec2 er(h, 0.0), es(0.0, h);
    const auto rp = chart.tangents(X + er, t), rm = chart.tangents(X - er, t);
    const auto sp = chart.tangents(X + es, t), sm = chart.tangents(X - es, t);
    SecondDerivatives d;
    d.rr = (rp[0] - rm[0]) / (2 * h);
    d.ss = (sp[1] - sm[1]) / (2 * h);
    d.rs = 0.5 * ((sp[0] - sm[0]) / (2 * h) + (rp[1] - rm[1]) / (2 * h));
    return d;
}

/// Derivative of the motion velocity with respect to X_alpha (fourth-order
/// central differences).
inline std::array<Vec3, 2> velocity_gradient(const Chart& chart, const Vec2& X, double t) {
    const double h = chart.step();
    auto d = [&](const Vec2& e) {
        return Vec3((8.0 * (chart.velocity(X + e, t) - chart.velocity(X - e, t)) -
                     (chart.velocity(X + 2 * e, t) - chart.velocity(X - 2 * e, t))) /
                    (12 * h));
    };
    return {d(Vec2(h, 0.0)), d(Vec2(0.0, h))};
}

/// One edge of the parameter rectangle, parametrized by l in [l_lo, l_hi], with
/// the outward unit normal of the parameter domain.
struct BoundarySegment {
    Edge edge = Edge::r_hi;
    double l_lo = 0.0, l_hi = 1.0;
    Vec2 param_normal = Vec2(1.0, 0.0);
    double fixed = 1.0;  // the constant coordinate along the edge

    Vec2 point(double l) const {
        if (edge == Edge::r_lo || edge == Edge::r_hi) return {fixed, l};
        return {l, fixed};
    }
    double length() const { return l_hi - l_lo; }
};

inline BoundarySegment segment(const ParamRect& d, Edge e) {
    switch (e) {
        case Edge::r_lo: return {e, d.s_lo, d.s_hi, Vec2(-1.0, 0.0), d.r_lo};
        case Edge::r_hi: return {e, d.s_lo, d.s_hi, Vec2(1.0, 0.0), d.r_hi};
        case Edge::s_lo: return {e, d.r_lo, d.r_hi, Vec2(0.0, -1.0), d.s_lo};
        case Edge::s_hi: return {e, d.r_lo, d.r_hi, Vec2(0.0, 1.0), d.s_hi};
    }
    throw Error("unknown edge");
}

inline BoundarySegment segment(const Chart& c, Edge e) { return segment(c.domain, e); }

}  // namespace evosurf
