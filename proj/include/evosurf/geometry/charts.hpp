#pragma once

// Ready-made charts: planes, graphs, surfaces of revolution (spheres, caps,
// cylinders, discs). Everything here carries analytic first and second
// derivatives and an analytic motion velocity.

#include "evosurf/geometry/chart.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <vector>

namespace evosurf::charts {

/// Axial coordinate and radius of a surface of revolution, with derivatives
/// in the profile parameter r and in time.
struct ProfilePoint {
    double z = 0, z_r = 0, z_rr = 0, z_t = 0;
    double rho = 0, rho_r = 0, rho_rr = 0, rho_t = 0;
};

using ProfileFn = std::function<ProfilePoint(double r, double t)>;

/// Surface of revolution X = (r, theta), theta in [0, 2 pi] periodic. The
/// axial coordinate goes into component `axis` (0 or 2) and the radius spans
/// the remaining two components as rho (cos theta, sin theta).
inline Chart revolution(std::string name, ProfileFn profile, double r_lo, double r_hi,
                        EdgeRole lo_role, EdgeRole hi_role, int axis = 2) {
    const int a = axis, b = axis == 2 ? 0 : 1, c = axis == 2 ? 1 : 2;
    auto assemble = [a, b, c](double axial, double radial_c, double radial_s) {
        Vec3 v;
        v[a] = axial;
        v[b] = radial_c;
        v[c] = radial_s;
        return v;
    };
    Chart ch;
    ch.name = std::move(name);
    ch.domain = {r_lo, r_hi, 0.0, 2 * pi};
    ch.roles = {lo_role, hi_role, EdgeRole::periodic, EdgeRole::periodic};
    ch.map = [profile, assemble](const Vec2& X, double t) {
        const ProfilePoint p = profile(X[0], t);
        return assemble(p.z, p.rho * std::cos(X[1]), p.rho * std::sin(X[1]));
    };
    ch.tangents = [profile, assemble](const Vec2& X, double t) {
        const ProfilePoint p = profile(X[0], t);
        const double cs = std::cos(X[1]), sn = std::sin(X[1]);
        return std::array<Vec3, 2>{assemble(p.z_r, p.rho_r * cs, p.rho_r * sn),
                                   assemble(0.0, -p.rho * sn, p.rho * cs)};
    };
    ch.second = [profile, assemble](const Vec2& X, double t) {
        const ProfilePoint p = profile(X[0], t);
        const double cs = std::cos(X[1]), sn = std::sin(X[1]);
        SecondDerivatives d;
        d.rr = assemble(p.z_rr, p.rho_rr * cs, p.rho_rr * sn);
        d.rs = assemble(0.0, -p.rho_r * sn, p.rho_r * cs);
        d.ss = assemble(0.0, -p.rho * cs, -p.rho * sn);
        return d;
    };
    ch.velocity = [profile, assemble](const Vec2& X, double t) {
        const ProfilePoint p = profile(X[0], t);
        return assemble(p.z_t, p.rho_t * std::cos(X[1]), p.rho_t * std::sin(X[1]));
    };
    return ch;
}

/// Static plane patch x = (X1, X2, 0).
inline Chart plane(const ParamRect& d = {},
                   std::array<EdgeRole, 4> roles = {EdgeRole::physical, EdgeRole::physical,
                                                    EdgeRole::physical, EdgeRole::physical}) {
    Chart ch;
    ch.name = "plane";
    ch.domain = d;
    ch.roles = roles;
    ch.map = [](const Vec2& X, double) { return Vec3(X[0], X[1], 0.0); };
    ch.tangents = [](const Vec2&, double) {
        return std::array<Vec3, 2>{Vec3(1, 0, 0), Vec3(0, 1, 0)};
    };
    ch.second = [](const Vec2&, double) { return SecondDerivatives{}; };
    ch.velocity = [](const Vec2&, double) { return Vec3::Zero().eval(); };
    ch.stationary = true;
    return ch;
}

/// Uniformly scaling plane x = (s0 + s1 t)(X1, X2, 0).
inline Chart scaled_plane(double s0, double s1, const ParamRect& d = {}) {
    Chart ch = plane(d);
    ch.name = "scaled_plane";
    ch.stationary = s1 == 0.0;
    ch.map = [=](const Vec2& X, double t) { return Vec3((s0 + s1 * t) * X[0], (s0 + s1 * t) * X[1], 0.0); };
    ch.tangents = [=](const Vec2&, double t) {
        const double s = s0 + s1 * t;
        return std::array<Vec3, 2>{Vec3(s, 0, 0), Vec3(0, s, 0)};
    };
    ch.velocity = [=](const Vec2& X, double) { return Vec3(s1 * X[0], s1 * X[1], 0.0); };
    return ch;
}

/// Height function z = h(X1, X2) with its first and second derivatives.
struct Height {
    std::function<double(const Vec2&)> h, hx, hy, hxx, hxy, hyy;
};

/// Static graph chart x = (X1, X2, h(X1, X2)).
inline Chart graph(Height f, const ParamRect& d = {}, std::string name = "graph") {
    Chart ch;
    ch.name = std::move(name);
    ch.domain = d;
    ch.map = [f](const Vec2& X, double) { return Vec3(X[0], X[1], f.h(X)); };
    ch.tangents = [f](const Vec2& X, double) {
        return std::array<Vec3, 2>{Vec3(1, 0, f.hx(X)), Vec3(0, 1, f.hy(X))};
    };
    ch.second = [f](const Vec2& X, double) {
        SecondDerivatives s;
        s.rr = Vec3(0, 0, f.hxx(X));
        s.rs = Vec3(0, 0, f.hxy(X));
        s.ss = Vec3(0, 0, f.hyy(X));
        return s;
    };
    ch.velocity = [](const Vec2&, double) { return Vec3::Zero().eval(); };
    ch.stationary = true;
    return ch;
}

/// Smooth random graph: h = sum_k amp_k sin(kx_k X1 + ky_k X2 + phase_k).
inline Chart random_graph(unsigned seed, int modes = 3, double amplitude = 0.3,
                          const ParamRect& d = {}) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    struct Mode { double amp, kx, ky, ph; };
    auto ms = std::make_shared<std::vector<Mode>>();
    for (int k = 0; k < modes; ++k)
        ms->push_back({amplitude * U(rng) / modes, 2.0 * U(rng) + 0.5, 2.0 * U(rng) - 0.5,
                       pi * U(rng)});
    auto sum = [ms](const Vec2& X, int dx, int dy) {
        double s = 0.0;
        for (const Mode& m : *ms) {
            const double arg = m.kx * X[0] + m.ky * X[1] + m.ph;
            const int order = dx + dy;
            double trig = 0.0;
            switch (order % 4) {
                case 0: trig = std::sin(arg); break;
                case 1: trig = std::cos(arg); break;
                case 2: trig = -std::sin(arg); break;
                default: trig = -std::cos(arg); break;
            }
            s += m.amp * std::pow(m.kx, dx) * std::pow(m.ky, dy) * trig;
        }
        return s;
    };
    Height f{[sum](const Vec2& X) { return sum(X, 0, 0); },
             [sum](const Vec2& X) { return sum(X, 1, 0); },
             [sum](const Vec2& X) { return sum(X, 0, 1); },
             [sum](const Vec2& X) { return sum(X, 2, 0); },
             [sum](const Vec2& X) { return sum(X, 1, 1); },
             [sum](const Vec2& X) { return sum(X, 0, 2); }};
    return graph(std::move(f), d, "random_graph");
}

/// Cylinder (r, theta) -> (R cos theta, R sin theta, r), r in [z_lo, z_hi].
inline Chart cylinder(double radius = 1.0, double z_lo = 0.0, double z_hi = 1.0) {
    auto prof = [radius](double r, double) {
        ProfilePoint p;
        p.z = r;
        p.z_r = 1.0;
        p.rho = radius;
        return p;
    };
    Chart ch = revolution("cylinder", prof, z_lo, z_hi, EdgeRole::physical, EdgeRole::physical);
    ch.stationary = true;
    return ch;
}

/// Flat disc of radius R in the plane z = 0: (r, theta) -> R r (cos, sin, 0).
inline Chart disc(double radius = 1.0) {
    auto prof = [radius](double r, double) {
        ProfilePoint p;
        p.rho = radius * r;
        p.rho_r = radius;
        return p;
    };
    Chart ch = revolution("disc", prof, 0.0, 1.0, EdgeRole::pole, EdgeRole::physical);
    ch.stationary = true;
    return ch;
}

/// Spherical cap of radius a(t) = a0 + a1 t centred at the origin. The polar
/// angle is phi = Phi(t) r with Phi(t) = Phi0 + Phi1 t and r in [0, 1]; the
/// pole sits at r = 0. `south` reflects the cap through z = 0.
inline Chart sphere_cap(double a0, double a1, double Phi0, double Phi1 = 0.0, bool south = false) {
    const double sgn = south ? -1.0 : 1.0;
    auto prof = [=](double r, double t) {
        const double a = a0 + a1 * t, Phi = Phi0 + Phi1 * t, phi = Phi * r;
        const double c = std::cos(phi), s = std::sin(phi);
        ProfilePoint p;
        p.z = sgn * a * c;
        p.z_r = -sgn * a * Phi * s;
        p.z_rr = -sgn * a * Phi * Phi * c;
        p.z_t = sgn * (a1 * c - a * s * Phi1 * r);
        p.rho = a * s;
        p.rho_r = a * Phi * c;
        p.rho_rr = -a * Phi * Phi * s;
        p.rho_t = a1 * s + a * c * Phi1 * r;
        return p;
    };
    Chart ch = revolution(south ? "sphere_cap_south" : "sphere_cap", prof, 0.0, 1.0,
                          EdgeRole::pole, EdgeRole::physical);
    ch.stationary = a1 == 0.0 && Phi1 == 0.0;
    return ch;
}

/// Whole sphere of radius a0 + a1 t in the equal-area (cylindrical) chart
/// (s, theta) -> a (sqrt(1-s^2) cos, sqrt(1-s^2) sin, s), s in [-1, 1]. The
/// metric determinant is a^4 everywhere; both s-edges are poles.
inline Chart sphere_equal_area(double a0, double a1 = 0.0) {
    auto prof = [=](double s, double t) {
        const double a = a0 + a1 * t, q = std::sqrt(1.0 - s * s);
        ProfilePoint p;
        p.z = a * s;
        p.z_r = a;
        p.z_t = a1 * s;
        p.rho = a * q;
        p.rho_r = -a * s / q;
        p.rho_rr = -a / (q * q * q);
        p.rho_t = a1 * q;
        return p;
    };
    Chart ch = revolution("sphere_equal_area", prof, -1.0, 1.0, EdgeRole::pole, EdgeRole::pole);
    ch.stationary = a1 == 0.0;
    return ch;
}

}  // namespace evosurf::charts
