#pragma once

// Double bubble: sphere A (centre (-m, 0, 0), radius a) and sphere B (centre
// (m, 0, 0), radius b) cut by the plane x1 = n, n = (a^2 - b^2)/(4m), and the
// separating disc S of radius R, R^2 = a^2 - (m + n)^2. Each sphere cap is
// covered by a polar chart around its pole (A1, B2) and a band chart (A2, B1)
// reaching the common circle at r = 1. All charts are surfaces of revolution
// about the x1 axis with X = (r, theta), r in [0, 1], theta periodic.

#include "evosurf/calculus/theorems.hpp"
#include "evosurf/geometry/charts.hpp"

#include <array>
#include <sstream>

namespace evosurf::bubble {

/// v(t) = v0 + v1 t.
struct Affine {
    double v0 = 0.0, v1 = 0.0;
    double operator()(double t) const { return v0 + v1 * t; }
    double rate() const { return v1; }
};

struct BubbleGeometry {
    Affine a{1.0, 0.0}, b{1.2, 0.0}, m{0.8, 0.0};

    double n(double t) const {
        const double A = a(t), B = b(t), M = m(t);
        return (A * A - B * B) / (4 * M);
    }
    double n_rate(double t) const {
        const double A = a(t), B = b(t), M = m(t);
        return (2 * A * a.rate() - 2 * B * b.rate()) / (4 * M) -
               (A * A - B * B) * m.rate() / (4 * M * M);
    }
    double R2(double t) const {
        const double s = m(t) + n(t);
        return a(t) * a(t) - s * s;
    }
    double R(double t) const { return std::sqrt(R2(t)); }
    double R_rate(double t) const {
        return (a(t) * a.rate() - (m(t) + n(t)) * (m.rate() + n_rate(t))) / R(t);
    }
    bool stationary() const { return a.v1 == 0.0 && b.v1 == 0.0 && m.v1 == 0.0; }

    /// |(a^2 - (m+n)^2) - (b^2 - (m-n)^2)|; zero up to roundoff by the choice of n.
    double consistency_residual(double t) const {
        const double N = n(t), M = m(t), A = a(t), B = b(t);
        return std::abs((A * A - (M + N) * (M + N)) - (B * B - (M - N) * (M - N)));
    }

    /// Throws GeometryInvalid unless 0 < m < a < b < 2m at t.
    void validate(double t) const {
        const double A = a(t), B = b(t), M = m(t);
        if (!(0.0 < M && M < A && A < B && B < 2 * M)) {
            std::ostringstream os;
            os << "double bubble needs 0 < m < a < b < 2m; got a=" << A << " b=" << B << " m=" << M
               << " at t=" << t;
            throw GeometryInvalid(os.str());
        }
    }

    /// validate() on `samples + 1` equally spaced times in [t0, t1].
    void validate(double t0, double t1, int samples = 1000) const {
        for (int k = 0; k <= samples; ++k) validate(t0 + (t1 - t0) * k / samples);
    }
};

enum Patch : int { A1 = 0, A2 = 1, B1 = 2, B2 = 3, S = 4 };
inline constexpr std::array<const char*, 5> patch_names{"A1", "A2", "B1", "B2", "S"};

/// Interface tags shared by the paired edges.
inline const std::string tag_gamma0 = "gamma0";
inline const std::string tag_seam_a = "seamA";
inline const std::string tag_seam_b = "seamB";

namespace detail {

inline Chart finish(Chart ch, const BubbleGeometry& g, std::string lo_tag, std::string hi_tag) {
    ch.tags[static_cast<int>(Edge::r_lo)] = std::move(lo_tag);
    ch.tags[static_cast<int>(Edge::r_hi)] = std::move(hi_tag);
    ch.stationary = g.stationary();
    return ch;
}

}  // namespace detail

/// Polar chart of sphere A around its far pole (-a - m, 0, 0):
/// x1 = -a sqrt(1 - 3r^2/4) - m, rho = sqrt(3) a r / 2.
inline Chart chart_a1(const BubbleGeometry& g) {
    auto prof = [g](double r, double t) {
        const double a = g.a(t), at = g.a.rate(), mt = g.m.rate();
        const double q = std::sqrt(1.0 - 0.75 * r * r);
        charts::ProfilePoint p;
        p.z = -a * q - g.m(t);
        p.z_r = a * 0.75 * r / q;
        p.z_rr = 0.75 * a / (q * q * q);
        p.z_t = -at * q - mt;
        p.rho = std::sqrt(3.0) * a * r / 2;
        p.rho_r = std::sqrt(3.0) * a / 2;
        p.rho_t = std::sqrt(3.0) * at * r / 2;
        return p;
    };
    return detail::finish(charts::revolution("A1", prof, 0.0, 1.0, EdgeRole::pole,
                                             EdgeRole::interface, 0),
                          g, "", tag_seam_a);
}

/// Band of sphere A from the seam (r = 0) to the common circle (r = 1):
/// s = (m + n + a/2) r - a/2, x1 = s - m, rho = sqrt(a^2 - s^2).
inline Chart chart_a2(const BubbleGeometry& g) {
    auto prof = [g](double r, double t) {
        const double a = g.a(t), m = g.m(t), n = g.n(t);
        const double at = g.a.rate(), mt = g.m.rate(), nt = g.n_rate(t);
        const double k = m + n + 0.5 * a;
        const double s = k * r - 0.5 * a;
        const double st = (mt + nt + 0.5 * at) * r - 0.5 * at;
        charts::ProfilePoint p;
        p.z = s - m;
        p.z_r = k;
        p.z_t = st - mt;
        p.rho = std::sqrt(a * a - s * s);
        p.rho_r = -s * k / p.rho;
        p.rho_rr = -k * k * a * a / (p.rho * p.rho * p.rho);
        p.rho_t = (a * at - s * st) / p.rho;
        return p;
    };
    return detail::finish(charts::revolution("A2", prof, 0.0, 1.0, EdgeRole::interface,
                                             EdgeRole::interface, 0),
                          g, tag_seam_a, tag_gamma0);
}

/// Band of sphere B from the seam (r = 0) to the common circle (r = 1):
/// s = (m - n + b/2) r - b/2, x1 = m - s, rho = sqrt(b^2 - s^2).
inline Chart chart_b1(const BubbleGeometry& g) {
    auto prof = [g](double r, double t) {
        const double b = g.b(t), m = g.m(t), n = g.n(t);
        const double bt = g.b.rate(), mt = g.m.rate(), nt = g.n_rate(t);
        const double k = m - n + 0.5 * b;
        const double s = k * r - 0.5 * b;
        const double st = (mt - nt + 0.5 * bt) * r - 0.5 * bt;
        charts::ProfilePoint p;
        p.z = m - s;
        p.z_r = -k;
        p.z_t = mt - st;
        p.rho = std::sqrt(b * b - s * s);
        p.rho_r = -s * k / p.rho;
        p.rho_rr = -k * k * b * b / (p.rho * p.rho * p.rho);
        p.rho_t = (b * bt - s * st) / p.rho;
        return p;
    };
    return detail::finish(charts::revolution("B1", prof, 0.0, 1.0, EdgeRole::interface,
                                             EdgeRole::interface, 0),
                          g, tag_seam_b, tag_gamma0);
}

/// B1 with the ramp (m + n + b/2) r - b/2 as originally printed. Its r = 1
/// edge lands at x1 = -n and misses the common circle; kept for comparison.
inline Chart chart_b1_printed(const BubbleGeometry& g) {
    auto prof = [g](double r, double t) {
        const double b = g.b(t), m = g.m(t), n = g.n(t);
        const double bt = g.b.rate(), mt = g.m.rate(), nt = g.n_rate(t);
        const double k = m + n + 0.5 * b;
        const double s = k * r - 0.5 * b;
        const double st = (mt + nt + 0.5 * bt) * r - 0.5 * bt;
        charts::ProfilePoint p;
        p.z = m - s;
        p.z_r = -k;
        p.z_t = mt - st;
        p.rho = std::sqrt(b * b - s * s);
        p.rho_r = -s * k / p.rho;
        p.rho_rr = -k * k * b * b / (p.rho * p.rho * p.rho);
        p.rho_t = (b * bt - s * st) / p.rho;
        return p;
    };
    return detail::finish(charts::revolution("B1_printed", prof, 0.0, 1.0, EdgeRole::interface,
                                             EdgeRole::interface, 0),
                          g, tag_seam_b, tag_gamma0);
}

/// Polar chart of sphere B around its far pole (b + m, 0, 0):
/// x1 = b sqrt(1 - 3r^2/4) + m, rho = sqrt(3) b r / 2.
inline Chart chart_b2(const BubbleGeometry& g) {
    auto prof = [g](double r, double t) {
        const double b = g.b(t), bt = g.b.rate(), mt = g.m.rate();
        const double q = std::sqrt(1.0 - 0.75 * r * r);
        charts::ProfilePoint p;
        p.z = b * q + g.m(t);
        p.z_r = -b * 0.75 * r / q;
        p.z_rr = -0.75 * b / (q * q * q);
        p.z_t = bt * q + mt;
        p.rho = std::sqrt(3.0) * b * r / 2;
        p.rho_r = std::sqrt(3.0) * b / 2;
        p.rho_t = std::sqrt(3.0) * bt * r / 2;
        return p;
    };
    return detail::finish(charts::revolution("B2", prof, 0.0, 1.0, EdgeRole::pole,
                                             EdgeRole::interface, 0),
                          g, "", tag_seam_b);
}

/// Separating disc x1 = n, rho = R r.
inline Chart chart_s(const BubbleGeometry& g) {
    auto prof = [g](double r, double t) {
        charts::ProfilePoint p;
        p.z = g.n(t);
        p.z_t = g.n_rate(t);
        p.rho = g.R(t) * r;
        p.rho_r = g.R(t);
        p.rho_t = g.R_rate(t) * r;
        return p;
    };
    return detail::finish(charts::revolution("S", prof, 0.0, 1.0, EdgeRole::pole,
                                             EdgeRole::interface, 0),
                          g, "", tag_gamma0);
}

/// The five charts in Patch order. Validates the geometry at t.
inline std::array<Chart, 5> charts_for(const BubbleGeometry& g, double t = 0.0) {
    g.validate(t);
    return {chart_a1(g), chart_a2(g), chart_b1(g), chart_b2(g), chart_s(g)};
}

/// Largest pairwise distance between the r = 1 edges of A2, B1 (or the
/// given replacement for B1) and S over `ntheta` equally spaced angles.
inline double interface_mismatch(const Chart& a2, const Chart& b1, const Chart& s, double t,
                                 int ntheta = 64) {
    double worst = 0.0;
    for (int j = 0; j < ntheta; ++j) {
        const Vec2 X(1.0, 2 * pi * (j + 0.5) / ntheta);
        const Vec3 xa = a2.map(X, t), xb = b1.map(X, t), xs = s.map(X, t);
        worst = std::max({worst, (xa - xb).norm(), (xa - xs).norm(), (xb - xs).norm()});
    }
    return worst;
}

/// Closed-form co-normals on the common circle at angle theta.
struct Conormals {
    Vec3 A, B, S;
    Vec3 B_printed;  // (-sqrt(b^2-(m+n)^2)/b, (m+n) cos/b, (m+n) sin/b)
};

inline Conormals analytic_conormals_unchecked(const BubbleGeometry& g, double theta, double t) {
    const double a = g.a(t), b = g.b(t), m = g.m(t), n = g.n(t), R = g.R(t);
    const double c = std::cos(theta), s = std::sin(theta);
    Conormals out;
    out.A = Vec3(R / a, -(m + n) * c / a, -(m + n) * s / a);
    out.B = Vec3(-R / b, (n - m) * c / b, (n - m) * s / b);
    out.S = Vec3(0.0, c, s);
    out.B_printed =
        Vec3(-std::sqrt(b * b - (m + n) * (m + n)) / b, (m + n) * c / b, (m + n) * s / b);
    return out;
}

/// Numeric co-normal of `chart` on its r = 1 edge at angle theta.
inline Vec3 numeric_conormal_r1(const Chart& chart, double theta, double t) {
    return conormal(chart, segment(chart, Edge::r_hi), theta, t);
}

/// Closed-form co-normals, each checked against the numeric co-normal of
/// the corresponding chart; throws GeometryInvalid beyond `tol`.
inline Conormals analytic_conormals(const BubbleGeometry& g, double theta, double t,
                                    double tol = 1e-8) {
    g.validate(t);
    const Conormals c = analytic_conormals_unchecked(g, theta, t);
    const double ea = (c.A - numeric_conormal_r1(chart_a2(g), theta, t)).norm();
    const double eb = (c.B - numeric_conormal_r1(chart_b1(g), theta, t)).norm();
    const double es = (c.S - numeric_conormal_r1(chart_s(g), theta, t)).norm();
    if (ea > tol || eb > tol || es > tol) {
        std::ostringstream os;
        os << "co-normal mismatch: A " << ea << ", B " << eb << ", S " << es;
        throw GeometryInvalid(os.str());
    }
    return c;
}

/// Seam pairings (A1 r=1 with A2 r=0, B2 r=1 with B1 r=0) in a two-chart list.
inline EdgePairing seam_pairing() { return {0, Edge::r_hi, 1, Edge::r_lo}; }

struct BubbleDivergence {
    std::array<ResidualReport, 3> patches;  // Gamma_A, Gamma_B, Gamma_S
    std::array<ResidualReport, 2> seams;    // co-normal antisymmetry on the A and B seams
};

/// Divergence theorem on Gamma_A (A1 + A2), Gamma_B (B2 + B1) and Gamma_S,
/// each with its boundary integral over the common circle.
inline BubbleDivergence bubble_divergence_check(const BubbleGeometry& g, const AmbientField& phi,
                                                double t, const Resolution& res, double tol,
                                                double seam_tol = 1e-10) {
    const auto ch = charts_for(g, t);
    const std::array<Chart, 2> A{ch[A1], ch[A2]};
    const std::array<Chart, 2> B{ch[B2], ch[B1]};
    const std::array<EdgePairing, 1> pair{seam_pairing()};
    BubbleDivergence out;
    UnionReport ua = union_divergence_residual(A, pair, phi, t, res, tol, seam_tol, "bubble_divergence_A");
    UnionReport ub = union_divergence_residual(B, pair, phi, t, res, tol, seam_tol, "bubble_divergence_B");
    out.patches[0] = ua.divergence;
    out.patches[1] = ub.divergence;
    out.patches[2] = divergence_theorem_residual(ch[S], phi, t, res, tol, "bubble_divergence_S");
    out.seams[0] = ua.conormal_antisymmetry;
    out.seams[1] = ub.conormal_antisymmetry;
    return out;
}

/// Transport theorem on Gamma_A, Gamma_B and Gamma_S.
inline std::array<ResidualReport, 3> bubble_transport_check(const BubbleGeometry& g,
                                                            const ScalarFn& f, double t, double dt,
                                                            const Resolution& res, double tol) {
    const auto ch = charts_for(g, t);
    const std::array<Chart, 2> A{ch[A1], ch[A2]};
    const std::array<Chart, 2> B{ch[B2], ch[B1]};
    return {transport_theorem_residual(std::span<const Chart>(A), f, t, dt, res, tol,
                                       "bubble_transport_A"),
            transport_theorem_residual(std::span<const Chart>(B), f, t, dt, res, tol,
                                       "bubble_transport_B"),
            transport_theorem_residual(ch[S], f, t, dt, res, tol, "bubble_transport_S")};
}

}  // namespace evosurf::bubble
