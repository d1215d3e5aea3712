#include "evosurf/bubble/geometry.hpp"
#include "evosurf/geometry/charts.hpp"
#include "evosurf/geometry/frame.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace evosurf;

namespace {

bubble::BubbleGeometry reference_bubble() { return {{1.0, 0.0}, {1.2, 0.0}, {0.8, 0.0}}; }

std::vector<Chart> corpus() {
    const auto bg = reference_bubble();
    const auto b = bubble::charts_for(bg);
    return {charts::plane(),
            charts::random_graph(7),
            charts::cylinder(1.3, -0.5, 0.5),
            charts::sphere_cap(1.0, 0.2, 1.2, 0.1),
            charts::sphere_cap(0.7, 0.0, 0.9, 0.0, true),
            b[0], b[1], b[2], b[3], b[4]};
}

Vec2 random_point(const Chart& c, std::mt19937_64& rng, double margin = 0.02) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const ParamRect& d = c.domain;
    const double mr = margin * d.extent_r(), ms = margin * d.extent_s();
    return {d.r_lo + mr + (d.extent_r() - 2 * mr) * U(rng),
            d.s_lo + ms + (d.extent_s() - 2 * ms) * U(rng)};
}

}  // namespace

TEST(Frame, InverseMetricAndNormalIdentities) {
    std::mt19937_64 rng(2024);
    for (const Chart& c : corpus()) {
        for (int k = 0; k < 100; ++k) {
            const Vec2 X = random_point(c, rng);
            const FrameData f = frame(c, X, 0.3);
            EXPECT_NEAR(f.gup1.dot(f.g1), 1.0, 1e-12) << c.name;
            EXPECT_NEAR(f.gup1.dot(f.g2), 0.0, 1e-12) << c.name;
            EXPECT_NEAR(f.gup2.dot(f.g1), 0.0, 1e-12) << c.name;
            EXPECT_NEAR(f.gup2.dot(f.g2), 1.0, 1e-12) << c.name;
            EXPECT_NEAR(f.n.norm(), 1.0, 1e-12);
            EXPECT_NEAR(f.n.dot(f.g1), 0.0, 1e-12 * f.g1.norm());
            EXPECT_NEAR(f.n.dot(f.g2), 0.0, 1e-12 * f.g2.norm());
            EXPECT_LT((f.ginv * f.g - Mat2::Identity()).norm(), 1e-12);
            EXPECT_NEAR(f.G, f.g.determinant(), 1e-12 * f.G);
            // g^1 sqrtG = g2 x n and g^2 sqrtG = -g1 x n
            EXPECT_LT((f.gup1 * f.sqrtG - f.g2.cross(f.n)).norm(), 1e-10);
            EXPECT_LT((f.gup2 * f.sqrtG + f.g1.cross(f.n)).norm(), 1e-10);
        }
    }
}

TEST(Frame, DiscMetricDeterminant) {
    const Chart s = bubble::chart_s(reference_bubble());
    const FrameData f = frame(s, Vec2(0.5, 0.0), 0.0);
    // R^4 r^2 with R^2 = 3591/6400, r = 1/2
    EXPECT_NEAR(f.G, 12895281.0 / 163840000.0, 1e-15);
    EXPECT_NEAR(f.n[0], 1.0, 1e-15);
    EXPECT_NEAR(f.n[1], 0.0, 1e-15);
}

TEST(Frame, BandMetricDeterminantMatchesSymbolic) {
    const Chart a2 = bubble::chart_a2(reference_bubble());
    EXPECT_NEAR(frame(a2, Vec2(0.3, 0.7), 0.0).G, 1.35140625, 1e-13);
}

TEST(Frame, DegenerateMetricThrowsAwayFromPole) {
    Chart c = charts::plane();
    c.tangents = [](const Vec2&, double) {
        return std::array<Vec3, 2>{Vec3(1, 0, 0), Vec3(2, 0, 0)};
    };
    EXPECT_THROW(frame(c, Vec2(0.5, 0.5), 0.0), DegenerateMetric);
    const Chart d = charts::disc();
    EXPECT_NO_THROW(frame(d, Vec2(0.0, 0.3), 0.0));
    EXPECT_TRUE(frame(d, Vec2(0.0, 0.3), 0.0).pole);
}

TEST(Frame, UnitSphereNormalIsRadial) {
    bubble::BubbleGeometry g{{1.0, 0.0}, {1.2, 0.0}, {0.0, 0.0}};
    const Chart a1 = bubble::chart_a1(g);
    std::mt19937_64 rng(5);
    for (int k = 0; k < 100; ++k) {
        const Vec2 X = random_point(a1, rng);
        const FrameData f = frame(a1, X, 0.0);
        const Vec3 x = a1.map(X, 0.0);
        EXPECT_NEAR(x.norm(), 1.0, 1e-14);
        EXPECT_LT(f.n.cross(x).norm(), 1e-12);
    }
}

TEST(Conormal, DiscEdge) {
    const Chart s = bubble::chart_s(reference_bubble());
    const BoundarySegment seg = segment(s, Edge::r_hi);
    for (int j = 0; j < 16; ++j) {
        const double th = 2 * pi * j / 16;
        const Vec3 nu = conormal(s, seg, th, 0.0);
        EXPECT_NEAR(nu[0], 0.0, 1e-14);
        EXPECT_NEAR(nu[1], std::cos(th), 1e-14);
        EXPECT_NEAR(nu[2], std::sin(th), 1e-14);
    }
}

TEST(Conormal, BandEdgeOfSphereA) {
    const Chart a2 = bubble::chart_a2(reference_bubble());
    const Vec3 nu = conormal(a2, segment(a2, Edge::r_hi), 0.0, 0.0);
    EXPECT_NEAR(nu[0], 0.74906191332893171, 1e-14);
    EXPECT_NEAR(nu[1], -0.6625, 1e-14);
    EXPECT_NEAR(nu[2], 0.0, 1e-14);
    EXPECT_NEAR(nu.dot(frame(a2, Vec2(1.0, 0.0), 0.0).n), 0.0, 1e-14);
}

TEST(Conormal, PlaneEdge) {
    const Chart p = charts::plane();
    const Vec3 nu = conormal(p, segment(p, Edge::r_hi), 0.4, 0.0);
    EXPECT_EQ(nu, Vec3(1, 0, 0));
}

TEST(Conormal, UnitTangentAndOutward) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (const Chart& c : corpus()) {
        for (Edge e : all_edges) {
            if (c.role(e) != EdgeRole::physical && c.role(e) != EdgeRole::interface) continue;
            const BoundarySegment seg = segment(c, e);
            for (int k = 0; k < 20; ++k) {
                const double l = seg.l_lo + seg.length() * U(rng);
                const Vec3 nu = conormal(c, seg, l, 0.1);
                const FrameData f = frame(c, seg.point(l), 0.1);
                EXPECT_NEAR(nu.norm(), 1.0, 1e-12);
                EXPECT_NEAR(nu.dot(f.n), 0.0, 1e-12);
                // pulled back to the parameter plane, nu points out of U
                const Vec2 dX(f.gup1.dot(nu), f.gup2.dot(nu));
                EXPECT_GT(dX.dot(seg.param_normal), 0.0) << c.name << " " << edge_name(e);
            }
        }
    }
}

TEST(Curvature, SphereCapOutwardNormal) {
    const Chart cap = charts::sphere_cap(1.0, 0.0, 1.0);
    std::mt19937_64 rng(3);
    for (int k = 0; k < 20; ++k) {
        const Vec2 X = random_point(cap, rng, 0.05);
        EXPECT_NEAR(mean_curvature(cap, X, 0.0), -2.0, 1e-12);
    }
}

TEST(Curvature, BubbleSheets) {
    const auto ch = bubble::charts_for(reference_bubble());
    const Vec2 X(0.4, 1.1);
    // A charts have the normal pointing into sphere A, B charts out of sphere B.
    EXPECT_NEAR(mean_curvature(ch[bubble::A1], X, 0.0), 2.0, 1e-12);
    EXPECT_NEAR(mean_curvature(ch[bubble::A2], X, 0.0), 2.0, 1e-12);
    EXPECT_NEAR(mean_curvature(ch[bubble::B1], X, 0.0), -2.0 / 1.2, 1e-12);
    EXPECT_NEAR(mean_curvature(ch[bubble::B2], X, 0.0), -2.0 / 1.2, 1e-12);
    EXPECT_NEAR(mean_curvature(ch[bubble::S], X, 0.0), 0.0, 1e-14);
}

TEST(Curvature, CylinderFiniteDifferenceMode) {
    Chart cyl = charts::cylinder(1.0, 0.0, 1.0);
    cyl.second = nullptr;
    const double H = mean_curvature(cyl, Vec2(0.5, 0.3), 0.0);
    EXPECT_NEAR(std::abs(H), 1.0, 1e-6);
}

TEST(Weingarten, PlaneIsZero) {
    const WeingartenCoeffs c = weingarten_coeffs(charts::plane(), Vec2(0.3, 0.6), 0.0);
    EXPECT_EQ(c.c1, 0.0);
    EXPECT_EQ(c.c2, 0.0);
    EXPECT_EQ(c.c3, 0.0);
    EXPECT_EQ(c.c4, 0.0);
}

TEST(Weingarten, TraceIsMinusMeanCurvature) {
    std::mt19937_64 rng(17);
    for (const Chart& c : corpus()) {
        for (int k = 0; k < 20; ++k) {
            const Vec2 X = random_point(c, rng, 0.05);
            const WeingartenCoeffs w = weingarten_coeffs(c, X, 0.2);
            EXPECT_NEAR(w.c1 + w.c4, -mean_curvature(c, X, 0.2), 1e-10) << c.name;
        }
    }
    const Chart cap = charts::sphere_cap(1.0, 0.0, 1.2);
    const WeingartenCoeffs w = weingarten_coeffs(cap, Vec2(0.5, 0.5), 0.0);
    EXPECT_NEAR(std::abs(w.c1 + w.c4), 2.0, 1e-12);
}

TEST(Weingarten, ReconstructionAnalyticAndFiniteDifference) {
    std::mt19937_64 rng(23);
    for (const Chart& c : corpus()) {
        Chart fd = c;
        fd.second = nullptr;
        fd.fd_step = 1e-5;
        for (int k = 0; k < 20; ++k) {
            const Vec2 X = random_point(c, rng, 0.05);
            EXPECT_LE(weingarten_residual(c, X, 0.1), 1e-8) << c.name;
            EXPECT_LE(weingarten_residual(fd, X, 0.1), 1e-6) << c.name;
        }
    }
}
