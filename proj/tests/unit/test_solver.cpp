#include "evosurf/geometry/charts.hpp"
#include "evosurf/solver/laws.hpp"
#include "evosurf/solver/stepper.hpp"

#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>

#include <cmath>

using namespace evosurf;

namespace {

using BC = BoundaryCondition;

std::array<BC, 4> all(BC bc) { return {bc, bc, bc, bc}; }

/// Neumann on physical edges; pole and periodic edges need no data.
std::array<BC, 4> neumann() { return all(BC::neumann()); }

std::array<BC, 4> dirichlet_r_hi(double g) {
    std::array<BC, 4> bc = neumann();
    bc[static_cast<int>(Edge::r_hi)] = BC::dirichlet(g);
    return bc;
}

double max_abs(const Field& f) {
    double m = 0.0;
    for (double v : f) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

TEST(Rhs, ConstantStateHasZeroRhs) {
    for (const EnergyDensity& e :
         {EnergyDensity::linear(2.0), EnergyDensity::power(1.5), EnergyDensity::logarithmic()}) {
        const SolverState flat = make_state(charts::plane(), 12, 12, System::diffusion, e,
                                            neumann(), [](const Vec2&) { return 0.7; });
        EXPECT_EQ(max_abs(pde_rhs(flat).R), 0.0);
        // on a curved chart u = q / sqrtG is constant only up to roundoff
        const SolverState curved = make_state(charts::random_graph(3), 12, 12, System::diffusion,
                                              e, neumann(), [](const Vec2&) { return 0.7; });
        EXPECT_LT(max_abs(pde_rhs(curved).R), 1e-14);
    }
}

TEST(Rhs, PlaneEigenfunctionSecondOrder) {
    std::vector<double> err;
    for (int n : {16, 32, 64}) {
        const auto u0 = [](const Vec2& X) { return std::sin(pi * X[0]) * std::sin(pi * X[1]); };
        const SolverState s = make_state(charts::plane(), n, n, System::diffusion,
                                         EnergyDensity::linear(), all(BC::dirichlet(0.0)), u0);
        const RhsResult r = pde_rhs(s);
        double e = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                e = std::max(e, std::abs(r.R[s.grid.index(i, j)] +
                                         2 * pi * pi * u0(s.grid.center(i, j))));
        err.push_back(e);
    }
    EXPECT_GT(std::log2(err[0] / err[1]), 1.9);
    EXPECT_GT(std::log2(err[1] / err[2]), 1.9);
}

TEST(Rhs, DiscRadialLaplacian) {
    // u = cos(pi r) on the unit disc, u'(1) = 0: u'' + u'/r = -pi^2 cos(pi r) - pi sin(pi r)/r
    std::vector<double> err;
    for (int n : {32, 64, 128}) {
        const auto u0 = [](const Vec2& X) { return std::cos(pi * X[0]); };
        const SolverState s = make_state(charts::disc(), n, 8, System::diffusion,
                                         EnergyDensity::linear(), neumann(), u0);
        const RhsResult r = pde_rhs(s);
        double e = 0.0;
        for (int i = 0; i < n; ++i) {
            const std::size_t k = s.grid.index(i, 3);
            const double rr = s.grid.center(i, 3)[0];
            const double exact = -pi * pi * std::cos(pi * rr) - pi * std::sin(pi * rr) / rr;
            e = std::max(e, std::abs(r.R[k] / s.geom.sqrtG[k] - exact));
        }
        err.push_back(e);
    }
    EXPECT_GT(std::log2(err[0] / err[1]), 1.8);
    EXPECT_GT(std::log2(err[1] / err[2]), 1.8);
    EXPECT_LT(err[2], 5e-3);
}

TEST(Rhs, DirichletFaceIsOneSided) {
    // The Dirichlet face uses (g - u_P)/(dr/2), a first-order estimate of the
    // normal derivative, so the adjacent cell has an O(1) consistency error
    // unless u'' vanishes at the edge; the plane eigenfunction above has that
    // property. Here: u = r^2 on the disc, Laplacian 4.
    const SolverState s = make_state(charts::disc(), 64, 4, System::diffusion,
                                     EnergyDensity::linear(), dirichlet_r_hi(1.0),
                                     [](const Vec2& X) { return X[0] * X[0]; });
    const RhsResult r = pde_rhs(s);
    for (int i = 0; i < 63; ++i) {
        const std::size_t k = s.grid.index(i, 0);
        EXPECT_NEAR(r.R[k] / s.geom.sqrtG[k], 4.0, 1e-9) << i;
    }
    const std::size_t kb = s.grid.index(63, 0);
    EXPECT_GT(std::abs(r.R[kb] / s.geom.sqrtG[kb] - 4.0), 0.1);
}

TEST(Rhs, NegativeDiffusivityThrows) {
    const auto bad = EnergyDensity::custom([](double r) { return -r; }, [](double) { return -1.0; });
    const SolverState s = make_state(charts::plane(), 4, 4, System::diffusion, bad, neumann(),
                                     [](const Vec2& X) { return X[0]; });
    EXPECT_THROW(pde_rhs(s), NonparabolicEnergy);
    EXPECT_THROW(bad.check_parabolic(), NonparabolicEnergy);
    EXPECT_NO_THROW(EnergyDensity::power(2.0).check_parabolic());
}

TEST(Cfl, PlaneFivePointBound) {
    for (int n : {8, 16, 32}) {
        const SolverState s = make_state(charts::plane(), n, n, System::diffusion,
                                         EnergyDensity::linear(), neumann(),
                                         [](const Vec2& X) { return X[0]; });
        EXPECT_NEAR(cfl_dt(s, 0.4), 0.4 / (4.0 * n * n), 1e-15);
    }
}

TEST(Cfl, PowerLawAtRestIsClamped) {
    const SolverState s = make_state(charts::plane(), 8, 8, System::diffusion,
                                     EnergyDensity::power(1.0), neumann(),
                                     [](const Vec2&) { return 1.0; });
    EXPECT_EQ(cfl_dt(s, 0.4, 0.01), 0.01);
}

TEST(Cfl, ViolationThrowsUnlessOverridden) {
    SolverState s = make_state(charts::plane(), 8, 8, System::diffusion, EnergyDensity::linear(),
                               neumann(), [](const Vec2& X) { return X[0]; });
    EXPECT_THROW(step(s, 1.0), CflViolation);
    StepOptions opt;
    opt.allow_cfl_override = true;
    EXPECT_NO_THROW(step(s, 0.9 / (4.0 * 64), opt));
}

TEST(Step, NeumannMassPerStep) {
    SolverState s = make_state(charts::sphere_cap(1.0, 0.3, 1.2, 0.2), 16, 16, System::diffusion,
                               EnergyDensity::logarithmic(), neumann(), [](const Vec2& X) {
                                   return 1.0 + std::cos(3 * X[0]) * std::sin(X[1]);
                               });
    for (int k = 0; k < 50; ++k) {
        const double m0 = s.mass();
        step(s, cfl_dt(s));
        EXPECT_LE(std::abs(s.mass() - m0), 1e-13 * std::abs(m0));
    }
}

TEST(Step, BesselModeDecayRate) {
    const double j01 = boost::math::cyl_bessel_j_zero(0.0, 1);
    EXPECT_NEAR(j01 * j01, 5.7832, 1e-4);
    SolverState s = make_state(charts::disc(), 64, 4, System::diffusion, EnergyDensity::linear(),
                               dirichlet_r_hi(0.0), [&](const Vec2& X) {
                                   return boost::math::cyl_bessel_j(0, j01 * X[0]);
                               });
    const double dt = cfl_dt(s);
    const int steps = static_cast<int>(0.1 / dt);
    for (int k = 0; k < steps; ++k) step(s, dt);
    const double n0 = s.energy_value();
    const double t0 = s.t;
    for (int k = 0; k < steps; ++k) step(s, dt);
    const double rate = -0.5 * std::log(s.energy_value() / n0) / (s.t - t0);
    EXPECT_NEAR(rate, j01 * j01, 0.02 * j01 * j01);
}

TEST(Step, HeatConstantTemperatureStaysConstant) {
    SolverState s = make_state(charts::sphere_cap(1.0, 0.5, 1.0, 0.3), 12, 12, System::heat,
                               EnergyDensity::linear(), neumann(), [](const Vec2&) { return 2.5; },
                               [](const Vec2& X) { return 1.0 + 0.5 * X[0]; });
    const Field aux0 = s.aux;
    for (int k = 0; k < 20; ++k) step(s, cfl_dt(s));
    for (std::size_t k = 0; k < s.q.size(); ++k) {
        EXPECT_NEAR(s.unknown(k), 2.5, 1e-14);
        EXPECT_EQ(s.aux[k], aux0[k]);
    }
}

TEST(Laws, StaticNeumannEnergyMonotone) {
    SolverState s = make_state(charts::random_graph(6), 16, 16, System::diffusion,
                               EnergyDensity::linear(), neumann(),
                               [](const Vec2& X) { return std::sin(5 * X[0]) + X[1]; });
    LawTracker tr;
    tr.record(s);
    for (int k = 0; k < 200; ++k) {
        step(s, cfl_dt(s));
        tr.record(s);
    }
    EXPECT_TRUE(tr.energy_monotone());
    EXPECT_LT(tr.max_relative_mass_drift(), 1e-13);
}

TEST(Laws, ZeroDataGivesZeroTerms) {
    SolverState s = make_state(charts::sphere_cap(1.0, 0.2, 1.0), 8, 8, System::diffusion,
                               EnergyDensity::linear(), neumann(), [](const Vec2&) { return 0.0; });
    LawTracker tr;
    tr.record(s);
    for (int k = 0; k < 5; ++k) {
        step(s, 1e-3);
        tr.record(s);
    }
    EXPECT_EQ(tr.last().energy, 0.0);
    EXPECT_EQ(tr.last().dissipation_cum, 0.0);
    EXPECT_EQ(tr.last().law_residual, 0.0);
}

TEST(Laws, MovingSphereConstantData) {
    SolverState s = make_state(charts::sphere_equal_area(1.0, 0.5), 16, 16, System::diffusion,
                               EnergyDensity::linear(), neumann(), [](const Vec2&) { return 1.0; });
    LawTracker tr;
    tr.record(s);
    for (int k = 0; k < 100; ++k) {
        step(s, 1e-4);
        tr.record(s);
    }
    EXPECT_LT(tr.last().dissipation_cum, 1e-25);
    EXPECT_LT(tr.max_relative_mass_drift(), 1e-14);
    EXPECT_LT(std::abs(tr.last().law_residual), 1e-6);
    // the literal balance without the dilation term does not close here
    EXPECT_GT(std::abs(tr.last().literal_residual), 1e-4);
}

namespace {

double law_residual_at(double dt, Integrator integ, bool moving) {
    const Chart cap = charts::sphere_cap(1.0, moving ? 0.5 : 0.0, 1.0, moving ? 0.3 : 0.0);
    SolverState s = make_state(cap, 16, 16, System::diffusion, EnergyDensity::power(1.0),
                               neumann(), [&](const Vec2& X) {
                                   return std::cos(2 * X[0]) + 0.8 * cap.map(X, 0.0)[0];
                               });
    LawTracker tr;
    tr.record(s);
    StepOptions opt;
    opt.integrator = integ;
    const int steps = static_cast<int>(std::lround(0.01 / dt));
    for (int k = 0; k < steps; ++k) {
        step(s, dt, opt);
        tr.record(s);
    }
    return std::abs(tr.last().law_residual);
}

}  // namespace

TEST(Laws, EnergyLawOrderInTime) {
    for (bool moving : {false, true}) {
        const double e1 = law_residual_at(2e-5, Integrator::euler, moving);
        const double e2 = law_residual_at(1e-5, Integrator::euler, moving);
        EXPECT_GT(std::log2(e1 / e2), 0.9) << moving;
        const double h1 = law_residual_at(2e-5, Integrator::heun, moving);
        const double h2 = law_residual_at(1e-5, Integrator::heun, moving);
        EXPECT_GT(std::log2(h1 / h2), 1.9) << moving;
    }
}

TEST(Laws, MaximumPrincipleStaticOrthogonal) {
    SolverState s = make_state(charts::cylinder(1.0, 0.0, 2.0), 16, 16, System::diffusion,
                               EnergyDensity::linear(), neumann(),
                               [](const Vec2& X) { return X[0] > 1.0 ? 1.0 : -1.0; });
    for (int k = 0; k < 100; ++k) {
        step(s, cfl_dt(s));
        const Field u = s.unknowns();
        for (double v : u) {
            EXPECT_LE(v, 1.0 + 1e-15);
            EXPECT_GE(v, -1.0 - 1e-15);
        }
    }
}

TEST(Snapshot, HeaderAndRowCount) {
    const SolverState s = make_state(charts::disc(), 3, 4, System::diffusion,
                                     EnergyDensity::linear(), neumann(), [](const Vec2&) { return 1.0; });
    std::ostringstream os;
    write_snapshot(os, s);
    const std::string out = os.str();
    EXPECT_EQ(out.substr(0, out.find('\n')), "t,i,j,r,s,x1,x2,x3,u,sqrtG");
    EXPECT_EQ(std::count(out.begin(), out.end(), '\n'), 13);
}
