// Heat flow on a sphere cap that grows and opens up while it is heated.
// Density is carried with the surface, so the total heat capacity stays
// fixed while the temperature spreads out.

#include "evosurf/geometry/charts.hpp"
#include "evosurf/solver/laws.hpp"
#include "evosurf/solver/stepper.hpp"

#include <cmath>
#include <cstdio>

using namespace evosurf;

int main() {
    const Chart cap = charts::sphere_cap(1.0, 0.5, 0.8, 0.3);
    const auto theta0 = [](const Vec2& X) { return std::exp(-8.0 * X[0] * X[0]); };
    const auto rho0 = [](const Vec2& X) { return 1.0 + 0.5 * std::cos(X[1]); };
    SolverState s = make_state(cap, 12, 12, System::heat, EnergyDensity::logarithmic(), {}, theta0, rho0);

    // int rho is the integral of rho sqrtG over the parameter square.
    auto heat_capacity = [](const SolverState& st) {
        double c = 0.0;
        for (double v : st.aux) c += v;
        return c * st.grid.cell_area();
    };

    LawTracker laws;
    laws.record(s);
    const double capacity0 = heat_capacity(s);
    std::printf("%8s %14s %14s %12s %12s\n", "t", "int rho theta", "energy", "max theta", "law resid");
    const double t_end = 0.2;
    StepOptions opt;
    opt.integrator = Integrator::heun;
    for (int k = 0; s.t < t_end - 1e-14; ++k) {
        step(s, std::min(cfl_dt(s), t_end - s.t), opt);
        laws.record(s);
        if (k % 100 == 0 || s.t >= t_end - 1e-14) {
            const LawSample& l = laws.last();
            std::printf("%8.4f %14.10f %14.10f %12.6f %12.3e\n", l.t, l.mass, l.energy, l.max_u, l.law_residual);
        }
    }
    std::printf("cap radius %.3f -> %.3f, heat capacity drift %.2e, mass drift %.2e\n", 1.0, 1.0 + 0.5 * s.t,
                std::abs(heat_capacity(s) - capacity0) / capacity0, laws.max_relative_mass_drift());
    return 0;
}
