#pragma once

#include "evosurf/solver/flux.hpp"

#include <sstream>

namespace evosurf {

enum class Integrator { euler, heun };

struct StepOptions {
    Integrator integrator = Integrator::euler;
    /// Largest admissible dt is cfl_dt(state, cfl_limit); above it step()
    /// throws CflViolation unless `allow_cfl_override` is set.
    double cfl_limit = 1.0;
    bool allow_cfl_override = false;
    /// Tolerance of the per-step check that rho sqrtG stays frozen (heat).
    double density_tolerance = 1e-12;
};

inline void check_cfl(const SolverState& s, double dt, const StepOptions& opt) {
    if (opt.allow_cfl_override) return;
    const double bound = cfl_dt(s, opt.cfl_limit);
    if (dt > bound) {
        std::ostringstream os;
        os << "dt = " << dt << " exceeds the explicit bound " << bound << " on " << s.chart.name;
        throw CflViolation(os.str());
    }
}

/// Advances the state by dt: explicit Euler or Heun on q, with the geometry
/// re-evaluated at t + dt.
inline void step(SolverState& s, double dt, const StepOptions& opt = {}) {
    check_cfl(s, dt, opt);
    const RhsResult r0 = pde_rhs(s);
    const Field q0 = s.q;
    for (std::size_t k = 0; k < s.q.size(); ++k) s.q[k] = q0[k] + dt * r0.R[k];
    s.t += dt;
    s.refresh_geometry(s.t);
    if (opt.integrator == Integrator::heun) {
        const RhsResult r1 = pde_rhs(s);
        for (std::size_t k = 0; k < s.q.size(); ++k)
            s.q[k] = q0[k] + 0.5 * dt * (r0.R[k] + r1.R[k]);
    }
    if (s.system == System::heat) {
        // rho is carried as aux / sqrtG; its product with the new sqrtG must
        // reproduce aux.
        for (std::size_t k = 0; k < s.q.size(); ++k) {
            const double rho = s.aux[k] / s.geom.sqrtG[k];
            if (std::abs(rho * s.geom.sqrtG[k] - s.aux[k]) >
                opt.density_tolerance * std::abs(s.aux[k]))
                throw Error("rho sqrtG drifted");
        }
    }
}

}  // namespace evosurf
