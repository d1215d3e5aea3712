#pragma once

// Conservation and energy bookkeeping along a run.
//
// The energy balance tracked here is
//   E(t) - E(t0) + int_{t0}^{t} (D - W + Q) dt = 0,
// with D the discrete dissipation, W the work done by Dirichlet data and Q the
// dilation term 1/2 int (div_Gamma w) C^2 that appears on a moving surface
// (zero for the heat system, where rho sqrtG is frozen). The time integrals
// use the trapezoidal rule over recorded samples. `literal_residual` drops Q.

#include "evosurf/calculus/residual.hpp"
#include "evosurf/solver/flux.hpp"

#include <algorithm>
#include <ostream>

namespace evosurf {

struct LawSample {
    double t = 0.0;
    double mass = 0.0;
    double energy = 0.0;
    double dissipation_rate = 0.0;
    double work_rate = 0.0;
    double dilation_rate = 0.0;
    double min_u = 0.0;
    double max_u = 0.0;
    double dissipation_cum = 0.0;
    double work_cum = 0.0;
    double dilation_cum = 0.0;
    double law_residual = 0.0;
    double literal_residual = 0.0;
};

class LawTracker {
public:
    /// Adds a sample from rates computed elsewhere (used by the bubble solver).
    void record(double t, double mass, double energy, double diss, double work, double dil,
                double min_u, double max_u) {
        LawSample s{t, mass, energy, diss, work, dil, min_u, max_u};
        if (!samples_.empty()) {
            const LawSample& p = samples_.back();
            const double h = t - p.t;
            s.dissipation_cum = p.dissipation_cum + 0.5 * h * (p.dissipation_rate + diss);
            s.work_cum = p.work_cum + 0.5 * h * (p.work_rate + work);
            s.dilation_cum = p.dilation_cum + 0.5 * h * (p.dilation_rate + dil);
            const double dE = energy - samples_.front().energy;
            s.literal_residual = dE + s.dissipation_cum - s.work_cum;
            s.law_residual = s.literal_residual + s.dilation_cum;
        }
        samples_.push_back(s);
    }

    void record(const SolverState& state) {
        const RhsResult r = pde_rhs(state);
        const Field u = state.unknowns();
        const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
        record(state.t, state.mass(), state.energy_value(), r.dissipation, r.work, r.dilation,
               *lo, *hi);
    }

    const std::vector<LawSample>& samples() const { return samples_; }
    bool empty() const { return samples_.empty(); }
    const LawSample& last() const { return samples_.back(); }

    /// |mass(t) - mass(t0)| / |mass(t0)| maximized over the run (absolute
    /// when the initial mass is zero).
    double max_relative_mass_drift() const {
        double worst = 0.0;
        if (samples_.empty()) return 0.0;
        const double m0 = samples_.front().mass;
        const double scale = m0 != 0.0 ? std::abs(m0) : 1.0;
        for (const LawSample& s : samples_) worst = std::max(worst, std::abs(s.mass - m0) / scale);
        return worst;
    }

    /// True when the energy never increases by more than `slack` between
    /// consecutive samples.
    bool energy_monotone(double slack = 0.0) const {
        for (std::size_t k = 1; k < samples_.size(); ++k)
            if (samples_[k].energy > samples_[k - 1].energy + slack) return false;
        return true;
    }

    static const char* csv_header() { return "t,mass,energy,dissipation_cum,law_residual,min_u,max_u"; }

    void write_csv(std::ostream& os) const {
        os << csv_header() << '\n';
        for (const LawSample& s : samples_)
            os << format_double(s.t) << ',' << format_double(s.mass) << ','
               << format_double(s.energy) << ',' << format_double(s.dissipation_cum) << ','
               << format_double(s.law_residual) << ',' << format_double(s.min_u) << ','
               << format_double(s.max_u) << '\n';
    }

private:
    std::vector<LawSample> samples_;
};

/// Mass series of a run: one value per recorded sample.
inline std::vector<double> conservation_report(const LawTracker& tr) {
    std::vector<double> out;
    for (const LawSample& s : tr.samples()) out.push_back(s.mass);
    return out;
}

/// Energy-law residual series of a run.
inline std::vector<double> energy_report(const LawTracker& tr) {
    std::vector<double> out;
    for (const LawSample& s : tr.samples()) out.push_back(s.law_residual);
    return out;
}

inline const char* snapshot_csv_header() { return "t,i,j,r,s,x1,x2,x3,u,sqrtG"; }

inline void write_snapshot(std::ostream& os, const SolverState& s, bool header = true) {
    if (header) os << snapshot_csv_header() << '\n';
    for (int i = 0; i < s.grid.nr; ++i)
        for (int j = 0; j < s.grid.ns; ++j) {
            const std::size_t k = s.grid.index(i, j);
            const Vec2 X = s.grid.center(i, j);
            const Vec3 x = s.chart.map(X, s.t);
            os << format_double(s.t) << ',' << i << ',' << j << ',' << format_double(X[0]) << ','
               << format_double(X[1]) << ',' << format_double(x[0]) << ','
               << format_double(x[1]) << ',' << format_double(x[2]) << ','
               << format_double(s.unknown(k)) << ',' << format_double(s.geom.sqrtG[k]) << '\n';
        }
}

}  // namespace evosurf
