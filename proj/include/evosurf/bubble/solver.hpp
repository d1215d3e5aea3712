#pragma once

// Coupled diffusion on the double bubble. Each of the five patches carries
// its own conservation-form state; the common circle and the two seams are
// shared Dirichlet unknowns. At every stage the value at an interface node is
// chosen so that the inflows of all adjacent patch faces sum to zero:
//   C0 = (sum cond_p u_p - sum transverse_p) / sum cond_p,
// which is the conductance-weighted average of the adjacent cell values.
// The same BoundaryLink objects are then used for the patch fluxes, so the
// total mass changes only by roundoff.

#include "evosurf/bubble/geometry.hpp"
#include "evosurf/solver/laws.hpp"
#include "evosurf/solver/stepper.hpp"

#include <memory>
#include <ostream>

namespace evosurf::bubble {

/// A set of patch edges glued along one curve, with one unknown per node.
struct Junction {
    std::string name;
    std::vector<std::pair<int, Edge>> members;
    std::vector<double> values;
};

struct BubbleState {
    BubbleGeometry geom;
    std::array<SolverState, 5> patches;
    std::array<Junction, 3> junctions;  // gamma0, seamA, seamB
    double t = 0.0;

    const Junction& gamma0() const { return junctions[0]; }

    double mass() const {
        double s = 0.0;
        for (const SolverState& p : patches) s += p.mass();
        return s;
    }
    double energy_value() const {
        double s = 0.0;
        for (const SolverState& p : patches) s += p.energy_value();
        return s;
    }
};

/// Per-sheet initial condition as a function of the parameter point.
using InitialData = std::function<double(const Vec2&)>;

/// Builds the coupled state. `energies` are indexed A, B, S; `ic` likewise.
inline BubbleState make_bubble_state(const BubbleGeometry& g, std::array<EnergyDensity, 3> energies,
                                     int nr, int ntheta, const std::array<InitialData, 3>& ic,
                                     double t0 = 0.0) {
    BubbleState st;
    st.geom = g;
    st.t = t0;
    const auto ch = charts_for(g, t0);
    const std::array<int, 5> sheet{0, 0, 1, 1, 2};
    for (int p = 0; p < 5; ++p) {
        std::array<BoundaryCondition, 4> bc{};
        for (Edge e : {Edge::r_lo, Edge::r_hi})
            if (ch[p].role(e) == EdgeRole::interface)
                bc[static_cast<int>(e)] =
                    BoundaryCondition::dirichlet_values(std::vector<double>(ntheta, 0.0));
        st.patches[p] = make_state(ch[p], nr, ntheta, System::diffusion, energies[sheet[p]], bc,
                                   ic[sheet[p]], {}, t0);
    }
    st.junctions[0] = {tag_gamma0, {{A2, Edge::r_hi}, {B1, Edge::r_hi}, {S, Edge::r_hi}}, {}};
    st.junctions[1] = {tag_seam_a, {{A1, Edge::r_hi}, {A2, Edge::r_lo}}, {}};
    st.junctions[2] = {tag_seam_b, {{B2, Edge::r_hi}, {B1, Edge::r_lo}}, {}};
    for (Junction& j : st.junctions) j.values.assign(ntheta, 0.0);
    return st;
}

/// Flux contexts of all patches at their current q and geometry.
inline std::array<std::unique_ptr<FluxContext>, 5> flux_contexts(const BubbleState& st) {
    std::array<std::unique_ptr<FluxContext>, 5> out;
    for (int p = 0; p < 5; ++p) {
        const SolverState& s = st.patches[p];
        out[p] = std::make_unique<FluxContext>(s.grid, s.geom, s.energy, s.unknowns());
    }
    return out;
}

/// Solves every junction node for its interface value and stores it in the
/// junction and in the Dirichlet data of the member edges.
inline void solve_interfaces(BubbleState& st,
                             const std::array<std::unique_ptr<FluxContext>, 5>& ctx) {
    for (Junction& J : st.junctions) {
        const int nodes = static_cast<int>(J.values.size());
        for (int m = 0; m < nodes; ++m) {
            double csum = 0.0, cu = 0.0, tr = 0.0, usum = 0.0;
            for (const auto& [p, e] : J.members) {
                const BoundaryLink l = boundary_link(*ctx[p], e, m);
                csum += l.cond;
                cu += l.cond * l.u_adj;
                tr += l.transverse;
                usum += l.u_adj;
            }
            J.values[m] = csum > 0.0 ? (cu - tr) / csum
                                     : usum / static_cast<double>(J.members.size());
        }
        for (const auto& [p, e] : J.members)
            st.patches[p].boundary(e).values = J.values;
    }
}

struct BubbleRhs {
    std::array<RhsResult, 5> patch;
    double dissipation = 0.0, work = 0.0, dilation = 0.0;
};

/// Interface solve followed by the flux divergence on every patch.
inline BubbleRhs bubble_rhs(BubbleState& st) {
    const auto ctx = flux_contexts(st);
    solve_interfaces(st, ctx);
    BubbleRhs out;
    for (int p = 0; p < 5; ++p) {
        const SolverState& s = st.patches[p];
        RhsResult r = flux_divergence(*ctx[p], s.bc, s.t);
        double dil = 0.0;
        for (std::size_t k = 0; k < s.q.size(); ++k)
            dil += ctx[p]->u[k] * ctx[p]->u[k] * s.geom.dsqrtG_dt[k];
        r.dilation = 0.5 * dil * s.grid.cell_area();
        out.dissipation += r.dissipation;
        out.work += r.work;
        out.dilation += r.dilation;
        out.patch[p] = std::move(r);
    }
    return out;
}

/// Smallest stable step over the five patches (interface faces included).
inline double bubble_cfl_dt(BubbleState& st, double safety = 0.4) {
    const auto ctx = flux_contexts(st);
    solve_interfaces(st, ctx);
    double dt = std::numeric_limits<double>::infinity();
    for (const SolverState& p : st.patches) dt = std::min(dt, cfl_dt(p, safety));
    return dt;
}

/// One explicit step of the coupled system. Interface values are re-solved
/// at every stage and once more for the final state.
inline void coupled_step(BubbleState& st, double dt, const StepOptions& opt = {}) {
    if (!opt.allow_cfl_override) {
        const double bound = bubble_cfl_dt(st, opt.cfl_limit);
        if (dt > bound) {
            std::ostringstream os;
            os << "dt = " << dt << " exceeds the coupled explicit bound " << bound;
            throw CflViolation(os.str());
        }
    }
    st.geom.validate(st.t + dt);
    const BubbleRhs r0 = bubble_rhs(st);
    std::array<Field, 5> q0;
    for (int p = 0; p < 5; ++p) {
        SolverState& s = st.patches[p];
        q0[p] = s.q;
        for (std::size_t k = 0; k < s.q.size(); ++k) s.q[k] += dt * r0.patch[p].R[k];
        s.t += dt;
        s.refresh_geometry(s.t);
    }
    st.t += dt;
    if (opt.integrator == Integrator::heun) {
        const BubbleRhs r1 = bubble_rhs(st);
        for (int p = 0; p < 5; ++p) {
            SolverState& s = st.patches[p];
            for (std::size_t k = 0; k < s.q.size(); ++k)
                s.q[k] = q0[p][k] + 0.5 * dt * (r0.patch[p].R[k] + r1.patch[p].R[k]);
        }
    }
    solve_interfaces(st, flux_contexts(st));
}

/// Mass and energy bookkeeping of a coupled run (same balance as LawTracker).
/// The CSV mass_drift column is relative to the initial total mass.
class BubbleLaws {
public:
    void record(BubbleState& st) {
        const BubbleRhs r = bubble_rhs(st);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const SolverState& p : st.patches)
            for (std::size_t k = 0; k < p.q.size(); ++k) {
                lo = std::min(lo, p.unknown(k));
                hi = std::max(hi, p.unknown(k));
            }
        tracker_.record(st.t, st.mass(), st.energy_value(), r.dissipation, r.work, r.dilation, lo,
                        hi);
    }

    const LawTracker& tracker() const { return tracker_; }
    double max_relative_mass_drift() const { return tracker_.max_relative_mass_drift(); }
    double energy_residual() const { return tracker_.last().law_residual; }

    static const char* csv_header() {
        return "t,mass_total,energy_total,dissipation_cum,mass_drift,energy_residual";
    }

    void write_csv(std::ostream& os) const {
        os << csv_header() << '\n';
        const auto& s = tracker_.samples();
        if (s.empty()) return;
        const double m0 = s.front().mass, scale = m0 != 0.0 ? std::abs(m0) : 1.0;
        for (const LawSample& x : s)
            os << format_double(x.t) << ',' << format_double(x.mass) << ','
               << format_double(x.energy) << ',' << format_double(x.dissipation_cum) << ','
               << format_double((x.mass - m0) / scale) << ',' << format_double(x.law_residual)
               << '\n';
    }

private:
    LawTracker tracker_;
};

/// Same as BubbleLaws::tracker, as a free function.
inline const LawTracker& bubble_laws_report(const BubbleLaws& laws) { return laws.tracker(); }

}  // namespace evosurf::bubble
