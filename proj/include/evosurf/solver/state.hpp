#pragma once

#include "evosurf/geometry/frame.hpp"
#include "evosurf/geometry/grid.hpp"
#include "evosurf/solver/energy.hpp"

#include <algorithm>
#include <limits>
#include <optional>

namespace evosurf {

/// Which equation a patch carries.
/// diffusion: d_t(u sqrtG) = d_a(sqrtG e'(|grad u|^2) g^{ab} d_b u)
/// heat:      d_t(rho sqrtG theta) = d_a(sqrtG e'(|grad theta|^2) g^{ab} d_b theta),
///            with rho sqrtG frozen at t0.
enum class System { diffusion, heat };

/// Boundary condition on one edge. Dirichlet data comes either from a
/// callback g(X, t) or, when `values` is non-empty, from one value per edge
/// face (used for interface coupling).
struct BoundaryCondition {
    enum class Kind { neumann_zero, dirichlet };

    Kind kind = Kind::neumann_zero;
    std::function<double(const Vec2&, double)> g;
    std::vector<double> values;

    static BoundaryCondition neumann() { return {}; }
    static BoundaryCondition dirichlet(double c) {
        BoundaryCondition bc;
        bc.kind = Kind::dirichlet;
        bc.g = [c](const Vec2&, double) { return c; };
        return bc;
    }
    static BoundaryCondition dirichlet(std::function<double(const Vec2&, double)> g) {
        BoundaryCondition bc;
        bc.kind = Kind::dirichlet;
        bc.g = std::move(g);
        return bc;
    }
    static BoundaryCondition dirichlet_values(std::vector<double> v) {
        BoundaryCondition bc;
        bc.kind = Kind::dirichlet;
        bc.values = std::move(v);
        return bc;
    }

    bool is_dirichlet() const { return kind == Kind::dirichlet; }

    double value(const Vec2& X, double t, int node) const {
        if (!values.empty()) return values[node];
        return g ? g(X, t) : 0.0;
    }
};

/// Geometry on the faces of one axis. Face k (k = 0..n) separates cells k-1
/// and k along the axis; `normal` holds sqrtG g^{aa} and `cross` sqrtG g^{ab}
/// (b the transverse axis) at the face midpoint. Face (k, m) is stored at
/// k * ntrans + m.
struct FaceGeometry {
    int axis = 0;
    int nfaces = 0;
    int ntrans = 0;
    std::vector<double> normal, cross;

    std::size_t at(int k, int m) const { return static_cast<std::size_t>(k) * ntrans + m; }
};

/// Metric data needed by the flux assembly, at one time.
struct PatchGeometry {
    double t = 0.0;
    Field sqrtG;       // per cell
    Field dsqrtG_dt;   // (div_Gamma w) sqrtG per cell
    std::vector<Mat2> ginv;
    std::array<FaceGeometry, 2> faces;

    static PatchGeometry compute(const Chart& chart, const ParamGrid& grid, double t) {
        PatchGeometry pg;
        pg.t = t;
        pg.sqrtG.resize(grid.size());
        pg.dsqrtG_dt.resize(grid.size());
        pg.ginv.resize(grid.size());
        for (int i = 0; i < grid.nr; ++i)
            for (int j = 0; j < grid.ns; ++j) {
                const Vec2 X = grid.center(i, j);
                const FrameData f = frame(chart, X, t);
                const std::size_t k = grid.index(i, j);
                pg.sqrtG[k] = f.sqrtG;
                pg.ginv[k] = f.ginv;
                pg.dsqrtG_dt[k] =
                    chart.stationary ? 0.0 : velocity_divergence(chart, f, X, t) * f.sqrtG;
            }
        for (int axis = 0; axis < 2; ++axis) {
            FaceGeometry& fg = pg.faces[axis];
            fg.axis = axis;
            fg.nfaces = (axis == 0 ? grid.nr : grid.ns) + 1;
            fg.ntrans = axis == 0 ? grid.ns : grid.nr;
            fg.normal.assign(static_cast<std::size_t>(fg.nfaces) * fg.ntrans, 0.0);
            fg.cross.assign(fg.normal.size(), 0.0);
            const Edge lo = axis == 0 ? Edge::r_lo : Edge::s_lo;
            const Edge hi = axis == 0 ? Edge::r_hi : Edge::s_hi;
            for (int k = 0; k < fg.nfaces; ++k) {
                if ((k == 0 && grid.role(lo) == EdgeRole::pole) ||
                    (k == fg.nfaces - 1 && grid.role(hi) == EdgeRole::pole))
                    continue;
                for (int m = 0; m < fg.ntrans; ++m) {
                    const Vec2 X = axis == 0 ? grid.r_face(k, m) : grid.s_face(m, k);
                    const FrameData f = frame(chart, X, t);
                    fg.normal[fg.at(k, m)] = f.sqrtG * f.ginv(axis, axis);
                    fg.cross[fg.at(k, m)] = f.sqrtG * f.ginv(axis, 1 - axis);
                }
            }
        }
        return pg;
    }
};

/// Discrete solution on one evolving patch.
///
/// `q` is the conserved density per parameter area: u sqrtG (diffusion) or
/// rho sqrtG theta (heat). `aux` is rho sqrtG, frozen at the initial time
/// (heat only). `geom` always matches `t`.
struct SolverState {
    Chart chart;
    ParamGrid grid;
    System system = System::diffusion;
    EnergyDensity energy = EnergyDensity::linear();
    std::array<BoundaryCondition, 4> bc{};
    Field q;
    Field aux;
    double t = 0.0;
    PatchGeometry geom;

    BoundaryCondition& boundary(Edge e) { return bc[static_cast<int>(e)]; }
    const BoundaryCondition& boundary(Edge e) const { return bc[static_cast<int>(e)]; }

    /// u (diffusion) or theta (heat) per cell.
    double unknown(std::size_t k) const {
        return system == System::heat ? q[k] / aux[k] : q[k] / geom.sqrtG[k];
    }
    Field unknowns() const {
        Field u(q.size());
        for (std::size_t k = 0; k < q.size(); ++k) u[k] = unknown(k);
        return u;
    }

    /// int C (diffusion) or int rho theta (heat).
    double mass() const {
        double s = 0.0;
        for (double v : q) s += v;
        return s * grid.cell_area();
    }

    /// 1/2 int C^2 (diffusion) or 1/2 int rho theta^2 (heat).
    double energy_value() const {
        double s = 0.0;
        for (std::size_t k = 0; k < q.size(); ++k) s += q[k] * unknown(k);
        return 0.5 * s * grid.cell_area();
    }

    /// Current rho per cell (heat only): aux / sqrtG.
    Field density() const {
        Field r(q.size());
        for (std::size_t k = 0; k < q.size(); ++k) r[k] = aux[k] / geom.sqrtG[k];
        return r;
    }

    void refresh_geometry(double new_t) {
        if (chart.stationary && !geom.sqrtG.empty()) {
            geom.t = new_t;
            return;
        }
        geom = PatchGeometry::compute(chart, grid, new_t);
    }
};

/// Builds a state from initial data u0(X) (diffusion) or theta0(X) with
/// density rho0(X) (heat).
inline SolverState make_state(Chart chart, int nr, int ns, System system, EnergyDensity energy,
                              std::array<BoundaryCondition, 4> bc,
                              const std::function<double(const Vec2&)>& u0,
                              const std::function<double(const Vec2&)>& rho0 = {},
                              double t0 = 0.0) {
    SolverState s;
    s.grid = ParamGrid(nr, ns, chart);
    s.chart = std::move(chart);
    s.system = system;
    s.energy = std::move(energy);
    s.bc = std::move(bc);
    s.t = t0;
    s.geom = PatchGeometry::compute(s.chart, s.grid, t0);
    s.q.resize(s.grid.size());
    if (system == System::heat) {
        if (!rho0) throw Error("heat system needs an initial density");
        s.aux.resize(s.grid.size());
    }
    for (int i = 0; i < s.grid.nr; ++i)
        for (int j = 0; j < s.grid.ns; ++j) {
            const std::size_t k = s.grid.index(i, j);
            const Vec2 X = s.grid.center(i, j);
            if (system == System::heat) {
                s.aux[k] = rho0(X) * s.geom.sqrtG[k];
                if (!(s.aux[k] > 0.0)) throw Error("density must be positive");
                s.q[k] = s.aux[k] * u0(X);
            } else {
                s.q[k] = u0(X) * s.geom.sqrtG[k];
            }
        }
    return s;
}

}  // namespace evosurf
