#pragma once

// Face-flux assembly for the conservation form
//   d_t q = (1/dA) sum_faces F,   F = sqrtG e' g^{a b} d_b u * (face length).
// Each interior face flux is computed once and enters its two cells with
// opposite signs, so the cell totals telescope.

#include "evosurf/solver/state.hpp"

#include <cmath>
#include <sstream>

namespace evosurf {

/// Cell-level quantities shared by every face of one flux evaluation.
struct FluxContext {
    const ParamGrid& grid;
    const PatchGeometry& geom;
    const EnergyDensity& energy;
    Field u;
    std::array<Field, 2> D;  // du/dr, du/ds per cell
    Field grad2;             // g^{ab} d_a u d_b u per cell

    FluxContext(const ParamGrid& g, const PatchGeometry& pg, const EnergyDensity& e, Field values)
        : grid(g), geom(pg), energy(e), u(std::move(values)) {
        D[0].resize(grid.size());
        D[1].resize(grid.size());
        grad2.resize(grid.size());
        for (int i = 0; i < grid.nr; ++i)
            for (int j = 0; j < grid.ns; ++j) {
                const std::size_t k = grid.index(i, j);
                const Vec2 d(param_derivative(grid, u, 0, i, j), param_derivative(grid, u, 1, i, j));
                D[0][k] = d[0];
                D[1][k] = d[1];
                grad2[k] = d.dot(geom.ginv[k] * d);
            }
    }

    double eprime(double r) const {
        const double v = energy.e_prime(std::max(r, 0.0));
        if (!(v >= 0.0) || !std::isfinite(v)) {
            std::ostringstream os;
            os << "e'(" << r << ") = " << v;
            throw NonparabolicEnergy(os.str());
        }
        return v;
    }

    std::size_t cell(int axis, int k, int m) const {
        return axis == 0 ? grid.index(k, m) : grid.index(m, k);
    }
    double spacing(int axis) const { return axis == 0 ? grid.dr() : grid.ds(); }
    double face_length(int axis) const { return axis == 0 ? grid.ds() : grid.dr(); }
};

/// Linearization of a Dirichlet/interface boundary face: the inward flux
/// through it is  cond * (g - u_adj) + transverse  for boundary value g.
struct BoundaryLink {
    double cond = 0.0;
    double u_adj = 0.0;
    double transverse = 0.0;
    Vec2 X = Vec2::Zero();
    std::size_t cell = 0;

    double inflow(double g) const { return cond * (g - u_adj) + transverse; }
};

inline int edge_axis(Edge e) { return (e == Edge::r_lo || e == Edge::r_hi) ? 0 : 1; }
inline bool edge_is_hi(Edge e) { return e == Edge::r_hi || e == Edge::s_hi; }
inline int edge_nodes(const ParamGrid& g, Edge e) { return edge_axis(e) == 0 ? g.ns : g.nr; }

/// Boundary face m of edge e. e' is taken from the adjacent cell.
inline BoundaryLink boundary_link(const FluxContext& c, Edge e, int m) {
    const int axis = edge_axis(e);
    const bool hi = edge_is_hi(e);
    const FaceGeometry& fg = c.geom.faces[axis];
    const int n = axis == 0 ? c.grid.nr : c.grid.ns;
    const int kface = hi ? n : 0;
    BoundaryLink b;
    b.cell = c.cell(axis, hi ? n - 1 : 0, m);
    b.X = axis == 0 ? c.grid.r_face(kface, m) : c.grid.s_face(m, kface);
    const double ep = c.eprime(c.grad2[b.cell]);
    const double L = c.face_length(axis);
    b.cond = ep * fg.normal[fg.at(kface, m)] * L / (0.5 * c.spacing(axis));
    b.u_adj = c.u[b.cell];
    b.transverse = (hi ? 1.0 : -1.0) * ep * fg.cross[fg.at(kface, m)] * c.D[1 - axis][b.cell] * L;
    return b;
}

/// Time derivative of q plus the terms of the discrete energy identity
///   sum_k u_k R_k dA = -dissipation + work.
struct RhsResult {
    Field R;
    double dissipation = 0.0;  // sum over faces of F * (jump of u across it)
    double work = 0.0;         // sum over Dirichlet faces of (inflow) * g
    double dilation = 0.0;     // 1/2 sum u^2 d_t sqrtG dA (diffusion only)
    double boundary_inflow = 0.0;
};

inline RhsResult flux_divergence(const FluxContext& c, const std::array<BoundaryCondition, 4>& bc,
                                 double t) {
    const ParamGrid& g = c.grid;
    RhsResult out;
    out.R.assign(g.size(), 0.0);
    const double dA = g.cell_area();
    for (int axis = 0; axis < 2; ++axis) {
        const FaceGeometry& fg = c.geom.faces[axis];
        const int n = axis == 0 ? g.nr : g.ns;
        const int nt = fg.ntrans;
        const bool periodic = axis == 0 ? g.periodic_r() : g.periodic_s();
        const double h = c.spacing(axis), L = c.face_length(axis);
        const Field& Dt = c.D[1 - axis];
        std::vector<double> F(static_cast<std::size_t>(n + 1) * nt, 0.0);
        for (int m = 0; m < nt; ++m) {
            for (int k = 1; k < n; ++k) {
                const std::size_t l = c.cell(axis, k - 1, m), r = c.cell(axis, k, m);
                const double ep = c.eprime(0.5 * (c.grad2[l] + c.grad2[r]));
                const double jump = c.u[r] - c.u[l];
                const double f = ep *
                                 (fg.normal[fg.at(k, m)] * jump / h +
                                  fg.cross[fg.at(k, m)] * 0.5 * (Dt[l] + Dt[r])) *
                                 L;
                F[fg.at(k, m)] = f;
                out.dissipation += f * jump;
            }
            if (periodic) {
                const std::size_t l = c.cell(axis, n - 1, m), r = c.cell(axis, 0, m);
                const double ep = c.eprime(0.5 * (c.grad2[l] + c.grad2[r]));
                const double jump = c.u[r] - c.u[l];
                const double f = ep *
                                 (fg.normal[fg.at(0, m)] * jump / h +
                                  fg.cross[fg.at(0, m)] * 0.5 * (Dt[l] + Dt[r])) *
                                 L;
                F[fg.at(0, m)] = f;
                F[fg.at(n, m)] = f;
                out.dissipation += f * jump;
                continue;
            }
            for (Edge e : axis == 0 ? std::array<Edge, 2>{Edge::r_lo, Edge::r_hi}
                                    : std::array<Edge, 2>{Edge::s_lo, Edge::s_hi}) {
                const EdgeRole role = g.role(e);
                if (role == EdgeRole::pole) continue;
                const BoundaryCondition& b = bc[static_cast<int>(e)];
                if (!b.is_dirichlet()) continue;
                const BoundaryLink link = boundary_link(c, e, m);
                const double gv = b.value(link.X, t, m);
                const double fin = link.inflow(gv);
                F[fg.at(edge_is_hi(e) ? n : 0, m)] = edge_is_hi(e) ? fin : -fin;
                out.dissipation += fin * (gv - link.u_adj);
                out.work += fin * gv;
                out.boundary_inflow += fin;
            }
        }
        for (int m = 0; m < nt; ++m)
            for (int k = 0; k < n; ++k)
                out.R[c.cell(axis, k, m)] += (F[fg.at(k + 1, m)] - F[fg.at(k, m)]) / dA;
    }
    return out;
}

/// Right-hand side d q/dt of the state's equation at (state.q, state.t).
inline RhsResult pde_rhs(const SolverState& s) {
    FluxContext c(s.grid, s.geom, s.energy, s.unknowns());
    RhsResult r = flux_divergence(c, s.bc, s.t);
    if (s.system == System::diffusion) {
        double dil = 0.0;
        for (std::size_t k = 0; k < s.q.size(); ++k) dil += c.u[k] * c.u[k] * s.geom.dsqrtG_dt[k];
        r.dilation = 0.5 * dil * s.grid.cell_area();
    }
    return r;
}

/// Explicit stability bound: safety * min over cells of
/// (cell mass) / (sum of face conductances e' sqrtG g^{aa} L / distance).
/// Returns dt_max when no cell has a positive conductance.
inline double cfl_dt(const SolverState& s, double safety = 0.4,
                     double dt_max = std::numeric_limits<double>::infinity()) {
    FluxContext c(s.grid, s.geom, s.energy, s.unknowns());
    const ParamGrid& g = s.grid;
    Field cond(g.size(), 0.0);
    for (int axis = 0; axis < 2; ++axis) {
        const FaceGeometry& fg = s.geom.faces[axis];
        const int n = axis == 0 ? g.nr : g.ns;
        const bool periodic = axis == 0 ? g.periodic_r() : g.periodic_s();
        const double h = c.spacing(axis), L = c.face_length(axis);
        for (int m = 0; m < fg.ntrans; ++m) {
            for (int k = periodic ? 0 : 1; k < n; ++k) {
                const std::size_t l = c.cell(axis, (k - 1 + n) % n, m), r = c.cell(axis, k, m);
                if (l == r) continue;
                const double v = c.eprime(0.5 * (c.grad2[l] + c.grad2[r])) *
                                 fg.normal[fg.at(k, m)] * L / h;
                cond[l] += v;
                cond[r] += v;
            }
            if (periodic) continue;
            for (Edge e : axis == 0 ? std::array<Edge, 2>{Edge::r_lo, Edge::r_hi}
                                    : std::array<Edge, 2>{Edge::s_lo, Edge::s_hi}) {
                if (g.role(e) == EdgeRole::pole || !s.bc[static_cast<int>(e)].is_dirichlet())
                    continue;
                const BoundaryLink link = boundary_link(c, e, m);
                cond[link.cell] += link.cond;
            }
        }
    }
    double dt = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!(cond[k] > 0.0)) continue;
        const double mass = s.system == System::heat ? s.aux[k] : s.geom.sqrtG[k];
        dt = std::min(dt, mass * g.cell_area() / cond[k]);
    }
    return std::min(safety * dt, dt_max);
}

}  // namespace evosurf
