#pragma once

// Numerical residuals of the surface-calculus identities: divergence theorem
// with the co-normal formula, its version on unions of patches, the transport
// theorem, the pointwise evolution of sqrt(G) and the first variation of the
// dissipation energy.

#include "evosurf/calculus/residual.hpp"
#include "evosurf/geometry/operators.hpp"
#include "evosurf/solver/energy.hpp"

#include <algorithm>
#include <span>
#include <sstream>

namespace evosurf {

/// Area and boundary contributions of one patch to the divergence theorem.
struct DivergenceTerms {
    double div = 0.0;        // int div_Gamma phi
    double curvature = 0.0;  // int H (n . phi)
    double boundary = 0.0;   // int_{boundary} nu . phi
};

inline double patch_boundary_term(const Chart& chart, Edge e, const AmbientField& phi, double t,
                                  int m) {
    const BoundarySegment seg = segment(chart, e);
    return boundary_integral(
        chart, seg,
        [&](const Vec2& X) {
            const double l = (e == Edge::r_lo || e == Edge::r_hi) ? X[1] : X[0];
            return conormal(chart, seg, l, t).dot(phi(chart.map(X, t), t));
        },
        t, m);
}

/// Area terms on every cell; boundary terms on physical/interface edges not
/// listed in `skip`.
inline DivergenceTerms divergence_terms(const Chart& chart, const AmbientField& phi, double t,
                                        const Resolution& res, std::span<const Edge> skip = {}) {
    const ParamGrid grid(res.nr, res.ns, chart);
    DivergenceTerms out;
    for (int i = 0; i < grid.nr; ++i)
        for (int j = 0; j < grid.ns; ++j) {
            const Vec2 X = grid.center(i, j);
            const FrameData f = frame(chart, X, t);
            const Vec3 x = chart.map(X, t);
            const Mat3 J = phi.jac(x, t);
            const double div = f.gup1.dot(J * f.g1) + f.gup2.dot(J * f.g2);
            const auto dn = normal_derivatives(chart, X, t);
            const double H = -(f.gup1.dot(dn[0]) + f.gup2.dot(dn[1]));
            out.div += div * f.sqrtG;
            out.curvature += H * f.n.dot(phi(x, t)) * f.sqrtG;
        }
    out.div *= grid.cell_area();
    out.curvature *= grid.cell_area();
    for (Edge e : all_edges) {
        const EdgeRole role = chart.role(e);
        if (role != EdgeRole::physical && role != EdgeRole::interface) continue;
        if (std::find(skip.begin(), skip.end(), e) != skip.end()) continue;
        out.boundary += patch_boundary_term(chart, e, phi, t, res.m);
    }
    return out;
}

/// int div phi + int H (n . phi) - int nu . phi on a single patch.
inline ResidualReport divergence_theorem_residual(const Chart& chart, const AmbientField& phi,
                                                  double t, const Resolution& res,
                                                  double tolerance,
                                                  std::string name = "divergence_theorem") {
    const DivergenceTerms d = divergence_terms(chart, phi, t, res);
    ResidualReport r;
    r.name = std::move(name);
    r.value = d.div + d.curvature - d.boundary;
    r.tolerance = tolerance;
    r.resolution = res;
    r.terms = {{"int_div", d.div}, {"int_H_n_phi", d.curvature}, {"int_nu_phi", d.boundary}};
    return r.finish();
}

/// Two edges of (possibly different) charts that map onto the same curve.
/// Both edges are sampled at the same edge parameter.
struct EdgePairing {
    int chart_a = 0;
    Edge edge_a = Edge::r_hi;
    int chart_b = 0;
    Edge edge_b = Edge::r_lo;
};

struct PairingCheck {
    double max_distance = 0.0;
    double max_conormal_sum = 0.0;
};

/// Samples `m` points along a pairing; throws PairingMismatch when the two
/// edges are further apart than `match_tol`.
inline PairingCheck check_pairing(std::span<const Chart> charts, const EdgePairing& p, double t,
                                  int m, double match_tol = 1e-8) {
    const Chart& A = charts[p.chart_a];
    const Chart& B = charts[p.chart_b];
    const BoundarySegment sa = segment(A, p.edge_a), sb = segment(B, p.edge_b);
    if (std::abs(sa.length() - sb.length()) > 1e-14)
        throw PairingMismatch("paired edges have different parameter lengths");
    PairingCheck out;
    for (int k = 0; k < m; ++k) {
        const double frac = (k + 0.5) / m;
        const double la = sa.l_lo + frac * sa.length(), lb = sb.l_lo + frac * sb.length();
        const Vec3 xa = A.map(sa.point(la), t), xb = B.map(sb.point(lb), t);
        out.max_distance = std::max(out.max_distance, (xa - xb).norm());
        const Vec3 nsum = conormal(A, sa, la, t) + conormal(B, sb, lb, t);
        out.max_conormal_sum = std::max(out.max_conormal_sum, nsum.norm());
    }
    if (out.max_distance > match_tol) {
        std::ostringstream os;
        os << "edges " << A.name << ":" << edge_name(p.edge_a) << " and " << B.name << ":"
           << edge_name(p.edge_b) << " are " << out.max_distance << " apart";
        throw PairingMismatch(os.str());
    }
    return out;
}

struct UnionReport {
    ResidualReport divergence;
    ResidualReport conormal_antisymmetry;
};

/// Divergence theorem on the union of several patches glued along paired
/// edges: boundary integrals only over unpaired physical/interface edges, and
/// nu_a + nu_b = 0 along every pairing.
inline UnionReport union_divergence_residual(std::span<const Chart> charts,
                                             std::span<const EdgePairing> pairings,
                                             const AmbientField& phi, double t,
                                             const Resolution& res, double tolerance,
                                             double conormal_tolerance,
                                             std::string name = "union_divergence") {
    double antisym = 0.0;
    for (const EdgePairing& p : pairings)
        antisym = std::max(antisym, check_pairing(charts, p, t, res.m).max_conormal_sum);

    DivergenceTerms total;
    for (int c = 0; c < static_cast<int>(charts.size()); ++c) {
        std::vector<Edge> skip;
        for (const EdgePairing& p : pairings) {
            if (p.chart_a == c) skip.push_back(p.edge_a);
            if (p.chart_b == c) skip.push_back(p.edge_b);
        }
        const DivergenceTerms d = divergence_terms(charts[c], phi, t, res, skip);
        total.div += d.div;
        total.curvature += d.curvature;
        total.boundary += d.boundary;
    }
    UnionReport out;
    out.divergence.name = name;
    out.divergence.value = total.div + total.curvature - total.boundary;
    out.divergence.tolerance = tolerance;
    out.divergence.resolution = res;
    out.divergence.terms = {{"int_div", total.div},
                            {"int_H_n_phi", total.curvature},
                            {"int_nu_phi", total.boundary}};
    out.divergence.finish();
    out.conormal_antisymmetry.name = name + "_conormal_antisymmetry";
    out.conormal_antisymmetry.value = antisym;
    out.conormal_antisymmetry.tolerance = conormal_tolerance;
    out.conormal_antisymmetry.resolution = res;
    out.conormal_antisymmetry.finish();
    return out;
}

/// Midpoint quadrature of f(x(X, t), t) over a union of patches.
inline double integrate(std::span<const Chart> charts, const ScalarFn& f, double t,
                        const Resolution& res) {
    double sum = 0.0;
    for (const Chart& c : charts) {
        const ParamGrid grid(res.nr, res.ns, c);
        double s = 0.0;
        for (int i = 0; i < grid.nr; ++i)
            for (int j = 0; j < grid.ns; ++j) {
                const Vec2 X = grid.center(i, j);
                const auto tg = c.tangents(X, t);
                s += f(c.map(X, t), t) * std::sqrt(metric_determinant(tg[0], tg[1]));
            }
        sum += s * grid.cell_area();
    }
    return sum;
}

/// d/dt int f  versus  int (D_t f + (div_Gamma w) f), over a union of patches.
/// The left side differences the quadrature in time; the right side uses the
/// material derivative along chart trajectories and the geometric
/// div_Gamma w = g^alpha . dw/dX_alpha.
inline ResidualReport transport_theorem_residual(std::span<const Chart> charts,
                                                 const ScalarFn& f, double t, double dt,
                                                 const Resolution& res, double tolerance,
                                                 std::string name = "transport_theorem") {
    const double lhs = (integrate(charts, f, t + dt, res) - integrate(charts, f, t - dt, res)) /
                       (2 * dt);
    double rhs = 0.0;
    for (const Chart& c : charts) {
        const ParamGrid grid(res.nr, res.ns, c);
        double s = 0.0;
        for (int i = 0; i < grid.nr; ++i)
            for (int j = 0; j < grid.ns; ++j) {
                const Vec2 X = grid.center(i, j);
                const FrameData fr = frame(c, X, t);
                const double material =
                    (f(c.map(X, t + dt), t + dt) - f(c.map(X, t - dt), t - dt)) / (2 * dt);
                const double divw = velocity_divergence(c, fr, X, t);
                s += (material + divw * f(c.map(X, t), t)) * fr.sqrtG;
            }
        rhs += s * grid.cell_area();
    }
    ResidualReport r;
    r.name = std::move(name);
    r.value = lhs - rhs;
    r.tolerance = tolerance;
    r.resolution = res;
    r.resolution.dt = dt;
    r.terms = {{"ddt_integral", lhs}, {"int_material_plus_dilation", rhs}};
    return r.finish();
}

inline ResidualReport transport_theorem_residual(const Chart& chart, const ScalarFn& f, double t,
                                                 double dt, const Resolution& res,
                                                 double tolerance,
                                                 std::string name = "transport_theorem") {
    return transport_theorem_residual(std::span<const Chart>(&chart, 1), f, t, dt, res, tolerance,
                                      std::move(name));
}

/// Centered time difference of sqrt(G) minus (div_Gamma w) sqrt(G) at one point.
inline double sqrtG_evolution_residual(const Chart& chart, const Vec2& X, double t, double dt) {
    auto sqrtG = [&](double tau) {
        const auto tg = chart.tangents(X, tau);
        return std::sqrt(metric_determinant(tg[0], tg[1]));
    };
    const double lhs = (sqrtG(t + dt) - sqrtG(t - dt)) / (2 * dt);
    const FrameData f = frame(chart, X, t);
    return lhs - velocity_divergence(chart, f, X, t) * f.sqrtG;
}

/// Discrete dissipation energy -1/2 sum e(|grad u|^2) sqrt(G) dA with the
/// cell-centered difference gradient.
inline double dissipation_energy(const Chart& chart, const ParamGrid& grid,
                                 std::span<const double> u, const EnergyDensity& energy,
                                 double t) {
    double sum = 0.0;
    for (int i = 0; i < grid.nr; ++i)
        for (int j = 0; j < grid.ns; ++j) {
            const FrameData f = frame(chart, grid.center(i, j), t);
            const Vec2 D(param_derivative(grid, u, 0, i, j), param_derivative(grid, u, 1, i, j));
            sum += energy.e(D.dot(f.ginv * D)) * f.sqrtG;
        }
    return -0.5 * sum * grid.cell_area();
}

/// div_Gamma {e'(|grad u|^2) grad u} in the conservative chart form
/// (1/sqrt(G)) d_beta (sqrt(G) e' g^{alpha beta} d_alpha u), using the same
/// difference operator as dissipation_energy.
inline Field nonlinear_divergence(const Chart& chart, const ParamGrid& grid,
                                  std::span<const double> u, const EnergyDensity& energy,
                                  double t) {
    std::vector<double> v1(grid.size()), v2(grid.size()), sg(grid.size());
    for (int i = 0; i < grid.nr; ++i)
        for (int j = 0; j < grid.ns; ++j) {
            const FrameData f = frame(chart, grid.center(i, j), t);
            const Vec2 D(param_derivative(grid, u, 0, i, j), param_derivative(grid, u, 1, i, j));
            const Vec2 flux = f.sqrtG * energy.e_prime(D.dot(f.ginv * D)) * (f.ginv * D);
            const std::size_t k = grid.index(i, j);
            v1[k] = flux[0];
            v2[k] = flux[1];
            sg[k] = f.sqrtG;
        }
    Field out(grid.size());
    for (int i = 0; i < grid.nr; ++i)
        for (int j = 0; j < grid.ns; ++j)
            out[grid.index(i, j)] =
                (param_derivative(grid, v1, 0, i, j) + param_derivative(grid, v2, 1, i, j)) /
                sg[grid.index(i, j)];
    return out;
}

/// Width (in cells) of the band next to non-periodic edges where a variation
/// direction must vanish.
inline constexpr int variation_band = 3;

/// Centered difference in eps of E_D[f + eps psi] against
/// int div_Gamma{e'(|grad f|^2) grad f} psi. `psi` must vanish within
/// `variation_band` cells of every non-periodic edge.
inline ResidualReport dissipation_variation_residual(const Chart& chart, const ParamGrid& grid,
                                                     std::span<const double> f,
                                                     std::span<const double> psi,
                                                     const EnergyDensity& energy, double t,
                                                     double eps, double tolerance,
                                                     std::string name = "dissipation_variation") {
    for (int i = 0; i < grid.nr; ++i)
        for (int j = 0; j < grid.ns; ++j) {
            const bool near_r = !grid.periodic_r() &&
                                (i < variation_band || i >= grid.nr - variation_band);
            const bool near_s = !grid.periodic_s() &&
                                (j < variation_band || j >= grid.ns - variation_band);
            if ((near_r || near_s) && psi[grid.index(i, j)] != 0.0)
                throw Error("variation direction must vanish next to the boundary");
        }
    Field plus(f.begin(), f.end()), minus(f.begin(), f.end());
    for (std::size_t k = 0; k < plus.size(); ++k) {
        plus[k] += eps * psi[k];
        minus[k] -= eps * psi[k];
    }
    const double fd = (dissipation_energy(chart, grid, plus, energy, t) -
                       dissipation_energy(chart, grid, minus, energy, t)) /
                      (2 * eps);
    const Field div = nonlinear_divergence(chart, grid, f, energy, t);
    double pairing = 0.0;
    for (int i = 0; i < grid.nr; ++i)
        for (int j = 0; j < grid.ns; ++j) {
            const std::size_t k = grid.index(i, j);
            if (psi[k] == 0.0) continue;
            const auto tg = chart.tangents(grid.center(i, j), t);
            pairing += div[k] * psi[k] * std::sqrt(metric_determinant(tg[0], tg[1]));
        }
    pairing *= grid.cell_area();
    ResidualReport r;
    r.name = std::move(name);
    r.value = fd - pairing;
    r.tolerance = tolerance;
    r.resolution = {grid.nr, grid.ns, 0, eps};
    r.terms = {{"variation_fd", fd}, {"int_div_psi", pairing}};
    return r.finish();
}

}  // namespace evosurf
