#pragma once

// Named residual checks run by `evosurf verify`. Each check returns one or
// more ResidualReports; the battery can run them on a worker pool and always
// returns results in list order.

#include "evosurf/bubble/geometry.hpp"
#include "evosurf/calculus/theorems.hpp"
#include "evosurf/geometry/charts.hpp"

#include <atomic>
#include <exception>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <thread>

namespace evosurf::verify {

struct Settings {
    int n = 128;           // cells per direction
    int m = 512;           // edge quadrature points
    int samples = 200;     // random points per chart for pointwise identities
    unsigned seed = 1;
    double dt = 1e-3;      // time step of the transport checks
    double eps = 1e-4;     // variation step
    bubble::BubbleGeometry bubble{{1.0, 0.0}, {1.2, 0.0}, {0.8, 0.0}};
    double bubble_m1 = 0.05;  // m'(t) used by the moving-bubble transport check
    std::map<std::string, double> tolerance;
    std::optional<double> tolerance_override;

    double tol(const std::string& check, double def) const {
        if (tolerance_override) return *tolerance_override;
        const auto it = tolerance.find(check);
        return it == tolerance.end() ? def : it->second;
    }
    Resolution res() const { return {n, n, m, 0.0}; }
};

/// Charts used by the pointwise identity checks.
inline std::vector<Chart> chart_corpus(unsigned seed, const bubble::BubbleGeometry& bg) {
    std::vector<Chart> c{charts::plane(),
                         charts::random_graph(seed),
                         charts::cylinder(1.3, -0.5, 0.5),
                         charts::sphere_cap(1.0, 0.2, 1.2, 0.1),
                         charts::sphere_cap(0.7, 0.0, 0.9, 0.0, true)};
    for (const Chart& b : bubble::charts_for(bg)) c.push_back(b);
    return c;
}

inline Vec2 random_point(const Chart& c, std::mt19937_64& rng, double margin = 0.02) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const ParamRect& d = c.domain;
    const double mr = margin * d.extent_r(), ms = margin * d.extent_s();
    return {d.r_lo + mr + (d.extent_r() - 2 * mr) * U(rng),
            d.s_lo + ms + (d.extent_s() - 2 * ms) * U(rng)};
}

/// Worst deviation of the frame identities (dual basis, unit normal,
/// g^1 sqrtG = g2 x n and g^2 sqrtG = -g1 x n) over random points.
inline ResidualReport frame_identities(const std::vector<Chart>& corpus, int samples, unsigned seed,
                                       double t, double tol) {
    std::mt19937_64 rng(seed);
    double dual = 0.0, normal = 0.0, cross = 0.0;
    for (const Chart& c : corpus)
        for (int k = 0; k < samples; ++k) {
            const FrameData f = frame(c, random_point(c, rng), t);
            dual = std::max({dual, std::abs(f.gup1.dot(f.g1) - 1.0), std::abs(f.gup1.dot(f.g2)),
                             std::abs(f.gup2.dot(f.g1)), std::abs(f.gup2.dot(f.g2) - 1.0),
                             (f.ginv * f.g - Mat2::Identity()).norm()});
            normal = std::max({normal, std::abs(f.n.norm() - 1.0),
                               std::abs(f.n.dot(f.g1)) / f.g1.norm(),
                               std::abs(f.n.dot(f.g2)) / f.g2.norm()});
            cross = std::max({cross, (f.gup1 * f.sqrtG - f.g2.cross(f.n)).norm(),
                              (f.gup2 * f.sqrtG + f.g1.cross(f.n)).norm()});
        }
    ResidualReport r;
    r.name = "frame_identities";
    r.value = std::max({dual, normal, cross});
    r.tolerance = tol;
    r.resolution = {0, 0, samples, 0.0};
    r.terms = {{"dual_basis", dual}, {"normal", normal}, {"cross_products", cross}};
    return r.finish();
}

/// Worst Weingarten reconstruction residual; `fd` drops analytic second derivatives.
inline ResidualReport weingarten_check(const std::vector<Chart>& corpus, int samples, unsigned seed,
                                       bool fd, double t, double tol) {
    std::mt19937_64 rng(seed + 1);
    double worst = 0.0;
    for (Chart c : corpus) {
        if (fd) {
            c.second = nullptr;
            c.fd_step = 1e-5;
        }
        for (int k = 0; k < samples; ++k)
            worst = std::max(worst, weingarten_residual(c, random_point(c, rng, 0.05), t));
    }
    ResidualReport r;
    r.name = fd ? "weingarten_fd" : "weingarten_analytic";
    r.value = worst;
    r.tolerance = tol;
    r.resolution = {0, 0, samples, 0.0};
    return r.finish();
}

/// Smooth non-polynomial test fields for the divergence theorem.
inline std::vector<AmbientField> smooth_fields() {
    return {{[](const Vec3& x, double) {
                 return Vec3(std::sin(x[1]) + x[0] * x[2], std::exp(0.3 * x[0]) * x[2],
                             x[0] * x[1] - std::cos(x[2]));
             },
             {}},
            {[](const Vec3& x, double) { return Vec3(x[1] * x[1], x[0] * x[2], 1.0 + x[0]); }, {}},
            {[](const Vec3& x, double) {
                 return Vec3(std::cos(x[0] + x[1]), std::sin(x[2]), x[0] * x[0]);
             },
             {}}};
}

/// Divergence theorem on one chart for every smooth field; the report holds
/// the largest residual.
inline ResidualReport divergence_check(const std::string& name, const Chart& c, Resolution res,
                                       double tol) {
    ResidualReport worst;
    worst.name = name;
    int k = 0;
    for (const AmbientField& f : smooth_fields()) {
        const ResidualReport r = divergence_theorem_residual(c, f, 0.0, res, tol, name);
        worst.terms.emplace_back("field" + std::to_string(k++), r.value);
        if (std::abs(r.value) >= std::abs(worst.value) || !std::isfinite(r.value)) worst.value = r.value;
    }
    worst.tolerance = tol;
    worst.resolution = res;
    return worst.finish();
}

inline std::array<Chart, 2> two_hemispheres() {
    return {charts::sphere_cap(1.0, 0.0, pi / 2), charts::sphere_cap(1.0, 0.0, pi / 2, 0.0, true)};
}

inline AmbientField position_field() {
    return {[](const Vec3& x, double) { return x; },
            [](const Vec3&, double) { return Mat3::Identity().eval(); }};
}

/// Analytic bubble co-normals against the numeric construction at nth
/// angles; second report is the worst |nu . n| and ||nu| - 1|.
inline std::array<ResidualReport, 2> conormal_check(const bubble::BubbleGeometry& g, int nth,
                                                    double tol_match, double tol_orth) {
    const auto ch = bubble::charts_for(g);
    double match = 0.0, orth = 0.0;
    for (int j = 0; j < nth; ++j) {
        const double th = 2 * pi * j / nth;
        const bubble::Conormals c = bubble::analytic_conormals_unchecked(g, th, 0.0);
        const std::array<std::pair<Vec3, int>, 3> pairs{
            std::pair{c.A, int(bubble::A2)}, std::pair{c.B, int(bubble::B1)}, std::pair{c.S, int(bubble::S)}};
        for (const auto& [nu, p] : pairs) {
            match = std::max(match, (nu - bubble::numeric_conormal_r1(ch[p], th, 0.0)).norm());
            const Vec3 n = frame(ch[p], Vec2(1.0, th), 0.0).n;
            orth = std::max({orth, std::abs(nu.dot(n)), std::abs(nu.norm() - 1.0)});
        }
    }
    ResidualReport a, b;
    a.name = "conormal_match";
    a.value = match;
    a.tolerance = tol_match;
    a.resolution = {0, nth, 0, 0.0};
    b.name = "conormal_orthogonality";
    b.value = orth;
    b.tolerance = tol_orth;
    b.resolution = a.resolution;
    return {a.finish(), b.finish()};
}

/// |nu_B . n_B| for the printed co-normal at theta = 0 (expected nonzero).
inline double printed_conormal_defect(const bubble::BubbleGeometry& g) {
    const bubble::Conormals c = bubble::analytic_conormals_unchecked(g, 0.0, 0.0);
    return std::abs(c.B_printed.dot(frame(bubble::chart_b1(g), Vec2(1.0, 0.0), 0.0).n));
}

/// Worst sqrtG evolution residual over random points of moving charts.
inline ResidualReport sqrtG_check(int samples, unsigned seed, double dt, double tol,
                                  const bubble::BubbleGeometry& moving) {
    std::vector<Chart> cs{charts::sphere_cap(1.0, 0.3, 1.0, 0.2), charts::scaled_plane(1.0, 1.0),
                          charts::sphere_equal_area(1.0, 0.1)};
    for (const Chart& b : bubble::charts_for(moving)) cs.push_back(b);
    std::mt19937_64 rng(seed + 2);
    double worst = 0.0;
    for (const Chart& c : cs)
        for (int k = 0; k < samples; ++k)
            worst = std::max(worst, std::abs(sqrtG_evolution_residual(c, random_point(c, rng, 0.05), 0.1, dt)));
    ResidualReport r;
    r.name = "sqrtG_evolution";
    r.value = worst;
    r.tolerance = tol;
    r.resolution = {0, 0, samples, dt};
    return r.finish();
}

/// Variation-of-dissipation gradient check on a random graph chart.
inline ResidualReport variation_check(const std::string& name, const EnergyDensity& e, int n,
                                      unsigned seed, double eps, double tol) {
    const Chart c = charts::random_graph(seed + 3);
    const ParamGrid g(n, n, c);
    const Field f = sample(g, [&](const Vec2& X) {
        const Vec3 x = c.map(X, 0.0);
        return std::sin(2 * x[0]) + x[1] * x[2] + 0.5 * x[2];
    });
    const Field psi = sample(g, [](const Vec2& X) {
        const double d2 = ((X[0] - 0.5) * (X[0] - 0.5) + (X[1] - 0.5) * (X[1] - 0.5)) / (0.35 * 0.35);
        return d2 < 1.0 ? std::pow(1.0 - d2, 4) : 0.0;
    });
    return dissipation_variation_residual(c, g, f, psi, e, 0.0, eps, tol, name);
}

struct Check {
    std::string name;
    std::string description;
    std::function<std::vector<ResidualReport>(const Settings&)> run;
};

inline std::vector<Check> checks() {
    using V = std::vector<ResidualReport>;
    std::vector<Check> c;
    c.push_back({"frame_identities", "dual basis, unit normal and cross-product identities",
                 [](const Settings& s) {
                     return V{frame_identities(chart_corpus(s.seed, s.bubble), s.samples, s.seed, 0.3,
                                               s.tol("frame_identities", 1e-10))};
                 }});
    c.push_back({"weingarten_analytic", "Weingarten reconstruction, analytic second derivatives",
                 [](const Settings& s) {
                     return V{weingarten_check(chart_corpus(s.seed, s.bubble), s.samples, s.seed, false,
                                               0.1, s.tol("weingarten_analytic", 1e-8))};
                 }});
    c.push_back({"weingarten_fd", "Weingarten reconstruction, finite-difference second derivatives",
                 [](const Settings& s) {
                     return V{weingarten_check(chart_corpus(s.seed, s.bubble), s.samples, s.seed, true,
                                               0.1, s.tol("weingarten_fd", 1e-6))};
                 }});
    c.push_back({"divergence_disc", "divergence theorem on the flat interface disc",
                 [](const Settings& s) {
                     return V{divergence_check("divergence_disc", bubble::chart_s(s.bubble), s.res(),
                                               s.tol("divergence_disc", 1e-4))};
                 }});
    c.push_back({"divergence_cap", "divergence theorem on a unit-sphere cap",
                 [](const Settings& s) {
                     return V{divergence_check("divergence_cap", charts::sphere_cap(1.0, 0.0, 1.0),
                                               s.res(), s.tol("divergence_cap", 1e-4))};
                 }});
    c.push_back({"divergence_graph", "divergence theorem on a random graph",
                 [](const Settings& s) {
                     return V{divergence_check("divergence_graph", charts::random_graph(s.seed),
                                               s.res(), s.tol("divergence_graph", 1e-4))};
                 }});
    c.push_back({"union_sphere", "closed sphere from two caps, with co-normal antisymmetry",
                 [](const Settings& s) {
                     const auto caps = two_hemispheres();
                     const std::array<EdgePairing, 1> p{EdgePairing{0, Edge::r_hi, 1, Edge::r_hi}};
                     const UnionReport u = union_divergence_residual(
                         caps, p, position_field(), 0.0, s.res(), s.tol("union_sphere", 1e-6),
                         s.tol("union_sphere_conormal", 1e-10), "union_sphere");
                     return V{u.divergence, u.conormal_antisymmetry};
                 }});
    c.push_back({"conormal_bubble", "closed-form bubble co-normals against the numeric construction",
                 [](const Settings& s) {
                     const auto r = conormal_check(s.bubble, 64, s.tol("conormal_match", 1e-8),
                                                   s.tol("conormal_orthogonality", 1e-12));
                     return V{r[0], r[1]};
                 }});
    c.push_back({"bubble_interface", "five bubble charts meet on the common circle",
                 [](const Settings& s) {
                     ResidualReport r;
                     r.name = "bubble_interface";
                     double worst = 0.0;
                     for (double t : {0.0, 0.5}) {
                         bubble::BubbleGeometry g = s.bubble;
                         g.m.v1 = s.bubble_m1;
                         const auto ch = bubble::charts_for(g, t);
                         worst = std::max(worst, bubble::interface_mismatch(ch[bubble::A2], ch[bubble::B1],
                                                                            ch[bubble::S], t, s.m));
                     }
                     r.value = worst;
                     r.tolerance = s.tol("bubble_interface", 1e-12);
                     r.resolution = {0, 0, s.m, 0.0};
                     return V{r.finish()};
                 }});
    c.push_back({"bubble_divergence", "divergence theorem on the bubble sheets and seams",
                 [](const Settings& s) {
                     const AmbientField poly{[](const Vec3& x, double) {
                                                 return Vec3(x[0] * x[1] + 0.3, x[2] * x[2] - x[0],
                                                             x[0] * x[0] * x[2]);
                                             },
                                             {}};
                     const auto b = bubble::bubble_divergence_check(
                         s.bubble, poly, 0.0, s.res(), s.tol("bubble_divergence", 5e-4),
                         s.tol("bubble_seam", 1e-10));
                     V out(b.patches.begin(), b.patches.end());
                     out.insert(out.end(), b.seams.begin(), b.seams.end());
                     return out;
                 }});
    c.push_back({"transport_sphere", "area rate of a growing sphere",
                 [](const Settings& s) {
                     const auto one = [](const Vec3&, double) { return 1.0; };
                     ResidualReport r = transport_theorem_residual(
                         charts::sphere_equal_area(1.0, 0.1), one, 0.0, s.dt, {s.n, s.n, 0, s.dt},
                         s.tol("transport_sphere", 1e-8), "transport_sphere");
                     return V{r};
                 }});
    c.push_back({"transport_bubble", "transport theorem on the bubble sheets with moving centres",
                 [](const Settings& s) {
                     bubble::BubbleGeometry g = s.bubble;
                     g.m.v1 = s.bubble_m1;
                     const auto f = [](const Vec3& x, double t) { return 1.0 + x[1] * x[1] + t * x[0]; };
                     const auto r = bubble::bubble_transport_check(g, f, 0.0, s.dt, s.res(),
                                                                   s.tol("transport_bubble", 1e-5));
                     return V(r.begin(), r.end());
                 }});
    c.push_back({"sqrtG_evolution", "time derivative of sqrtG against sqrtG div w",
                 [](const Settings& s) {
                     bubble::BubbleGeometry g = s.bubble;
                     g.m.v1 = s.bubble_m1;
                     return V{sqrtG_check(s.samples / 4 + 1, s.seed, s.dt, s.tol("sqrtG_evolution", 1e-6), g)};
                 }});
    const std::array<std::pair<const char*, EnergyDensity>, 3> energies{
        std::pair{"variation_linear", EnergyDensity::linear()},
        std::pair{"variation_power", EnergyDensity::power(1.0)},
        std::pair{"variation_log", EnergyDensity::logarithmic()}};
    for (const auto& [name, e] : energies) {
        const std::string n = name;
        c.push_back({n, "variation of the dissipation energy, " + e.describe(),
                     [n, e](const Settings& s) {
                         return V{variation_check(n, e, s.n, s.seed, s.eps, s.tol(n, 1e-6))};
                     }});
    }
    return c;
}

/// Runs the selected checks on `threads` workers. Results keep list order;
/// an exception inside a check becomes a failing report carrying its message.
inline std::vector<std::vector<ResidualReport>> run(const std::vector<Check>& list, const Settings& s,
                                                    int threads, std::vector<std::string>* errors = nullptr) {
    std::vector<std::vector<ResidualReport>> out(list.size());
    std::vector<std::string> err(list.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next++) < list.size();) {
            try {
                out[k] = list[k].run(s);
            } catch (const std::exception& e) {
                ResidualReport r;
                r.name = list[k].name;
                r.value = std::nan("");
                err[k] = e.what();
                out[k] = {r.finish()};
            }
        }
    };
    const int nt = std::max(1, std::min<int>(threads, static_cast<int>(list.size())));
    std::vector<std::thread> pool;
    for (int k = 1; k < nt; ++k) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
    if (errors) *errors = std::move(err);
    return out;
}

}  // namespace evosurf::verify
