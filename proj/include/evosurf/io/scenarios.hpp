#pragma once

// Scenario builders and runners behind the command-line tool. Everything that
// reads a Config lives here so the tool itself only dispatches and reports.

#include "evosurf/bubble/solver.hpp"
#include "evosurf/geometry/charts.hpp"
#include "evosurf/io/config.hpp"
#include "evosurf/solver/laws.hpp"
#include "evosurf/solver/stepper.hpp"
#include "evosurf/verify/battery.hpp"

#include <boost/math/special_functions/bessel.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>

namespace evosurf::io {

namespace fs = std::filesystem;

inline const std::set<std::string> known_sections{"scenario", "geometry", "energy", "bc",     "grid",
                                                  "time",     "init",     "checks", "output", "verify",
                                                  "bubble",   "converge"};

/// Common [scenario] handling: optional mode consistency and the seed.
inline unsigned scenario_seed(const Config& c, const std::string& mode, std::optional<unsigned> cli_seed) {
    c.allow_sections(known_sections);
    c.allow_keys("scenario", {"mode", "seed"});
    if (c.has("scenario", "mode") && c.text("scenario", "mode") != mode)
        c.fail("scenario", "mode", "config is for '" + c.text("scenario", "mode") + "', not '" + mode + "'");
    if (cli_seed) return *cli_seed;
    const double s = c.bounded("scenario", "seed", 1.0, 0.0, 4294967295.0);
    if (s != std::floor(s)) c.fail("scenario", "seed", "expected an integer");
    return static_cast<unsigned>(s);
}

// ---------------------------------------------------------------- geometry

inline Chart make_chart(const Config& c, unsigned seed) {
    const std::string sec = "geometry";
    c.allow_keys(sec, {"chart", "a0", "a1", "b0", "b1", "m0", "m1", "Phi0", "Phi1", "south", "radius",
                       "z_lo", "z_hi", "s0", "s1", "seed"});
    const std::string kind = c.text(sec, "chart");
    if (kind == "plane") return charts::plane();
    if (kind == "scaled_plane")
        return charts::scaled_plane(c.bounded(sec, "s0", 1.0, 0.0, 1e300, true), c.number(sec, "s1", 0.0));
    if (kind == "graph") {
        const int s = c.integer(sec, "seed", static_cast<int>(seed % 1000000));
        return charts::random_graph(static_cast<unsigned>(s));
    }
    if (kind == "cylinder") {
        const double lo = c.number(sec, "z_lo", 0.0), hi = c.number(sec, "z_hi", 1.0);
        if (!(hi > lo)) c.fail(sec, "z_hi", "must exceed z_lo");
        return charts::cylinder(c.bounded(sec, "radius", 1.0, 0.0, 1e300, true), lo, hi);
    }
    if (kind == "disc") return charts::disc(c.bounded(sec, "radius", 1.0, 0.0, 1e300, true));
    if (kind == "sphere_cap")
        return charts::sphere_cap(c.bounded(sec, "a0", 1.0, 0.0, 1e300, true), c.number(sec, "a1", 0.0),
                                  c.bounded(sec, "Phi0", 1.0, 0.0, pi, true), c.number(sec, "Phi1", 0.0),
                                  c.flag(sec, "south", false));
    if (kind == "sphere_equal_area")
        return charts::sphere_equal_area(c.bounded(sec, "a0", 1.0, 0.0, 1e300, true), c.number(sec, "a1", 0.0));
    if (kind == "bubble_disc") {
        const bubble::BubbleGeometry g{{c.number(sec, "a0", 1.0), c.number(sec, "a1", 0.0)},
                                       {c.number(sec, "b0", 1.2), c.number(sec, "b1", 0.0)},
                                       {c.number(sec, "m0", 0.8), c.number(sec, "m1", 0.0)}};
        try {
            g.validate(0.0);
        } catch (const GeometryInvalid& e) {
            c.fail(sec, "chart", e.what());
        }
        return bubble::chart_s(g);
    }
    c.fail(sec, "chart",
           "unknown chart '" + kind +
               "' (plane, scaled_plane, graph, cylinder, disc, sphere_cap, sphere_equal_area, bubble_disc)");
}

/// Rejects a motion that stops being a valid chart inside [0, t_end].
inline void check_motion(const Config& c, const Chart& chart, double t_end) {
    for (int k = 0; k <= 16; ++k) {
        const double t = t_end * k / 16;
        try {
            const ParamRect& d = chart.domain;
            frame(chart, Vec2(0.5 * (d.r_lo + d.r_hi), 0.5 * (d.s_lo + d.s_hi)), t);
        } catch (const DegenerateMetric& e) {
            c.fail("geometry", "chart", std::string("motion degenerates before t_end: ") + e.what());
        }
    }
}

// ------------------------------------------------------------------ energy

inline EnergyDensity make_energy(const Config& c, const std::string& sec = "energy") {
    const std::string kind = c.text(sec, "kind", "linear");
    EnergyDensity e;
    if (kind == "linear") e = EnergyDensity::linear(c.bounded(sec, "k", 1.0, 0.0, 1e300, true));
    else if (kind == "power") e = EnergyDensity::power(c.bounded(sec, "p", 1.0, 0.0, 64.0, true));
    else if (kind == "log") e = EnergyDensity::logarithmic();
    else c.fail(sec, "kind", "unknown energy '" + kind + "' (linear, power, log)");
    return e;
}

inline System make_system(const Config& c) {
    const std::string s = c.text("energy", "system", "diffusion");
    if (s == "diffusion") return System::diffusion;
    if (s == "heat") return System::heat;
    c.fail("energy", "system", "expected diffusion or heat");
}

// ----------------------------------------------------------------- boundary

inline std::array<BoundaryCondition, 4> make_bc(const Config& c, const Chart& chart) {
    c.allow_keys("bc", {"r_lo", "r_hi", "s_lo", "s_hi"});
    std::array<BoundaryCondition, 4> bc{};
    for (Edge e : all_edges) {
        const std::string key = edge_name(e);
        if (!c.has("bc", key)) continue;
        const EdgeRole role = chart.role(e);
        if (role != EdgeRole::physical)
            c.fail("bc", key, "edge is not a physical boundary of this chart");
        const std::string v = c.text("bc", key);
        if (v == "neumann") continue;
        if (v.rfind("dirichlet:", 0) == 0) {
            const auto g = parse_number(v.substr(10));
            if (!g) c.fail("bc", key, "expected dirichlet:<number>");
            bc[static_cast<int>(e)] = BoundaryCondition::dirichlet(*g);
            continue;
        }
        c.fail("bc", key, "expected neumann or dirichlet:<number>");
    }
    return bc;
}

// ------------------------------------------------------------ initial data

using Initial = std::function<double(const Vec2&)>;

/// Presets over the parameter point X (single patch):
///   constant:c | gaussian:r0,s0,width | bessel | cosine:k | sine_mode | height
inline Initial make_initial(const Config& c, const std::string& sec, const std::string& key,
                            const Chart& chart, const std::string& def) {
    const std::string v = c.text(sec, key, def);
    const auto colon = v.find(':');
    const std::string name = v.substr(0, colon);
    std::vector<double> args;
    if (colon != std::string::npos)
        for (const std::string& a : split(v.substr(colon + 1), ',')) {
            const auto d = parse_number(a);
            if (!d) c.fail(sec, key, "bad number '" + a + "' in '" + v + "'");
            args.push_back(*d);
        }
    auto need = [&](std::size_t n) {
        if (args.size() != n) c.fail(sec, key, "'" + name + "' takes " + std::to_string(n) + " argument(s)");
    };
    if (name == "constant") {
        need(1);
        const double k = args[0];
        return [k](const Vec2&) { return k; };
    }
    if (name == "gaussian") {
        need(3);
        if (!(args[2] > 0.0)) c.fail(sec, key, "gaussian width must be positive");
        const double r0 = args[0], s0 = args[1], w = args[2];
        return [=](const Vec2& X) {
            return std::exp(-((X[0] - r0) * (X[0] - r0) + (X[1] - s0) * (X[1] - s0)) / (w * w));
        };
    }
    if (name == "bessel") {
        need(0);
        const double j = boost::math::cyl_bessel_j_zero(0.0, 1);
        return [j](const Vec2& X) { return boost::math::cyl_bessel_j(0, j * X[0]); };
    }
    if (name == "cosine") {
        need(1);
        const double k = args[0];
        return [k](const Vec2& X) { return std::cos(k * pi * X[0]); };
    }
    if (name == "sine_mode") {
        need(0);
        return [](const Vec2& X) { return std::sin(pi * X[0]) * std::sin(pi * X[1]); };
    }
    if (name == "height") {
        need(0);
        return [chart](const Vec2& X) { return chart.map(X, 0.0)[2]; };
    }
    c.fail(sec, key, "unknown preset '" + name + "' (constant, gaussian, bessel, cosine, sine_mode, height)");
}

// ---------------------------------------------------------------- time

struct TimeControl {
    double t_end = 0.0;
    std::optional<double> dt;  // fixed step, else CFL-chosen
    double cfl_safety = 0.4;
    double dt_max = std::numeric_limits<double>::infinity();
    Integrator integrator = Integrator::euler;
    int record_every = 1;
    int snapshot_every = 0;  // 0: final snapshot only
    int steps = 0;           // number of steps for a fixed dt
};

inline TimeControl make_time(const Config& c, const std::string& sec,
                             const std::set<std::string>& extra_keys = {}) {
    std::set<std::string> keys{"t_end", "dt", "cfl_safety", "dt_max", "integrator", "record_every",
                               "snapshot_every"};
    keys.insert(extra_keys.begin(), extra_keys.end());
    c.allow_keys(sec, keys);
    TimeControl tc;
    tc.t_end = c.bounded(sec, "t_end", 0.0, 0.0, 1e300, true);
    if (c.has(sec, "dt") && c.has(sec, "cfl_safety"))
        c.fail(sec, "cfl_safety", "give either dt or cfl_safety, not both");
    if (c.has(sec, "dt")) {
        tc.dt = c.bounded(sec, "dt", 0.0, 0.0, tc.t_end, true);
        const double n = std::round(tc.t_end / *tc.dt);
        if (std::abs(n * *tc.dt - tc.t_end) > 1e-9 * tc.t_end)
            c.fail(sec, "dt", "t_end is not an integer multiple of dt");
        if (n > 1e8) c.fail(sec, "dt", "more than 1e8 steps requested");
        tc.steps = static_cast<int>(n);
    }
    tc.cfl_safety = c.bounded(sec, "cfl_safety", 0.4, 0.0, 1.0, true);
    if (c.has(sec, "dt_max")) tc.dt_max = c.bounded(sec, "dt_max", 0.0, 0.0, 1e300, true);
    const std::string integ = c.text(sec, "integrator", "euler");
    if (integ == "euler") tc.integrator = Integrator::euler;
    else if (integ == "heun") tc.integrator = Integrator::heun;
    else c.fail(sec, "integrator", "expected euler or heun");
    tc.record_every = static_cast<int>(c.bounded(sec, "record_every", 1, 1, 1e9));
    tc.snapshot_every = static_cast<int>(c.bounded(sec, "snapshot_every", 0, 0, 1e9));
    return tc;
}

inline fs::path output_dir(const Config& c, const std::optional<std::string>& cli_out) {
    c.allow_keys("output", {"dir"});
    const fs::path p = cli_out ? fs::path(*cli_out) : fs::path(c.text("output", "dir", "out"));
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw ConfigError("cannot create output directory " + p.string() + ": " + ec.message());
    return p;
}

inline std::ofstream open_csv(const fs::path& p) {
    std::ofstream os(p);
    if (!os) throw Error("cannot write " + p.string());
    return os;
}

// ======================================================================= run

struct RunScenario {
    SolverState initial;
    TimeControl time;
    bool neumann_only = true;
    double mass_drift_tol = 1e-12;
    std::optional<double> energy_law_tol;
};

inline RunScenario make_run(const Config& c, unsigned seed, const std::string& time_sec = "time") {
    RunScenario r;
    c.allow_keys("energy", {"system", "kind", "k", "p"});
    c.allow_keys("grid", {"nr", "ns"});
    c.allow_keys("init", {"u", "rho"});
    c.allow_keys("checks", {"mass_drift_tol", "energy_law_tol"});
    const Chart chart = make_chart(c, seed);
    const System sys = make_system(c);
    const EnergyDensity e = make_energy(c);
    const auto bc = make_bc(c, chart);
    const int nr = static_cast<int>(c.bounded("grid", "nr", 32, 2, 1 << 14));
    const int ns = static_cast<int>(c.bounded("grid", "ns", 32, 2, 1 << 14));
    if (c.has("grid", "nr") && c.number("grid", "nr") != nr) c.fail("grid", "nr", "expected an integer");
    if (c.has("grid", "ns") && c.number("grid", "ns") != ns) c.fail("grid", "ns", "expected an integer");
    r.time = make_time(c, time_sec, time_sec == "time" ? std::set<std::string>{} : std::set<std::string>{"check", "dt0", "levels", "min_order", "field", "n0", "m_factor"});
    check_motion(c, chart, r.time.t_end);
    const Initial u0 = make_initial(c, "init", "u", chart, "constant:1");
    Initial rho0;
    if (sys == System::heat) {
        rho0 = make_initial(c, "init", "rho", chart, "constant:1");
        const ParamGrid g(nr, ns, chart);
        for (int i = 0; i < nr; ++i)
            for (int j = 0; j < ns; ++j)
                if (!(rho0(g.center(i, j)) > 0.0)) c.fail("init", "rho", "density must be positive");
    } else if (c.has("init", "rho")) {
        c.fail("init", "rho", "only used by the heat system");
    }
    r.initial = make_state(chart, nr, ns, sys, e, bc, u0, rho0);
    for (const BoundaryCondition& b : bc) r.neumann_only = r.neumann_only && !b.is_dirichlet();
    r.mass_drift_tol = c.bounded("checks", "mass_drift_tol", 1e-12, 0.0);
    if (c.has("checks", "energy_law_tol")) r.energy_law_tol = c.bounded("checks", "energy_law_tol", 0.0, 0.0);
    return r;
}

struct RunResult {
    SolverState final;
    LawTracker laws;
    int steps = 0;
    double mass_drift = 0.0;
    double energy_residual = 0.0;
    bool pass = true;
    std::vector<std::string> findings;
};

inline std::string scientific(double v) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(3) << v;
    return os.str();
}

/// Integrates a scenario to t_end. Snapshot files are written into `out`
/// when it is non-empty.
inline RunResult execute_run(const RunScenario& sc, const fs::path& out = {}) {
    RunResult res;
    SolverState s = sc.initial;
    const TimeControl& tc = sc.time;
    StepOptions opt;
    opt.integrator = tc.integrator;
    res.laws.record(s);
    auto snapshot = [&](const std::string& tag) {
        if (out.empty()) return;
        std::ofstream os = open_csv(out / ("snapshot_" + tag + ".csv"));
        write_snapshot(os, s);
    };
    snapshot("initial");
    int k = 0;
    while (true) {
        const double left = tc.t_end - s.t;
        if (tc.dt ? k >= tc.steps : left <= 1e-14 * tc.t_end) break;
        double dt;
        if (tc.dt) {
            dt = *tc.dt;
        } else {
            dt = cfl_dt(s, tc.cfl_safety, tc.dt_max);
            if (!std::isfinite(dt)) throw ConfigError("[time] dt_max: CFL bound is unbounded for this state; set dt_max");
            dt = std::min(dt, left);
        }
        step(s, dt, opt);
        ++k;
        const bool last = tc.dt ? k == tc.steps : tc.t_end - s.t <= 1e-14 * tc.t_end;
        if (k % tc.record_every == 0 || last) res.laws.record(s);
        if (tc.snapshot_every > 0 && k % tc.snapshot_every == 0 && !last) snapshot(std::to_string(k));
    }
    snapshot("final");
    res.steps = k;
    res.mass_drift = res.laws.max_relative_mass_drift();
    res.energy_residual = res.laws.last().law_residual;
    if (sc.neumann_only && res.mass_drift > sc.mass_drift_tol) {
        res.pass = false;
        res.findings.push_back("mass drift " + scientific(res.mass_drift) + " exceeds " +
                               scientific(sc.mass_drift_tol));
    }
    if (sc.energy_law_tol && std::abs(res.energy_residual) > *sc.energy_law_tol) {
        res.pass = false;
        res.findings.push_back("energy-law residual " + scientific(res.energy_residual) + " exceeds " +
                               scientific(*sc.energy_law_tol));
    }
    if (!out.empty()) {
        std::ofstream os = open_csv(out / "run_report.csv");
        res.laws.write_csv(os);
    }
    res.final = std::move(s);
    return res;
}

// ==================================================================== bubble

struct BubbleScenario {
    bubble::BubbleGeometry geom;
    std::array<EnergyDensity, 3> energies;
    int nr = 16, ntheta = 32;
    TimeControl time;
    std::array<bubble::InitialData, 3> ic;
    double mass_drift_tol = 1e-11;
    double interface_tol = 1e-12;
};

/// Bubble presets over the parameter point (r, theta):
///   constant:c | gaussian:theta0,width | indicator (1 on this sheet)
inline bubble::InitialData make_bubble_ic(const Config& c, const std::string& key, const std::string& def) {
    const std::string v = c.text("bubble", key, def);
    const auto colon = v.find(':');
    const std::string name = v.substr(0, colon);
    std::vector<double> args;
    if (colon != std::string::npos)
        for (const std::string& a : split(v.substr(colon + 1), ',')) {
            const auto d = parse_number(a);
            if (!d) c.fail("bubble", key, "bad number '" + a + "' in '" + v + "'");
            args.push_back(*d);
        }
    if (name == "indicator" && args.empty()) return [](const Vec2&) { return 1.0; };
    if (name == "constant" && args.size() == 1) {
        const double k = args[0];
        return [k](const Vec2&) { return k; };
    }
    if (name == "gaussian" && args.size() == 2 && args[1] > 0.0) {
        const double th0 = args[0], w = args[1];
        return [th0, w](const Vec2& X) {
            const double d = std::remainder(X[1] - th0, 2 * pi);
            return std::exp(-d * d / (w * w));
        };
    }
    c.fail("bubble", key, "expected constant:c, gaussian:theta0,width (width > 0) or indicator");
}

inline BubbleScenario make_bubble(const Config& c) {
    const std::string sec = "bubble";
    c.allow_keys(sec, {"a0", "a1", "b0", "b1", "m0", "m1", "kappa_A", "kappa_B", "kappa_S", "N_r",
                       "N_theta", "t_end", "dt", "cfl_safety", "dt_max", "integrator", "record_every",
                       "snapshot_every", "ic_A", "ic_B", "ic_S", "mass_drift_tol", "interface_tol"});
    BubbleScenario b;
    b.geom = {{c.number(sec, "a0", 1.0), c.number(sec, "a1", 0.0)},
              {c.number(sec, "b0", 1.2), c.number(sec, "b1", 0.0)},
              {c.number(sec, "m0", 0.8), c.number(sec, "m1", 0.0)}};
    b.energies = {EnergyDensity::linear(c.bounded(sec, "kappa_A", 1.0, 0.0, 1e300, true)),
                  EnergyDensity::linear(c.bounded(sec, "kappa_B", 1.0, 0.0, 1e300, true)),
                  EnergyDensity::linear(c.bounded(sec, "kappa_S", 1.0, 0.0, 1e300, true))};
    b.nr = c.integer(sec, "N_r", 16);
    b.ntheta = c.integer(sec, "N_theta", 32);
    if (b.nr < 2) c.fail(sec, "N_r", "need at least 2 cells");
    if (b.ntheta < 3) c.fail(sec, "N_theta", "need at least 3 cells");
    b.time = make_time(c, sec, {"a0", "a1", "b0", "b1", "m0", "m1", "kappa_A", "kappa_B", "kappa_S",
                                "N_r", "N_theta", "ic_A", "ic_B", "ic_S", "mass_drift_tol", "interface_tol"});
    try {
        b.geom.validate(0.0, b.time.t_end);
    } catch (const GeometryInvalid& e) {
        c.fail(sec, "m1", std::string("geometry leaves 0 < m < a < b < 2m: ") + e.what());
    }
    b.ic = {make_bubble_ic(c, "ic_A", "indicator"), make_bubble_ic(c, "ic_B", "constant:0"),
            make_bubble_ic(c, "ic_S", "constant:0")};
    b.mass_drift_tol = c.bounded(sec, "mass_drift_tol", 1e-11, 0.0);
    b.interface_tol = c.bounded(sec, "interface_tol", 1e-12, 0.0);
    return b;
}

struct BubbleResult {
    bubble::BubbleState final;
    bubble::BubbleLaws laws;
    int steps = 0;
    double mass_drift = 0.0;
    double energy_residual = 0.0;
    double interface_mismatch = 0.0;
    bool pass = true;
    std::vector<std::string> findings;
};

inline void write_bubble_snapshots(const fs::path& out, const bubble::BubbleState& st, const std::string& tag) {
    for (int p = 0; p < 5; ++p) {
        std::ofstream os = open_csv(out / ("bubble_" + std::string(bubble::patch_names[p]) + "_" + tag + ".csv"));
        write_snapshot(os, st.patches[p]);
    }
}

inline BubbleResult execute_bubble(const BubbleScenario& sc, const fs::path& out = {}) {
    BubbleResult res;
    bubble::BubbleState st = bubble::make_bubble_state(sc.geom, sc.energies, sc.nr, sc.ntheta, sc.ic);
    bubble::solve_interfaces(st, bubble::flux_contexts(st));
    const TimeControl& tc = sc.time;
    StepOptions opt;
    opt.integrator = tc.integrator;
    res.laws.record(st);
    if (!out.empty()) write_bubble_snapshots(out, st, "initial");
    auto track_interface = [&] {
        const auto ch = bubble::charts_for(st.geom, st.t);
        res.interface_mismatch = std::max(res.interface_mismatch,
                                          bubble::interface_mismatch(ch[bubble::A2], ch[bubble::B1],
                                                                     ch[bubble::S], st.t, sc.ntheta));
    };
    track_interface();
    int k = 0;
    while (true) {
        const double left = tc.t_end - st.t;
        if (tc.dt ? k >= tc.steps : left <= 1e-14 * tc.t_end) break;
        const double dt = tc.dt ? *tc.dt : std::min(bubble::bubble_cfl_dt(st, tc.cfl_safety), left);
        bubble::coupled_step(st, dt, opt);
        ++k;
        const bool last = tc.dt ? k == tc.steps : tc.t_end - st.t <= 1e-14 * tc.t_end;
        if (k % tc.record_every == 0 || last) {
            res.laws.record(st);
            track_interface();
        }
        if (!out.empty() && tc.snapshot_every > 0 && k % tc.snapshot_every == 0 && !last)
            write_bubble_snapshots(out, st, std::to_string(k));
    }
    if (!out.empty()) {
        write_bubble_snapshots(out, st, "final");
        std::ofstream os = open_csv(out / "bubble_laws.csv");
        res.laws.write_csv(os);
    }
    res.steps = k;
    res.mass_drift = res.laws.max_relative_mass_drift();
    res.energy_residual = res.laws.energy_residual();
    if (res.mass_drift > sc.mass_drift_tol) {
        res.pass = false;
        res.findings.push_back("mass drift " + scientific(res.mass_drift) + " exceeds " +
                               scientific(sc.mass_drift_tol));
    }
    if (res.interface_mismatch > sc.interface_tol) {
        res.pass = false;
        res.findings.push_back("interface mismatch " + scientific(res.interface_mismatch) + " exceeds " +
                               scientific(sc.interface_tol));
    }
    res.final = std::move(st);
    return res;
}

// =================================================================== verify

inline verify::Settings make_verify(const Config& c, unsigned seed) {
    const std::string sec = "verify";
    std::set<std::string> keys{"n", "m", "samples", "dt", "eps", "tolerance", "checks"};
    std::vector<std::string> tol_keys;
    for (const verify::Check& ch : verify::checks()) tol_keys.push_back("tol_" + ch.name);
    for (const char* extra : {"tol_union_sphere_conormal", "tol_conormal_match", "tol_conormal_orthogonality",
                              "tol_bubble_seam"})
        tol_keys.emplace_back(extra);
    keys.insert(tol_keys.begin(), tol_keys.end());
    c.allow_keys(sec, keys);
    verify::Settings s;
    s.seed = seed;
    s.n = c.integer(sec, "n", 128);
    if (s.n < 4 || s.n > 4096) c.fail(sec, "n", "expected 4 <= n <= 4096");
    s.m = c.integer(sec, "m", 4 * s.n);
    if (s.m < 4) c.fail(sec, "m", "expected m >= 4");
    s.samples = c.integer(sec, "samples", 200);
    if (s.samples < 1) c.fail(sec, "samples", "expected samples >= 1");
    s.dt = c.bounded(sec, "dt", 1e-3, 0.0, 1.0, true);
    s.eps = c.bounded(sec, "eps", 1e-4, 0.0, 1.0, true);
    if (c.has(sec, "tolerance")) s.tolerance_override = c.bounded(sec, "tolerance", 0.0, 0.0);
    for (const std::string& k : tol_keys)
        if (c.has(sec, k)) s.tolerance[k.substr(4)] = c.bounded(sec, k, 0.0, 0.0);
    return s;
}

/// Checks named in [verify] checks (comma list or "all").
inline std::vector<verify::Check> select_checks(const Config& c) {
    const std::vector<verify::Check> all = verify::checks();
    const std::string v = c.text("verify", "checks", "all");
    if (v == "all") return all;
    std::vector<verify::Check> out;
    for (const std::string& name : split(v, ',')) {
        const auto it = std::find_if(all.begin(), all.end(), [&](const verify::Check& k) { return k.name == name; });
        if (it == all.end()) c.fail("verify", "checks", "unknown check '" + name + "'");
        out.push_back(*it);
    }
    if (out.empty()) c.fail("verify", "checks", "empty check list");
    return out;
}

// ================================================================= converge

struct ConvergeLevel {
    int n = 0;
    int m = 0;
    double dt = 0.0;
    double value = 0.0;
};

struct ConvergeResult {
    std::string check;
    std::vector<ConvergeLevel> levels;
    double order = std::nan("");
    bool skipped = false;  // all residuals at roundoff; no slope to fit
    double min_order = 1.9;
    bool pass = true;
};

/// Least-squares slope of -log|value| against log(n) or log(1/dt).
inline double fit_order(const std::vector<ConvergeLevel>& lv, bool in_dt) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(lv.size());
    for (const ConvergeLevel& l : lv) {
        const double x = in_dt ? -std::log(l.dt) : std::log(static_cast<double>(l.n));
        const double y = -std::log(std::abs(l.value));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline constexpr double roundoff_floor = 1e-12;

inline ConvergeResult execute_converge(const Config& c, unsigned seed, int threads) {
    const std::string sec = "converge";
    ConvergeResult res;
    res.check = c.text(sec, "check");
    const int levels = c.integer(sec, "levels", 3);
    if (levels < 2 || levels > 8) c.fail(sec, "levels", "expected 2..8 levels");
    res.min_order = c.number(sec, "min_order", 1.9);
    const std::string field = c.text(sec, "field", "smooth");

    bool in_dt = false;
    std::vector<std::function<ConvergeLevel()>> jobs;
    if (res.check == "divergence") {
        c.allow_keys(sec, {"check", "levels", "min_order", "field", "n0", "m_factor"});
        const Chart chart = make_chart(c, seed);
        const int n0 = c.integer(sec, "n0", 32);
        const int mf = c.integer(sec, "m_factor", 4);
        if (n0 < 4) c.fail(sec, "n0", "expected n0 >= 4");
        if (mf < 1) c.fail(sec, "m_factor", "expected m_factor >= 1");
        AmbientField phi;
        if (field == "smooth") phi = verify::smooth_fields()[0];
        else if (field == "zero")
            phi = {[](const Vec3&, double) { return Vec3::Zero().eval(); },
                   [](const Vec3&, double) { return Mat3::Zero().eval(); }};
        else c.fail(sec, "field", "expected smooth or zero");
        for (int l = 0; l < levels; ++l) {
            const int n = n0 << l;
            jobs.push_back([=] {
                const auto r = divergence_theorem_residual(chart, phi, 0.0, {n, n, mf * n}, 1.0);
                return ConvergeLevel{n, mf * n, 0.0, r.value};
            });
        }
    } else if (res.check == "transport") {
        c.allow_keys(sec, {"check", "levels", "min_order", "field", "n0", "dt0"});
        in_dt = true;
        const Chart chart = make_chart(c, seed);
        const int n = c.integer(sec, "n0", 64);
        const double dt0 = c.bounded(sec, "dt0", 1e-2, 0.0, 1.0, true);
        ScalarFn f;
        if (field == "smooth") f = [](const Vec3& x, double t) { return 1.0 + x[1] * x[1] + t * x[0]; };
        else if (field == "zero") f = [](const Vec3&, double) { return 0.0; };
        else c.fail(sec, "field", "expected smooth or zero");
        for (int l = 0; l < levels; ++l) {
            const double dt = dt0 / (1 << l);
            jobs.push_back([=] {
                const auto r = transport_theorem_residual(chart, f, 0.0, dt, {n, n, 0, dt}, 1.0);
                return ConvergeLevel{n, 0, dt, r.value};
            });
        }
    } else if (res.check == "energy_law") {
        in_dt = true;
        RunScenario base = make_run(c, seed, sec);
        c.allow_keys(sec, {"check", "levels", "min_order", "dt0", "t_end", "integrator"});
        const double dt0 = c.bounded(sec, "dt0", 0.0, 0.0, base.time.t_end, true);
        for (int l = 0; l < levels; ++l) {
            const double dt = dt0 / (1 << l);
            const double n = std::round(base.time.t_end / dt);
            if (std::abs(n * dt - base.time.t_end) > 1e-9 * base.time.t_end)
                c.fail(sec, "dt0", "t_end is not an integer multiple of every level's dt");
            RunScenario sc = base;
            sc.time.dt = dt;
            sc.time.steps = static_cast<int>(n);
            sc.time.record_every = 1;
            jobs.push_back([sc, dt] {
                const RunResult r = execute_run(sc);
                return ConvergeLevel{sc.initial.grid.nr, 0, dt, r.energy_residual};
            });
        }
    } else {
        c.fail(sec, "check", "expected divergence, transport or energy_law");
    }

    res.levels.resize(jobs.size());
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errs(jobs.size());
    auto worker = [&] {
        for (std::size_t k; (k = next++) < jobs.size();) {
            try {
                res.levels[k] = jobs[k]();
            } catch (...) {
                errs[k] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int k = 1; k < std::min<int>(threads, static_cast<int>(jobs.size())); ++k) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
    for (const auto& e : errs)
        if (e) std::rethrow_exception(e);

    res.skipped = std::all_of(res.levels.begin(), res.levels.end(),
                              [](const ConvergeLevel& l) { return std::abs(l.value) < roundoff_floor; });
    if (!res.skipped) {
        res.order = fit_order(res.levels, in_dt);
        res.pass = std::isfinite(res.order) && res.order >= res.min_order;
    }
    return res;
}

inline void write_converge_csv(std::ostream& os, const ConvergeResult& r) {
    os << "check,level,n,m,dt,value\n";
    for (std::size_t k = 0; k < r.levels.size(); ++k) {
        const ConvergeLevel& l = r.levels[k];
        os << r.check << ',' << k << ',' << l.n << ',' << l.m << ',' << format_double(l.dt) << ','
           << format_double(l.value) << '\n';
    }
}

inline void write_converge_summary(std::ostream& os, const ConvergeResult& r) {
    os << "check,order,min_order,skipped,pass\n"
       << r.check << ',' << format_double(r.order) << ',' << format_double(r.min_order) << ','
       << (r.skipped ? 1 : 0) << ',' << (r.pass ? 1 : 0) << '\n';
}

}  // namespace evosurf::io
