// evosurf: batch front end for the residual battery and the solvers.
//
//   evosurf verify   --config verify.ini [--out DIR] [--threads N] [--seed S] [--list]
//   evosurf run      --config run.ini    [--out DIR]
//   evosurf bubble   --config bubble.ini [--out DIR]
//   evosurf converge --config conv.ini   [--out DIR] [--threads N]
//
// Exit status: 0 all checks pass, 1 a check failed, 2 bad configuration.

#include "evosurf/io/scenarios.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

using namespace evosurf;
namespace io = evosurf::io;

constexpr int exit_pass = 0;
constexpr int exit_fail = 1;
constexpr int exit_config = 2;

struct Options {
    std::string config;
    std::optional<std::string> out;
    int threads = 1;
    std::optional<unsigned> seed;
    bool list = false;
};

const char* verdict(bool pass) { return pass ? "PASS" : "FAIL"; }

int cmd_verify(const Options& o) {
    if (o.list) {
        for (const verify::Check& c : verify::checks())
            std::printf("%-22s %s\n", c.name.c_str(), c.description.c_str());
        return exit_pass;
    }
    const io::Config cfg = io::Config::load(o.config);
    const unsigned seed = io::scenario_seed(cfg, "verify", o.seed);
    const verify::Settings s = io::make_verify(cfg, seed);
    const auto list = io::select_checks(cfg);
    const auto dir = io::output_dir(cfg, o.out);

    std::vector<std::string> errors;
    const auto results = verify::run(list, s, o.threads, &errors);
    std::ofstream csv = io::open_csv(dir / "verify_residuals.csv");
    csv << residual_csv_header() << '\n';
    bool all = true;
    int failed = 0, total = 0;
    for (std::size_t k = 0; k < results.size(); ++k) {
        if (!errors[k].empty()) std::fprintf(stderr, "%s: %s\n", list[k].name.c_str(), errors[k].c_str());
        for (const ResidualReport& r : results[k]) {
            write_csv_row(csv, r);
            std::printf("%-4s %-42s %24s  tol %.3e\n", verdict(r.pass), r.name.c_str(),
                        format_double(r.value).c_str(), r.tolerance);
            all = all && r.pass;
            failed += r.pass ? 0 : 1;
            ++total;
        }
    }
    std::printf("%d/%d residual checks passed (n=%d, m=%d, seed=%u)\n", total - failed, total, s.n, s.m, seed);
    return all ? exit_pass : exit_fail;
}

int cmd_run(const Options& o) {
    const io::Config cfg = io::Config::load(o.config);
    const unsigned seed = io::scenario_seed(cfg, "run", o.seed);
    const io::RunScenario sc = io::make_run(cfg, seed);
    const auto dir = io::output_dir(cfg, o.out);
    const io::RunResult r = io::execute_run(sc, dir);
    std::printf("chart %s, %s, %s, %dx%d cells, %d steps to t=%.6g\n", sc.initial.chart.name.c_str(),
                sc.initial.system == System::heat ? "heat" : "diffusion", sc.initial.energy.describe().c_str(),
                sc.initial.grid.nr, sc.initial.grid.ns, r.steps, r.final.t);
    std::printf("mass drift %.3e%s, energy-law residual %.3e\n", r.mass_drift,
                sc.neumann_only ? "" : " (Dirichlet edges: not asserted)", r.energy_residual);
    for (const std::string& f : r.findings) std::printf("FAIL %s\n", f.c_str());
    std::printf("%s\n", verdict(r.pass));
    return r.pass ? exit_pass : exit_fail;
}

int cmd_bubble(const Options& o) {
    const io::Config cfg = io::Config::load(o.config);
    io::scenario_seed(cfg, "bubble", o.seed);
    const io::BubbleScenario sc = io::make_bubble(cfg);
    const auto dir = io::output_dir(cfg, o.out);
    const io::BubbleResult r = io::execute_bubble(sc, dir);
    std::printf("double bubble a=%g b=%g m=%g (m'=%g), N_r=%d N_theta=%d, %d steps to t=%.6g\n",
                sc.geom.a(0), sc.geom.b(0), sc.geom.m(0), sc.geom.m.v1, sc.nr, sc.ntheta, r.steps, r.final.t);
    std::printf("mass drift %.3e, energy-law residual %.3e, interface mismatch %.3e\n", r.mass_drift,
                r.energy_residual, r.interface_mismatch);
    for (const std::string& f : r.findings) std::printf("FAIL %s\n", f.c_str());
    std::printf("%s\n", verdict(r.pass));
    return r.pass ? exit_pass : exit_fail;
}

int cmd_converge(const Options& o) {
    const io::Config cfg = io::Config::load(o.config);
    const unsigned seed = io::scenario_seed(cfg, "converge", o.seed);
    const io::ConvergeResult r = io::execute_converge(cfg, seed, o.threads);
    const auto dir = io::output_dir(cfg, o.out);
    {
        std::ofstream csv = io::open_csv(dir / "converge.csv");
        io::write_converge_csv(csv, r);
        std::ofstream sum = io::open_csv(dir / "converge_summary.csv");
        io::write_converge_summary(sum, r);
    }
    for (const io::ConvergeLevel& l : r.levels)
        std::printf("%-12s n=%-6d m=%-6d dt=%-10.3e residual %s\n", r.check.c_str(), l.n, l.m, l.dt,
                    format_double(l.value).c_str());
    if (r.skipped)
        std::printf("all residuals below %.0e: roundoff, slope fit skipped\nPASS\n", io::roundoff_floor);
    else
        std::printf("fitted order %.3f (minimum %.2f)\n%s\n", r.order, r.min_order, verdict(r.pass));
    return r.pass ? exit_pass : exit_fail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chart-based surface calculus checks and evolving-surface diffusion solvers"};
    app.require_subcommand(1);
    Options o;
    std::string out;
    unsigned seed = 0;
    app.add_option("--config", o.config, "scenario file (INI)")->check(CLI::ExistingFile);
    app.add_option("--out", out, "output directory for CSV files");
    app.add_option("--threads", o.threads, "worker threads for independent checks/levels")
        ->check(CLI::Range(1, 1024));
    app.add_option("--seed", seed, "seed for random sampling (overrides [scenario] seed)");
    app.add_flag("--list", o.list, "verify: list check names and exit");
    app.fallthrough();

    auto* v = app.add_subcommand("verify", "run the residual battery");
    auto* r = app.add_subcommand("run", "single-patch diffusion or heat simulation");
    auto* b = app.add_subcommand("bubble", "coupled double-bubble diffusion");
    auto* c = app.add_subcommand("converge", "residual against resolution with a fitted order");
    for (auto* s : {v, r, b, c}) s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_pass : exit_config;
    }
    if (app.count("--out")) o.out = out;
    if (app.count("--seed")) o.seed = seed;
    if (o.config.empty() && !(v->parsed() && o.list)) {
        std::fprintf(stderr, "error: --config is required\n");
        return exit_config;
    }

    try {
        if (v->parsed()) return cmd_verify(o);
        if (r->parsed()) return cmd_run(o);
        if (b->parsed()) return cmd_bubble(o);
        return cmd_converge(o);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    } catch (const CflViolation& e) {
        std::fprintf(stderr, "config error: [time] dt: %s\n", e.what());
        return exit_config;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_fail;
    }
}
