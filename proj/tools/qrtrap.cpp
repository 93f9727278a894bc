// qrtrap: command-line front end.
//
//   qrtrap units --species Na --L 4.47e5
//   qrtrap simulate --sigma 20 --gamma 0 --tau-end 1 --out run/
//   qrtrap sweep data/table2.plan --out table2/ --workers 4
//   qrtrap phase-diagram --sigmas 10,20,30,40,50 --out fig7/
//   qrtrap critical-gamma --sigma 40
//
// Exit codes: 0 success, 2 usage/config error, 3 numerical blowup,
// 4 bracket or plan validation error.

#include <qrtrap/audit.hpp>
#include <qrtrap/config.hpp>
#include <qrtrap/experiments.hpp>
#include <qrtrap/units.hpp>
#include <qrtrap/variational.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace qrtrap;

namespace {

enum Exit { ok = 0, usage = 2, blowup = 3, bracket = 4 };

struct Common {
    std::string config;
    std::string out;
    std::string profile;
    int workers = 0;
    bool print_defaults = false;
};

RunConfig load(const Common& c) {
    std::optional<Profile> profile;
    if (!c.profile.empty()) profile = parse_profile(c.profile);
    RunConfig cfg = c.config.empty() ? RunConfig::defaults(profile.value_or(Profile::paper))
                                     : load_run_config(c.config, profile);
    if (c.workers > 0) cfg.workers = c.workers;
    cfg.validate();
    return cfg;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
    const auto values = kv::to_double_list(kv::Entry{what, text, 0}, "command line");
    if (values.empty()) throw ConfigError(std::string(what) + ": list is empty");
    return values;
}

std::ofstream open_out(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw Error("cannot write " + p.string());
    return out;
}

// ---------------------------------------------------------------------------

struct UnitsArgs {
    std::string species;
    std::string data = std::string(QRTRAP_DATA_DIR) + "/species.dat";
    double L = 0.0;
    std::optional<double> beta4, a_int, mass_amu;
    double a = 5.0;
};

int cmd_units(const UnitsArgs& u) {
    std::optional<double> mass;
    ScaledParams p;
    if (!u.species.empty()) {
        const auto table = load_species(u.data);
        const auto& s = find_species(table, u.species);
        p = scale(s, u.L);
        mass = s.mass;
        std::printf("species = %s\n", s.name.c_str());
    } else {
        if (!u.beta4 || !u.a_int) throw ConfigError("units: give --species, or --beta4 and --a-int");
        p.sigma = scaled_sigma(u.L, *u.beta4);
        p.gamma = radial_gamma(*u.a_int, u.L);
        p.trap_radius_L = u.L;
        if (u.mass_amu) mass = *u.mass_amu * constants::electron_masses_per_amu;
    }
    std::printf("L_au = %s\n", csv::brief(u.L).c_str());
    std::printf("sigma = %s\n", csv::brief(p.sigma).c_str());
    std::printf("gamma = %s\n", csv::brief(p.gamma).c_str());
    if (p.gamma_uncertainty)
        std::printf("gamma_uncertainty = +%s -%s\n", csv::brief(p.gamma_uncertainty->plus).c_str(),
                    csv::brief(p.gamma_uncertainty->minus).c_str());
    const double e_scaled = initial_kinetic_energy_scaled(u.a);
    std::printf("a = %s\n", csv::brief(u.a).c_str());
    std::printf("kinetic_energy_scaled = %s\n", csv::brief(e_scaled).c_str());
    if (mass) {
        std::printf("seconds_per_tau = %s\n", csv::brief(scaled_time_to_seconds(1.0, *mass, u.L)).c_str());
        const double e = initial_kinetic_energy_physical(u.a, *mass, u.L);
        std::printf("kinetic_energy_hartree = %s\n", csv::brief(e).c_str());
        std::printf("kinetic_energy_nK = %s\n", csv::brief(e / constants::boltzmann_hartree_per_kelvin * 1e9).c_str());
    }
    return ok;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::optional<double> sigma, gamma, a, tau_end;
    bool stop_on_collapse = false;
};

int cmd_simulate(const Common& c, const SimulateArgs& s) {
    RunConfig cfg = load(c);
    if (s.sigma) cfg.propagator.trap.sigma = *s.sigma;
    if (s.gamma) cfg.propagator.gamma = *s.gamma;
    if (s.a) cfg.a = *s.a;
    if (s.tau_end) cfg.tau_end = *s.tau_end;
    cfg.validate();

    EvolveOptions opts{s.stop_on_collapse, cfg.collapse};
    const auto series = evolve(initial_packet(cfg.a, cfg.grid), cfg.propagator, cfg.tau_end, cfg.sample_every(), opts);
    CollapseReport report;
    if (series.samples.size() >= 2) report = detect_collapse(series, cfg.collapse);

    nlohmann::json status = {
        {"sigma", cfg.sigma()},
        {"gamma", cfg.gamma()},
        {"a", cfg.a},
        {"tau_end", cfg.tau_end},
        {"termination", to_string(series.termination)},
        {"message", series.message},
        {"rho_s_final", series.samples.back().rho_s},
        {"collapsed", report.collapsed},
        {"tau_collapse", report.tau_collapse ? nlohmann::json(*report.tau_collapse) : nlohmann::json(nullptr)},
        {"trigger", report.trigger ? nlohmann::json(to_string(*report.trigger)) : nlohmann::json(nullptr)},
        {"config", to_json(cfg)},
    };
    if (c.out.empty()) {
        csv::write_series(std::cout, series);
    } else {
        const fs::path dir = c.out;
        auto out = open_out(dir / "series.csv");
        csv::write_series(out, series);
        open_out(dir / "status.json") << status.dump(2) << '\n';
    }
    std::fprintf(stderr, "termination=%s collapsed=%s tau_collapse=%s rho_s_final=%s\n",
                 std::string(to_string(series.termination)).c_str(), report.collapsed ? "true" : "false",
                 report.tau_collapse ? csv::brief(*report.tau_collapse).c_str() : "",
                 csv::brief(series.samples.back().rho_s).c_str());
    if (series.termination == Termination::numerical_blowup) {
        std::fprintf(stderr, "error: %s\n", series.message.c_str());
        return blowup;
    }
    return ok;
}

// ---------------------------------------------------------------------------

int cmd_sweep(Common c, const std::string& plan_file) {
    if (!plan_file.empty()) {
        if (!c.config.empty()) throw ConfigError("sweep: give the plan either positionally or with --config");
        c.config = plan_file;
    }
    const RunConfig cfg = load(c);
    const fs::path out = c.out.empty() ? fs::path("sweep-out") : fs::path(c.out);
    const auto plan = make_plan(cfg, out);
    const auto bundle = run_sweep(plan, to_json(cfg), [](const RunRecord& r, std::size_t done, std::size_t total) {
        std::fprintf(stderr, "[%zu/%zu] sigma=%s gamma=%s rho_s=%s%s%s%s\n", done, total, csv::brief(r.sigma).c_str(),
                     csv::brief(r.gamma).c_str(), csv::brief(r.rho_s_final()).c_str(),
                     r.collapse.collapsed ? " collapsed" : "", r.resumed ? " (resumed)" : "",
                     r.ok() ? "" : " FAILED");
    });
    std::printf("sigma,gamma,rho_s_final,collapsed\n");
    bool failed = false;
    for (const auto& r : bundle.runs) {
        std::printf("%s,%s,%s,%s\n", csv::brief(r.sigma).c_str(), csv::brief(r.gamma).c_str(),
                    csv::brief(r.rho_s_final()).c_str(), r.collapse.collapsed ? "true" : "false");
        failed = failed || !r.ok();
    }
    std::fprintf(stderr, "bundle written to %s\n", out.string().c_str());
    return failed ? blowup : ok;
}

// ---------------------------------------------------------------------------

struct PhaseArgs {
    std::string sigmas = "10, 20, 30, 40, 50";
    double alpha_min = 0.05;
    double alpha_max = 1.0;
    std::size_t n_alpha = 96;
};

int cmd_phase_diagram(const Common& c, const PhaseArgs& p) {
    const auto sigmas = parse_list(p.sigmas, "sigmas");
    const auto pd = phase_diagram(sigmas, {p.alpha_min, p.alpha_max}, p.n_alpha);
    if (c.out.empty()) {
        write_phase_diagram(std::cout, pd);
        return ok;
    }
    const auto audit = discrepancy_audit(pd);
    const auto files = write_phase_diagram_bundle(c.out, pd, audit);
    std::size_t over = 0;
    for (const auto& r : audit) over += r.slope_residual > r.slope_bound;
    std::fprintf(stderr, "wrote %s, %s, %s, %s\n", files.diagram.string().c_str(), files.audit.string().c_str(),
                 files.large_width.string().c_str(), files.notes.string().c_str());
    std::fprintf(stderr, "stationarity residual above bound at %zu of %zu points\n", over, audit.size());
    return ok;
}

// ---------------------------------------------------------------------------

struct CriticalArgs {
    std::optional<double> sigma, lo, hi, tol, horizon;
};

int cmd_critical_gamma(const Common& c, const CriticalArgs& a) {
    const RunConfig cfg = load(c);
    CriticalSearch search;
    search.grid = cfg.grid;
    search.propagator = cfg.propagator;
    search.diffuseness = cfg.a;
    search.horizon = a.horizon.value_or(cfg.critical_horizon);
    search.sample_every = cfg.sample_every();
    search.thresholds = cfg.collapse;
    const double sigma = a.sigma.value_or(cfg.critical_sigma);
    const auto result = critical_gamma_dynamic(sigma, search, {a.lo.value_or(cfg.gamma_lo), a.hi.value_or(cfg.gamma_hi)},
                                               a.tol.value_or(cfg.critical_tol));
    for (const auto& p : result.probes)
        std::fprintf(stderr, "probe gamma=%s collapsed=%s%s%s\n", csv::exact(p.gamma).c_str(),
                     p.collapsed ? "true" : "false", p.tau_collapse ? " tau=" : "",
                     p.tau_collapse ? csv::brief(*p.tau_collapse).c_str() : "");
    std::printf("sigma = %s\n", csv::brief(sigma).c_str());
    std::printf("gamma_c = %s\n", csv::brief(result.gamma_c).c_str());
    std::printf("bracket = [%s, %s]\n", csv::exact(result.gamma_lo).c_str(), csv::exact(result.gamma_hi).c_str());
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wave packets in a quantum-reflection trap under the radial Gross-Pitaevskii equation"};
    app.set_version_flag("--version", QRTRAP_VERSION);
    app.require_subcommand(0, 1);
    app.fallthrough();

    Common common;
    app.add_option("--config", common.config, "Run configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", common.out, "Output directory");
    app.add_option("--profile", common.profile, "Resolution profile")->check(CLI::IsMember({"paper", "fast"}));
    app.add_option("--workers", common.workers, "Concurrent sweep runs")->check(CLI::PositiveNumber);
    app.add_flag("--print-defaults", common.print_defaults, "Print the default configuration and exit");

    UnitsArgs units;
    auto* u = app.add_subcommand("units", "Scaled parameters for a species or explicit values");
    u->add_option("--species", units.species, "Species name from the data file");
    u->add_option("--data", units.data, "Species data file")->check(CLI::ExistingFile);
    u->add_option("--L", units.L, "Trap radius in bohr")->required()->check(CLI::PositiveNumber);
    u->add_option("--beta4", units.beta4, "Retardation length beta4 in bohr");
    u->add_option("--a-int", units.a_int, "Scattering length in bohr");
    u->add_option("--mass-amu", units.mass_amu, "Atomic mass in u");
    u->add_option("--a", units.a, "Diffuseness of the initial packet")->check(CLI::PositiveNumber);

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Propagate one packet and write its observable series");
    s->add_option("--sigma", sim.sigma, "Potential strength");
    s->add_option("--gamma", sim.gamma, "Coupling constant");
    s->add_option("--a", sim.a, "Diffuseness");
    s->add_option("--tau-end", sim.tau_end, "Final scaled time");
    s->add_flag("--stop-on-collapse", sim.stop_on_collapse, "Stop at the first collapse event");

    std::string plan_file;
    auto* w = app.add_subcommand("sweep", "Run a (sigma, gamma) plan and write a result bundle");
    w->add_option("plan", plan_file, "Plan file (same format as --config)")->check(CLI::ExistingFile);

    PhaseArgs phase;
    auto* p = app.add_subcommand("phase-diagram", "Variational running coupling over (sigma, alpha)");
    p->add_option("--sigmas", phase.sigmas, "Comma-separated sigma values");
    p->add_option("--alpha-min", phase.alpha_min, "Smallest width");
    p->add_option("--alpha-max", phase.alpha_max, "Largest width");
    p->add_option("--n-alpha", phase.n_alpha, "Number of widths")->check(CLI::PositiveNumber);

    CriticalArgs crit;
    auto* k = app.add_subcommand("critical-gamma", "Bisect the collapse threshold with dynamical runs");
    k->add_option("--sigma", crit.sigma, "Potential strength");
    k->add_option("--lo", crit.lo, "Collapsing end of the bracket");
    k->add_option("--hi", crit.hi, "Stable end of the bracket");
    k->add_option("--tol", crit.tol, "Final bracket width");
    k->add_option("--horizon", crit.horizon, "Scaled time of each probe run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    try {
        if (common.print_defaults) {
            std::optional<Profile> pr;
            if (!common.profile.empty()) pr = parse_profile(common.profile);
            std::cout << to_text(RunConfig::defaults(pr.value_or(Profile::paper)));
            return ok;
        }
        if (u->parsed()) return cmd_units(units);
        if (s->parsed()) return cmd_simulate(common, sim);
        if (w->parsed()) return cmd_sweep(common, plan_file);
        if (p->parsed()) return cmd_phase_diagram(common, phase);
        if (k->parsed()) return cmd_critical_gamma(common, crit);
        std::cerr << app.help();
        return usage;
    } catch (const BracketError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return bracket;
    } catch (const PlanError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return bracket;
    } catch (const NumericalBlowup& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return blowup;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return usage;
    } catch (const LookupError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return usage;
    } catch (const InvalidParameter& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return usage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
