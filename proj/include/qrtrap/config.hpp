#pragma once

// RunConfig: every numerical knob of a simulation, sweep or critical-coupling
// search in one strict, documented text format.
//
//   profile = paper            # paper | fast, applied before other keys
//
//   [grid]
//   x_max = 4
//   n_points = 3999
//
//   [propagator]
//   dt = 2.5e-06
//   fixed_point_tol = 1e-10
//   max_fixed_point_iters = 25
//
//   [absorber]
//   start = 1.5
//   strength = 400
//   exponent = 2
//
//   [run]
//   sigma = 20
//   gamma = 0
//   a = 5
//   tau_end = 1
//   sample_interval = 0.001    # scaled time between samples
//
//   [collapse]
//   density_factor = 50
//   kinetic_factor = 20
//   cliff_fraction = 0.25
//   cliff_window = 0.01
//
//   [baseline]                 # wide domain for the freely spreading packet
//   x_max = 30
//   absorber_start = 10
//   absorber_strength = 50
//
//   [sweep]
//   sigmas = 20, 30, 40, 50
//   gammas = 0, 0.1, 0.5, 1, 5
//   workers = 1
//
//   [critical]
//   sigma = 40
//   gamma_lo = -0.70
//   gamma_hi = -0.55
//   tol = 0.005
//   horizon = 0.3
//
// Unknown sections or keys are rejected.

#include <qrtrap/keyvalue.hpp>
#include <qrtrap/propagator.hpp>

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

namespace qrtrap {

enum class Profile { paper, fast };

inline std::string_view to_string(Profile p) { return p == Profile::paper ? "paper" : "fast"; }

inline Profile parse_profile(std::string_view s) {
    if (s == "paper") return Profile::paper;
    if (s == "fast") return Profile::fast;
    throw ConfigError("unknown profile '" + std::string(s) + "' (expected paper or fast)");
}

struct BaselineDomain {
    double x_max = 30.0;
    double absorber_start = 10.0;
    double absorber_strength = 50.0;

    bool operator==(const BaselineDomain&) const = default;
};

struct RunConfig {
    Profile profile = Profile::paper;
    GridSpec grid{4.0, 3999};
    PropagatorConfig propagator{2.5e-6, 1e-10, 25, AbsorberSpec{1.5, 400.0, 2.0}, StepTrap{20.0}, 0.0};
    double a = 5.0;
    double tau_end = 1.0;
    double sample_interval = 1e-3;
    CollapseThresholds collapse{};
    BaselineDomain baseline{};
    std::vector<double> sigmas{20, 30, 40, 50};
    std::vector<double> gammas{0, 0.1, 0.5, 1, 5};
    int workers = 1;
    double critical_sigma = 40.0;
    double gamma_lo = -0.70;
    double gamma_hi = -0.55;
    double critical_tol = 0.005;
    double critical_horizon = 0.3;

    static RunConfig defaults(Profile p = Profile::paper) {
        RunConfig c;
        c.apply_profile(p);
        return c;
    }

    /// paper: dx = 1e-3, dt = 2.5e-6.  fast: dx = 2e-3, dt = 1e-5.
    void apply_profile(Profile p) {
        profile = p;
        if (p == Profile::paper) {
            grid.n_points = static_cast<std::size_t>(std::llround(grid.x_max / 1e-3)) - 1;
            propagator.dt = 2.5e-6;
        } else {
            grid.n_points = static_cast<std::size_t>(std::llround(grid.x_max / 2e-3)) - 1;
            propagator.dt = 1e-5;
        }
    }

    double sigma() const { return propagator.trap.sigma; }
    double gamma() const { return propagator.gamma; }

    std::size_t sample_every() const {
        const auto n = std::llround(sample_interval / propagator.dt);
        return n < 1 ? 1 : static_cast<std::size_t>(n);
    }

    GridSpec baseline_grid() const {
        GridSpec g = grid;
        g.x_max = baseline.x_max;
        g.n_points = static_cast<std::size_t>(std::llround(baseline.x_max / grid.dx())) - 1;
        return g;
    }

    void validate() const {
        try {
            grid.validate();
            propagator.validate(grid);
            require(a > 0.0, "run.a must be > 0");
            require(tau_end >= 0.0, "run.tau_end must be >= 0");
            require(sample_interval > 0.0, "run.sample_interval must be > 0");
            require(collapse.density_factor > 1.0 && collapse.kinetic_factor > 1.0, "collapse factors must exceed 1");
            require(collapse.cliff_fraction > 0.0 && collapse.cliff_fraction < 1.0, "collapse.cliff_fraction in (0,1)");
            require(collapse.cliff_window > 0.0, "collapse.cliff_window must be > 0");
            require(baseline.x_max > baseline.absorber_start && baseline.absorber_start > 1.0,
                    "baseline: need 1 < absorber_start < x_max");
            require(baseline.absorber_strength >= 0.0, "baseline.absorber_strength must be >= 0");
            require(workers >= 1, "sweep.workers must be >= 1");
            require(critical_tol > 0.0 && critical_horizon > 0.0, "critical: tol and horizon must be > 0");
        } catch (const InvalidParameter& e) {
            throw ConfigError(std::string("invalid config: ") + e.what());
        }
    }

    bool operator==(const RunConfig&) const = default;
};

// ---------------------------------------------------------------------------
// Text format

namespace detail {

inline std::string format_number(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline std::string format_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v[i]);
    return s;
}

}  // namespace detail

inline RunConfig parse_run_config(const kv::Document& doc, std::optional<Profile> profile_override = std::nullopt) {
    const auto& src = doc.source;
    auto unknown = [&](const kv::Entry& e, const std::string& section) {
        throw ConfigError(src + ":" + std::to_string(e.line) + ": unknown key '" + e.key + "' in [" + section + "]");
    };

    Profile profile = Profile::paper;
    if (const auto* p = doc.sections.front().find("profile")) profile = parse_profile(p->value);
    if (profile_override) profile = *profile_override;

    RunConfig c;
    // x_max may change the point count, so the grid section is read before
    // the profile is applied.
    for (const auto& sec : doc.sections)
        if (sec.name == "grid")
            if (const auto* e = sec.find("x_max")) c.grid.x_max = kv::to_double(*e, src);
    c.apply_profile(profile);

    for (const auto& sec : doc.sections) {
        const std::string& name = sec.name;
        for (const auto& e : sec.entries) {
            auto num = [&] { return kv::to_double(e, src); };
            if (name.empty()) {
                if (e.key != "profile") unknown(e, "");
            } else if (name == "grid") {
                if (e.key == "x_max") continue;
                if (e.key == "n_points") {
                    const auto n = kv::to_integer(e, src);
                    if (n < 0) throw ConfigError(src + ": grid.n_points must be positive");
                    c.grid.n_points = static_cast<std::size_t>(n);
                } else {
                    unknown(e, name);
                }
            } else if (name == "propagator") {
                if (e.key == "dt") c.propagator.dt = num();
                else if (e.key == "fixed_point_tol") c.propagator.fixed_point_tol = num();
                else if (e.key == "max_fixed_point_iters") c.propagator.max_fixed_point_iters = static_cast<int>(kv::to_integer(e, src));
                else unknown(e, name);
            } else if (name == "absorber") {
                if (e.key == "start") c.propagator.absorber.start = num();
                else if (e.key == "strength") c.propagator.absorber.strength = num();
                else if (e.key == "exponent") c.propagator.absorber.exponent = num();
                else unknown(e, name);
            } else if (name == "run") {
                if (e.key == "sigma") c.propagator.trap.sigma = num();
                else if (e.key == "gamma") c.propagator.gamma = num();
                else if (e.key == "a") c.a = num();
                else if (e.key == "tau_end") c.tau_end = num();
                else if (e.key == "sample_interval") c.sample_interval = num();
                else unknown(e, name);
            } else if (name == "collapse") {
                if (e.key == "density_factor") c.collapse.density_factor = num();
                else if (e.key == "kinetic_factor") c.collapse.kinetic_factor = num();
                else if (e.key == "cliff_fraction") c.collapse.cliff_fraction = num();
                else if (e.key == "cliff_window") c.collapse.cliff_window = num();
                else unknown(e, name);
            } else if (name == "baseline") {
                if (e.key == "x_max") c.baseline.x_max = num();
                else if (e.key == "absorber_start") c.baseline.absorber_start = num();
                else if (e.key == "absorber_strength") c.baseline.absorber_strength = num();
                else unknown(e, name);
            } else if (name == "sweep") {
                if (e.key == "sigmas") c.sigmas = kv::to_double_list(e, src);
                else if (e.key == "gammas") c.gammas = kv::to_double_list(e, src);
                else if (e.key == "workers") c.workers = static_cast<int>(kv::to_integer(e, src));
                else unknown(e, name);
            } else if (name == "critical") {
                if (e.key == "sigma") c.critical_sigma = num();
                else if (e.key == "gamma_lo") c.gamma_lo = num();
                else if (e.key == "gamma_hi") c.gamma_hi = num();
                else if (e.key == "tol") c.critical_tol = num();
                else if (e.key == "horizon") c.critical_horizon = num();
                else unknown(e, name);
            } else {
                throw ConfigError(src + ": unknown section [" + name + "]");
            }
        }
    }
    c.validate();
    return c;
}

inline RunConfig load_run_config(const std::string& path, std::optional<Profile> profile = std::nullopt) {
    return parse_run_config(kv::parse_file(path), profile);
}

inline std::string to_text(const RunConfig& c) {
    using detail::format_list;
    using detail::format_number;
    std::ostringstream o;
    o << "profile = " << to_string(c.profile) << "\n\n"
      << "[grid]\nx_max = " << format_number(c.grid.x_max) << "\nn_points = " << c.grid.n_points << "\n\n"
      << "[propagator]\ndt = " << format_number(c.propagator.dt)
      << "\nfixed_point_tol = " << format_number(c.propagator.fixed_point_tol)
      << "\nmax_fixed_point_iters = " << c.propagator.max_fixed_point_iters << "\n\n"
      << "[absorber]\nstart = " << format_number(c.propagator.absorber.start)
      << "\nstrength = " << format_number(c.propagator.absorber.strength)
      << "\nexponent = " << format_number(c.propagator.absorber.exponent) << "\n\n"
      << "[run]\nsigma = " << format_number(c.sigma()) << "\ngamma = " << format_number(c.gamma())
      << "\na = " << format_number(c.a) << "\ntau_end = " << format_number(c.tau_end)
      << "\nsample_interval = " << format_number(c.sample_interval) << "\n\n"
      << "[collapse]\ndensity_factor = " << format_number(c.collapse.density_factor)
      << "\nkinetic_factor = " << format_number(c.collapse.kinetic_factor)
      << "\ncliff_fraction = " << format_number(c.collapse.cliff_fraction)
      << "\ncliff_window = " << format_number(c.collapse.cliff_window) << "\n\n"
      << "[baseline]\nx_max = " << format_number(c.baseline.x_max)
      << "\nabsorber_start = " << format_number(c.baseline.absorber_start)
      << "\nabsorber_strength = " << format_number(c.baseline.absorber_strength) << "\n\n"
      << "[sweep]\nsigmas = " << format_list(c.sigmas) << "\ngammas = " << format_list(c.gammas)
      << "\nworkers = " << c.workers << "\n\n"
      << "[critical]\nsigma = " << format_number(c.critical_sigma) << "\ngamma_lo = " << format_number(c.gamma_lo)
      << "\ngamma_hi = " << format_number(c.gamma_hi) << "\ntol = " << format_number(c.critical_tol)
      << "\nhorizon = " << format_number(c.critical_horizon) << "\n";
    return o.str();
}

// ---------------------------------------------------------------------------
// JSON echo (manifest.json)

inline nlohmann::json to_json(const RunConfig& c) {
    return {
        {"profile", to_string(c.profile)},
        {"grid", {{"x_max", c.grid.x_max}, {"n_points", c.grid.n_points}}},
        {"propagator",
         {{"dt", c.propagator.dt},
          {"fixed_point_tol", c.propagator.fixed_point_tol},
          {"max_fixed_point_iters", c.propagator.max_fixed_point_iters}}},
        {"absorber",
         {{"start", c.propagator.absorber.start},
          {"strength", c.propagator.absorber.strength},
          {"exponent", c.propagator.absorber.exponent}}},
        {"run",
         {{"sigma", c.sigma()},
          {"gamma", c.gamma()},
          {"a", c.a},
          {"tau_end", c.tau_end},
          {"sample_interval", c.sample_interval}}},
        {"collapse",
         {{"density_factor", c.collapse.density_factor},
          {"kinetic_factor", c.collapse.kinetic_factor},
          {"cliff_fraction", c.collapse.cliff_fraction},
          {"cliff_window", c.collapse.cliff_window}}},
        {"baseline",
         {{"x_max", c.baseline.x_max},
          {"absorber_start", c.baseline.absorber_start},
          {"absorber_strength", c.baseline.absorber_strength}}},
        {"sweep", {{"sigmas", c.sigmas}, {"gammas", c.gammas}, {"workers", c.workers}}},
        {"critical",
         {{"sigma", c.critical_sigma},
          {"gamma_lo", c.gamma_lo},
          {"gamma_hi", c.gamma_hi},
          {"tol", c.critical_tol},
          {"horizon", c.critical_horizon}}},
    };
}

/// Strict inverse of to_json: every key must be known.
inline RunConfig run_config_from_json(const nlohmann::json& j) {
    try {
        RunConfig c;
        auto check_keys = [](const nlohmann::json& obj, std::initializer_list<const char*> allowed, const char* where) {
            if (!obj.is_object()) throw ConfigError(std::string("manifest: '") + where + "' must be an object");
            for (const auto& [k, v] : obj.items()) {
                bool ok = false;
                for (const char* a : allowed) ok = ok || k == a;
                if (!ok) throw ConfigError("manifest: unknown key '" + k + "' in " + where);
            }
        };
        check_keys(j, {"profile", "grid", "propagator", "absorber", "run", "collapse", "baseline", "sweep", "critical"},
                   "config");
        c.profile = parse_profile(j.at("profile").get<std::string>());
        const auto& g = j.at("grid");
        check_keys(g, {"x_max", "n_points"}, "grid");
        c.grid = {g.at("x_max").get<double>(), g.at("n_points").get<std::size_t>()};
        const auto& p = j.at("propagator");
        check_keys(p, {"dt", "fixed_point_tol", "max_fixed_point_iters"}, "propagator");
        c.propagator.dt = p.at("dt").get<double>();
        c.propagator.fixed_point_tol = p.at("fixed_point_tol").get<double>();
        c.propagator.max_fixed_point_iters = p.at("max_fixed_point_iters").get<int>();
        const auto& ab = j.at("absorber");
        check_keys(ab, {"start", "strength", "exponent"}, "absorber");
        c.propagator.absorber = {ab.at("start").get<double>(), ab.at("strength").get<double>(),
                                 ab.at("exponent").get<double>()};
        const auto& r = j.at("run");
        check_keys(r, {"sigma", "gamma", "a", "tau_end", "sample_interval"}, "run");
        c.propagator.trap.sigma = r.at("sigma").get<double>();
        c.propagator.gamma = r.at("gamma").get<double>();
        c.a = r.at("a").get<double>();
        c.tau_end = r.at("tau_end").get<double>();
        c.sample_interval = r.at("sample_interval").get<double>();
        const auto& co = j.at("collapse");
        check_keys(co, {"density_factor", "kinetic_factor", "cliff_fraction", "cliff_window"}, "collapse");
        c.collapse = {co.at("density_factor").get<double>(), co.at("kinetic_factor").get<double>(),
                      co.at("cliff_fraction").get<double>(), co.at("cliff_window").get<double>()};
        const auto& b = j.at("baseline");
        check_keys(b, {"x_max", "absorber_start", "absorber_strength"}, "baseline");
        c.baseline = {b.at("x_max").get<double>(), b.at("absorber_start").get<double>(),
                      b.at("absorber_strength").get<double>()};
        const auto& s = j.at("sweep");
        check_keys(s, {"sigmas", "gammas", "workers"}, "sweep");
        c.sigmas = s.at("sigmas").get<std::vector<double>>();
        c.gammas = s.at("gammas").get<std::vector<double>>();
        c.workers = s.at("workers").get<int>();
        const auto& cr = j.at("critical");
        check_keys(cr, {"sigma", "gamma_lo", "gamma_hi", "tol", "horizon"}, "critical");
        c.critical_sigma = cr.at("sigma").get<double>();
        c.gamma_lo = cr.at("gamma_lo").get<double>();
        c.gamma_hi = cr.at("gamma_hi").get<double>();
        c.critical_tol = cr.at("tol").get<double>();
        c.critical_horizon = cr.at("horizon").get<double>();
        c.validate();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("manifest: ") + e.what());
    }
}

/// FNV-1a over the compact JSON echo; stable across platforms and runs.
inline std::uint64_t config_hash(const nlohmann::json& j) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : j.dump()) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace qrtrap
