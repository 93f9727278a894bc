#pragma once

// Parameter sweeps, the free-packet baseline and collapse studies, written
// out as result bundles:
//
//   <out>/summary.csv      sigma,gamma,a,tau_end,rho_s_final,collapsed,tau_collapse
//   <out>/series/*.csv     tau,rho_s,e_kin,e_pot,e_int,e_tot,norm_total
//   <out>/series/*.json    per-run status; its presence marks a finished run
//   <out>/manifest.json    config echo and provenance
//
// Per-run files are named by (sigma, gamma, a, hash of the run settings), so
// an interrupted sweep resumes where it stopped.

#include <qrtrap/config.hpp>
#include <qrtrap/csv.hpp>
#include <qrtrap/propagator.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#ifndef QRTRAP_VERSION
#define QRTRAP_VERSION "unknown"
#endif

namespace qrtrap {

namespace fs = std::filesystem;

struct SweepPlan {
    std::vector<double> sigmas;
    std::vector<double> gammas;
    double a = 5.0;
    double tau_end = 1.0;
    GridSpec grid{};
    PropagatorConfig propagator{};  // trap.sigma and gamma are set per run
    std::size_t sample_every = 400;
    CollapseThresholds thresholds{};
    /// Keep propagating after a collapse so the final density is recorded.
    bool stop_on_collapse = false;
    fs::path output_dir;
    int workers = 1;

    void validate() const {
        if (sigmas.empty()) throw PlanError("sweep plan: sigma list is empty");
        if (gammas.empty()) throw PlanError("sweep plan: gamma list is empty");
        if (!(tau_end > 0.0)) throw PlanError("sweep plan: tau_end must be > 0");
        if (!(a > 0.0)) throw PlanError("sweep plan: a must be > 0");
        if (sample_every < 1) throw PlanError("sweep plan: sample_every must be >= 1");
        if (workers < 1) throw PlanError("sweep plan: workers must be >= 1");
        for (double s : sigmas)
            if (!(s >= 0.0) || !std::isfinite(s)) throw PlanError("sweep plan: sigma values must be finite and >= 0");
        for (double g : gammas)
            if (!std::isfinite(g)) throw PlanError("sweep plan: gamma values must be finite");
        try {
            propagator.validate(grid);
        } catch (const InvalidParameter& e) {
            throw PlanError(std::string("sweep plan: ") + e.what());
        }
    }
};

inline SweepPlan make_plan(const RunConfig& c, fs::path output_dir = {}) {
    SweepPlan p;
    p.sigmas = c.sigmas;
    p.gammas = c.gammas;
    p.a = c.a;
    p.tau_end = c.tau_end;
    p.grid = c.grid;
    p.propagator = c.propagator;
    p.sample_every = c.sample_every();
    p.thresholds = c.collapse;
    p.output_dir = std::move(output_dir);
    p.workers = c.workers;
    return p;
}

struct RunRecord {
    double sigma = 0.0;
    double gamma = 0.0;
    ObservableSeries series;
    CollapseReport collapse;
    /// Non-empty when the run could not produce a series at all.
    std::string error;
    bool resumed = false;
    fs::path series_file;

    bool ok() const { return error.empty() && series.termination != Termination::numerical_blowup; }
    double rho_s_final() const { return series.samples.empty() ? std::nan("") : series.samples.back().rho_s; }
};

struct ResultBundle {
    std::vector<RunRecord> runs;  // plan order: sigma-major, then gamma
    nlohmann::json manifest;

    const RunRecord* find(double sigma, double gamma) const {
        for (const auto& r : runs)
            if (r.sigma == sigma && r.gamma == gamma) return &r;
        return nullptr;
    }
};

namespace detail {

inline std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline nlohmann::json run_settings(const SweepPlan& p, double sigma, double gamma) {
    return {
        {"version", QRTRAP_VERSION},
        {"sigma", sigma},
        {"gamma", gamma},
        {"a", p.a},
        {"tau_end", p.tau_end},
        {"grid", {p.grid.x_max, p.grid.n_points}},
        {"dt", p.propagator.dt},
        {"fixed_point", {p.propagator.fixed_point_tol, p.propagator.max_fixed_point_iters}},
        {"absorber", {p.propagator.absorber.start, p.propagator.absorber.strength, p.propagator.absorber.exponent}},
        {"sample_every", p.sample_every},
        {"thresholds",
         {p.thresholds.density_factor, p.thresholds.kinetic_factor, p.thresholds.cliff_fraction,
          p.thresholds.cliff_window}},
        {"stop_on_collapse", p.stop_on_collapse},
    };
}

inline std::string hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string run_stem(const SweepPlan& p, double sigma, double gamma) {
    return "s" + csv::exact(sigma) + "_g" + csv::exact(gamma) + "_a" + csv::exact(p.a) + "_" +
           hex(config_hash(run_settings(p, sigma, gamma)));
}

inline Termination parse_termination(const std::string& s) {
    for (auto t : {Termination::completed, Termination::collapse_suspected, Termination::numerical_blowup})
        if (to_string(t) == s) return t;
    throw ConfigError("unknown termination '" + s + "'");
}

inline CollapseTrigger parse_trigger(const std::string& s) {
    for (auto t : {CollapseTrigger::density_spike, CollapseTrigger::kinetic_spike,
                   CollapseTrigger::fixed_point_failure, CollapseTrigger::density_cliff})
        if (to_string(t) == s) return t;
    throw ConfigError("unknown collapse trigger '" + s + "'");
}

inline nlohmann::json status_json(const RunRecord& r) {
    std::vector<double> peaks;
    for (const auto& s : r.series.samples) peaks.push_back(s.peak_density);
    nlohmann::json j = {
        {"sigma", r.sigma},
        {"gamma", r.gamma},
        {"termination", to_string(r.series.termination)},
        {"message", r.series.message},
        {"fixed_point_failures", r.series.fixed_point_failures},
        {"peak_density", peaks},
        {"collapsed", r.collapse.collapsed},
        {"tau_collapse", nullptr},
        {"trigger", nullptr},
    };
    if (r.collapse.tau_collapse) j["tau_collapse"] = *r.collapse.tau_collapse;
    if (r.collapse.trigger) j["trigger"] = to_string(*r.collapse.trigger);
    return j;
}

inline void write_atomically(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        if (!out) throw Error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

/// Loads a finished run; nullopt when any piece is missing or unreadable.
inline std::optional<RunRecord> load_run(const fs::path& csv_path, const fs::path& status_path) {
    if (!fs::exists(csv_path) || !fs::exists(status_path)) return std::nullopt;
    try {
        std::ifstream sin(status_path);
        const auto j = nlohmann::json::parse(sin);
        std::ifstream cin(csv_path);
        RunRecord r;
        r.sigma = j.at("sigma").get<double>();
        r.gamma = j.at("gamma").get<double>();
        r.series.samples = csv::read_series(cin);
        const auto peaks = j.at("peak_density").get<std::vector<double>>();
        if (peaks.size() != r.series.samples.size()) return std::nullopt;
        for (std::size_t i = 0; i < peaks.size(); ++i) r.series.samples[i].peak_density = peaks[i];
        r.series.termination = parse_termination(j.at("termination").get<std::string>());
        r.series.message = j.at("message").get<std::string>();
        r.series.fixed_point_failures = j.at("fixed_point_failures").get<std::vector<double>>();
        r.collapse.collapsed = j.at("collapsed").get<bool>();
        if (!j.at("tau_collapse").is_null()) r.collapse.tau_collapse = j.at("tau_collapse").get<double>();
        if (!j.at("trigger").is_null()) r.collapse.trigger = parse_trigger(j.at("trigger").get<std::string>());
        r.resumed = true;
        r.series_file = csv_path;
        return r;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

inline RunRecord execute_run(const SweepPlan& p, double sigma, double gamma) {
    RunRecord r;
    r.sigma = sigma;
    r.gamma = gamma;
    try {
        PropagatorConfig cfg = p.propagator;
        cfg.trap.sigma = sigma;
        cfg.gamma = gamma;
        EvolveOptions opts{p.stop_on_collapse, p.thresholds};
        r.series = evolve(initial_packet(p.a, p.grid), cfg, p.tau_end, p.sample_every, opts);
        if (r.series.samples.size() >= 2) r.collapse = detect_collapse(r.series, p.thresholds);
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    return r;
}

}  // namespace detail

inline void write_summary(std::ostream& out, const SweepPlan& plan, const ResultBundle& bundle) {
    out << "sigma,gamma,a,tau_end,rho_s_final,collapsed,tau_collapse\n";
    for (const auto& r : bundle.runs) {
        out << csv::exact(r.sigma) << ',' << csv::exact(r.gamma) << ',' << csv::exact(plan.a) << ','
            << csv::exact(plan.tau_end) << ',' << csv::exact(r.rho_s_final()) << ','
            << (r.collapse.collapsed ? "true" : "false") << ','
            << (r.collapse.tau_collapse ? csv::exact(*r.collapse.tau_collapse) : std::string()) << '\n';
    }
}

using ProgressFn = std::function<void(const RunRecord&, std::size_t done, std::size_t total)>;

/// One evolve per (sigma, gamma), run on up to plan.workers threads. Results
/// come back in plan order. When output_dir is set, finished runs found
/// there are reused and the bundle is written.
inline ResultBundle run_sweep(const SweepPlan& plan, const nlohmann::json& config_echo = nullptr,
                              const ProgressFn& progress = {}) {
    plan.validate();
    const bool persist = !plan.output_dir.empty();
    const fs::path series_dir = plan.output_dir / "series";
    if (persist) fs::create_directories(series_dir);

    struct Job {
        double sigma, gamma;
    };
    std::vector<Job> jobs;
    for (double s : plan.sigmas)
        for (double g : plan.gammas) jobs.push_back({s, g});

    ResultBundle bundle;
    bundle.runs.resize(jobs.size());
    const std::string started = detail::utc_now();

    std::atomic<std::size_t> next{0};
    std::size_t done = 0;
    std::mutex sink;
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
            const auto [sigma, gamma] = jobs[i];
            const std::string stem = detail::run_stem(plan, sigma, gamma);
            const fs::path csv_path = series_dir / (stem + ".csv");
            const fs::path status_path = series_dir / (stem + ".json");
            std::optional<RunRecord> rec;
            if (persist) rec = detail::load_run(csv_path, status_path);
            if (!rec) {
                rec = detail::execute_run(plan, sigma, gamma);
                if (persist && rec->error.empty()) {
                    std::ostringstream text;
                    csv::write_series(text, rec->series);
                    detail::write_atomically(csv_path, text.str());
                    detail::write_atomically(status_path, detail::status_json(*rec).dump(1) + "\n");
                    rec->series_file = csv_path;
                }
            }
            std::lock_guard lock(sink);
            bundle.runs[i] = std::move(*rec);
            ++done;
            if (progress) progress(bundle.runs[i], done, jobs.size());
        }
    };
    const int n_threads = std::min<int>(plan.workers, static_cast<int>(jobs.size()));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }

    nlohmann::json runs = nlohmann::json::array();
    for (const auto& r : bundle.runs) {
        nlohmann::json j = {{"sigma", r.sigma}, {"gamma", r.gamma}, {"resumed", r.resumed}};
        j["series"] = r.series_file.empty() ? nlohmann::json(nullptr) : nlohmann::json(r.series_file.filename().string());
        if (!r.error.empty()) j["error"] = r.error;
        if (r.series.termination == Termination::numerical_blowup) j["error"] = r.series.message;
        runs.push_back(j);
    }
    bundle.manifest = {
        {"config", config_echo},
        {"plan",
         {{"sigmas", plan.sigmas},
          {"gammas", plan.gammas},
          {"a", plan.a},
          {"tau_end", plan.tau_end},
          {"sample_every", plan.sample_every},
          {"stop_on_collapse", plan.stop_on_collapse}}},
        {"provenance",
         {{"config_hash", detail::hex(config_hash(config_echo.is_null() ? detail::run_settings(plan, 0, 0) : config_echo))},
          {"version", QRTRAP_VERSION},
          {"started", started},
          {"finished", detail::utc_now()}}},
        {"runs", runs},
    };

    if (persist) {
        std::ostringstream summary;
        write_summary(summary, plan, bundle);
        detail::write_atomically(plan.output_dir / "summary.csv", summary.str());
        detail::write_atomically(plan.output_dir / "manifest.json", bundle.manifest.dump(2) + "\n");
    }
    return bundle;
}

/// Free packet (sigma = 0, gamma = 0) on the wide baseline domain of
/// `config`, so that slow components leave before they can reflect.
inline ObservableSeries run_free_baseline(double a, double tau_end, const RunConfig& config) {
    require(config.sigma() == 0.0 && config.gamma() == 0.0, "run_free_baseline: config must have sigma = 0, gamma = 0");
    const GridSpec grid = config.baseline_grid();
    PropagatorConfig cfg = config.propagator;
    cfg.absorber.start = config.baseline.absorber_start;
    cfg.absorber.strength = config.baseline.absorber_strength;
    cfg.validate(grid);
    EvolveOptions opts;
    opts.stop_on_collapse = false;
    return evolve(initial_packet(a, grid), cfg, tau_end, config.sample_every(), opts);
}

/// Series for each gamma at fixed sigma, propagated through any collapse.
inline ResultBundle run_collapse_study(double sigma, const std::vector<double>& gammas, const RunConfig& config,
                                       const fs::path& output_dir = {}, const ProgressFn& progress = {}) {
    SweepPlan plan = make_plan(config, output_dir);
    plan.sigmas = {sigma};
    plan.gammas = gammas;
    plan.stop_on_collapse = false;
    return run_sweep(plan, to_json(config), progress);
}

// ---------------------------------------------------------------------------
// Collapse phenomenology

struct CollapseAnalysis {
    bool collapsed = false;
    double tau_collapse = 0.0;
    double tau_kinetic_peak = 0.0;      // argmax e_kin
    double tau_interaction_min = 0.0;   // argmin e_int
    double kinetic_peak_ratio = 0.0;    // max e_kin / e_kin(0)
    double interaction_min_ratio = 0.0; // min e_int / e_int(0)
    double rho_before = 0.0;            // last sample before the collapse
    double rho_final = 0.0;
    /// Largest increase of rho_s between consecutive samples after settling.
    double max_rise_after = 0.0;
    /// Collapse report on the tail, re-referenced at the settling time.
    CollapseReport relapse;
};

/// Splits a series at its detected collapse. The tail starting `settle`
/// after the collapse is checked for further collapse events on its own.
inline CollapseAnalysis analyze_collapse(const ObservableSeries& series, const CollapseThresholds& th = {},
                                         double settle = 0.05) {
    const auto& s = series.samples;
    CollapseAnalysis out;
    const auto report = detect_collapse(series, th);
    if (!report.collapsed) return out;
    out.collapsed = true;
    out.tau_collapse = *report.tau_collapse;

    const auto kin = std::max_element(s.begin(), s.end(), [](auto& x, auto& y) { return x.e_kin < y.e_kin; });
    const auto itr = std::min_element(s.begin(), s.end(), [](auto& x, auto& y) { return x.e_int < y.e_int; });
    out.tau_kinetic_peak = kin->tau;
    out.tau_interaction_min = itr->tau;
    out.kinetic_peak_ratio = kin->e_kin / s.front().e_kin;
    out.interaction_min_ratio = s.front().e_int != 0.0 ? itr->e_int / s.front().e_int : 0.0;
    out.rho_final = s.back().rho_s;
    for (const auto& x : s)
        if (x.tau < out.tau_collapse) out.rho_before = x.rho_s;

    ObservableSeries tail;
    for (const auto& x : s)
        if (x.tau >= out.tau_collapse + settle) tail.samples.push_back(x);
    for (double t : series.fixed_point_failures)
        if (t >= out.tau_collapse + settle) tail.fixed_point_failures.push_back(t);
    for (std::size_t i = 1; i < tail.samples.size(); ++i)
        out.max_rise_after = std::max(out.max_rise_after, tail.samples[i].rho_s - tail.samples[i - 1].rho_s);
    if (tail.samples.size() >= 2) out.relapse = detect_collapse(tail, th);
    return out;
}

}  // namespace qrtrap
