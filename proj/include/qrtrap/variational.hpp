#pragma once

// Gaussian-ansatz stability analysis.
//
// Trial state phi(x) = N x exp(-x^2 / (2 alpha^2)). Its energy is available
// two ways: the closed form as printed in the source literature
// (ansatz_energy_printed) and direct quadrature of <phi|H|phi>
// (ansatz_energy_quadrature). They disagree in the step-potential term:
// the printed term grows like +sigma^2 alpha for large alpha, while the
// exact overlap is bounded below by -sigma^2. Both are kept; the quadrature
// route drives stationarity and classification.

#include <qrtrap/errors.hpp>
#include <qrtrap/propagator.hpp>
#include <qrtrap/quadrature.hpp>

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace qrtrap {

struct AnsatzEnergyTerms {
    double kinetic = 0.0;
    double potential = 0.0;
    double interaction = 0.0;
    double total = 0.0;
};

namespace detail {

inline void require_width(double alpha, const char* who) {
    if (!(std::isfinite(alpha) && alpha > 0.0)) throw InvalidParameter(std::string(who) + ": alpha must be > 0");
}

}  // namespace detail

/// sqrt(2 / (pi alpha^6)): interaction energy per unit gamma.
inline double ansatz_interaction_per_gamma(double alpha) {
    detail::require_width(alpha, "ansatz_interaction_per_gamma");
    return std::sqrt(2.0 / (std::numbers::pi * std::pow(alpha, 6)));
}

inline AnsatzEnergyTerms ansatz_terms_printed(double alpha, double sigma, double gamma) {
    detail::require_width(alpha, "ansatz_energy_printed");
    const double inv = 1.0 / alpha;
    AnsatzEnergyTerms t;
    t.kinetic = 1.5 * inv * inv;
    t.potential = -sigma * sigma * (2.0 / std::sqrt(std::numbers::pi) * std::exp(-inv * inv) - alpha * std::erfc(inv));
    t.interaction = gamma * ansatz_interaction_per_gamma(alpha);
    t.total = t.kinetic + t.potential + t.interaction;
    return t;
}

/// H(alpha, sigma, gamma) as printed:
///   3/(2 a^2) - s^2 (2/sqrt(pi) exp(-1/a^2) - a erfc(1/a)) + g sqrt(2/(pi a^6))
inline double ansatz_energy_printed(double alpha, double sigma, double gamma) {
    return ansatz_terms_printed(alpha, sigma, gamma).total;
}

/// Terms of <phi|H|phi> by adaptive quadrature in u = x / alpha.
inline AnsatzEnergyTerms ansatz_terms_quadrature(double alpha, double sigma, double gamma, double abs_tol = 1e-10) {
    detail::require_width(alpha, "ansatz_energy_quadrature");
    const double inf = std::numeric_limits<double>::infinity();
    const double norm2 = 4.0 / (std::sqrt(std::numbers::pi) * alpha * alpha * alpha);

    // |phi'|^2 dx = norm2 (1 - u^2)^2 exp(-u^2) alpha du
    const double kinetic_scale = norm2 * alpha;
    const double kinetic_integral = integrate(
        [](double u) {
            const double p = 1.0 - u * u;
            return p * p * std::exp(-u * u);
        },
        0.0, inf, abs_tol / std::max(1.0, kinetic_scale));

    // |phi|^2 dx = norm2 alpha^3 u^2 exp(-u^2) du on x >= 1
    const double density_scale = norm2 * alpha * alpha * alpha;
    const double outside = integrate([](double u) { return u * u * std::exp(-u * u); }, 1.0 / alpha, inf,
                                     abs_tol / std::max(1.0, sigma * sigma * density_scale));

    // |phi|^4 / x^2 dx = norm2^2 alpha^3 u^2 exp(-2 u^2) du
    const double int_scale = norm2 * norm2 * alpha * alpha * alpha;
    const double int_integral = integrate([](double u) { return u * u * std::exp(-2.0 * u * u); }, 0.0, inf,
                                          abs_tol / std::max(1.0, int_scale));

    AnsatzEnergyTerms t;
    t.kinetic = kinetic_scale * kinetic_integral;
    t.potential = -sigma * sigma * density_scale * outside;
    t.interaction = gamma * int_scale * int_integral;
    t.total = t.kinetic + t.potential + t.interaction;
    return t;
}

inline double ansatz_energy_quadrature(double alpha, double sigma, double gamma) {
    return ansatz_terms_quadrature(alpha, sigma, gamma).total;
}

/// gamma(alpha, sigma) as printed:
///   -a^2 + a/sqrt(2) [2 a s^2 exp(-1/a^2) + a^2 s^2 (1 - erf(1/a)) - (3/2) sqrt(pi)]
inline double running_gamma_printed(double alpha, double sigma) {
    detail::require_width(alpha, "running_gamma_printed");
    const double s2 = sigma * sigma;
    const double inv = 1.0 / alpha;
    const double bracket = 2.0 * alpha * s2 * std::exp(-inv * inv) + alpha * alpha * s2 * (1.0 - std::erf(inv)) -
                           1.5 * std::sqrt(std::numbers::pi);
    return -alpha * alpha + alpha / std::sqrt(2.0) * bracket;
}

/// Central difference with step h and h/2, Richardson-extrapolated.
template <class F>
double richardson_derivative(F&& f, double x, double h) {
    auto central = [&](double step) { return (f(x + step) - f(x - step)) / (2.0 * step); };
    const double d1 = central(h);
    const double d2 = central(0.5 * h);
    return (4.0 * d2 - d1) / 3.0;
}

/// d/dalpha of the quadrature energy at fixed (sigma, gamma).
inline double ansatz_energy_slope(double alpha, double sigma, double gamma) {
    detail::require_width(alpha, "ansatz_energy_slope");
    return richardson_derivative([&](double a) { return ansatz_energy_quadrature(a, sigma, gamma); }, alpha,
                                 1e-6 * alpha);
}

/// Coupling that makes alpha stationary. H is linear in gamma,
/// H = H0(alpha, sigma) + gamma h(alpha), so gamma = -H0'(alpha) / h'(alpha).
inline double stationary_gamma_numeric(double alpha, double sigma) {
    detail::require_width(alpha, "stationary_gamma_numeric");
    const double h = 1e-6 * alpha;
    const double d_h0 = richardson_derivative([&](double a) { return ansatz_energy_quadrature(a, sigma, 0.0); }, alpha, h);
    const double d_int = richardson_derivative([](double a) { return ansatz_interaction_per_gamma(a); }, alpha, h);
    if (std::abs(d_int) < 1e-30) throw AccuracyError("stationary_gamma_numeric: degenerate interaction derivative");
    return -d_h0 / d_int;
}

struct PhaseDiagramRow {
    double sigma = 0.0;
    double alpha = 0.0;
    double gamma_printed = 0.0;
    double gamma_numeric = 0.0;
};

struct PhaseDiagram {
    std::vector<PhaseDiagramRow> rows;
};

/// n_alpha widths evenly spaced over [alpha_lo, alpha_hi] for each sigma.
inline std::vector<double> alpha_grid(double alpha_lo, double alpha_hi, std::size_t n_alpha) {
    require(alpha_lo > 0.0 && alpha_hi >= alpha_lo, "phase_diagram: need 0 < alpha_lo <= alpha_hi");
    require(n_alpha >= 1, "phase_diagram: n_alpha must be >= 1");
    std::vector<double> out(n_alpha);
    for (std::size_t i = 0; i < n_alpha; ++i)
        out[i] = n_alpha == 1 ? alpha_lo
                              : alpha_lo + (alpha_hi - alpha_lo) * static_cast<double>(i) / static_cast<double>(n_alpha - 1);
    return out;
}

inline PhaseDiagram phase_diagram(const std::vector<double>& sigmas, std::pair<double, double> alpha_range,
                                  std::size_t n_alpha) {
    require(!sigmas.empty(), "phase_diagram: sigma list is empty");
    for (double s : sigmas) require(s >= 0.0, "phase_diagram: sigma must be >= 0");
    const auto alphas = alpha_grid(alpha_range.first, alpha_range.second, n_alpha);
    PhaseDiagram pd;
    pd.rows.reserve(sigmas.size() * n_alpha);
    for (double s : sigmas)
        for (double a : alphas) pd.rows.push_back({s, a, running_gamma_printed(a, s), stationary_gamma_numeric(a, s)});
    return pd;
}

/// Potential term of the ansatz energy, printed vs quadrature, for widths
/// where the printed form leaves the physical range [-sigma^2, 0].
struct LargeWidthAuditRow {
    double sigma = 0.0;
    double alpha = 0.0;
    double potential_printed = 0.0;
    double potential_quadrature = 0.0;
    double lower_bound = 0.0;  // -sigma^2
};

inline std::vector<LargeWidthAuditRow> large_width_audit(double sigma, const std::vector<double>& alphas) {
    std::vector<LargeWidthAuditRow> rows;
    for (double a : alphas)
        rows.push_back({sigma, a, ansatz_terms_printed(a, sigma, 0.0).potential,
                        ansatz_terms_quadrature(a, sigma, 0.0).potential, -sigma * sigma});
    return rows;
}

// ---------------------------------------------------------------------------
// Dynamical critical coupling

struct CriticalSearch {
    GridSpec grid{};
    PropagatorConfig propagator{};  // trap.sigma and gamma are overwritten per probe
    double diffuseness = 5.0;
    double horizon = 0.3;
    std::size_t sample_every = 400;
    CollapseThresholds thresholds{};
};

struct CriticalProbe {
    double gamma = 0.0;
    bool collapsed = false;
    std::optional<double> tau_collapse;
};

struct CriticalResult {
    double gamma_c = 0.0;
    double gamma_lo = 0.0;  // collapses
    double gamma_hi = 0.0;  // stable
    std::vector<CriticalProbe> probes;
};

inline CriticalProbe probe_collapse(double sigma, double gamma, const CriticalSearch& search) {
    PropagatorConfig cfg = search.propagator;
    cfg.trap.sigma = sigma;
    cfg.gamma = gamma;
    EvolveOptions opts;
    opts.stop_on_collapse = true;
    opts.thresholds = search.thresholds;
    const auto series = evolve(initial_packet(search.diffuseness, search.grid), cfg, search.horizon,
                               search.sample_every, opts);
    if (series.termination == Termination::numerical_blowup) return {gamma, true, series.samples.back().tau};
    const auto report = detect_collapse(series, search.thresholds);
    return {gamma, report.collapsed, report.tau_collapse};
}

/// Bisection on gamma between a collapsing gamma_lo and a stable gamma_hi
/// until the bracket is no wider than tol; returns the midpoint.
inline CriticalResult critical_gamma_dynamic(double sigma, const CriticalSearch& search,
                                             std::pair<double, double> bracket, double tol) {
    auto [lo, hi] = bracket;
    require(tol > 0.0, "critical_gamma_dynamic: tol must be > 0");
    if (!(lo < hi)) throw BracketError("critical_gamma_dynamic: bracket must satisfy gamma_lo < gamma_hi");
    if (lo >= 0.0) throw BracketError("critical_gamma_dynamic: bracket is non-negative, no collapse possible");

    CriticalResult result;
    auto probe = [&](double g) {
        result.probes.push_back(probe_collapse(sigma, g, search));
        return result.probes.back().collapsed;
    };
    if (!probe(lo)) throw BracketError("critical_gamma_dynamic: no collapse at gamma_lo");
    if (probe(hi)) throw BracketError("critical_gamma_dynamic: collapse already at gamma_hi");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (probe(mid) ? lo : hi) = mid;
    }
    result.gamma_lo = lo;
    result.gamma_hi = hi;
    result.gamma_c = 0.5 * (lo + hi);
    return result;
}

}  // namespace qrtrap
