#pragma once

// Diagnostics of a radial state: surviving density inside the trap, the
// energy decomposition over [0, 1], the conserved Gross-Pitaevskii functional
// over the whole domain, and collapse detection on a time series.

#include <qrtrap/hamiltonian.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qrtrap {

struct EnergyBreakdown {
    double e_kin = 0.0;
    double e_pot = 0.0;
    double e_int = 0.0;
    double e_tot = 0.0;
    double norm_inside = 0.0;
    double norm_total = 0.0;
    /// -Re[psi*(1) psi'(1)]: what the -int psi* psi'' form of the kinetic
    /// energy would add to e_kin.
    double kinetic_boundary_term = 0.0;
};

namespace detail {

struct Node {
    double x;
    complex psi;
};

// Nodes covering [0, 1]: the x = 0 boundary, interior points with x <= 1 and,
// when 1 is not a grid point, a linearly interpolated node at x = 1.
inline std::vector<Node> nodes_inside(const WaveState& s) {
    const GridSpec& g = s.grid;
    const std::size_t k = g.count_up_to(1.0);
    std::vector<Node> nodes;
    nodes.reserve(k + 2);
    nodes.push_back({0.0, complex{}});
    for (std::size_t j = 0; j < k; ++j) nodes.push_back({g.x(j), s.amplitudes[j]});
    const double x_last = nodes.back().x;
    if (x_last < 1.0 - 1e-12 * g.dx() && k < g.n_points) {
        const double t = (1.0 - x_last) / g.dx();
        const complex psi = (1.0 - t) * nodes.back().psi + t * s.amplitudes[k];
        nodes.push_back({1.0, psi});
    }
    return nodes;
}

}  // namespace detail

/// Trapezoidal integral of |psi|^2 over x in [0, 1].
inline double surviving_density(const WaveState& state) {
    const auto nodes = detail::nodes_inside(state);
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
        s += 0.5 * (std::norm(nodes[i].psi) + std::norm(nodes[i + 1].psi)) * (nodes[i + 1].x - nodes[i].x);
    return s;
}

inline double total_norm(const WaveState& state) { return discrete_norm(state.amplitudes, state.grid.dx()); }

inline double peak_density(const WaveState& state) {
    double m = 0.0;
    for (const auto& z : state.amplitudes) m = std::max(m, std::norm(z));
    return m;
}

/// Energy over the trap interior [0, 1]. The kinetic part uses the density
/// form int |psi'|^2; the interaction carries the full gamma, matching
/// i int psi* d_tau psi with d_tau psi = -i H psi (absorber excluded).
/// The potential is evaluated at segment midpoints, so the step at x = 1
/// contributes nothing inside the trap.
inline EnergyBreakdown energy_breakdown(const WaveState& state, const PropagatorConfig& config) {
    const auto nodes = detail::nodes_inside(state);
    EnergyBreakdown e;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const auto& a = nodes[i];
        const auto& b = nodes[i + 1];
        const double h = b.x - a.x;
        if (h <= 0.0) continue;
        const double rho_a = std::norm(a.psi), rho_b = std::norm(b.psi);
        e.e_kin += std::norm(b.psi - a.psi) / h;
        e.e_pot += config.trap(0.5 * (a.x + b.x)) * 0.5 * (rho_a + rho_b) * h;
        const double f_a = a.x > 0.0 ? rho_a * rho_a / (a.x * a.x) : 0.0;
        const double f_b = rho_b * rho_b / (b.x * b.x);
        e.e_int += 0.5 * (f_a + f_b) * h;
        e.norm_inside += 0.5 * (rho_a + rho_b) * h;
    }
    e.e_int *= config.gamma;
    e.e_tot = e.e_kin + e.e_pot + e.e_int;
    e.norm_total = total_norm(state);

    const GridSpec& g = state.grid;
    const std::size_t k = g.count_up_to(1.0);
    if (k >= 1 && k + 1 <= g.n_points - 1) {
        // Central difference at the last node inside the trap.
        const complex psi1 = state.amplitudes[k - 1];
        const complex dpsi = (state.amplitudes[k] - (k >= 2 ? state.amplitudes[k - 2] : complex{})) / (2.0 * g.dx());
        e.kinetic_boundary_term = -std::real(std::conj(psi1) * dpsi);
    }
    return e;
}

/// Conserved functional over the whole grid:
///   int |psi'|^2 + V |psi|^2 + (gamma / 2) |psi|^4 / x^2
/// Note the factor 1/2 on the interaction, unlike energy_breakdown.
inline double gp_energy_functional(const WaveState& state, const PropagatorConfig& config) {
    const GridSpec& g = state.grid;
    const auto& psi = state.amplitudes;
    const double dx = g.dx();
    double kin = 0.0, rest = 0.0;
    complex prev{};
    for (std::size_t j = 0; j < psi.size(); ++j) {
        kin += std::norm(psi[j] - prev);
        prev = psi[j];
        const double x = g.x(j);
        const double rho = std::norm(psi[j]);
        rest += config.trap(x) * rho + 0.5 * config.gamma * rho * rho / (x * x);
    }
    kin += std::norm(prev);
    return kin / dx + rest * dx;
}

// ---------------------------------------------------------------------------
// Time series and collapse detection

struct Sample {
    double tau = 0.0;
    double rho_s = 0.0;
    double e_kin = 0.0;
    double e_pot = 0.0;
    double e_int = 0.0;
    double e_tot = 0.0;
    double norm_total = 0.0;
    /// Largest |psi|^2 seen on any step since the previous sample.
    double peak_density = 0.0;
};

enum class Termination { completed, collapse_suspected, numerical_blowup };

inline std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::completed: return "completed";
        case Termination::collapse_suspected: return "collapse-suspected";
        case Termination::numerical_blowup: return "numerical-blowup";
    }
    return "unknown";
}

struct ObservableSeries {
    std::vector<Sample> samples;
    Termination termination = Termination::completed;
    /// Times at which the nonlinear iteration of a step did not converge.
    std::vector<double> fixed_point_failures;
    std::string message;
};

inline Sample make_sample(const WaveState& state, const PropagatorConfig& config, double peak) {
    const auto e = energy_breakdown(state, config);
    return Sample{state.tau, e.norm_inside, e.e_kin, e.e_pot, e.e_int, e.e_tot, e.norm_total, peak};
}

enum class CollapseTrigger { density_spike, kinetic_spike, fixed_point_failure, density_cliff };

inline std::string_view to_string(CollapseTrigger t) {
    switch (t) {
        case CollapseTrigger::density_spike: return "density-spike";
        case CollapseTrigger::kinetic_spike: return "kinetic-spike";
        case CollapseTrigger::fixed_point_failure: return "fixed-point-failure";
        case CollapseTrigger::density_cliff: return "density-cliff";
    }
    return "unknown";
}

struct CollapseThresholds {
    double density_factor = 50.0;
    double kinetic_factor = 20.0;
    double cliff_fraction = 0.25;
    double cliff_window = 0.01;

    bool operator==(const CollapseThresholds&) const = default;
};

struct CollapseReport {
    bool collapsed = false;
    std::optional<double> tau_collapse;
    std::optional<CollapseTrigger> trigger;
};

/// Reports the earliest time at which any trigger fires.
inline CollapseReport detect_collapse(const ObservableSeries& series, const CollapseThresholds& th = {}) {
    const auto& s = series.samples;
    if (s.size() < 2) throw InvalidParameter("detect_collapse: need at least two samples");

    CollapseReport report;
    auto fire = [&](double tau, CollapseTrigger trigger) {
        if (!report.collapsed || tau < *report.tau_collapse) {
            report.collapsed = true;
            report.tau_collapse = tau;
            report.trigger = trigger;
        }
    };

    const double peak0 = s.front().peak_density;
    const double kin0 = s.front().e_kin;
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i].peak_density > th.density_factor * peak0) {
            fire(s[i].tau, CollapseTrigger::density_spike);
            break;
        }
    }
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i].e_kin > th.kinetic_factor * kin0) {
            fire(s[i].tau, CollapseTrigger::kinetic_spike);
            break;
        }
    }
    if (!series.fixed_point_failures.empty()) fire(series.fixed_point_failures.front(), CollapseTrigger::fixed_point_failure);

    const double slack = 1e-9 * th.cliff_window;
    std::size_t lo = 0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        while (s[i].tau - s[lo].tau > th.cliff_window + slack) ++lo;
        bool hit = false;
        for (std::size_t j = lo; j < i; ++j) {
            if (s[j].rho_s - s[i].rho_s > th.cliff_fraction * s[j].rho_s) {
                hit = true;
                break;
            }
        }
        if (hit) {
            fire(s[i].tau, CollapseTrigger::density_cliff);
            break;
        }
    }
    return report;
}

}  // namespace qrtrap
