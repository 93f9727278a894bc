#pragma once

// Crank-Nicolson propagation of the scaled radial GPE,
//
//   (1 + i dt/2 H[rho]) psi^{n+1} = (1 - i dt/2 H[rho]) psi^n,
//
// with the absorbing layer inside H and the cubic term evaluated at the
// time-centred density rho = (|psi^n|^2 + |psi^{n+1}|^2) / 2, obtained by
// fixed-point iteration. With W = 0 the scheme conserves the discrete norm
// and the discrete GP functional (see gp_energy_functional) exactly, up to
// the fixed-point tolerance and round-off.

#include <qrtrap/observables.hpp>
#include <qrtrap/tridiagonal.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace qrtrap {

/// The nonlinear iteration did not converge; usually a sign of collapse.
class CollapseSuspected : public Error {
public:
    CollapseSuspected(const std::string& what, WaveState state) : Error(what), state_(std::move(state)) {}
    const WaveState& state() const noexcept { return state_; }

private:
    WaveState state_;
};

struct StepResult {
    bool converged = true;
    int iterations = 0;
    double last_change = 0.0;
};

class CrankNicolson {
public:
    CrankNicolson(const GridSpec& grid, const PropagatorConfig& config) : grid_(grid), config_(config) {
        grid.validate();
        config.validate(grid);
        const std::size_t n = grid.n_points;
        const double half_dt = 0.5 * config.dt;
        const double inv_dx2 = 1.0 / (grid.dx() * grid.dx());
        const auto v = potential_on_grid(config.trap, grid);
        const auto w = absorber_on_grid(config.absorber, grid);
        // 1 + i dt/2 (2/dx^2 + V - i W)
        base_diag_.resize(n);
        coupling_.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            base_diag_[j] = complex(1.0 + half_dt * w[j], half_dt * (2.0 * inv_dx2 + v[j]));
            const double x = grid.x(j);
            coupling_[j] = half_dt * config.gamma / (x * x);
        }
        off_.assign(n, complex(0.0, -half_dt * inv_dx2));
        diag_.resize(n);
        rhs_.resize(n);
        next_.resize(n);
        prev_.resize(n);
        rho_old_.resize(n);
        scratch_.resize(n);
    }

    const GridSpec& grid() const noexcept { return grid_; }
    const PropagatorConfig& config() const noexcept { return config_; }

    /// Advances `state` by one dt in place. On non-convergence the last
    /// iterate is kept and the result reports it. Throws NumericalBlowup on
    /// non-finite amplitudes.
    StepResult advance(WaveState& state) {
        auto& psi = state.amplitudes;
        const std::size_t n = psi.size();
        if (n != grid_.n_points) throw InvalidParameter("step: state does not match the propagator grid");

        for (std::size_t j = 0; j < n; ++j) rho_old_[j] = std::norm(psi[j]);

        const bool nonlinear = config_.gamma != 0.0;
        StepResult result;
        result.converged = false;
        for (int it = 0; it < config_.max_fixed_point_iters; ++it) {
            for (std::size_t j = 0; j < n; ++j) {
                const double rho = it == 0 ? rho_old_[j] : 0.5 * (rho_old_[j] + std::norm(next_[j]));
                diag_[j] = base_diag_[j] + complex(0.0, coupling_[j] * rho);
            }
            // rhs = (1 - i dt/2 H) psi = 2 psi - (1 + i dt/2 H) psi
            for (std::size_t j = 0; j < n; ++j) {
                complex a = diag_[j] * psi[j];
                if (j > 0) a += off_[j] * psi[j - 1];
                if (j + 1 < n) a += off_[j] * psi[j + 1];
                rhs_[j] = 2.0 * psi[j] - a;
            }
            if (it > 0) prev_.swap(next_);
            solve_tridiagonal<complex>(off_, diag_, off_, rhs_, next_, scratch_);
            result.iterations = it + 1;
            if (!nonlinear) {
                result.converged = true;
                break;
            }
            if (it > 0) {
                double diff = 0.0, size = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    diff += std::norm(next_[j] - prev_[j]);
                    size += std::norm(next_[j]);
                }
                result.last_change = size > 0.0 ? std::sqrt(diff / size) : std::sqrt(diff);
                if (result.last_change < config_.fixed_point_tol) {
                    result.converged = true;
                    break;
                }
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (!std::isfinite(next_[j].real()) || !std::isfinite(next_[j].imag()))
                throw NumericalBlowup("step: non-finite amplitude", state.tau + config_.dt);
        }
        psi.swap(next_);
        state.tau += config_.dt;
        return result;
    }

private:
    GridSpec grid_;
    PropagatorConfig config_;
    std::vector<complex> base_diag_, off_, diag_, rhs_, next_, prev_, scratch_;
    std::vector<double> coupling_, rho_old_;
};

/// One Crank-Nicolson step. Throws CollapseSuspected (carrying the last
/// iterate) when the nonlinear iteration fails to converge.
inline WaveState step(WaveState state, const PropagatorConfig& config) {
    CrankNicolson cn(state.grid, config);
    const auto r = cn.advance(state);
    if (!r.converged)
        throw CollapseSuspected("step: fixed-point iteration did not converge after " +
                                    std::to_string(r.iterations) + " passes",
                                std::move(state));
    return state;
}

struct EvolveOptions {
    /// Stop at the first fixed-point failure or detected collapse. When
    /// false, failures are recorded and propagation continues with the last
    /// iterate.
    bool stop_on_collapse = true;
    CollapseThresholds thresholds{};
};

/// Propagates to tau_end, sampling observables every `sample_every` steps
/// (and always at the final step). Returns the final state through
/// `final_state` when given.
inline ObservableSeries evolve(const WaveState& initial, const PropagatorConfig& config, double tau_end,
                               std::size_t sample_every, const EvolveOptions& options = {},
                               WaveState* final_state = nullptr) {
    require(tau_end >= initial.tau, "evolve: tau_end must not precede the initial time");
    require(sample_every >= 1, "evolve: sample_every must be >= 1");
    CrankNicolson cn(initial.grid, config);
    WaveState state = initial;
    ObservableSeries series;
    series.samples.push_back(make_sample(state, config, peak_density(state)));

    const auto n_steps = static_cast<std::size_t>(std::llround((tau_end - initial.tau) / config.dt));
    double running_peak = 0.0;
    try {
        for (std::size_t k = 1; k <= n_steps; ++k) {
            const auto r = cn.advance(state);
            // Keep tau an exact multiple of dt rather than a running sum.
            state.tau = initial.tau + static_cast<double>(k) * config.dt;
            running_peak = std::max(running_peak, peak_density(state));
            if (!r.converged) {
                series.fixed_point_failures.push_back(state.tau);
                if (options.stop_on_collapse) {
                    series.samples.push_back(make_sample(state, config, running_peak));
                    series.termination = Termination::collapse_suspected;
                    series.message = "fixed-point iteration did not converge";
                    break;
                }
            }
            if (k % sample_every == 0 || k == n_steps) {
                series.samples.push_back(make_sample(state, config, running_peak));
                running_peak = 0.0;
                if (options.stop_on_collapse && detect_collapse(series, options.thresholds).collapsed) {
                    series.termination = Termination::collapse_suspected;
                    series.message = "collapse detected";
                    break;
                }
            }
        }
    } catch (const NumericalBlowup& e) {
        series.termination = Termination::numerical_blowup;
        series.message = e.what();
    }
    if (final_state) *final_state = std::move(state);
    return series;
}

}  // namespace qrtrap
