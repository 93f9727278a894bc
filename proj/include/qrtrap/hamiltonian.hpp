#pragma once

// Scaled radial Gross-Pitaevskii operator
//
//   H psi = -psi'' - sigma^2 theta[x - 1] psi + gamma |psi|^2 / x^2 psi - i W(x) psi
//
// on the interior grid with Dirichlet ends, and the propagator settings.

#include <qrtrap/model.hpp>

#include <cmath>
#include <span>
#include <vector>

namespace qrtrap {

struct PropagatorConfig {
    double dt = 2.5e-6;
    double fixed_point_tol = 1e-10;
    int max_fixed_point_iters = 25;
    AbsorberSpec absorber{};
    StepTrap trap{};
    double gamma = 0.0;

    void validate(const GridSpec& grid) const {
        require(std::isfinite(dt) && dt > 0.0, "propagator: dt must be > 0");
        require(fixed_point_tol > 0.0 && fixed_point_tol <= 1e-3, "propagator: fixed_point_tol must lie in (0, 1e-3]");
        require(max_fixed_point_iters >= 2, "propagator: max_fixed_point_iters must be >= 2");
        require(std::isfinite(gamma), "propagator: gamma must be finite");
        trap.validate();
        absorber.validate(grid);
    }

    bool operator==(const PropagatorConfig&) const = default;
};

namespace detail {

inline void apply_hamiltonian(std::span<const complex> psi, const GridSpec& grid, std::span<const double> v,
                              std::span<const double> w, double gamma, std::span<complex> out) {
    const std::size_t n = psi.size();
    const double inv_dx2 = 1.0 / (grid.dx() * grid.dx());
    for (std::size_t j = 0; j < n; ++j) {
        const complex left = j > 0 ? psi[j - 1] : complex{};
        const complex right = j + 1 < n ? psi[j + 1] : complex{};
        const double x = grid.x(j);
        const double local = v[j] + gamma * std::norm(psi[j]) / (x * x);
        out[j] = (2.0 * psi[j] - left - right) * inv_dx2 + complex(local, -w[j]) * psi[j];
    }
}

}  // namespace detail

/// (-D2 + V + gamma |psi|^2 / x^2 - i W) psi with the three-point Laplacian.
inline std::vector<complex> apply_hamiltonian(const WaveState& state, const PropagatorConfig& config) {
    config.validate(state.grid);
    const auto v = potential_on_grid(config.trap, state.grid);
    const auto w = absorber_on_grid(config.absorber, state.grid);
    std::vector<complex> out(state.amplitudes.size());
    detail::apply_hamiltonian(state.amplitudes, state.grid, v, w, config.gamma, out);
    return out;
}

}  // namespace qrtrap
