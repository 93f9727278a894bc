#pragma once

// Radial grid, trap potential, absorbing layer and the two model wave
// functions (the truncated exponential packet and the Gaussian trial state).
//
// The radial function psi = x * Psi vanishes at x = 0 and, for the numerics,
// at x = x_max. Only the interior points x_j = (j + 1) * dx, j = 0..n-1, are
// stored.

#include <qrtrap/errors.hpp>

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace qrtrap {

using complex = std::complex<double>;

struct GridSpec {
    double x_max = 4.0;
    std::size_t n_points = 3999;

    double dx() const noexcept { return x_max / static_cast<double>(n_points + 1); }
    double x(std::size_t j) const noexcept { return static_cast<double>(j + 1) * dx(); }

    void validate() const {
        require(std::isfinite(x_max) && x_max > 1.0, "grid: x_max must exceed the trap edge x = 1");
        require(n_points >= 100, "grid: n_points must be at least 100");
    }

    /// Number of interior points with x_j <= x (x_j = 0 excluded).
    std::size_t count_up_to(double x) const noexcept {
        if (x <= 0.0) return 0;
        auto k = static_cast<std::size_t>(std::floor(x / dx() * (1.0 + 1e-14)));
        return k < n_points ? k : n_points;
    }

    bool operator==(const GridSpec&) const = default;
};

struct StepTrap {
    double sigma = 0.0;

    void validate() const { require(std::isfinite(sigma) && sigma >= 0.0, "trap: sigma must be >= 0"); }

    /// Right-continuous step: the outer value applies at x = 1 itself.
    double operator()(double x) const noexcept { return x >= 1.0 ? -sigma * sigma : 0.0; }

    bool operator==(const StepTrap&) const = default;
};

/// Polynomial ramp of a negative-imaginary potential -i W(x) near the outer edge.
struct AbsorberSpec {
    double start = 1.5;
    double strength = 400.0;
    double exponent = 2.0;

    void validate(const GridSpec& grid) const {
        require(start > 1.0 && start < grid.x_max, "absorber: need 1 < start < x_max");
        require(std::isfinite(strength) && strength >= 0.0, "absorber: strength must be >= 0");
        require(exponent >= 2.0, "absorber: exponent must be >= 2");
    }

    double operator()(double x, double x_max) const noexcept {
        if (x <= start) return 0.0;
        return strength * std::pow((x - start) / (x_max - start), exponent);
    }

    bool operator==(const AbsorberSpec&) const = default;
};

struct WaveState {
    GridSpec grid;
    std::vector<complex> amplitudes;  // interior points only
    double tau = 0.0;
};

inline std::vector<double> potential_on_grid(const StepTrap& trap, const GridSpec& grid) {
    trap.validate();
    grid.validate();
    std::vector<double> v(grid.n_points);
    for (std::size_t j = 0; j < grid.n_points; ++j) v[j] = trap(grid.x(j));
    return v;
}

inline std::vector<double> absorber_on_grid(const AbsorberSpec& spec, const GridSpec& grid) {
    grid.validate();
    spec.validate(grid);
    std::vector<double> w(grid.n_points);
    for (std::size_t j = 0; j < grid.n_points; ++j) w[j] = spec(grid.x(j), grid.x_max);
    return w;
}

/// dx * sum |psi_j|^2; equals the trapezoid rule since both ends vanish.
inline double discrete_norm(std::span<const complex> psi, double dx) noexcept {
    double s = 0.0;
    for (const auto& z : psi) s += std::norm(z);
    return s * dx;
}

namespace detail {

inline void normalize(std::vector<complex>& psi, double dx) {
    const double n = discrete_norm(psi, dx);
    if (!(n > 0.0)) throw ResolutionError("state has zero norm on this grid");
    const double scale = 1.0 / std::sqrt(n);
    for (auto& z : psi) z *= scale;
}

// A feature of length `width` needs at least 16 grid points.
inline void require_resolved(double width, const GridSpec& grid, const char* what) {
    if (width / grid.dx() < 16.0)
        throw ResolutionError(std::string(what) + ": fewer than 16 grid points across the feature width");
}

}  // namespace detail

/// psi(x, 0) = N x exp(-a x) for x <= 1, zero outside; normalized on the grid.
inline WaveState initial_packet(double a, const GridSpec& grid) {
    require(std::isfinite(a) && a > 0.0, "initial_packet: diffuseness a must be > 0");
    grid.validate();
    detail::require_resolved(1.0 / a, grid, "initial_packet");
    WaveState s{grid, std::vector<complex>(grid.n_points, 0.0), 0.0};
    const std::size_t inside = grid.count_up_to(1.0);
    for (std::size_t j = 0; j < inside; ++j) {
        const double x = grid.x(j);
        s.amplitudes[j] = x * std::exp(-a * x);
    }
    detail::normalize(s.amplitudes, grid.dx());
    return s;
}

/// phi(x) = N x exp(-x^2 / (2 alpha^2)), normalized on the grid.
inline WaveState gaussian_trial(double alpha, const GridSpec& grid) {
    require(std::isfinite(alpha) && alpha > 0.0, "gaussian_trial: width alpha must be > 0");
    grid.validate();
    detail::require_resolved(alpha, grid, "gaussian_trial");
    WaveState s{grid, std::vector<complex>(grid.n_points, 0.0), 0.0};
    for (std::size_t j = 0; j < grid.n_points; ++j) {
        const double x = grid.x(j);
        s.amplitudes[j] = x * std::exp(-x * x / (2.0 * alpha * alpha));
    }
    detail::normalize(s.amplitudes, grid.dx());
    return s;
}

/// |<a|b>|^2 with the discrete inner product dx * sum conj(a) b.
inline double overlap_probability(const WaveState& a, const WaveState& b) {
    require(a.grid == b.grid, "overlap: states live on different grids");
    complex s = 0.0;
    for (std::size_t j = 0; j < a.amplitudes.size(); ++j) s += std::conj(a.amplitudes[j]) * b.amplitudes[j];
    return std::norm(s * a.grid.dx());
}

/// Width of the Gaussian trial state that best overlaps the a-packet.
/// Golden-section search on [alpha_lo, alpha_hi].
inline double matched_trial_width(double a, const GridSpec& grid, double alpha_lo = 0.1, double alpha_hi = 1.0,
                                  double tol = 1e-6) {
    const WaveState packet = initial_packet(a, grid);
    auto f = [&](double alpha) { return overlap_probability(gaussian_trial(alpha, grid), packet); };
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = alpha_lo, hi = alpha_hi;
    double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
    double fc = f(c), fd = f(d);
    while (hi - lo > tol) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace qrtrap
