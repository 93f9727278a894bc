#pragma once

// Thomas algorithm for complex tridiagonal systems.

#include <qrtrap/errors.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

namespace qrtrap {

/// Row i reads lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i];
/// lower[0] and upper[n-1] are ignored.
template <class T = std::complex<double>>
struct TridiagonalSystem {
    std::vector<T> lower, diag, upper, rhs;

    explicit TridiagonalSystem(std::size_t n = 0) : lower(n), diag(n), upper(n), rhs(n) {}
    std::size_t size() const noexcept { return diag.size(); }
};

/// Solves in place into `x` using `scratch` for the modified upper diagonal.
/// No pivoting: the system must be diagonally dominant (or otherwise stable).
template <class T>
void solve_tridiagonal(std::span<const T> lower, std::span<const T> diag, std::span<const T> upper,
                       std::span<const T> rhs, std::span<T> x, std::span<T> scratch) {
    const std::size_t n = diag.size();
    if (lower.size() != n || upper.size() != n || rhs.size() != n || x.size() != n || scratch.size() != n)
        throw InvalidParameter("solve_tridiagonal: inconsistent array sizes");
    if (n == 0) return;

    T pivot = diag[0];
    if (pivot == T{}) throw SingularSystem("solve_tridiagonal: zero pivot in row 0");
    scratch[0] = upper[0] / pivot;
    x[0] = rhs[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = diag[i] - lower[i] * scratch[i - 1];
        if (pivot == T{}) throw SingularSystem("solve_tridiagonal: zero pivot in row " + std::to_string(i));
        scratch[i] = upper[i] / pivot;
        x[i] = (rhs[i] - lower[i] * x[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= scratch[i] * x[i + 1];
}

template <class T>
std::vector<T> solve_tridiagonal(const TridiagonalSystem<T>& sys) {
    const std::size_t n = sys.size();
    std::vector<T> x(n), scratch(n);
    solve_tridiagonal<T>(sys.lower, sys.diag, sys.upper, sys.rhs, x, scratch);
    return x;
}

/// max_i |(A x - rhs)_i| / max_i |rhs_i|
template <class T>
double relative_residual(const TridiagonalSystem<T>& sys, std::span<const T> x) {
    const std::size_t n = sys.size();
    double r_max = 0.0, b_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        T ax = sys.diag[i] * x[i];
        if (i > 0) ax += sys.lower[i] * x[i - 1];
        if (i + 1 < n) ax += sys.upper[i] * x[i + 1];
        r_max = std::max(r_max, std::abs(ax - sys.rhs[i]));
        b_max = std::max(b_max, std::abs(sys.rhs[i]));
    }
    return b_max > 0.0 ? r_max / b_max : r_max;
}

}  // namespace qrtrap
