#pragma once

#include <qrtrap/errors.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <string>

namespace qrtrap {

/// Adaptive 31-point Gauss-Kronrod integration of f over [a, b] (b may be
/// +infinity). Throws AccuracyError if the error estimate exceeds abs_tol.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-10) {
    double error = 0.0;
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, 1e-14, &error);
    if (!std::isfinite(value) || error > abs_tol)
        throw AccuracyError("quadrature did not reach tolerance: estimate " + std::to_string(error));
    return value;
}

}  // namespace qrtrap
