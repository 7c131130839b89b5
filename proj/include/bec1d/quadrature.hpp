#pragma once

// Adaptive Gauss-Kronrod quadrature (thin wrapper over Boost.Math).

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <stdexcept>

namespace bec1d {

/// Integrate f over [a, b] adaptively; throws ConvergenceError-compatible
/// std::runtime_error if the a-posteriori error estimate exceeds abs_tol.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-10) {
    double err = 0.0;
    const double val = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        std::forward<F>(f), a, b, /*max_depth=*/15, /*tol=*/1e-12, &err);
    if (!(err <= abs_tol) && !(err <= abs_tol * std::abs(val)))
        throw std::runtime_error("integrate: quadrature error estimate " + std::to_string(err) +
                                 " above tolerance");
    return val;
}

}  // namespace bec1d
