#pragma once

// Generalized Thomas-Fermi approximation (kinetic term dropped). The
// stationary relation C_omega h(eta) = mu - s^2 with eta = sqrt(1+2*lambda*Phi^2)
// and h(eta) = (3*eta - 1/eta)/2 is inverted either exactly (diagnostic) or
// after replacing h by one of two algebraic approximations, each yielding a
// density whose charge is 1 exactly when mu solves the matching scalar
// equation
//
//   (32/(135 C^2)) mu^{5/2} - c' sqrt(mu) = lambda,
//
// with c' = 2/3 (first variant) or 1/3 (second variant).

#include <cmath>
#include <stdexcept>
#include <string>

#include "bec1d/model.hpp"
#include "bec1d/quadrature.hpp"

namespace bec1d {

enum class TfVariant { first, second };

/// h(eta) = (3*eta - 1/eta)/2 on eta > 0.
inline double h_tf(double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("h_tf: eta must be > 0");
    return 0.5 * (3.0 * eta - 1.0 / eta);
}

/// Inverse of h_tf on the positive branch: (xi + sqrt(xi^2+3))/3, rewritten
/// as 1/(sqrt(xi^2+3) - xi) for xi < 0 to avoid cancellation.
inline double h_inverse(double xi) {
    const double r = std::sqrt(xi * xi + 3.0);
    return xi >= 0.0 ? (xi + r) / 3.0 : 1.0 / (r - xi);
}

namespace detail {
inline double tf_c_const(TfVariant v) { return v == TfVariant::first ? 1.0 / 3.0 : 2.0 / 3.0; }
inline double tf_c_prime(TfVariant v) { return v == TfVariant::first ? 2.0 / 3.0 : 1.0 / 3.0; }

// signed (unclamped) density inside the support; integrates to exactly 1
// over [-sqrt(mu), sqrt(mu)] when mu solves the matching scalar equation
inline double tf_density_signed(double s, double mu, double lambda, double c_omega,
                                TfVariant variant) {
    const double r = 1.0 - s * s / mu;
    const double q = 4.0 * mu * mu / (9.0 * c_omega * c_omega);
    return (q * r * r + tf_c_const(variant) - 1.0) / (2.0 * lambda);
}
}  // namespace detail

/// Approximated TF density Phi^2(s): clamped at zero where the algebraic
/// expression goes negative, zero outside the support |s| <= sqrt(mu).
inline double tf_density(double s, double mu, const ModelParams& p, TfVariant variant) {
    if (!(mu > 0.0)) throw std::invalid_argument("tf_density: mu must be > 0");
    if (!(p.lambda > 0.0)) throw std::invalid_argument("tf_density: lambda must be > 0");
    if (s * s > mu) return 0.0;
    const double rho2 = detail::tf_density_signed(s, mu, p.lambda, p.c_omega, variant);
    return rho2 > 0.0 ? rho2 : 0.0;
}

/// Exact (unexpanded) TF density from eta = h_inverse((mu - s^2)/C_omega);
/// diagnostic only, the scalar equations below use the two approximations.
inline double tf_density_exact(double s, double mu, const ModelParams& p) {
    if (!(mu > 0.0)) throw std::invalid_argument("tf_density_exact: mu must be > 0");
    if (!(p.lambda > 0.0)) throw std::invalid_argument("tf_density_exact: lambda must be > 0");
    const double eta = h_inverse((mu - s * s) / p.c_omega);
    const double rho2 = (eta * eta - 1.0) / (2.0 * p.lambda);
    return rho2 > 0.0 ? rho2 : 0.0;
}

namespace detail {
// startup cross-check of the hard-coded moment integral_0^1 (1-u^2)^2 du = 8/15
inline void check_tf_moment_once() {
    static const bool ok = [] {
        const double q =
            integrate([](double u) { return (1.0 - u * u) * (1.0 - u * u); }, 0.0, 1.0, 1e-12);
        return std::abs(q - 8.0 / 15.0) <= 1e-12;
    }();
    if (!ok) throw std::logic_error("thomas_fermi: moment integral cross-check failed");
}
}  // namespace detail

/// Quadrature value of integral_0^1 (1-u^2)^2 du; must equal 8/15.
inline double tf_moment_integral() {
    return integrate([](double u) { return (1.0 - u * u) * (1.0 - u * u); }, 0.0, 1.0, 1e-12);
}

/// Root of the TF scalar equation for mu, bracketed Newton to 1e-12.
/// The equation is negative at mu -> 0+ and eventually increasing, so the
/// physical root is the unique large one; the bracket expands from
/// mu0 = max(1, 0.5*(9 C^2 lambda * 15/32)^{2/5}).
inline double solve_mu_tf(double lambda, double c_omega, TfVariant variant) {
    if (!(lambda > 0.0)) throw std::invalid_argument("solve_mu_tf: lambda must be > 0");
    if (!(c_omega > 0.0)) throw std::invalid_argument("solve_mu_tf: c_omega must be > 0");
    detail::check_tf_moment_once();
    const double k = 32.0 / (135.0 * c_omega * c_omega);
    const double cp = detail::tf_c_prime(variant);
    auto g = [&](double mu) { return k * std::pow(mu, 2.5) - cp * std::sqrt(mu) - lambda; };
    auto dg = [&](double mu) { return 2.5 * k * std::pow(mu, 1.5) - 0.5 * cp / std::sqrt(mu); };

    double lo = std::max(1.0, 0.5 * std::pow(9.0 * c_omega * c_omega * lambda * 15.0 / 32.0, 0.4));
    double hi = lo;
    if (g(lo) > 0.0) {
        while (g(lo) > 0.0) {
            lo *= 0.5;
            if (lo < 1e-300)
                throw ConvergenceError("solve_mu_tf: bracket collapse (lambda = " +
                                       std::to_string(lambda) + ")");
        }
        hi = 2.0 * lo;
    }
    while (g(hi) < 0.0) {
        hi *= 2.0;
        if (hi > 1e300)
            throw ConvergenceError("solve_mu_tf: no upper bracket (lambda = " +
                                   std::to_string(lambda) + ")");
    }

    double mu = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double val = g(mu);
        if (val > 0.0) {
            hi = mu;
        } else {
            lo = mu;
        }
        double next = mu - val / dg(mu);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisection fallback
        if (std::abs(next - mu) <= 1e-12 * std::max(1.0, mu)) return next;
        mu = next;
    }
    throw ConvergenceError("solve_mu_tf: Newton failed to converge (lambda = " +
                           std::to_string(lambda) + ")");
}

/// Charge of the signed (unclamped) density over the exact support; equals 1
/// up to quadrature error when mu solves the matching scalar equation.
inline double tf_charge(double mu, const ModelParams& p, TfVariant variant) {
    if (!(mu > 0.0)) throw std::invalid_argument("tf_charge: mu must be > 0");
    if (!(p.lambda > 0.0)) throw std::invalid_argument("tf_charge: lambda must be > 0");
    const double half = std::sqrt(mu);
    return integrate(
        [&](double s) {
            return detail::tf_density_signed(s, mu, p.lambda, p.c_omega, variant);
        },
        -half, half, 1e-10);
}

struct TfResult {
    double mu_first = 0.0;
    double mu_second = 0.0;
    double lambda = 0.0;
    double c_omega = 1.0;
};

inline TfResult solve_tf(double lambda, double c_omega) {
    TfResult out;
    out.lambda = lambda;
    out.c_omega = c_omega;
    out.mu_first = solve_mu_tf(lambda, c_omega, TfVariant::first);
    out.mu_second = solve_mu_tf(lambda, c_omega, TfVariant::second);
    return out;
}

}  // namespace bec1d
