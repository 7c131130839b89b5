#pragma once

// Gaussian variational approximation. Trial family
// psi_kappa(s) = (kappa/pi)^{1/4} exp(-kappa s^2/2), kappa > 0; the trial
// energy is expanded in a Taylor series whose coefficients a_n have a
// closed form, and the stationarity condition truncated at order 6 is the
// scalar root problem f(lambda, kappa) = 1 with
//
//   f = a2 l k^{3/2} + (1 + 2 a3 l^2) k^2 + 3 a4 l^3 k^{5/2}
//       + 4 a5 l^4 k^3 + 5 a6 l^5 k^{7/2}.
//
// The general term is (n-1) a_n lambda^{n-1} kappa^{(n+1)/2}; the series
// form forces lambda^5 on the n=6 term. A compatibility flag restores the
// lambda^3 variant for cross-checking against older tabulations.
//
// E_app and mu_app are always evaluated from the exact integrals at the
// chosen kappa, not from the truncated series.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bec1d/model.hpp"
#include "bec1d/quadrature.hpp"

namespace bec1d {

/// a_n = (-1)^n/n! * (2n-4)!/(n-2)! * sqrt(n)/2^{n-2} * (1/pi)^{(n-1)/2}, n >= 2.
inline double taylor_coefficient(int n) {
    if (n < 2) throw std::invalid_argument("taylor_coefficient: n must be >= 2");
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    const double nd = static_cast<double>(n);
    const double fact_ratio =
        std::tgamma(2.0 * nd - 3.0) / std::tgamma(nd - 1.0);  // (2n-4)!/(n-2)!
    return sign / std::tgamma(nd + 1.0) * fact_ratio * std::sqrt(nd) /
           std::pow(2.0, nd - 2.0) * std::pow(1.0 / std::numbers::pi, 0.5 * (nd - 1.0));
}

/// Order-6 stationarity polynomial; kappa > 0 required. With
/// cubic_last_term the n=6 term uses lambda^3 instead of lambda^5.
inline double root_function(double lambda, double kappa, bool cubic_last_term = false) {
    if (!(kappa >= 0.0)) throw std::invalid_argument("root_function: kappa must be >= 0");
    const double a2 = taylor_coefficient(2), a3 = taylor_coefficient(3),
                 a4 = taylor_coefficient(4), a5 = taylor_coefficient(5),
                 a6 = taylor_coefficient(6);
    const double sk = std::sqrt(kappa);
    const double l6 = cubic_last_term ? std::pow(lambda, 3) : std::pow(lambda, 5);
    return a2 * lambda * kappa * sk + (1.0 + 2.0 * a3 * lambda * lambda) * kappa * kappa +
           3.0 * a4 * std::pow(lambda, 3) * kappa * kappa * sk +
           4.0 * a5 * std::pow(lambda, 4) * kappa * kappa * kappa +
           5.0 * a6 * l6 * kappa * kappa * kappa * sk;
}

inline double root_function_dkappa(double lambda, double kappa, bool cubic_last_term = false) {
    const double a2 = taylor_coefficient(2), a3 = taylor_coefficient(3),
                 a4 = taylor_coefficient(4), a5 = taylor_coefficient(5),
                 a6 = taylor_coefficient(6);
    const double sk = std::sqrt(kappa);
    const double l6 = cubic_last_term ? std::pow(lambda, 3) : std::pow(lambda, 5);
    return 1.5 * a2 * lambda * sk + 2.0 * (1.0 + 2.0 * a3 * lambda * lambda) * kappa +
           7.5 * a4 * std::pow(lambda, 3) * kappa * sk +
           12.0 * a5 * std::pow(lambda, 4) * kappa * kappa +
           17.5 * a6 * l6 * kappa * kappa * sk;
}

inline double root_function_dlambda(double lambda, double kappa, bool cubic_last_term = false) {
    const double a2 = taylor_coefficient(2), a3 = taylor_coefficient(3),
                 a4 = taylor_coefficient(4), a5 = taylor_coefficient(5),
                 a6 = taylor_coefficient(6);
    const double sk = std::sqrt(kappa);
    const double dl6 = cubic_last_term ? 3.0 * lambda * lambda : 5.0 * std::pow(lambda, 4);
    return a2 * kappa * sk + 4.0 * a3 * lambda * kappa * kappa +
           9.0 * a4 * lambda * lambda * kappa * kappa * sk +
           16.0 * a5 * std::pow(lambda, 3) * kappa * kappa * kappa +
           5.0 * a6 * dl6 * kappa * kappa * kappa * sk;
}

/// Convergence domain of the underlying series: kappa < pi/(4 lambda^2).
inline bool in_convergence_domain(double lambda, double kappa) {
    if (lambda == 0.0) return true;
    return kappa < std::numbers::pi / (4.0 * lambda * lambda);
}

struct KappaRoot {
    double kappa = 1.0;
    bool in_domain = true;
};

/// Root of f(lambda, kappa) = 1 on (0, 10]: bracket by uniform scan, then
/// bisection, then Newton polish, to 1e-12. Throws ConvergenceError with the
/// scan summary when no bracket exists (attractive breakdown).
inline KappaRoot solve_kappa_root(double lambda, bool cubic_last_term = false) {
    const double kappa_max = 10.0;
    const int scan = 2000;
    auto g = [&](double k) { return root_function(lambda, k, cubic_last_term) - 1.0; };

    double lo = 0.0, hi = 0.0;
    double prev_k = kappa_max / scan;
    double prev_g = g(prev_k);
    double gmin = prev_g, gmax = prev_g;
    for (int j = 2; j <= scan; ++j) {
        const double k = kappa_max * j / scan;
        const double gk = g(k);
        gmin = std::min(gmin, gk);
        gmax = std::max(gmax, gk);
        if (prev_g == 0.0 || prev_g * gk < 0.0) {
            lo = prev_k;
            hi = k;
            break;
        }
        prev_k = k;
        prev_g = gk;
    }
    if (hi == 0.0)
        throw ConvergenceError(
            "solve_kappa_root: no sign change of f(lambda,kappa)-1 on (0, 10] at lambda = " +
            std::to_string(lambda) + " (scanned " + std::to_string(scan) +
            " points, f-1 in [" + std::to_string(gmin) + ", " + std::to_string(gmax) + "])");

    double glo = g(lo);
    for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (gm == 0.0) {
            lo = hi = mid;
            break;
        }
        if (glo * gm < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            glo = gm;
        }
    }
    double k = 0.5 * (lo + hi);
    for (int it = 0; it < 8; ++it) {
        const double gk = g(k);
        if (std::abs(gk) < 1e-13) break;
        const double dg = root_function_dkappa(lambda, k, cubic_last_term);
        if (dg == 0.0) break;
        const double knext = k - gk / dg;
        if (!(knext > 0.0)) break;
        k = knext;
    }
    return {k, in_convergence_domain(lambda, k)};
}

/// RK4 continuation of dkappa/dlambda = -f_lambda/f_kappa from kappa(0)=1.
/// Negative lambda_max integrates toward attraction. Aborts on a derivative
/// singularity with the lambda reached.
inline std::vector<std::pair<double, double>> solve_kappa_ode(double lambda_max, int steps,
                                                              bool cubic_last_term = false) {
    std::vector<std::pair<double, double>> table;
    table.emplace_back(0.0, 1.0);
    if (lambda_max == 0.0) return table;
    if (steps < 1) throw std::invalid_argument("solve_kappa_ode: steps must be >= 1");
    const double dl = lambda_max / steps;
    auto rhs = [&](double l, double k) {
        const double dk = root_function_dkappa(l, k, cubic_last_term);
        if (std::abs(dk) < 1e-10)
            throw ConvergenceError("solve_kappa_ode: derivative singularity at lambda = " +
                                   std::to_string(l));
        return -root_function_dlambda(l, k, cubic_last_term) / dk;
    };
    double l = 0.0, k = 1.0;
    for (int i = 0; i < steps; ++i) {
        const double k1 = rhs(l, k);
        const double k2 = rhs(l + 0.5 * dl, k + 0.5 * dl * k1);
        const double k3 = rhs(l + 0.5 * dl, k + 0.5 * dl * k2);
        const double k4 = rhs(l + dl, k + dl * k3);
        k += dl / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        l = dl * (i + 1);
        if (!(k > 0.0))
            throw ConvergenceError("solve_kappa_ode: kappa left (0, inf) at lambda = " +
                                   std::to_string(l));
        table.emplace_back(l, k);
    }
    return table;
}

namespace detail {
// |psi_kappa|^2 at s
inline double gauss_density(double s, double kappa) {
    return std::sqrt(kappa / std::numbers::pi) * std::exp(-kappa * s * s);
}
inline void require_integrand_valid(double lambda, double kappa, const char* who) {
    // the square-root argument is minimal at s = 0
    const double t0 = 1.0 + 2.0 * lambda * gauss_density(0.0, kappa);
    if (t0 <= 0.0)
        throw std::domain_error(std::string(who) +
                                ": 1+2*lambda*psi^2 <= 0 at s=0 (lambda too attractive)");
}
}  // namespace detail

/// Trial energy, exact integrals: (kappa + 1/kappa)/2 + C_omega * integral of
/// sqrt(1+2*lambda*psi_kappa^2) psi_kappa^2.
inline double energy_app(double lambda, double kappa, double c_omega = 1.0) {
    if (!(kappa > 0.0)) throw std::invalid_argument("energy_app: kappa must be > 0");
    detail::require_integrand_valid(lambda, kappa, "energy_app");
    const double w = 12.0 / std::sqrt(kappa);
    const double integral = integrate(
        [&](double s) {
            const double rho2 = detail::gauss_density(s, kappa);
            return std::sqrt(1.0 + 2.0 * lambda * rho2) * rho2;
        },
        -w, w, 1e-10);
    return 0.5 * (kappa + 1.0 / kappa) + c_omega * integral;
}

/// mu_app = E_app + C_omega*lambda * integral of psi_kappa^4/sqrt(1+2*lambda*psi_kappa^2).
inline double mu_app(double lambda, double kappa, double c_omega = 1.0) {
    if (!(kappa > 0.0)) throw std::invalid_argument("mu_app: kappa must be > 0");
    detail::require_integrand_valid(lambda, kappa, "mu_app");
    const double w = 12.0 / std::sqrt(kappa);
    const double integral = integrate(
        [&](double s) {
            const double rho2 = detail::gauss_density(s, kappa);
            return rho2 * rho2 / std::sqrt(1.0 + 2.0 * lambda * rho2);
        },
        -w, w, 1e-10);
    return energy_app(lambda, kappa, c_omega) + c_omega * lambda * integral;
}

/// Series-truncated trial energy
/// (kappa+1/kappa)/2 + C_omega (1 + sum_{n=2}^{order} a_n lambda^{n-1} kappa^{(n-1)/2}).
inline double energy_taylor(double lambda, double kappa, double c_omega = 1.0, int order = 6) {
    if (!(kappa > 0.0)) throw std::invalid_argument("energy_taylor: kappa must be > 0");
    if (order < 2) throw std::invalid_argument("energy_taylor: order must be >= 2");
    double sum = 1.0;
    for (int n = 2; n <= order; ++n)
        sum += taylor_coefficient(n) * std::pow(lambda, n - 1) * std::pow(kappa, 0.5 * (n - 1));
    return 0.5 * (kappa + 1.0 / kappa) + c_omega * sum;
}

struct VariationalResult {
    double kappa = 1.0;
    double e_app = 0.0;
    double mu_app = 0.0;
    int order = 6;
    bool in_convergence_domain = true;
};

/// Full pipeline at params.lambda: order-6 root for kappa, then exact
/// E_app/mu_app with params.c_omega.
inline VariationalResult variational_solve(const ModelParams& params,
                                           bool cubic_last_term = false) {
    params.validate();
    const KappaRoot root = solve_kappa_root(params.lambda, cubic_last_term);
    VariationalResult out;
    out.kappa = root.kappa;
    out.in_convergence_domain = root.in_domain;
    out.e_app = energy_app(params.lambda, root.kappa, params.c_omega);
    out.mu_app = mu_app(params.lambda, root.kappa, params.c_omega);
    out.order = 6;
    return out;
}

}  // namespace bec1d
