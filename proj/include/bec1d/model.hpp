#pragma once

// Model parameters and the pointwise nonlinearity of the effective 1D
// Gross-Pitaevskii model with harmonic trapping,
//
//   -phi'' + s^2 phi + C_omega f_lambda(|phi|) phi = mu phi,
//   f_lambda(rho) = (1 + 3 lambda rho^2) / sqrt(1 + 2 lambda rho^2).
//
// Everything here is a pure function of its arguments.

#include <cmath>
#include <stdexcept>
#include <string>

namespace bec1d {

// Raised when 1 + 2*lambda*|psi|^2 drops below eps_pos at some node
// (attractive regime leaving the model's validity domain).
struct ModelValidityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when an iterative method fails to reach its target (solver
// non-convergence, lost root bracket, tail underflow, ...).
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Hard lower bound for the square-root argument in gridded evaluations.
inline constexpr double eps_pos = 1e-10;

struct ModelParams {
    double lambda = 0.0;   // dimensionless interaction strength, may be negative
    double c_omega = 1.0;  // dimensionless transverse coupling, > 0

    void validate() const {
        if (!(c_omega > 0.0))
            throw std::invalid_argument("ModelParams: c_omega must be > 0");
        if (!std::isfinite(lambda) || !std::isfinite(c_omega))
            throw std::invalid_argument("ModelParams: parameters must be finite");
    }
    bool operator==(const ModelParams&) const = default;
};

// Laboratory-frame inputs; reduced to ModelParams by dimensionless_from_physical.
struct PhysicalParams {
    double hbar = 1.0;
    double m = 1.0;           // atomic mass
    double omega1 = 1.0;      // axial trap frequency
    double omega_perp = 1.0;  // transverse trap frequency
    double alpha = 0.5;       // transverse coupling constant of the effective model
    double gamma = 1.0;       // interaction constant of the effective model
    double a = 0.0;           // s-wave scattering length (signed)
    long long n_atoms = 1;

    void validate() const {
        if (!(hbar > 0 && m > 0 && omega1 > 0 && omega_perp > 0 && gamma > 0 &&
              alpha > 0 && n_atoms > 0))
            throw std::invalid_argument(
                "PhysicalParams: hbar, m, omega1, omega_perp, alpha, gamma, N must be > 0");
    }
    bool operator==(const PhysicalParams&) const = default;
};

/// Unit reduction: l0 = sqrt(hbar/(m*omega1)), lambda = gamma*a*N/l0,
/// C_omega = 2*omega_perp*alpha/omega1.
inline ModelParams dimensionless_from_physical(const PhysicalParams& p) {
    p.validate();
    const double l0 = std::sqrt(p.hbar / (p.m * p.omega1));
    ModelParams out;
    out.lambda = p.gamma * p.a * static_cast<double>(p.n_atoms) / l0;
    out.c_omega = 2.0 * p.omega_perp * p.alpha / p.omega1;
    out.validate();
    return out;
}

namespace detail {
// Hot-path form taking rho^2 directly; caller guarantees 1+2*lambda*rho2 > 0.
inline double f_of_rho2(double rho2, double lambda) {
    const double t = 1.0 + 2.0 * lambda * rho2;
    return (1.0 + 3.0 * lambda * rho2) / std::sqrt(t);
}
}  // namespace detail

/// f_lambda(rho) = (1+3*lambda*rho^2)/sqrt(1+2*lambda*rho^2).
inline double f_lambda(double rho, const ModelParams& p) {
    const double rho2 = rho * rho;
    const double t = 1.0 + 2.0 * p.lambda * rho2;
    if (t <= 0.0)
        throw std::domain_error("f_lambda: 1+2*lambda*rho^2 <= 0 (rho=" + std::to_string(rho) +
                                ", lambda=" + std::to_string(p.lambda) + ")");
    return (1.0 + 3.0 * p.lambda * rho2) / std::sqrt(t);
}

/// G_lambda(rho) = sqrt(1+2*lambda*rho^2)*rho^2; dG/drho = 2 f_lambda(rho) rho.
inline double g_lambda(double rho, const ModelParams& p) {
    const double rho2 = rho * rho;
    const double t = 1.0 + 2.0 * p.lambda * rho2;
    if (t < 0.0)
        throw std::domain_error("g_lambda: 1+2*lambda*rho^2 < 0 (rho=" + std::to_string(rho) +
                                ", lambda=" + std::to_string(p.lambda) + ")");
    return std::sqrt(t) * rho2;
}

}  // namespace bec1d
