#pragma once

// Discrete functionals of gridded states. Conventions:
//  - kinetic energy is the quadratic form h <A4 u, u> on the Dirichlet
//    interior, so the energy gradient is exactly 2(A4 u + s^2 u + C f u);
//  - pointwise terms (charge, potential, interaction) use the composite
//    trapezoid over the full grid, which reduces to plain h-weights on the
//    interior when the boundary values vanish.

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "bec1d/grid.hpp"
#include "bec1d/model.hpp"
#include "bec1d/operators.hpp"
#include "bec1d/wavefunction.hpp"

namespace bec1d {

namespace detail {

inline void require_same_grid(const Wavefunction& a, const Wavefunction& b, const char* who) {
    if (!(a.grid == b.grid)) throw std::invalid_argument(std::string(who) + ": grid mismatch");
}

// min over nodes of 1 + 2*lambda*|psi|^2; cheap validity probe for lambda < 0
inline double min_sqrt_arg(const Wavefunction& psi, double lambda) {
    double mn = 1.0;
    for (const auto& z : psi.values) {
        const double t = 1.0 + 2.0 * lambda * std::norm(z);
        if (t < mn) mn = t;
    }
    return mn;
}

inline void require_valid(const Wavefunction& psi, const ModelParams& p, const char* who) {
    if (p.lambda >= 0.0) return;
    const double mn = min_sqrt_arg(psi, p.lambda);
    if (mn < eps_pos)
        throw ModelValidityError(std::string(who) + ": 1+2*lambda*|psi|^2 = " +
                                 std::to_string(mn) + " below eps_pos");
}

}  // namespace detail

/// Q(psi) = trapezoid of |psi|^2 over [-L, L].
inline double charge(const Wavefunction& psi) {
    const Grid& g = psi.grid;
    double acc = 0.5 * (std::norm(psi[0]) + std::norm(psi[g.n - 1]));
    for (int i = 1; i < g.n - 1; ++i) acc += std::norm(psi[i]);
    return g.h() * acc;
}

/// E(psi) = h<A4 u,u> + trapz(s^2|psi|^2 + C_omega*sqrt(1+2*lambda*|psi|^2)*|psi|^2).
inline double energy(const Wavefunction& psi, const ModelParams& p,
                     const KineticOperator& a) {
    if (!(a.grid() == psi.grid)) throw std::invalid_argument("energy: grid mismatch");
    detail::require_valid(psi, p, "energy");
    const Grid& g = psi.grid;
    const int m = g.interior();
    std::vector<std::complex<double>> u(psi.values.begin() + 1, psi.values.end() - 1);
    std::vector<std::complex<double>> au(static_cast<size_t>(m));
    a.apply<std::complex<double>>(u, au);
    double kin = 0.0;
    for (int i = 0; i < m; ++i)
        kin += (au[static_cast<size_t>(i)] * std::conj(u[static_cast<size_t>(i)])).real();
    double pot = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const double s = g.node(i);
        const double rho2 = std::norm(psi[i]);
        const double w = (i == 0 || i == g.n - 1) ? 0.5 : 1.0;
        pot += w * (s * s * rho2 + p.c_omega * std::sqrt(1.0 + 2.0 * p.lambda * rho2) * rho2);
    }
    return g.h() * (kin + pot);
}

inline double energy(const Wavefunction& psi, const ModelParams& p) {
    return energy(psi, p, KineticOperator(psi.grid));
}

/// mu(psi) = [h<A4 u,u> + trapz((s^2 + C_omega f_lambda(|psi|))|psi|^2)] / Q(psi).
inline double chemical_potential(const Wavefunction& psi, const ModelParams& p,
                                 const KineticOperator& a) {
    if (!(a.grid() == psi.grid)) throw std::invalid_argument("chemical_potential: grid mismatch");
    detail::require_valid(psi, p, "chemical_potential");
    const Grid& g = psi.grid;
    const int m = g.interior();
    std::vector<std::complex<double>> u(psi.values.begin() + 1, psi.values.end() - 1);
    std::vector<std::complex<double>> au(static_cast<size_t>(m));
    a.apply<std::complex<double>>(u, au);
    double kin = 0.0;
    for (int i = 0; i < m; ++i)
        kin += (au[static_cast<size_t>(i)] * std::conj(u[static_cast<size_t>(i)])).real();
    double pot = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const double s = g.node(i);
        const double rho2 = std::norm(psi[i]);
        const double w = (i == 0 || i == g.n - 1) ? 0.5 : 1.0;
        pot += w * (s * s + p.c_omega * detail::f_of_rho2(rho2, p.lambda)) * rho2;
    }
    return g.h() * (kin + pot) / charge(psi);
}

inline double chemical_potential(const Wavefunction& psi, const ModelParams& p) {
    return chemical_potential(psi, p, KineticOperator(psi.grid));
}

struct MuForms {
    double first = 0.0;   // Rayleigh quotient of the stationary operator
    double second = 0.0;  // E + C_omega*lambda*trapz(|psi|^4/sqrt(1+2*lambda*|psi|^2))
    double gap() const { return first - second; }
    bool consistent(double tol) const { return std::abs(gap()) <= tol; }
};

/// Both algebraic forms of mu; they agree identically in the continuum and
/// to discretization accuracy on the grid (for normalized states).
inline MuForms mu_forms(const Wavefunction& psi, const ModelParams& p) {
    const KineticOperator a(psi.grid);
    MuForms out;
    out.first = chemical_potential(psi, p, a);
    const Grid& g = psi.grid;
    double corr = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const double rho2 = std::norm(psi[i]);
        const double w = (i == 0 || i == g.n - 1) ? 0.5 : 1.0;
        corr += w * rho2 * rho2 / std::sqrt(1.0 + 2.0 * p.lambda * rho2);
    }
    out.second = energy(psi, p, a) + p.c_omega * p.lambda * g.h() * corr;
    return out;
}

/// r = A4 u + s^2 u + C_omega f_lambda(|psi|) u - mu u on the interior,
/// returned with zero boundary entries.
inline Wavefunction residual(const Wavefunction& psi, double mu, const ModelParams& p,
                             const KineticOperator& a) {
    if (!(a.grid() == psi.grid)) throw std::invalid_argument("residual: grid mismatch");
    detail::require_valid(psi, p, "residual");
    const Grid& g = psi.grid;
    const int m = g.interior();
    std::vector<std::complex<double>> u(psi.values.begin() + 1, psi.values.end() - 1);
    std::vector<std::complex<double>> au(static_cast<size_t>(m));
    a.apply<std::complex<double>>(u, au);
    Wavefunction r(g);
    for (int i = 0; i < m; ++i) {
        const double s = g.node(i + 1);
        const double rho2 = std::norm(u[static_cast<size_t>(i)]);
        r[i + 1] = au[static_cast<size_t>(i)] +
                   (s * s + p.c_omega * detail::f_of_rho2(rho2, p.lambda) - mu) *
                       u[static_cast<size_t>(i)];
    }
    return r;
}

inline Wavefunction residual(const Wavefunction& psi, double mu, const ModelParams& p) {
    return residual(psi, mu, p, KineticOperator(psi.grid));
}

/// Discrete L^2 norm sqrt(h * sum |.|^2) over the interior.
inline double l2_norm(const Wavefunction& psi) {
    double acc = 0.0;
    for (int i = 1; i < psi.grid.n - 1; ++i) acc += std::norm(psi[i]);
    return std::sqrt(psi.grid.h() * acc);
}

inline double residual_norm(const Wavefunction& psi, double mu, const ModelParams& p,
                            const KineticOperator& a) {
    return l2_norm(residual(psi, mu, p, a));
}

/// Gradient of E at psi under the h-weighted interior inner product:
/// 2(A4 u + s^2 u + C_omega f_lambda(|psi|) u), zero on the boundary.
inline Wavefunction energy_gradient(const Wavefunction& psi, const ModelParams& p) {
    Wavefunction grad = residual(psi, 0.0, p, KineticOperator(psi.grid));
    for (auto& z : grad.values) z *= 2.0;
    return grad;
}

/// Energy inner product <v,w>_X = h(<A4 v,w> + sum s^2 v conj(w)) over the
/// interior; the norm it induces controls both the kinetic and trap terms.
inline std::complex<double> x_inner(const Wavefunction& v, const Wavefunction& w,
                                    const KineticOperator& a) {
    detail::require_same_grid(v, w, "x_inner");
    if (!(a.grid() == v.grid)) throw std::invalid_argument("x_inner: grid mismatch");
    const Grid& g = v.grid;
    const int m = g.interior();
    std::vector<std::complex<double>> u(v.values.begin() + 1, v.values.end() - 1);
    std::vector<std::complex<double>> au(static_cast<size_t>(m));
    a.apply<std::complex<double>>(u, au);
    std::complex<double> acc(0.0, 0.0);
    for (int i = 0; i < m; ++i) {
        const double s = g.node(i + 1);
        acc += (au[static_cast<size_t>(i)] + s * s * u[static_cast<size_t>(i)]) *
               std::conj(w[i + 1]);
    }
    return g.h() * acc;
}

inline std::complex<double> x_inner(const Wavefunction& v, const Wavefunction& w) {
    return x_inner(v, w, KineticOperator(v.grid));
}

inline double x_norm(const Wavefunction& v, const KineticOperator& a) {
    const double n2 = x_inner(v, v, a).real();
    return std::sqrt(n2 > 0.0 ? n2 : 0.0);
}

inline double x_norm(const Wavefunction& v) { return x_norm(v, KineticOperator(v.grid)); }

}  // namespace bec1d
