#pragma once

// Constrained ground-state solver: semi-implicit normalized gradient flow
// for E_lambda on the unit sphere of L^2.
//
// One step from psi^n with mu^n = mu(psi^n):
//
//   psi* = (I + dt*A4)^{-1} [ (1 + dt*mu^n) psi^n - dt*(s^2 + C f(|psi^n|)) psi^n ],
//   psi^{n+1} = |psi*| / ||psi*||.
//
// The Rayleigh shift (1 + dt*mu^n) keeps the fixed point of the iteration
// exactly at the discrete eigenpair (A4 + V)phi = mu*phi, so the residual
// can be driven to the stopping tolerance instead of stalling at
// O(dt*mu*residual). Energy descent is enforced per step; a violation
// halves dt and retries.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "bec1d/functionals.hpp"
#include "bec1d/grid.hpp"
#include "bec1d/model.hpp"
#include "bec1d/operators.hpp"
#include "bec1d/wavefunction.hpp"

namespace bec1d {

struct SolverOptions {
    Grid grid{12.0, 2001};
    double dt = 1e-3;
    double tol_residual = 1e-8;
    long max_iters = 200000;

    void validate() const {
        grid.validate();
        if (!(dt > 0.0)) throw std::invalid_argument("SolverOptions: dt must be > 0");
        if (!(tol_residual > 0.0))
            throw std::invalid_argument("SolverOptions: tol_residual must be > 0");
        if (max_iters < 1) throw std::invalid_argument("SolverOptions: max_iters must be >= 1");
    }
};

struct GroundStateResult {
    ModelParams params;
    Wavefunction phi;          // real, positive, normalized
    double e_min = 0.0;
    double mu = 0.0;
    double residual_norm = 0.0;
    long iterations = 0;
    double dt_final = 0.0;     // dt after any descent-triggered halvings
};

namespace detail {

// energy and Rayleigh quotient of a normalized nonnegative interior vector
struct EnergyMu {
    double e;
    double mu;
};

inline EnergyMu energy_mu_interior(const std::vector<double>& u, const std::vector<double>& au,
                                   const std::vector<double>& s2, double h,
                                   const ModelParams& p) {
    double kin = 0.0, pot_e = 0.0, pot_mu = 0.0;
    const size_t m = u.size();
    for (size_t i = 0; i < m; ++i) {
        const double rho2 = u[i] * u[i];
        const double t = std::sqrt(1.0 + 2.0 * p.lambda * rho2);
        kin += au[i] * u[i];
        pot_e += (s2[i] + p.c_omega * t) * rho2;
        pot_mu += (s2[i] + p.c_omega * (1.0 + 3.0 * p.lambda * rho2) / t) * rho2;
    }
    return {h * (kin + pot_e), h * (kin + pot_mu)};
}

inline void check_validity_interior(const std::vector<double>& u, const ModelParams& p,
                                    const char* who) {
    if (p.lambda >= 0.0) return;
    double mn = 1.0;
    for (double v : u) {
        const double t = 1.0 + 2.0 * p.lambda * v * v;
        if (t < mn) mn = t;
    }
    if (mn < eps_pos)
        throw ModelValidityError(std::string(who) + ": 1+2*lambda*|psi|^2 reached " +
                                 std::to_string(mn));
}

inline void enforce_ground_invariants(const GroundStateResult& r, double tol_residual) {
    const Grid& g = r.phi.grid;
    const int n = g.n;
    const double q = charge(r.phi);
    if (std::abs(q - 1.0) > 1e-10)
        throw ConvergenceError("ground state: |Q-1| = " + std::to_string(std::abs(q - 1.0)));
    if (std::abs(r.phi[0]) > 1e-8 || std::abs(r.phi[n - 1]) > 1e-8)
        throw ConvergenceError("ground state: boundary value above 1e-8");
    for (int i = 2; i <= n - 3; ++i)
        if (!(r.phi[i].real() > 0.0))
            throw ConvergenceError("ground state: positivity lost at s = " +
                                   std::to_string(g.node(i)));
    double sym = 0.0;
    for (int i = 0; i < n; ++i)
        sym = std::max(sym, std::abs(r.phi[i].real() - r.phi[n - 1 - i].real()));
    if (sym > 1e-8)
        throw ConvergenceError("ground state: symmetry defect " + std::to_string(sym));
    const int mid = (n - 1) / 2;
    for (int i = mid; i + 1 < n; ++i)
        if (r.phi[i + 1].real() > r.phi[i].real() + 1e-10)
            throw ConvergenceError("ground state: profile not nonincreasing on [0, L]");
    // the discrete mu may sit below the continuum level by O(h^4)
    const double h = g.h();
    const double slack = std::max(tol_residual, h * h * h * h);
    if (r.params.lambda >= 0.0 && r.mu < 1.0 + r.params.c_omega - slack)
        throw ConvergenceError("ground state: mu below 1 + c_omega - tol");
}

}  // namespace detail

/// Minimize E_lambda over normalized states. init defaults to the unit
/// Gaussian; a supplied init is projected to |.| and renormalized first.
inline GroundStateResult solve_ground_state(const ModelParams& params, const SolverOptions& opts,
                                            const std::optional<Wavefunction>& init = {}) {
    params.validate();
    opts.validate();
    const Grid& g = opts.grid;
    const int m = g.interior();
    const double h = g.h();

    std::vector<double> u(static_cast<size_t>(m));
    if (init) {
        if (!(init->grid == g))
            throw std::invalid_argument("solve_ground_state: init grid mismatch");
        for (int i = 0; i < m; ++i) u[static_cast<size_t>(i)] = std::abs((*init)[i + 1]);
    } else {
        const Wavefunction g0 = gaussian(g, 1.0);
        for (int i = 0; i < m; ++i) u[static_cast<size_t>(i)] = g0[i + 1].real();
    }
    {
        double q = 0.0;
        for (double v : u) q += v * v;
        q *= h;
        if (!(q > 0.0)) throw std::invalid_argument("solve_ground_state: init has zero charge");
        const double inv = 1.0 / std::sqrt(q);
        for (double& v : u) v *= inv;
    }
    detail::check_validity_interior(u, params, "solve_ground_state(init)");

    std::vector<double> s2(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        const double s = g.node(i + 1);
        s2[static_cast<size_t>(i)] = s * s;
    }

    const KineticOperator a(g);
    double dt = opts.dt;
    ImplicitStep step(a, dt);

    std::vector<double> au(static_cast<size_t>(m)), rhs(static_cast<size_t>(m)),
        aw(static_cast<size_t>(m));
    a.apply<double>(u, au);
    detail::EnergyMu em = detail::energy_mu_interior(u, au, s2, h, params);

    long iters = 0;
    double res = 0.0;
    for (;; ++iters) {
        // residual of the current iterate at its own Rayleigh quotient
        double acc = 0.0;
        for (size_t i = 0; i < u.size(); ++i) {
            const double rho2 = u[i] * u[i];
            const double f = detail::f_of_rho2(rho2, params.lambda);
            const double r = au[i] + (s2[i] + params.c_omega * f - em.mu) * u[i];
            acc += r * r;
        }
        res = std::sqrt(h * acc);
        if (res < opts.tol_residual) break;
        if (iters >= opts.max_iters)
            throw ConvergenceError("solve_ground_state: max_iters = " +
                                   std::to_string(opts.max_iters) + " reached, residual = " +
                                   std::to_string(res));

        // one flow step; halve dt until the energy decreases
        for (;;) {
            for (size_t i = 0; i < u.size(); ++i) {
                const double f = detail::f_of_rho2(u[i] * u[i], params.lambda);
                rhs[i] = (1.0 + dt * em.mu) * u[i] - dt * (s2[i] + params.c_omega * f) * u[i];
            }
            step.solve(rhs);
            double q = 0.0;
            for (double& v : rhs) {
                v = std::abs(v);
                q += v * v;
            }
            q *= h;
            const double inv = 1.0 / std::sqrt(q);
            for (double& v : rhs) v *= inv;
            detail::check_validity_interior(rhs, params, "solve_ground_state");
            a.apply<double>(rhs, aw);
            const detail::EnergyMu em_new =
                detail::energy_mu_interior(rhs, aw, s2, h, params);
            if (em_new.e <= em.e + 1e-12) {
                u.swap(rhs);
                au.swap(aw);
                em = em_new;
                break;
            }
            dt *= 0.5;
            if (dt < 1e-14)
                throw ConvergenceError("solve_ground_state: dt underflow during descent control");
            step = ImplicitStep(a, dt);
        }
    }

    GroundStateResult out;
    out.params = params;
    out.phi = Wavefunction(g);
    for (int i = 0; i < m; ++i) out.phi[i + 1] = u[static_cast<size_t>(i)];
    out.e_min = em.e;
    out.mu = em.mu;
    out.residual_norm = res;
    out.iterations = iters;
    out.dt_final = dt;
    detail::enforce_ground_invariants(out, opts.tol_residual);
    return out;
}

struct SweepResult {
    std::vector<double> lambdas;
    std::vector<double> e_min;
    std::vector<double> mu_min;
    std::vector<double> residual_norms;
    std::vector<long> iterations;
    double c_omega = 1.0;
};

/// Sequential warm-started solves along a strictly increasing lambda array.
inline SweepResult sweep_lambda(const std::vector<double>& lambdas, const ModelParams& base,
                                const SolverOptions& opts) {
    if (lambdas.empty()) throw std::invalid_argument("sweep_lambda: empty lambda array");
    for (size_t i = 1; i < lambdas.size(); ++i)
        if (!(lambdas[i] > lambdas[i - 1]))
            throw std::invalid_argument("sweep_lambda: lambdas must be strictly increasing");
    SweepResult out;
    out.lambdas = lambdas;
    out.c_omega = base.c_omega;
    std::optional<Wavefunction> warm;
    for (double lam : lambdas) {
        ModelParams p = base;
        p.lambda = lam;
        GroundStateResult r;
        try {
            r = solve_ground_state(p, opts, warm);
        } catch (const ConvergenceError& e) {
            throw ConvergenceError("sweep_lambda at lambda = " + std::to_string(lam) + ": " +
                                   e.what());
        }
        out.e_min.push_back(r.e_min);
        out.mu_min.push_back(r.mu);
        out.residual_norms.push_back(r.residual_norm);
        out.iterations.push_back(r.iterations);
        warm = r.phi;
    }
    return out;
}

struct RelationReport {
    double max_derivative_rel_err = 0.0;  // d(lambda*E)/dlambda vs mu
    double max_integral_rel_err = 0.0;    // lambda*E vs integral of mu
    bool mu_ge_e = true;
    std::vector<std::string> violations;
    bool pass(double tol = 1e-3) const {
        return max_derivative_rel_err < tol && max_integral_rel_err < tol && mu_ge_e;
    }
};

/// Cross-checks the sweep against the exact relations
/// mu = d(lambda*E)/dlambda and lambda*E(lambda) = integral_0^lambda mu,
/// plus mu >= E pointwise for lambda > 0.
inline RelationReport verify_mu_energy_relations(const SweepResult& sweep) {
    const size_t n = sweep.lambdas.size();
    if (n < 5)
        throw std::invalid_argument("verify_mu_energy_relations: need at least 5 sweep points");
    RelationReport rep;
    const auto& lam = sweep.lambdas;
    const auto& e = sweep.e_min;
    const auto& mu = sweep.mu_min;

    for (size_t i = 1; i + 1 < n; ++i) {
        const double d = (lam[i + 1] * e[i + 1] - lam[i - 1] * e[i - 1]) / (lam[i + 1] - lam[i - 1]);
        const double rel = std::abs(d - mu[i]) / std::max(1.0, std::abs(mu[i]));
        rep.max_derivative_rel_err = std::max(rep.max_derivative_rel_err, rel);
        if (rel >= 1e-3)
            rep.violations.push_back("derivative mismatch at lambda = " + std::to_string(lam[i]));
    }

    // lambda*E(lambda) - lambda0*E(lambda0) = trapezoid of mu over the sweep
    double integral = 0.0;
    for (size_t i = 1; i < n; ++i) {
        integral += 0.5 * (mu[i] + mu[i - 1]) * (lam[i] - lam[i - 1]);
        const double lhs = lam[i] * e[i] - lam[0] * e[0];
        const double rel = std::abs(lhs - integral) / std::max(1.0, std::abs(lhs));
        rep.max_integral_rel_err = std::max(rep.max_integral_rel_err, rel);
        if (rel >= 1e-3)
            rep.violations.push_back("integral mismatch at lambda = " + std::to_string(lam[i]));
    }

    for (size_t i = 0; i < n; ++i) {
        if (lam[i] > 0.0 && mu[i] < e[i] - 1e-10) {
            rep.mu_ge_e = false;
            rep.violations.push_back("mu < E at lambda = " + std::to_string(lam[i]));
        }
    }
    return rep;
}

struct TailFit {
    double k0 = 0.0;          // Gaussian decay rate: phi ~ c * exp(-k0 s^2/2)
    double c = 0.0;           // prefactor
    double fit_residual = 0.0;  // rms of the log-space fit residuals
};

/// Least-squares fit of log phi against -s^2/2 on the window [0.6L, 0.9L].
inline TailFit fit_tail_decay(const GroundStateResult& result) {
    const Grid& g = result.phi.grid;
    std::vector<double> xs, ys;
    for (int i = 0; i < g.n; ++i) {
        const double s = g.node(i);
        if (s < 0.6 * g.L || s > 0.9 * g.L) continue;
        const double v = result.phi[i].real();
        if (!(v > 1e-300))
            throw ConvergenceError("fit_tail_decay: tail underflow at s = " + std::to_string(s) +
                                   " (increase resolution or shrink L)");
        xs.push_back(0.5 * s * s);
        ys.push_back(std::log(v));
    }
    if (xs.size() < 8)
        throw ConvergenceError("fit_tail_decay: fewer than 8 usable tail points");
    const size_t np = xs.size();
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < np; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(np);
    my /= static_cast<double>(np);
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < np; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    TailFit fit;
    fit.k0 = -sxy / sxx;  // y = log c - k0 * (s^2/2)
    const double b = my + fit.k0 * mx;
    fit.c = std::exp(b);
    double rss = 0.0;
    for (size_t i = 0; i < np; ++i) {
        const double r = ys[i] - (b - fit.k0 * xs[i]);
        rss += r * r;
    }
    fit.fit_residual = std::sqrt(rss / static_cast<double>(np));
    if (!(fit.k0 > 0.0) || fit.k0 > 1.05)
        throw ConvergenceError("fit_tail_decay: decay rate k0 = " + std::to_string(fit.k0) +
                               " outside (0, 1.05]");
    return fit;
}

}  // namespace bec1d
