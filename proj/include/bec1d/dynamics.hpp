#pragma once

// Strang-split time propagation of
//
//   i du/dtau = -d^2u/ds^2 + s^2 u + C_omega f_lambda(|u|) u
//
// on the periodic extension of [-L, L]. Each step applies a half phase
// rotation exp(-i (dt/2)(s^2 + C f(|v|))), a full kinetic step as a Fourier
// multiplier exp(-i dt k^2), and a second half phase. The phase steps are
// exact because |v| is invariant under multiplication by a unimodular
// factor; the kinetic step is exact on the periodic grid. The splitting is
// second order in dt and conserves the discrete charge to rounding.

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bec1d/functionals.hpp"
#include "bec1d/grid.hpp"
#include "bec1d/ground_state.hpp"
#include "bec1d/model.hpp"
#include "bec1d/wavefunction.hpp"

namespace bec1d {

enum class Scheme { strang_split };

struct PropagatorOptions {
    double dt = 1e-3;
    double t_final = 10.0;
    Scheme scheme = Scheme::strang_split;
    long record_every = 100;
    std::optional<Wavefunction> reference;  // ground state for orbital distance

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("PropagatorOptions: dt must be > 0");
        if (!(t_final > 0.0))
            throw std::invalid_argument("PropagatorOptions: t_final must be > 0");
        if (record_every < 1)
            throw std::invalid_argument("PropagatorOptions: record_every must be >= 1");
    }
};

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<double> charge;
    std::vector<double> energy;
    std::vector<double> orbital_distance;  // NaN when no reference was given
    bool boundary_warning = false;         // tail mass near |s|=L exceeded 1e-8
};

struct PropagationResult {
    TrajectoryRecord trajectory;
    Wavefunction final_state;
};

/// inf over theta of ||v - e^{i theta} phi||_X, attained at theta* = arg<v,phi>_X.
inline double orbital_distance(const Wavefunction& v, const Wavefunction& phi,
                               const KineticOperator& a) {
    detail::require_same_grid(v, phi, "orbital_distance");
    const std::complex<double> z = x_inner(v, phi, a);
    const std::complex<double> rot = std::polar(1.0, std::arg(z));
    Wavefunction diff(v.grid);
    for (int i = 0; i < v.grid.n; ++i) diff[i] = v[i] - rot * phi[i];
    return x_norm(diff, a);
}

inline double orbital_distance(const Wavefunction& v, const Wavefunction& phi) {
    return orbital_distance(v, phi, KineticOperator(v.grid));
}

namespace detail {

// FFTW plan pair on an owned buffer. Plan creation/destruction is serialized
// globally (FFTW planners are not thread-safe); execution is safe per plan.
class FftPlan {
  public:
    explicit FftPlan(int n) : n_(n) {
        buf_ = fftw_alloc_complex(static_cast<size_t>(n));
        if (!buf_) throw std::bad_alloc();
        std::lock_guard<std::mutex> lock(mutex());
        fwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
        if (!fwd_ || !bwd_) throw std::runtime_error("FftPlan: planner failed");
    }
    ~FftPlan() {
        std::lock_guard<std::mutex> lock(mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(buf_);
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    std::complex<double>* data() { return reinterpret_cast<std::complex<double>*>(buf_); }
    void forward() { fftw_execute(fwd_); }
    void backward() { fftw_execute(bwd_); }
    int size() const { return n_; }

  private:
    static std::mutex& mutex() {
        static std::mutex m;
        return m;
    }
    int n_;
    fftw_complex* buf_;
    fftw_plan fwd_, bwd_;
};

}  // namespace detail

/// Propagate v0 to t_final. The step count is rounded so the horizon is hit
/// exactly; records are taken at step 0, every record_every steps, and at the
/// final step.
inline PropagationResult propagate(const Wavefunction& v0, const ModelParams& params,
                                   const PropagatorOptions& opts) {
    params.validate();
    opts.validate();
    const Grid& g = v0.grid;
    if (opts.reference && !(opts.reference->grid == g))
        throw std::invalid_argument("propagate: reference grid mismatch");
    const int N = g.n - 1;  // periodic nodes, +L identified with -L
    const double h = g.h();

    const long nsteps = std::max(1L, std::lround(opts.t_final / opts.dt));
    const double dt = opts.t_final / static_cast<double>(nsteps);

    detail::FftPlan plan(N);
    std::complex<double>* v = plan.data();
    for (int j = 0; j < N; ++j) v[j] = v0[j];

    // spectral multiplier for the kinetic full step, k = pi*m/L (signed m)
    std::vector<std::complex<double>> kin(static_cast<size_t>(N));
    for (int m = 0; m < N; ++m) {
        const int ms = (m <= N / 2) ? m : m - N;
        const double k = std::numbers::pi * static_cast<double>(ms) / g.L;
        kin[static_cast<size_t>(m)] = std::polar(1.0, -dt * k * k) / static_cast<double>(N);
    }

    std::vector<double> s_val(static_cast<size_t>(N));
    for (int j = 0; j < N; ++j) s_val[static_cast<size_t>(j)] = g.node(j);

    const KineticOperator a(g);
    TrajectoryRecord rec;
    Wavefunction w(g);

    auto half_phase = [&](double half_dt) {
        double mn = 1.0;
        for (int j = 0; j < N; ++j) {
            const double rho2 = std::norm(v[j]);
            const double t = 1.0 + 2.0 * params.lambda * rho2;
            if (t < mn) mn = t;
            if (t < eps_pos) continue;  // reported below with position context
            const double s = s_val[static_cast<size_t>(j)];
            const double f = (1.0 + 3.0 * params.lambda * rho2) / std::sqrt(t);
            v[j] *= std::polar(1.0, -half_dt * (s * s + params.c_omega * f));
        }
        if (params.lambda < 0.0 && mn < eps_pos)
            throw ModelValidityError("propagate: 1+2*lambda*|v|^2 reached " +
                                     std::to_string(mn) + " (attractive blow-up guard)");
    };

    auto record = [&](double tau) {
        for (int j = 0; j < N; ++j) w[j] = v[j];
        w[g.n - 1] = v[0];
        rec.times.push_back(tau);
        rec.charge.push_back(charge(w));
        rec.energy.push_back(energy(w, params, a));
        rec.orbital_distance.push_back(opts.reference
                                           ? orbital_distance(w, *opts.reference, a)
                                           : std::numeric_limits<double>::quiet_NaN());
        double tail = 0.0;
        for (int j = 0; j < N; ++j)
            if (std::abs(s_val[static_cast<size_t>(j)]) >= 0.95 * g.L) tail += std::norm(v[j]);
        if (h * tail > 1e-8) rec.boundary_warning = true;
    };

    record(0.0);
    for (long step = 1; step <= nsteps; ++step) {
        half_phase(0.5 * dt);
        plan.forward();
        for (int m = 0; m < N; ++m) v[m] *= kin[static_cast<size_t>(m)];
        plan.backward();
        half_phase(0.5 * dt);
        if (step % opts.record_every == 0 || step == nsteps)
            record(dt * static_cast<double>(step));
    }

    PropagationResult out;
    out.trajectory = std::move(rec);
    out.final_state = Wavefunction(g);
    for (int j = 0; j < N; ++j) out.final_state[j] = v[j];
    out.final_state[g.n - 1] = v[0];
    return out;
}

struct StabilityOptions {
    SolverOptions solver;
    double dt = 1e-3;
    long record_every = 100;
    int mode_index = 1;        // Hermite mode used as perturbation shape
    bool renormalize = false;  // project perturbed data back to unit charge
};

struct StabilityResult {
    double max_orbital_distance = 0.0;
    TrajectoryRecord trajectory;
    GroundStateResult ground;
};

/// Solve the ground state, perturb it by delta in X-norm along a Hermite
/// mode, propagate to t_final, and report the sup of the recorded orbital
/// distances.
inline StabilityResult stability_experiment(const ModelParams& params, double delta,
                                            double t_final,
                                            const StabilityOptions& sopts = {}) {
    if (delta < 0.0) throw std::invalid_argument("stability_experiment: delta must be >= 0");
    StabilityResult out;
    out.ground = solve_ground_state(params, sopts.solver);
    const Grid& g = sopts.solver.grid;

    Wavefunction v0 = out.ground.phi;
    if (delta > 0.0) {
        const Wavefunction mode = hermite_mode(g, sopts.mode_index);
        const double xn = x_norm(mode);
        for (int i = 0; i < g.n; ++i) v0[i] += delta / xn * mode[i];
    }
    if (sopts.renormalize) {
        const double q = charge(v0);
        if (!(q > 0.0)) throw std::invalid_argument("stability_experiment: zero charge");
        const double inv = 1.0 / std::sqrt(q);
        for (auto& z : v0.values) z *= inv;
    }

    PropagatorOptions popts;
    popts.dt = sopts.dt;
    popts.t_final = t_final;
    popts.record_every = sopts.record_every;
    popts.reference = out.ground.phi;
    PropagationResult pr = propagate(v0, params, popts);

    for (double d : pr.trajectory.orbital_distance)
        out.max_orbital_distance = std::max(out.max_orbital_distance, d);
    out.trajectory = std::move(pr.trajectory);
    return out;
}

}  // namespace bec1d
