#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "bec1d/dynamics.hpp"
#include "bec1d/functionals.hpp"
#include "bec1d/ground_state.hpp"
#include "bec1d/wavefunction.hpp"

using namespace bec1d;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
struct Lcg {
    unsigned long long s;
    explicit Lcg(unsigned long long seed) : s(seed) {}
    double next() {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>(s >> 11) * 0x1p-53;
    }
};
}  // namespace

TEST_CASE("orbital distance is the gauge-minimized X distance", "[dynamics]") {
    const Grid g(12.0, 2001);
    const Wavefunction phi = gaussian(g, 1.0);
    const KineticOperator a(g);

    // pure gauge rotation is invisible
    Wavefunction v(g);
    const std::complex<double> rot = std::polar(1.0, 1.234);
    for (int i = 0; i < g.n; ++i) v[i] = rot * phi[i];
    CHECK(orbital_distance(v, phi, a) < 1e-10);

    // pure scaling: distance = |c-1| ||phi||_X
    for (int i = 0; i < g.n; ++i) v[i] = 1.01 * phi[i];
    CHECK_THAT(orbital_distance(v, phi, a), WithinRel(0.01 * x_norm(phi, a), 1e-10));

    // X-orthogonal perturbation of size eps: distance = eps (odd mode, so
    // the inner product with the even phi vanishes by parity)
    const Wavefunction m1 = hermite_mode(g, 1);
    const double eps = 1e-3;
    for (int i = 0; i < g.n; ++i) v[i] = phi[i] + std::complex<double>(0.0, eps) * m1[i];
    CHECK_THAT(orbital_distance(v, phi, a), WithinRel(eps * x_norm(m1, a), 1e-8));

    // same with an even mode, orthogonalized explicitly
    const Wavefunction m2 = hermite_mode(g, 2);
    const double c12 = x_inner(m2, phi, a).real() / x_inner(phi, phi, a).real();
    Wavefunction perp(g);
    for (int i = 0; i < g.n; ++i) perp[i] = m2[i] - c12 * phi[i];
    for (int i = 0; i < g.n; ++i) v[i] = phi[i] + std::complex<double>(0.0, eps) * perp[i];
    CHECK_THAT(orbital_distance(v, phi, a), WithinRel(eps * x_norm(perp, a), 1e-8));

    Wavefunction wrong(Grid(12.0, 1001));
    CHECK_THROWS_AS(orbital_distance(wrong, phi), std::invalid_argument);
}

TEST_CASE("gauge angle is optimal among probes", "[dynamics]") {
    const Grid g(12.0, 801);
    const Wavefunction phi = gaussian(g, 1.0);
    const KineticOperator a(g);
    Lcg rng(2024);
    Wavefunction v(g);
    const std::complex<double> rot = std::polar(1.0, 0.3);
    for (int i = 1; i < g.n - 1; ++i)
        v[i] = rot * phi[i] +
               0.05 * std::complex<double>(rng.next() - 0.5, rng.next() - 0.5);
    const double dstar = orbital_distance(v, phi, a);
    for (int j = 0; j < 16; ++j) {
        const double th = 2.0 * std::numbers::pi * j / 16.0;
        Wavefunction diff(g);
        const std::complex<double> r = std::polar(1.0, th);
        for (int i = 0; i < g.n; ++i) diff[i] = v[i] - r * phi[i];
        CHECK(dstar <= x_norm(diff, a) + 1e-12);
    }
}

TEST_CASE("linear standing wave keeps its profile and phase", "[dynamics]") {
    const Grid g(12.0, 2001);
    const Wavefunction phi1 = gaussian(g, 1.0);
    PropagatorOptions opts;
    opts.dt = 1e-3;
    opts.t_final = 1.0;
    opts.record_every = 100;
    opts.reference = phi1;
    const auto out = propagate(phi1, {0.0, 1.0}, opts);

    // u(tau) = e^{-i(1+c_omega) tau} phi1 for the linear trap
    const std::complex<double> phase = std::polar(1.0, -2.0 * opts.t_final);
    double worst = 0.0;
    for (int i = 0; i < g.n; ++i)
        worst = std::max(worst, std::abs(out.final_state[i] - phase * phi1[i]));
    CHECK(worst < 1e-5);

    for (double d : out.trajectory.orbital_distance) CHECK(d < 1e-6);
    for (double q : out.trajectory.charge) CHECK_THAT(q, WithinAbs(1.0, 1e-11));
    const double e0 = out.trajectory.energy.front();
    for (double e : out.trajectory.energy) CHECK_THAT(e, WithinRel(e0, 1e-9));
    CHECK_FALSE(out.trajectory.boundary_warning);
}

TEST_CASE("record schedule", "[dynamics]") {
    const Grid g(12.0, 401);
    PropagatorOptions opts;
    opts.dt = 1e-3;
    opts.t_final = 0.01;  // 10 steps
    opts.record_every = 3;
    const auto out = propagate(gaussian(g, 1.0), {0.0, 1.0}, opts);
    REQUIRE(out.trajectory.times.size() == 5);  // 0, 3, 6, 9, final
    CHECK_THAT(out.trajectory.times[1], WithinAbs(3e-3, 1e-15));
    CHECK_THAT(out.trajectory.times.back(), WithinAbs(0.01, 1e-15));
    CHECK(std::isnan(out.trajectory.orbital_distance[0]));  // no reference given
}

TEST_CASE("second-order accuracy in dt", "[dynamics]") {
    SolverOptions sopts;
    sopts.grid = Grid(12.0, 1001);
    const auto ground = solve_ground_state({1.0, 1.0}, sopts);
    const Wavefunction m1 = hermite_mode(sopts.grid, 1);
    const double xn = x_norm(m1);
    Wavefunction v0 = ground.phi;
    for (int i = 0; i < sopts.grid.n; ++i) v0[i] += 0.01 / xn * m1[i];

    auto run = [&](double dt) {
        PropagatorOptions p;
        p.dt = dt;
        p.t_final = 1.0;
        p.record_every = 1000000;
        return propagate(v0, {1.0, 1.0}, p).final_state;
    };
    const auto w1 = run(2e-3);
    const auto w2 = run(1e-3);
    const auto w3 = run(5e-4);
    auto l2diff = [&](const Wavefunction& x, const Wavefunction& y) {
        double acc = 0.0;
        for (int i = 0; i < sopts.grid.n; ++i) acc += std::norm(x[i] - y[i]);
        return std::sqrt(sopts.grid.h() * acc);
    };
    const double ratio = l2diff(w1, w2) / l2diff(w2, w3);
    INFO("Richardson ratio " << ratio);
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.0);
}

TEST_CASE("perturbed ground state stays in a small orbit", "[dynamics]") {
    const ModelParams p{1.0, 1.0};
    StabilityOptions sopts;

    const double delta = 1e-2;
    const auto r = stability_experiment(p, delta, 5.0, sopts);
    CHECK(r.max_orbital_distance > 0.0);
    CHECK(r.max_orbital_distance <= 10.0 * delta);
    CHECK_FALSE(r.trajectory.boundary_warning);
    CHECK_THAT(r.ground.e_min, WithinAbs(2.324454573116, 1e-8));

    // odd-mode perturbation is L2-orthogonal to phi: Q(v0) = 1 + delta^2/3
    CHECK_THAT(r.trajectory.charge[0], WithinAbs(1.0 + delta * delta / 3.0, 1e-8));

    // conservation along the perturbed run
    for (double q : r.trajectory.charge)
        CHECK_THAT(q, WithinAbs(r.trajectory.charge[0], 1e-11));
    const double e0 = r.trajectory.energy.front();
    for (double e : r.trajectory.energy) CHECK_THAT(e, WithinRel(e0, 1e-8));

    // record spacing is record_every * dt
    CHECK_THAT(r.trajectory.times[1] - r.trajectory.times[0], WithinAbs(0.1, 1e-12));

    // zero perturbation: only splitting error remains
    const auto r0 = stability_experiment(p, 0.0, 2.0, sopts);
    CHECK(r0.max_orbital_distance < 1e-6);

    StabilityOptions renorm = sopts;
    renorm.renormalize = true;
    const auto rn = stability_experiment(p, delta, 0.01, renorm);
    CHECK_THAT(rn.trajectory.charge[0], WithinAbs(1.0, 1e-12));

    CHECK_THROWS_AS(stability_experiment(p, -1.0, 1.0, sopts), std::invalid_argument);
}

TEST_CASE("attractive blow-up guard", "[dynamics]") {
    const Grid g(12.0, 401);
    PropagatorOptions opts;
    opts.dt = 1e-3;
    opts.t_final = 0.01;
    CHECK_THROWS_AS(propagate(gaussian(g, 1.0), {-5.0, 1.0}, opts), ModelValidityError);
}

TEST_CASE("boundary leak raises the warning flag", "[dynamics]") {
    const Grid g(6.0, 601);
    PropagatorOptions opts;
    opts.dt = 1e-3;
    opts.t_final = 0.01;
    const auto out = propagate(gaussian(g, 0.05), {0.0, 1.0}, opts);
    CHECK(out.trajectory.boundary_warning);
}

TEST_CASE("propagator option validation", "[dynamics]") {
    const Grid g(12.0, 401);
    const Wavefunction v0 = gaussian(g, 1.0);
    PropagatorOptions opts;
    opts.dt = 0.0;
    CHECK_THROWS_AS(propagate(v0, {0.0, 1.0}, opts), std::invalid_argument);
    opts = PropagatorOptions{};
    opts.t_final = -1.0;
    CHECK_THROWS_AS(propagate(v0, {0.0, 1.0}, opts), std::invalid_argument);
    opts = PropagatorOptions{};
    opts.record_every = 0;
    CHECK_THROWS_AS(propagate(v0, {0.0, 1.0}, opts), std::invalid_argument);
    opts = PropagatorOptions{};
    opts.reference = Wavefunction(Grid(12.0, 801));
    CHECK_THROWS_AS(propagate(v0, {0.0, 1.0}, opts), std::invalid_argument);
}
