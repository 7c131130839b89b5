#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "bec1d/functionals.hpp"
#include "bec1d/ground_state.hpp"
#include "bec1d/model.hpp"
#include "bec1d/wavefunction.hpp"

using namespace bec1d;
using Catch::Matchers::WithinAbs;

namespace {
// solver fixed points below are grid functions; these were frozen from an
// independent implementation of the same discretization (L = 12, n = 2001)
constexpr double e_min_lam1 = 2.324454573116;
constexpr double mu_min_lam1 = 2.598030888503;

SolverOptions default_opts() { return SolverOptions{}; }
}  // namespace

TEST_CASE("linear limit reproduces the oscillator ground state", "[ground]") {
    const auto r = solve_ground_state({0.0, 1.0}, default_opts());
    CHECK_THAT(r.e_min, WithinAbs(2.0, 1e-6));
    CHECK_THAT(r.mu, WithinAbs(2.0, 1e-6));
    CHECK(r.residual_norm <= 1e-8);
    CHECK(r.iterations < default_opts().max_iters);

    const Wavefunction phi1 = gaussian(r.phi.grid, 1.0);
    double worst = 0.0;
    for (int i = 0; i < r.phi.grid.n; ++i)
        worst = std::max(worst, std::abs(r.phi[i].real() - phi1[i].real()));
    CHECK(worst < 1e-4);

    // the trap level scales with c_omega at lambda = 0
    const auto r3 = solve_ground_state({0.0, 3.0}, default_opts());
    CHECK_THAT(r3.e_min, WithinAbs(4.0, 1e-6));
    CHECK_THAT(r3.mu, WithinAbs(4.0, 1e-6));
}

TEST_CASE("repulsive ground state at lambda = 1", "[ground]") {
    const auto r = solve_ground_state({1.0, 1.0}, default_opts());
    CHECK_THAT(r.e_min, WithinAbs(e_min_lam1, 1e-8));
    CHECK_THAT(r.mu, WithinAbs(mu_min_lam1, 1e-8));
    CHECK(r.e_min > 2.0);
    CHECK(r.mu > r.e_min);

    // returned state satisfies the constraint and the stationarity tolerance
    CHECK_THAT(charge(r.phi), WithinAbs(1.0, 1e-10));
    CHECK(r.phi.is_real());
    CHECK(residual_norm(r.phi, r.mu, r.params, KineticOperator(r.phi.grid)) < 2e-8);

    // both algebraic forms of mu agree on the minimizer
    const MuForms mf = mu_forms(r.phi, r.params);
    CHECK(mf.consistent(1e-8));
    CHECK_THAT(mf.first, WithinAbs(r.mu, 1e-10));
}

TEST_CASE("sweep is monotone and concave in lambda", "[ground]") {
    const auto sw = sweep_lambda({0.0, 0.5, 1.0, 2.0}, {0.0, 1.0}, default_opts());
    REQUIRE(sw.e_min.size() == 4);
    for (size_t i = 1; i < sw.e_min.size(); ++i) {
        CHECK(sw.e_min[i] > sw.e_min[i - 1]);
        CHECK(sw.mu_min[i] > sw.mu_min[i - 1]);
    }
    // concavity: divided differences of E must not increase
    for (size_t i = 1; i + 1 < sw.e_min.size(); ++i) {
        const double left =
            (sw.e_min[i] - sw.e_min[i - 1]) / (sw.lambdas[i] - sw.lambdas[i - 1]);
        const double right =
            (sw.e_min[i + 1] - sw.e_min[i]) / (sw.lambdas[i + 1] - sw.lambdas[i]);
        CHECK(right <= left + 1e-8);
    }
    for (double mu : sw.mu_min) CHECK(mu >= 2.0 - 1e-8);
}

TEST_CASE("mu is the derivative of lambda*E and its running integral", "[ground]") {
    std::vector<double> lams;
    for (int i = 0; i <= 20; ++i) lams.push_back(0.1 * i);
    const auto sw = sweep_lambda(lams, {0.0, 1.0}, default_opts());
    const RelationReport rep = verify_mu_energy_relations(sw);
    INFO("derivative err " << rep.max_derivative_rel_err << ", integral err "
                           << rep.max_integral_rel_err);
    CHECK(rep.pass(1e-3));
    CHECK(rep.mu_ge_e);
    CHECK(rep.violations.empty());
}

TEST_CASE("relation check needs enough sweep points", "[ground]") {
    SweepResult sw;
    sw.lambdas = {0.0, 1.0};
    sw.e_min = {2.0, 2.3};
    sw.mu_min = {2.0, 2.6};
    CHECK_THROWS_AS(verify_mu_energy_relations(sw), std::invalid_argument);
}

TEST_CASE("minimizer is independent of the initial guess", "[ground]") {
    const SolverOptions opts = default_opts();
    const auto ra = solve_ground_state({1.0, 1.0}, opts);

    // symmetric double bump, far from the minimizer
    Wavefunction bump(opts.grid);
    for (int i = 0; i < opts.grid.n; ++i) {
        const double s = opts.grid.node(i);
        bump[i] = std::exp(-0.5 * (s - 2.0) * (s - 2.0)) + std::exp(-0.5 * (s + 2.0) * (s + 2.0));
    }
    const auto rb = solve_ground_state({1.0, 1.0}, opts, bump);

    double worst = 0.0;
    for (int i = 0; i < opts.grid.n; ++i)
        worst = std::max(worst, std::abs(ra.phi[i].real() - rb.phi[i].real()));
    CHECK(worst < 1e-5);
    CHECK_THAT(rb.e_min, WithinAbs(ra.e_min, 1e-9));
}

TEST_CASE("tail decay rates", "[ground]") {
    const auto r0 = solve_ground_state({0.0, 1.0}, default_opts());
    const TailFit f0 = fit_tail_decay(r0);
    CHECK_THAT(f0.k0, WithinAbs(1.0, 0.02));
    CHECK(f0.fit_residual < 0.05);

    const auto r1 = solve_ground_state({1.0, 1.0}, default_opts());
    const TailFit f1 = fit_tail_decay(r1);
    CHECK(f1.k0 > 0.0);
    CHECK(f1.k0 <= 1.05);
    CHECK_THAT(f1.k0, WithinAbs(1.0, 0.05));  // Gaussian-type decay survives the interaction

    GroundStateResult hollow;
    hollow.phi = Wavefunction(Grid(12.0, 2001));
    CHECK_THROWS_AS(fit_tail_decay(hollow), ConvergenceError);
}

TEST_CASE("solver error paths", "[ground]") {
    SolverOptions opts = default_opts();
    opts.max_iters = 3;
    CHECK_THROWS_AS(solve_ground_state({1.0, 1.0}, opts), ConvergenceError);

    opts = default_opts();
    Wavefunction wrong(Grid(12.0, 1001));
    CHECK_THROWS_AS(solve_ground_state({1.0, 1.0}, opts, wrong), std::invalid_argument);

    Wavefunction dead(opts.grid);
    CHECK_THROWS_AS(solve_ground_state({1.0, 1.0}, opts, dead), std::invalid_argument);

    opts.dt = -1.0;
    CHECK_THROWS_AS(solve_ground_state({1.0, 1.0}, opts), std::invalid_argument);

    CHECK_THROWS_AS(sweep_lambda({}, {0.0, 1.0}, default_opts()), std::invalid_argument);
    CHECK_THROWS_AS(sweep_lambda({0.0, 0.0}, {0.0, 1.0}, default_opts()),
                    std::invalid_argument);
}

TEST_CASE("grid refinement and box enlargement leave E unchanged", "[ground]") {
    const ModelParams p{1.0, 1.0};
    SolverOptions coarse;
    coarse.grid = Grid(12.0, 1001);
    SolverOptions fine;
    fine.grid = Grid(12.0, 2001);
    SolverOptions wide;
    wide.grid = Grid(24.0, 4001);  // same h as fine

    const double ec = solve_ground_state(p, coarse).e_min;
    const double ef = solve_ground_state(p, fine).e_min;
    const double ew = solve_ground_state(p, wide).e_min;
    CHECK(std::abs(ef - ec) <= coarse.grid.h() * coarse.grid.h());
    CHECK(std::abs(ew - ef) < 1e-10);  // tails are far below tolerance at L = 12
}
