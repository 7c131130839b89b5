#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "bec1d/functionals.hpp"
#include "bec1d/grid.hpp"
#include "bec1d/model.hpp"
#include "bec1d/operators.hpp"
#include "bec1d/quadrature.hpp"
#include "bec1d/wavefunction.hpp"

using namespace bec1d;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
// deterministic uniform samples in [0,1)
struct Lcg {
    unsigned long long s;
    explicit Lcg(unsigned long long seed) : s(seed) {}
    double next() {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>(s >> 11) * 0x1p-53;
    }
};
}  // namespace

TEST_CASE("grid validation and geometry", "[grid]") {
    CHECK_THROWS_AS(Grid(12.0, 2000), std::invalid_argument);  // even
    CHECK_THROWS_AS(Grid(12.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(Grid(0.0, 2001), std::invalid_argument);
    CHECK_THROWS_AS(Grid(-3.0, 2001), std::invalid_argument);
    const Grid g(12.0, 2001);
    CHECK_THAT(g.h(), WithinAbs(0.012, 1e-15));
    CHECK_THAT(g.node(0), WithinAbs(-12.0, 1e-15));
    CHECK_THAT(g.node(2000), WithinAbs(12.0, 1e-12));
    CHECK_THAT(g.node(1000), WithinAbs(0.0, 1e-12));  // odd n puts s=0 on a node
    CHECK(g.interior() == 1999);
}

TEST_CASE("nonlinearity f at reference points", "[model]") {
    CHECK_THAT(f_lambda(0.0, {0.7, 1.0}), WithinAbs(1.0, 1e-15));
    CHECK_THAT(f_lambda(0.0, {-0.3, 1.0}), WithinAbs(1.0, 1e-15));
    CHECK_THAT(f_lambda(1.0, {0.0, 1.0}), WithinAbs(1.0, 1e-15));
    CHECK_THAT(f_lambda(1.0, {4.0, 1.0}), WithinAbs(13.0 / 3.0, 1e-14));
    CHECK_THROWS_AS(f_lambda(1.0, {-0.6, 1.0}), std::domain_error);
}

TEST_CASE("f: the two algebraic forms coincide", "[model]") {
    // (1+3lr^2)/sqrt(1+2lr^2) == (3/2)sqrt(1+2lr^2) - 1/(2 sqrt(1+2lr^2))
    Lcg rng(31);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double rho = 3.0 * rng.next();
        double lam = -1.0 + 4.0 * rng.next();
        if (1.0 + 2.0 * lam * rho * rho <= 0.01) lam = std::abs(lam);
        const double t = std::sqrt(1.0 + 2.0 * lam * rho * rho);
        const double alt = 1.5 * t - 0.5 / t;
        worst = std::max(worst, std::abs(f_lambda(rho, {lam, 1.0}) - alt) /
                                    std::max(1.0, std::abs(alt)));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("g and its derivative", "[model]") {
    CHECK_THAT(g_lambda(0.0, {2.0, 1.0}), WithinAbs(0.0, 1e-15));
    CHECK_THAT(g_lambda(1.7, {0.0, 1.0}), WithinAbs(1.7 * 1.7, 1e-14));
    CHECK_THAT(g_lambda(1.0, {4.0, 1.0}), WithinAbs(3.0, 1e-14));
    // dG/drho = 2 f rho
    Lcg rng(77);
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        const double rho = 0.1 + 2.5 * rng.next();
        const double lam = 3.0 * rng.next();
        const ModelParams p{lam, 1.0};
        const double eps = 1e-6;
        const double fd = (g_lambda(rho + eps, p) - g_lambda(rho - eps, p)) / (2.0 * eps);
        const double an = 2.0 * f_lambda(rho, p) * rho;
        worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(an)));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("unit reduction from physical parameters", "[model]") {
    PhysicalParams p;
    p.a = 0.0;
    CHECK(dimensionless_from_physical(p).lambda == 0.0);

    p = PhysicalParams{};
    p.omega_perp = p.omega1;
    p.alpha = 0.5;
    CHECK_THAT(dimensionless_from_physical(p).c_omega, WithinAbs(1.0, 1e-15));

    p = PhysicalParams{};
    p.hbar = p.m = p.omega1 = 1.0;
    p.gamma = 1.0;
    p.a = 2.0;
    p.n_atoms = 1;
    CHECK_THAT(dimensionless_from_physical(p).lambda, WithinAbs(2.0, 1e-15));

    p.omega1 = -1.0;
    CHECK_THROWS_AS(dimensionless_from_physical(p), std::invalid_argument);
}

TEST_CASE("charge of reference states", "[functionals]") {
    const Grid g(12.0, 2001);
    Wavefunction zero(g);
    CHECK(charge(zero) == 0.0);

    const Wavefunction phi1 = gaussian(g, 1.0);
    CHECK_THAT(charge(phi1), WithinAbs(1.0, 1e-10));

    Wavefunction scaled = phi1;
    for (auto& z : scaled.values) z *= 3.0;
    CHECK_THAT(charge(scaled), WithinRel(9.0 * charge(phi1), 1e-14));
}

TEST_CASE("energy of reference states", "[functionals]") {
    const Grid g(12.0, 4001);
    const Wavefunction phi1 = gaussian(g, 1.0);
    CHECK_THAT(energy(phi1, {0.0, 1.0}), WithinAbs(2.0, 1e-6));

    Wavefunction zero(g);
    CHECK(energy(zero, {1.0, 1.0}) == 0.0);

    // nonlinear term vs independent adaptive quadrature of the closed form
    const double quad = integrate(
        [](double s) {
            const double rho2 = std::exp(-s * s) / std::sqrt(std::numbers::pi);
            return std::sqrt(1.0 + 2.0 * rho2) * rho2;
        },
        -12.0, 12.0, 1e-10);
    CHECK_THAT(energy(phi1, {1.0, 1.0}), WithinRel(1.0 + quad, 1e-6));
}

TEST_CASE("chemical potential forms", "[functionals]") {
    const Grid g(12.0, 2001);
    const Wavefunction phi1 = gaussian(g, 1.0);
    CHECK_THAT(chemical_potential(phi1, {0.0, 1.0}), WithinAbs(2.0, 1e-6));

    // lambda = 0 collapses the correction term: mu == E for any state
    Wavefunction w = gaussian(g, 1.7);
    const MuForms mf0 = mu_forms(w, {0.0, 1.0});
    CHECK_THAT(mf0.first, WithinAbs(mf0.second, 1e-10));
}

TEST_CASE("residual at the exact linear eigenpair", "[functionals]") {
    const Grid g(12.0, 4001);
    const Wavefunction phi1 = gaussian(g, 1.0);
    const double rn = residual_norm(phi1, 2.0, {0.0, 1.0}, KineticOperator(g));
    CHECK(rn < 1e-5);  // discretization error only

    Wavefunction zero(g);
    const Wavefunction r = residual(zero, 3.0, {1.0, 1.0});
    CHECK(l2_norm(r) == 0.0);
}

TEST_CASE("energy dominates the X-norm and the linear level", "[functionals]") {
    const Grid g(12.0, 801);
    for (double kap : {0.5, 1.0, 2.3}) {
        Wavefunction w = gaussian(g, kap);
        const double q = charge(w);
        for (auto& z : w.values) z /= std::sqrt(q);
        for (double lam : {0.0, 0.5, 2.0}) {
            const double e = energy(w, {lam, 1.0});
            const double xn = x_norm(w);
            CHECK(e >= xn * xn - 1e-12);
            // 1 + c_omega at c_omega = 1; the discrete form may undershoot
            // the continuum level by O(h^4) for the kappa = 1 profile
            CHECK(e >= 2.0 - 1e-7);
        }
    }
}

TEST_CASE("energy gradient matches difference quotients", "[functionals]") {
    const Grid g(12.0, 401);
    const Wavefunction psi = gaussian(g, 1.3);
    const ModelParams p{0.8, 1.0};
    Lcg rng(555);
    Wavefunction dir(g);
    for (int i = 1; i < g.n - 1; ++i) dir[i] = rng.next() - 0.5;  // zero at the boundary

    const Wavefunction grad = energy_gradient(psi, p);
    double inner = 0.0;
    for (int i = 1; i < g.n - 1; ++i) inner += grad[i].real() * dir[i].real();
    inner *= g.h();

    const double eps = 1e-5;
    Wavefunction plus = psi, minus = psi;
    for (int i = 0; i < g.n; ++i) {
        plus[i] += eps * dir[i];
        minus[i] -= eps * dir[i];
    }
    const double fd = (energy(plus, p) - energy(minus, p)) / (2.0 * eps);
    CHECK_THAT(inner, WithinRel(fd, 1e-5));
}

TEST_CASE("attractive validity guard", "[model]") {
    const Grid g(8.0, 401);
    Wavefunction w = gaussian(g, 1.0);
    for (auto& z : w.values) z *= 2.0;  // peak density ~ 2.26
    CHECK_THROWS_AS(energy(w, {-1.0, 1.0}), ModelValidityError);
    CHECK_THROWS_AS(chemical_potential(w, {-1.0, 1.0}), ModelValidityError);
    CHECK_NOTHROW(energy(w, {-0.1, 1.0}));
}

TEST_CASE("hermite modes are X-orthonormal oscillator states", "[wavefunction]") {
    const Grid g(12.0, 2001);
    const Wavefunction m0 = hermite_mode(g, 0);
    const Wavefunction m1 = hermite_mode(g, 1);
    const Wavefunction m2 = hermite_mode(g, 2);
    CHECK_THAT(charge(m0), WithinAbs(1.0, 1e-10));
    CHECK_THAT(charge(m1), WithinAbs(1.0, 1e-10));
    CHECK_THAT(charge(m2), WithinAbs(1.0, 1e-10));
    // mode k has oscillator energy 2k+1, so ||psi_k||_X^2 = 2k+1
    CHECK_THAT(x_inner(m0, m0).real(), WithinAbs(1.0, 1e-6));
    CHECK_THAT(x_inner(m1, m1).real(), WithinAbs(3.0, 1e-6));
    CHECK_THAT(x_inner(m2, m2).real(), WithinAbs(5.0, 1e-6));
    // L2-orthogonal across parities and within a parity class
    double i01 = 0.0, i02 = 0.0;
    for (int i = 0; i < g.n; ++i) {
        i01 += (m0[i] * m1[i]).real();
        i02 += (m0[i] * m2[i]).real();
    }
    CHECK_THAT(g.h() * i01, WithinAbs(0.0, 1e-12));
    CHECK_THAT(g.h() * i02, WithinAbs(0.0, 1e-10));
    CHECK_THROWS_AS(hermite_mode(g, -1), std::invalid_argument);
}

TEST_CASE("model parameter validation", "[model]") {
    CHECK_THROWS_AS(ModelParams({1.0, 0.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams({1.0, -2.0}).validate(), std::invalid_argument);
    CHECK_NOTHROW(ModelParams({-0.5, 1.0}).validate());
}
