// Minimal usage example: compute a ground state, compare the three
// approximation routes, and print a coarse profile table.

#include <cstdio>

#include "bec1d/bec1d.hpp"

int main() {
    using namespace bec1d;

    const ModelParams params{1.0, 1.0};  // lambda, c_omega
    SolverOptions opts;
    opts.grid = Grid(12.0, 801);

    const GroundStateResult r = solve_ground_state(params, opts);
    const VariationalResult v = variational_solve(params);
    const TfResult tf = solve_tf(params.lambda, params.c_omega);

    std::printf("minimization:  E = %.10f  mu = %.10f  (%ld iters, residual %.2e)\n",
                r.e_min, r.mu, r.iterations, r.residual_norm);
    std::printf("variational:   E = %.10f  mu = %.10f  (kappa = %.6f)\n", v.e_app, v.mu_app,
                v.kappa);
    std::printf("thomas-fermi:  mu = %.10f (first form), %.10f (second form)\n", tf.mu_first,
                tf.mu_second);

    const TailFit tail = fit_tail_decay(r);
    std::printf("tail decay:    k0 = %.4f (Gaussian reference: 1)\n\n", tail.k0);

    std::printf("%8s  %12s\n", "s", "phi(s)");
    for (int i = 0; i < opts.grid.n; i += 100)
        std::printf("%8.3f  %12.8f\n", opts.grid.node(i), r.phi[i].real());
    return 0;
}
