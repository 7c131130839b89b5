// Usage example for the dynamics layer: perturb a ground state along the
// first excited mode and watch the orbital distance over time.

#include <cstdio>

#include "bec1d/bec1d.hpp"

int main() {
    using namespace bec1d;

    const ModelParams params{1.0, 1.0};
    StabilityOptions opts;
    opts.solver.grid = Grid(12.0, 801);
    opts.record_every = 500;

    const double delta = 1e-2;
    const StabilityResult res = stability_experiment(params, delta, 5.0, opts);

    std::printf("ground state:  E = %.10f  mu = %.10f\n", res.ground.e_min, res.ground.mu);
    std::printf("perturbation:  delta = %g along the first excited mode\n\n", delta);

    std::printf("%8s  %14s  %14s  %14s\n", "t", "Q", "E", "distance");
    const auto& tr = res.trajectory;
    for (size_t i = 0; i < tr.times.size(); ++i)
        std::printf("%8.2f  %14.10f  %14.10f  %14.6e\n", tr.times[i], tr.charge[i],
                    tr.energy[i], tr.orbital_distance[i]);

    std::printf("\nmax orbital distance: %.6e (%.2f x delta)\n", res.max_orbital_distance,
                res.max_orbital_distance / delta);
    if (res.trajectory.boundary_warning)
        std::printf("warning: density reached the edge of the box\n");
    return 0;
}
