#pragma once

// Gridded wavefunction: complex samples on all n nodes of a Grid,
// including the boundary nodes (which are zero for Dirichlet states).

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "bec1d/grid.hpp"

namespace bec1d {

struct Wavefunction {
    Grid grid;
    std::vector<std::complex<double>> values;  // size grid.n

    Wavefunction() = default;
    explicit Wavefunction(const Grid& g)
        : grid(g), values(static_cast<size_t>(g.n), std::complex<double>(0.0, 0.0)) {}
    Wavefunction(const Grid& g, std::vector<std::complex<double>> v)
        : grid(g), values(std::move(v)) {
        if (values.size() != static_cast<size_t>(grid.n))
            throw std::invalid_argument("Wavefunction: values size must equal grid.n");
    }

    std::complex<double>& operator[](int i) { return values[static_cast<size_t>(i)]; }
    const std::complex<double>& operator[](int i) const { return values[static_cast<size_t>(i)]; }

    bool is_real(double tol = 0.0) const {
        for (const auto& z : values)
            if (std::abs(z.imag()) > tol) return false;
        return true;
    }

    std::vector<double> real_part() const {
        std::vector<double> r(values.size());
        for (size_t i = 0; i < values.size(); ++i) r[i] = values[i].real();
        return r;
    }
};

/// Normalized Gaussian (kappa/pi)^{1/4} exp(-kappa s^2/2) sampled on g.
/// Continuum charge is exactly 1; the grid trapezoid agrees to rounding
/// once L is a few widths.
inline Wavefunction gaussian(const Grid& g, double kappa = 1.0) {
    if (!(kappa > 0.0)) throw std::invalid_argument("gaussian: kappa must be > 0");
    Wavefunction w(g);
    const double amp = std::pow(kappa / std::numbers::pi, 0.25);
    for (int i = 0; i < g.n; ++i) {
        const double s = g.node(i);
        w[i] = amp * std::exp(-0.5 * kappa * s * s);
    }
    return w;
}

/// k-th harmonic-oscillator eigenfunction (unit frequency), L^2-normalized:
/// psi_k(s) = H_k(s) exp(-s^2/2) / sqrt(2^k k! sqrt(pi)), via the stable
/// recurrence on the normalized functions.
inline Wavefunction hermite_mode(const Grid& g, int k) {
    if (k < 0) throw std::invalid_argument("hermite_mode: k must be >= 0");
    Wavefunction w(g);
    const double norm0 = std::pow(std::numbers::pi, -0.25);
    for (int i = 0; i < g.n; ++i) {
        const double s = g.node(i);
        double pm1 = 0.0;                            // psi_{-1}
        double p = norm0 * std::exp(-0.5 * s * s);   // psi_0
        for (int m = 0; m < k; ++m) {
            // psi_{m+1} = (s*sqrt(2) psi_m - sqrt(m) psi_{m-1}) / sqrt(m+1)
            const double pnext =
                (s * std::sqrt(2.0) * p - std::sqrt(static_cast<double>(m)) * pm1) /
                std::sqrt(static_cast<double>(m + 1));
            pm1 = p;
            p = pnext;
        }
        w[i] = p;
    }
    return w;
}

}  // namespace bec1d
