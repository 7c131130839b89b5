#pragma once

// Uniform symmetric grid on [-L, L] with n nodes. n is kept odd so that
// s = 0 is a node and even/odd symmetry can be checked exactly.

#include <stdexcept>
#include <vector>

namespace bec1d {

struct Grid {
    double L = 12.0;
    int n = 2001;

    Grid() = default;
    Grid(double L_, int n_) : L(L_), n(n_) { validate(); }

    void validate() const {
        if (!(L > 0.0)) throw std::invalid_argument("Grid: L must be > 0");
        if (n < 3) throw std::invalid_argument("Grid: n must be >= 3");
        if (n % 2 == 0) throw std::invalid_argument("Grid: n must be odd");
    }

    double h() const { return 2.0 * L / (n - 1); }
    double node(int i) const { return -L + h() * i; }
    int interior() const { return n - 2; }  // Dirichlet unknowns

    std::vector<double> nodes() const {
        std::vector<double> s(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) s[static_cast<size_t>(i)] = node(i);
        return s;
    }

    bool operator==(const Grid&) const = default;
};

}  // namespace bec1d
