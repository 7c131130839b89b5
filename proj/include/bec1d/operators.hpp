#pragma once

// Discrete kinetic operator on the Dirichlet interior of a Grid.
//
// A2 is the standard second-difference matrix (tridiagonal, 2c on the
// diagonal and -c off it, c = 1/h^2). We use the symmetrized fourth-order
// compact operator
//
//   A4 = A2 + (h^2/12) A2^2,
//
// whose Fourier symbol is k^2 - k^6 h^4/90: fourth-order accurate for
// -d^2/ds^2, symmetric positive definite and pentadiagonal by
// construction. Taking the kinetic energy as the quadratic form
// h <A4 u, u> makes the discrete energy gradient exactly
// 2(A4 u + s^2 u + C f u), so the gradient flow, the residual and the
// energy functional all share one operator.

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "bec1d/grid.hpp"

namespace bec1d {

class KineticOperator {
  public:
    explicit KineticOperator(const Grid& g) : grid_(g), m_(g.interior()) {
        const double h = g.h();
        const double c = 1.0 / (h * h);
        const double d = h * h / 12.0;
        d0_ = 2.0 * c + d * 6.0 * c * c;
        d0_end_ = 2.0 * c + d * 5.0 * c * c;  // rows touching the boundary
        d1_ = -c - d * 4.0 * c * c;
        d2_ = d * c * c;
    }

    const Grid& grid() const { return grid_; }
    int size() const { return m_; }

    // band values, exposed for the implicit-step factorization
    double diag(int i) const { return (i == 0 || i == m_ - 1) ? d0_end_ : d0_; }
    double off1() const { return d1_; }
    double off2() const { return d2_; }

    template <class T>
    void apply(std::span<const T> u, std::span<T> out) const {
        if (static_cast<int>(u.size()) != m_ || static_cast<int>(out.size()) != m_)
            throw std::invalid_argument("KineticOperator::apply: size mismatch");
        for (int i = 0; i < m_; ++i) {
            T acc = diag(i) * u[static_cast<size_t>(i)];
            if (i >= 1) acc += d1_ * u[static_cast<size_t>(i - 1)];
            if (i + 1 < m_) acc += d1_ * u[static_cast<size_t>(i + 1)];
            if (i >= 2) acc += d2_ * u[static_cast<size_t>(i - 2)];
            if (i + 2 < m_) acc += d2_ * u[static_cast<size_t>(i + 2)];
            out[static_cast<size_t>(i)] = acc;
        }
    }

    std::vector<double> apply(const std::vector<double>& u) const {
        std::vector<double> out(u.size());
        apply<double>(u, out);
        return out;
    }
    std::vector<std::complex<double>> apply(const std::vector<std::complex<double>>& u) const {
        std::vector<std::complex<double>> out(u.size());
        apply<std::complex<double>>(u, out);
        return out;
    }

  private:
    Grid grid_;
    int m_;
    double d0_, d0_end_, d1_, d2_;
};

// LDL^T factorization of M = I + dt*A4 (pentadiagonal SPD). One factorization
// per dt; solves are O(n).
class ImplicitStep {
  public:
    ImplicitStep(const KineticOperator& a, double dt) : m_(a.size()), dt_(dt) {
        if (!(dt > 0.0)) throw std::invalid_argument("ImplicitStep: dt must be > 0");
        D_.assign(static_cast<size_t>(m_), 0.0);
        l1_.assign(static_cast<size_t>(m_), 0.0);  // L_{i,i-1}
        l2_.assign(static_cast<size_t>(m_), 0.0);  // L_{i,i-2}
        const double e = dt * a.off1();
        const double f = dt * a.off2();
        for (int i = 0; i < m_; ++i) {
            const double d = 1.0 + dt * a.diag(i);
            double l2 = 0.0, l1 = 0.0;
            if (i >= 2) l2 = f / D_[static_cast<size_t>(i - 2)];
            if (i >= 1) {
                double num = e;
                if (i >= 2) num -= l2 * l1_[static_cast<size_t>(i - 1)] * D_[static_cast<size_t>(i - 2)];
                l1 = num / D_[static_cast<size_t>(i - 1)];
            }
            double di = d;
            if (i >= 1) di -= l1 * l1 * D_[static_cast<size_t>(i - 1)];
            if (i >= 2) di -= l2 * l2 * D_[static_cast<size_t>(i - 2)];
            if (!(di > 0.0))
                throw std::runtime_error("ImplicitStep: factorization lost positive definiteness");
            l1_[static_cast<size_t>(i)] = l1;
            l2_[static_cast<size_t>(i)] = l2;
            D_[static_cast<size_t>(i)] = di;
        }
    }

    double dt() const { return dt_; }

    // in-place solve of (I + dt*A4) x = b
    void solve(std::span<double> b) const {
        if (static_cast<int>(b.size()) != m_)
            throw std::invalid_argument("ImplicitStep::solve: size mismatch");
        for (int i = 0; i < m_; ++i) {
            double z = b[static_cast<size_t>(i)];
            if (i >= 1) z -= l1_[static_cast<size_t>(i)] * b[static_cast<size_t>(i - 1)];
            if (i >= 2) z -= l2_[static_cast<size_t>(i)] * b[static_cast<size_t>(i - 2)];
            b[static_cast<size_t>(i)] = z;
        }
        for (int i = 0; i < m_; ++i) b[static_cast<size_t>(i)] /= D_[static_cast<size_t>(i)];
        for (int i = m_ - 1; i >= 0; --i) {
            double x = b[static_cast<size_t>(i)];
            if (i + 1 < m_) x -= l1_[static_cast<size_t>(i + 1)] * b[static_cast<size_t>(i + 1)];
            if (i + 2 < m_) x -= l2_[static_cast<size_t>(i + 2)] * b[static_cast<size_t>(i + 2)];
            b[static_cast<size_t>(i)] = x;
        }
    }

  private:
    int m_;
    double dt_;
    std::vector<double> D_, l1_, l2_;
};

}  // namespace bec1d
