// Test-only oracles, independent of the library implementation paths
// they check: generic bisection, central finite differences, the
// brute-force root-count boundary in h, the N-expert softmax field
// with a numerical Jacobian, and a Jacobi eigensolver for tiny
// symmetric matrices.
#ifndef ROUTERLAB_TEST_ORACLES_HPP
#define ROUTERLAB_TEST_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "routerlab/bifurcation.hpp"
#include "routerlab/core_model.hpp"

namespace oracles {

/// Bisection on [lo, hi] with f(lo) f(hi) < 0; returns the midpoint of
/// the final bracket.
inline double bisect(const std::function<double(double)>& f, double lo,
                     double hi, double tol = 1e-14) {
    double flo = f(lo);
    for (int i = 0; i < 200 && hi - lo > tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

inline double fd1(const std::function<double(double)>& f, double x,
                  double eps = 1e-5) {
    return (f(x + eps) - f(x - eps)) / (2.0 * eps);
}

inline double fd2(const std::function<double(double)>& f, double x,
                  double eps = 1e-4) {
    return (f(x + eps) - 2.0 * f(x) + f(x - eps)) / (eps * eps);
}

inline double fd3(const std::function<double(double)>& f, double x,
                  double eps = 1e-3) {
    return (f(x + 2.0 * eps) - 2.0 * f(x + eps) + 2.0 * f(x - eps)
            - f(x - 2.0 * eps)) / (2.0 * eps * eps * eps);
}

inline int root_count(double a, double gamma, double temp, double h) {
    const auto set = routerlab::find_equilibria(
        routerlab::RouterParams::from_skew(a, gamma, temp, h));
    return static_cast<int>(set.equilibria.size());
}

/// Brute-force 3 <-> 1 boundary in h: walks h upward on a uniform grid
/// until the root count drops below 3 and returns the midpoint of the
/// last step. Wholly independent of hysteresis_boundary.
inline double brute_force_boundary(double a, double gamma, double temp,
                                   double grid = 1e-4) {
    if (root_count(a, gamma, temp, 0.0) < 3) return 0.0;
    double h = 0.0;
    for (;;) {
        const double next = h + grid;
        if (root_count(a, gamma, temp, next) < 3)
            return next - 0.5 * grid;
        h = next;
    }
}

/// N-expert mean-field right-hand side a*softmax(r/T) - gamma*r (b = 0).
inline std::vector<double> n_expert_field(const std::vector<double>& r,
                                          double a, double gamma, double temp) {
    const std::size_t n = r.size();
    double zmax = r[0];
    for (double v : r) zmax = std::max(zmax, v);
    std::vector<double> e(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        e[i] = std::exp((r[i] - zmax) / temp);
        sum += e[i];
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = a * e[i] / sum - gamma * r[i];
    return out;
}

/// Central-difference Jacobian of the N-expert field.
inline std::vector<std::vector<double>> n_expert_jacobian(
    const std::vector<double>& r, double a, double gamma, double temp,
    double eps = 1e-5) {
    const std::size_t n = r.size();
    std::vector<std::vector<double>> J(n, std::vector<double>(n));
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> rp = r, rm = r;
        rp[j] += eps;
        rm[j] -= eps;
        const auto fp = n_expert_field(rp, a, gamma, temp);
        const auto fm = n_expert_field(rm, a, gamma, temp);
        for (std::size_t i = 0; i < n; ++i)
            J[i][j] = (fp[i] - fm[i]) / (2.0 * eps);
    }
    return J;
}

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations,
/// ascending. The input is symmetrized first.
inline std::vector<double> symmetric_eigenvalues(
    std::vector<std::vector<double>> m) {
    const std::size_t n = m.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            m[i][j] = m[j][i] = 0.5 * (m[i][j] + m[j][i]);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += m[i][j] * m[i][j];
        if (off < 1e-28) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (m[p][q] == 0.0) continue;
                const double theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                const double t = (theta >= 0.0 ? 1.0 : -1.0)
                    / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double mkp = m[k][p], mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double mpk = m[p][k], mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = m[i][i];
    std::sort(ev.begin(), ev.end());
    return ev;
}

}  // namespace oracles

#endif
