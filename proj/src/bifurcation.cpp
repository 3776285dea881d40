#include "routerlab/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace routerlab {

namespace {

constexpr int kScanCells = 4096;
constexpr int kMaxBisect = 200;

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

double bisect_root(const RouterParams& p, double lo, double hi, double flo) {
    // flo carries the sign of F at lo; F(lo)*F(hi) < 0 on entry.
    for (int i = 0; i < kMaxBisect; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = vector_field(mid, p);
        if (std::abs(fm) < kRootTol || mid == lo || mid == hi) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

Stability classify(double f_y) {
    if (std::abs(f_y) < kClassifyTol) return Stability::nonhyperbolic;
    return f_y < 0.0 ? Stability::stable : Stability::unstable;
}

// arcosh x = ln(x + sqrt(x^2 - 1)), with x clamped at 1 from below to
// absorb rounding at a = 2*gamma*T.
double arcosh(double x) {
    x = std::max(x, 1.0);
    return std::log(x + std::sqrt((x - 1.0) * (x + 1.0)));
}

}  // namespace

const char* to_string(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::unstable: return "unstable";
        default: return "nonhyperbolic";
    }
}

double critical_feedback(double gamma, double temp) {
    require(gamma > 0.0 && temp > 0.0, "critical_feedback: gamma, temp must be > 0");
    return 2.0 * gamma * temp;
}

EquilibriumSet find_equilibria(const RouterParams& params) {
    params.validate();
    // |F| >= gamma|y| - a - |h| > 0 outside the bracket.
    const double L = (params.a + std::abs(params.h())) / params.gamma + 1.0;
    const double cell = L / (kScanCells / 2);  // grid hits y = 0 exactly

    std::vector<double> roots;
    double x0 = -L;
    double f0 = vector_field(x0, params);
    for (int i = 1; i <= kScanCells; ++i) {
        const double x1 = -L + i * cell;
        const double f1 = vector_field(x1, params);
        if (f0 == 0.0) {
            roots.push_back(x0);
        } else if ((f0 < 0.0) != (f1 < 0.0) && f1 != 0.0) {
            roots.push_back(bisect_root(params, x0, x1, f0));
        }
        x0 = x1;
        f0 = f1;
    }
    if (f0 == 0.0) roots.push_back(x0);

    std::sort(roots.begin(), roots.end());
    EquilibriumSet set;
    const double merge_tol = 1e-9 * (1.0 + L);
    for (double r : roots) {
        if (!set.equilibria.empty() && std::abs(r - set.equilibria.back().y) < merge_tol)
            continue;
        const double fy = vector_field_derivatives(r, params).f_y;
        set.equilibria.push_back({r, classify(fy), fy});
    }
    const auto n_stable = std::count_if(
        set.equilibria.begin(), set.equilibria.end(),
        [](const Equilibrium& e) { return e.stability == Stability::stable; });
    set.regime = n_stable >= 2 ? Regime::bistable : Regime::monostable;
    return set;
}

std::vector<FoldCurvePoint> fold_curve(std::span<const double> q_grid,
                                       double gamma, double temp) {
    require(gamma > 0.0 && temp > 0.0, "fold_curve: gamma, temp must be > 0");
    std::vector<FoldCurvePoint> pts;
    pts.reserve(q_grid.size());
    const double c = 2.0 * gamma * temp;
    for (double q : q_grid) {
        const double ch = std::cosh(q);
        const double sh = std::sinh(q);
        pts.push_back({q, c * ch * ch, c * (q - sh * ch)});
    }
    return pts;
}

double hysteresis_boundary(double a, double gamma, double temp) {
    require(std::isfinite(a) && a >= 0.0, "hysteresis_boundary: a must be >= 0");
    require(gamma > 0.0 && temp > 0.0, "hysteresis_boundary: gamma, temp must be > 0");
    const double c = 2.0 * gamma * temp;
    if (a <= c) return 0.0;
    const double q = arcosh(std::sqrt(a / c));
    return c * (std::sinh(q) * std::cosh(q) - q);
}

CuspNormalForm cusp_normal_form(const RouterParams& params) {
    params.validate();
    const double T = params.temp;
    return {params.a / (2.0 * T) - params.gamma, params.h(),
            -params.a / (24.0 * T * T * T)};
}

double n_expert_contrast_eigenvalue(int n, double a, double gamma, double temp) {
    require(n >= 2, "n_expert_contrast_eigenvalue: n must be >= 2");
    require(a >= 0.0 && gamma > 0.0 && temp > 0.0,
            "n_expert_contrast_eigenvalue: invalid parameters");
    return a / (n * temp) - gamma;
}

double n_expert_threshold(int n, double gamma, double temp) {
    require(n >= 2, "n_expert_threshold: n must be >= 2");
    require(gamma > 0.0 && temp > 0.0, "n_expert_threshold: invalid parameters");
    return n * gamma * temp;
}

}  // namespace routerlab
