// bifurcation.hpp
// Equilibria with stability, the pitchfork threshold a = 2*gamma*T, the
// parametric fold curve, the three-equilibria boundary H(a), the cusp
// normal-form coefficients and the N-expert linearization.
#ifndef ROUTERLAB_BIFURCATION_HPP
#define ROUTERLAB_BIFURCATION_HPP

#include <span>
#include <vector>

#include "routerlab/core_model.hpp"

namespace routerlab {

enum class Stability { stable, unstable, nonhyperbolic };

const char* to_string(Stability s);

struct Equilibrium {
    double y;
    Stability stability;
    double f_y;  // linearization F_y at the root
};

enum class Regime { monostable, bistable };

struct EquilibriumSet {
    std::vector<Equilibrium> equilibria;  // ascending in y
    Regime regime;
};

/// Root refinement target |F(y)| < kRootTol.
inline constexpr double kRootTol = 1e-12;
/// |F_y| below this classifies as nonhyperbolic.
inline constexpr double kClassifyTol = 1e-9;

/// Pitchfork threshold a_c = 2*gamma*temp.
double critical_feedback(double gamma, double temp);

/// All real roots of F(y) = 0 on the analytic bracket
/// [-(a+|h|)/gamma - 1, (a+|h|)/gamma + 1], located by a sign-change
/// scan over 4096 uniform cells and refined by bisection.
EquilibriumSet find_equilibria(const RouterParams& params);

struct FoldCurvePoint {
    double q;
    double a;  // 2*gamma*T*cosh^2 q
    double h;  // 2*gamma*T*(q - sinh q cosh q)
};

std::vector<FoldCurvePoint> fold_curve(std::span<const double> q_grid,
                                       double gamma, double temp);

/// Half-width H(a) of the bistable strip in h:
/// H = 2*gamma*T*(sinh q cosh q - q), q = arcosh sqrt(a/(2*gamma*T)).
/// Returns 0 for a <= 2*gamma*T (empty bistable region).
double hysteresis_boundary(double a, double gamma, double temp);

struct CuspNormalForm {
    double mu;           // a/(2T) - gamma
    double eps;          // h
    double cubic_coeff;  // -a/(24 T^3)
};

CuspNormalForm cusp_normal_form(const RouterParams& params);

/// Contrast-mode eigenvalue a/(n*temp) - gamma of the N-expert
/// linearization at the uniform state. Requires n >= 2.
double n_expert_contrast_eigenvalue(int n, double a, double gamma, double temp);

/// Feedback strength at which the uniform N-expert state loses
/// stability: a = n*gamma*temp.
double n_expert_threshold(int n, double gamma, double temp);

}  // namespace routerlab

#endif
