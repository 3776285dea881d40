// core_model.hpp
// Closed-form quantities of the two-expert adaptive softmax router:
// selection probabilities, load difference, the reduced vector field
// F(y) = a*tanh(y/2T) - gamma*y + h, its potential and derivatives.
#ifndef ROUTERLAB_CORE_MODEL_HPP
#define ROUTERLAB_CORE_MODEL_HPP

namespace routerlab {

/// Model parameters. `a` is the reinforcement strength, `gamma` the
/// forgetting rate, `temp` the softmax temperature, `b1`/`b2` the
/// per-expert drifts. The skew is h = b1 - b2.
struct RouterParams {
    double a = 1.0;
    double gamma = 1.0;
    double temp = 1.0;
    double b1 = 0.0;
    double b2 = 0.0;

    double h() const { return b1 - b2; }

    /// Throws std::invalid_argument unless a >= 0, gamma > 0, temp > 0
    /// and all fields are finite.
    void validate() const;

    /// Symmetric drift split b1 = h/2, b2 = -h/2.
    static RouterParams from_skew(double a, double gamma, double temp, double h);
    static RouterParams from_drifts(double a, double gamma, double temp,
                                    double b1, double b2);
};

/// Expert scores; the reduced variable is y = r1 - r2.
struct RouterState {
    double r1 = 0.0;
    double r2 = 0.0;

    double y() const { return r1 - r2; }
};

struct Probs {
    double p1;
    double p2;
};

/// Two-expert softmax at temperature `temp`. Computed from the score
/// difference only, so p1 + p2 == 1 exactly and swapping the scores
/// swaps (p1, p2) bitwise.
Probs softmax_probs(const RouterState& state, double temp);

/// p1 - p2 = tanh(y / (2*temp)).
double load_difference(double y, double temp);

/// F(y) = a*tanh(y/2T) - gamma*y + h.
double vector_field(double y, const RouterParams& params);

/// V(y) = (gamma/2) y^2 - 2aT log cosh(y/2T) - h y, with F = -dV/dy.
/// Overflow-safe for arbitrarily large |y|.
double potential(double y, const RouterParams& params);

struct FieldDerivs {
    double f_y;    // a/(2T) sech^2(y/2T) - gamma
    double f_yy;   // -a/(2T^2) sech^2(u) tanh(u), u = y/2T
    double f_yyy;  // -a/(4T^3) sech^2(u) (sech^2(u) - 2 tanh^2(u))
};

/// First three y-derivatives of the vector field, in closed form.
FieldDerivs vector_field_derivatives(double y, const RouterParams& params);

namespace detail {
/// log cosh x = |x| + log1p(exp(-2|x|)) - log 2, safe for large |x|.
double log_cosh(double x);
/// sech^2 x = (2 e^{-|x|} / (1 + e^{-2|x|}))^2, underflows to 0 instead
/// of producing inf.
double sech_squared(double x);
}  // namespace detail

}  // namespace routerlab

#endif
