#include "routerlab/core_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace routerlab {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

// Odd in its argument bit-for-bit: tanh evaluated on |x| with the sign
// reattached, so F(-y) == -F(y) holds exactly when h == 0.
double odd_tanh(double x) {
    const double t = std::tanh(std::abs(x));
    return std::signbit(x) ? -t : t;
}

}  // namespace

void RouterParams::validate() const {
    require(std::isfinite(a) && a >= 0.0, "RouterParams: a must be finite and >= 0");
    require(std::isfinite(gamma) && gamma > 0.0, "RouterParams: gamma must be finite and > 0");
    require(std::isfinite(temp) && temp > 0.0, "RouterParams: temp must be finite and > 0");
    require(std::isfinite(b1) && std::isfinite(b2), "RouterParams: drifts must be finite");
}

RouterParams RouterParams::from_skew(double a, double gamma, double temp, double h) {
    RouterParams p{a, gamma, temp, h / 2.0, -h / 2.0};
    p.validate();
    return p;
}

RouterParams RouterParams::from_drifts(double a, double gamma, double temp,
                                       double b1, double b2) {
    RouterParams p{a, gamma, temp, b1, b2};
    p.validate();
    return p;
}

Probs softmax_probs(const RouterState& state, double temp) {
    if (!(temp > 0.0)) throw std::invalid_argument("softmax_probs: temp must be > 0");
    const double d = (state.r1 - state.r2) / temp;
    // Shared-magnitude form: the larger score gets 1/(1+s), the smaller
    // s/(1+s), s = exp(-|d|). Swapping the scores swaps the pair exactly.
    const double s = std::exp(-std::abs(d));
    const double denom = 1.0 + s;
    const double hi = 1.0 / denom;
    const double lo = s / denom;
    return d >= 0.0 ? Probs{hi, lo} : Probs{lo, hi};
}

double load_difference(double y, double temp) {
    if (!(temp > 0.0)) throw std::invalid_argument("load_difference: temp must be > 0");
    return odd_tanh(y / (2.0 * temp));
}

double vector_field(double y, const RouterParams& params) {
    return params.a * odd_tanh(y / (2.0 * params.temp)) - params.gamma * y + params.h();
}

double detail::log_cosh(double x) {
    const double ax = std::abs(x);
    return ax + std::log1p(std::exp(-2.0 * ax)) - 0.6931471805599453094;
}

double detail::sech_squared(double x) {
    const double e = std::exp(-std::abs(x));
    const double r = 2.0 * e / (1.0 + e * e);
    return r * r;
}

double potential(double y, const RouterParams& params) {
    const double T = params.temp;
    return 0.5 * params.gamma * y * y
         - 2.0 * params.a * T * detail::log_cosh(y / (2.0 * T))
         - params.h() * y;
}

FieldDerivs vector_field_derivatives(double y, const RouterParams& params) {
    const double T = params.temp;
    const double u = y / (2.0 * T);
    const double s2 = detail::sech_squared(u);
    const double th = odd_tanh(u);
    FieldDerivs d;
    d.f_y = params.a / (2.0 * T) * s2 - params.gamma;
    d.f_yy = -params.a / (2.0 * T * T) * s2 * th;
    d.f_yyy = -params.a / (4.0 * T * T * T) * s2 * (s2 - 2.0 * th * th);
    return d;
}

}  // namespace routerlab
