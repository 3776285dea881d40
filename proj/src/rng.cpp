#include "routerlab/rng.hpp"

#include <cmath>

namespace routerlab {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed ^ mix64(index + kGolden));
}

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += kGolden);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double SplitMix64::next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
}

namespace {

// Tail of the Stirling series for log k!; table for k < 10.
double stirling_tail(double k) {
    static const double table[] = {
        0.0810614667953272,  0.0413406959554092,  0.0276779256849983,
        0.0207906721037650,  0.0166446911898211,  0.0138761288230707,
        0.0118967099458917,  0.0104112652619720,  0.00925546218271273,
        0.00833056343336287};
    if (k < 10.0) return table[static_cast<int>(k)];
    const double kp1 = k + 1.0;
    const double kp1sq = kp1 * kp1;
    return (1.0 / 12.0 - (1.0 / 360.0 - 1.0 / 1260.0 / kp1sq) / kp1sq) / kp1;
}

// Inversion by sequential search; requires p <= 0.5 and small n*p.
std::uint64_t binomial_inversion(SplitMix64& rng, std::uint64_t n, double p) {
    const double q = 1.0 - p;
    const double s = p / q;
    const double A = (static_cast<double>(n) + 1.0) * s;
    const double r0 = std::exp(static_cast<double>(n) * std::log1p(-p));
    for (;;) {
        double u = rng.next_double();
        double r = r0;
        std::uint64_t k = 0;
        while (u > r) {
            u -= r;
            ++k;
            if (k > n) break;  // guard against roundoff in the tail
            r *= A / static_cast<double>(k) - s;
        }
        if (k <= n) return k;
    }
}

// BTRS (Hormann 1993); requires 0 < p <= 0.5 and n*p >= 10.
std::uint64_t binomial_btrs(SplitMix64& rng, std::uint64_t n, double p) {
    const double nd = static_cast<double>(n);
    const double q = 1.0 - p;
    const double spq = std::sqrt(nd * p * q);
    const double b = 1.15 + 2.53 * spq;
    const double a = -0.0873 + 0.0248 * b + 0.01 * p;
    const double c = nd * p + 0.5;
    const double v_r = 0.92 - 4.2 / b;
    const double r = p / q;
    const double alpha = (2.83 + 5.1 / b) * spq;
    const double m = std::floor((nd + 1.0) * p);
    for (;;) {
        const double u = rng.next_double() - 0.5;
        double v = rng.next_double();
        const double us = 0.5 - std::abs(u);
        const double kd = std::floor((2.0 * a / us + b) * u + c);
        if (kd < 0.0 || kd > nd) continue;
        if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kd);
        v = std::log(v * alpha / (a / (us * us) + b));
        const double ub =
            (m + 0.5) * std::log((m + 1.0) / (r * (nd - m + 1.0))) +
            (nd + 1.0) * std::log((nd - m + 1.0) / (nd - kd + 1.0)) +
            (kd + 0.5) * std::log(r * (nd - kd + 1.0) / (kd + 1.0)) +
            stirling_tail(m) + stirling_tail(nd - m) -
            stirling_tail(kd) - stirling_tail(nd - kd);
        if (v <= ub) return static_cast<std::uint64_t>(kd);
    }
}

}  // namespace

std::uint64_t binomial(SplitMix64& rng, std::uint64_t n, double p) {
    if (n == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    if (p > 0.5) return n - binomial(rng, n, 1.0 - p);
    if (static_cast<double>(n) * p < 10.0) return binomial_inversion(rng, n, p);
    return binomial_btrs(rng, n, p);
}

}  // namespace routerlab
