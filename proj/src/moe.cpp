#include "routerlab/moe.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace routerlab {

namespace {

// Stable logistic pair (sigma(t), 1 - sigma(t)). Shares exp(-|t|) so
// that negating t swaps the pair bitwise (label-swap symmetry).
struct SigmoidPair {
    double p;   // sigma(t)
    double q;   // sigma(-t)
};

SigmoidPair sigmoid_pair(double t) {
    const double e = std::exp(-std::abs(t));
    const double denom = 1.0 + e;
    const double hi = 1.0 / denom;
    const double lo = e / denom;
    return t >= 0.0 ? SigmoidPair{hi, lo} : SigmoidPair{lo, hi};
}

void check_batch(const Batch& b) {
    if (b.x.empty() || b.x.size() != b.y.size())
        throw std::invalid_argument("moe: batch must be nonempty with matching x/y");
}

}  // namespace

double piecewise_target(double x) {
    const double wiggle = 0.05 * std::sin(8.0 * std::numbers::pi * x);
    return x < 0.0 ? -1.0 - 0.7 * x + wiggle : 1.0 + 0.7 * x + wiggle;
}

Batch sample_batch(SplitMix64& rng, int n) {
    Batch b;
    b.x.resize(n);
    b.y.resize(n);
    for (int i = 0; i < n; ++i) {
        b.x[i] = rng.uniform(-1.0, 1.0);
        b.y[i] = piecewise_target(b.x[i]);
    }
    return b;
}

SoftMoEModel init_soft_model(SplitMix64& rng, double h, double temp,
                             double reg, double lr) {
    SoftMoEModel m;
    m.w1 = rng.uniform(-0.5, 0.5);
    m.c1 = rng.uniform(-0.5, 0.5);
    m.w2 = rng.uniform(-0.5, 0.5);
    m.c2 = rng.uniform(-0.5, 0.5);
    m.alpha = rng.uniform(0.5, 1.5);
    m.beta = 0.0;
    m.h = h;
    m.temp = temp;
    m.reg = reg;
    m.lr = lr;
    return m;
}

SoftForward soft_forward(const SoftMoEModel& m, double x) {
    const double t = (m.alpha * x + m.beta + m.h) / m.temp;
    const SigmoidPair s = sigmoid_pair(t);
    const double f1 = m.w1 * x + m.c1;
    const double f2 = m.w2 * x + m.c2;
    return {s.p * f1 + s.q * f2, s.p};
}

double soft_loss(const SoftMoEModel& m, const Batch& batch) {
    check_batch(batch);
    double sum = 0.0;
    for (std::size_t i = 0; i < batch.x.size(); ++i) {
        const double e = soft_forward(m, batch.x[i]).prediction - batch.y[i];
        sum += e * e;
    }
    return sum / static_cast<double>(batch.x.size())
         + m.reg * (m.alpha * m.alpha + m.beta * m.beta);
}

SoftGrads soft_gradients(const SoftMoEModel& m, const Batch& batch) {
    check_batch(batch);
    SoftGrads g;
    const std::size_t n = batch.x.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double x = batch.x[i];
        const double t = (m.alpha * x + m.beta + m.h) / m.temp;
        const SigmoidPair s = sigmoid_pair(t);
        const double f1 = m.w1 * x + m.c1;
        const double f2 = m.w2 * x + m.c2;
        const double e = s.p * f1 + s.q * f2 - batch.y[i];
        const double dsig = s.p * s.q;  // sigma'(t)
        const double router = e * (f1 - f2) * dsig / m.temp;
        g.alpha += router * x;
        g.beta += router;
        g.w1 += e * s.p * x;
        g.c1 += e * s.p;
        g.w2 += e * s.q * x;
        g.c2 += e * s.q;
    }
    const double scale = 2.0 / static_cast<double>(n);
    g.alpha = g.alpha * scale + 2.0 * m.reg * m.alpha;
    g.beta = g.beta * scale + 2.0 * m.reg * m.beta;
    g.w1 *= scale;
    g.c1 *= scale;
    g.w2 *= scale;
    g.c2 *= scale;
    return g;
}

SoftStepStats soft_sgd_step(SoftMoEModel& m, const Batch& batch) {
    const double loss = soft_loss(m, batch);
    const double mse = loss - m.reg * (m.alpha * m.alpha + m.beta * m.beta);
    const SoftGrads g = soft_gradients(m, batch);
    m.alpha -= m.lr * g.alpha;
    m.beta -= m.lr * g.beta;
    m.w1 -= m.lr * g.w1;
    m.c1 -= m.lr * g.c1;
    m.w2 -= m.lr * g.w2;
    m.c2 -= m.lr * g.c2;
    return {loss, mse};
}

HardMoEModel init_hard_model(SplitMix64& rng, double h, double temp,
                             double lambda_lb, double lr) {
    HardMoEModel m;
    m.w1 = rng.uniform(-0.5, 0.5);
    m.c1 = rng.uniform(-0.5, 0.5);
    m.w2 = rng.uniform(-0.5, 0.5);
    m.c2 = rng.uniform(-0.5, 0.5);
    m.w_r1 = rng.uniform(-0.5, 0.5);
    m.w_r2 = rng.uniform(-0.5, 0.5);
    m.h = h;
    m.temp = temp;
    m.lambda_lb = lambda_lb;
    m.lr = lr;
    return m;
}

HardForward hard_forward(const HardMoEModel& m, double x) {
    const double z1 = m.w_r1 * x + 0.5 * m.h;
    const double z2 = m.w_r2 * x - 0.5 * m.h;
    const int expert = z1 >= z2 ? 0 : 1;  // ties go to expert 1 (index 0)
    const double pred = expert == 0 ? m.w1 * x + m.c1 : m.w2 * x + m.c2;
    return {pred, expert, sigmoid_pair((z1 - z2) / m.temp).p};
}

double hard_loss(const HardMoEModel& m, const Batch& batch) {
    check_batch(batch);
    const std::size_t n = batch.x.size();
    double mse = 0.0;
    double mean_p1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const HardForward f = hard_forward(m, batch.x[i]);
        const double e = f.prediction - batch.y[i];
        mse += e * e;
        mean_p1 += f.p1;
    }
    mse /= static_cast<double>(n);
    mean_p1 /= static_cast<double>(n);
    const double d1 = mean_p1 - 0.5;
    const double d2 = (1.0 - mean_p1) - 0.5;
    return mse + m.lambda_lb * (d1 * d1 + d2 * d2);
}

double hard_surrogate_loss(const HardMoEModel& m, const Batch& batch) {
    check_batch(batch);
    const std::size_t n = batch.x.size();
    double mse = 0.0;
    double mean_p1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = batch.x[i];
        const double z1 = m.w_r1 * x + 0.5 * m.h;
        const double z2 = m.w_r2 * x - 0.5 * m.h;
        const SigmoidPair p = sigmoid_pair((z1 - z2) / m.temp);
        const double f1 = m.w1 * x + m.c1;
        const double f2 = m.w2 * x + m.c2;
        const double e = p.p * f1 + p.q * f2 - batch.y[i];
        mse += e * e;
        mean_p1 += p.p;
    }
    mse /= static_cast<double>(n);
    mean_p1 /= static_cast<double>(n);
    const double d1 = mean_p1 - 0.5;
    const double d2 = (1.0 - mean_p1) - 0.5;
    return mse + m.lambda_lb * (d1 * d1 + d2 * d2);
}

HardGrads hard_gradients(const HardMoEModel& m, const Batch& batch) {
    check_batch(batch);
    HardGrads g;
    const std::size_t n = batch.x.size();
    const double scale = 2.0 / static_cast<double>(n);

    // Expert path: hard assignment, gradient only through the selected
    // expert of each sample.
    for (std::size_t i = 0; i < n; ++i) {
        const double x = batch.x[i];
        const HardForward f = hard_forward(m, x);
        const double e = f.prediction - batch.y[i];
        if (f.expert == 0) {
            g.w1 += scale * e * x;
            g.c1 += scale * e;
        } else {
            g.w2 += scale * e * x;
            g.c2 += scale * e;
        }
    }

    // Router path: exact gradient of the softmax surrogate.
    double mean_p1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = batch.x[i];
        const double z1 = m.w_r1 * x + 0.5 * m.h;
        const double z2 = m.w_r2 * x - 0.5 * m.h;
        mean_p1 += sigmoid_pair((z1 - z2) / m.temp).p;
    }
    mean_p1 /= static_cast<double>(n);
    // d/dp1_j of the penalty: (2 lambda / n)((p1bar - 1/2) - (p2bar - 1/2)).
    const double pen = 2.0 * m.lambda_lb / static_cast<double>(n)
                     * (2.0 * mean_p1 - 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = batch.x[i];
        const double z1 = m.w_r1 * x + 0.5 * m.h;
        const double z2 = m.w_r2 * x - 0.5 * m.h;
        const SigmoidPair p = sigmoid_pair((z1 - z2) / m.temp);
        const double f1 = m.w1 * x + m.c1;
        const double f2 = m.w2 * x + m.c2;
        const double e = p.p * f1 + p.q * f2 - batch.y[i];
        const double dp_dz = p.p * p.q / m.temp;  // dp1/dz1 = -dp1/dz2
        const double dL_dp1 = scale * e * (f1 - f2) + pen;
        g.w_r1 += dL_dp1 * dp_dz * x;
        g.w_r2 -= dL_dp1 * dp_dz * x;
    }
    return g;
}

HardStepStats hard_sgd_step(HardMoEModel& m, const Batch& batch) {
    check_batch(batch);
    const std::size_t n = batch.x.size();
    HardStepStats stats{};
    double mse = 0.0;
    double mean_p1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const HardForward f = hard_forward(m, batch.x[i]);
        const double e = f.prediction - batch.y[i];
        mse += e * e;
        mean_p1 += f.p1;
        if (f.expert == 0)
            ++stats.n_expert1;
        else
            ++stats.n_expert2;
    }
    stats.mse = mse / static_cast<double>(n);
    stats.mean_p1 = mean_p1 / static_cast<double>(n);
    const double d1 = stats.mean_p1 - 0.5;
    stats.lb_loss = m.lambda_lb * 2.0 * d1 * d1;
    stats.u_hat = static_cast<double>(stats.n_expert1 - stats.n_expert2)
                / static_cast<double>(n);
    stats.dead_router = stats.n_expert1 == 0 || stats.n_expert2 == 0;

    const HardGrads g = hard_gradients(m, batch);
    m.w_r1 -= m.lr * g.w_r1;
    m.w_r2 -= m.lr * g.w_r2;
    m.w1 -= m.lr * g.w1;
    m.c1 -= m.lr * g.c1;
    m.w2 -= m.lr * g.w2;
    m.c2 -= m.lr * g.c2;
    return stats;
}

std::vector<double> eval_grid(int n) {
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i)
        xs[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    return xs;
}

double soft_expected_imbalance(const SoftMoEModel& m,
                               const std::vector<double>& xs) {
    // p1 - p2 from the shared pair rather than 2 p1 - 1, so label-swap
    // mirrors the value bit-for-bit.
    double sum = 0.0;
    for (double x : xs) {
        const double t = (m.alpha * x + m.beta + m.h) / m.temp;
        const SigmoidPair s = sigmoid_pair(t);
        sum += s.p - s.q;
    }
    return sum / static_cast<double>(xs.size());
}

double soft_mse(const SoftMoEModel& m, const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) {
        const double e = soft_forward(m, x).prediction - piecewise_target(x);
        sum += e * e;
    }
    return sum / static_cast<double>(xs.size());
}

double hard_load_imbalance(const HardMoEModel& m, const std::vector<double>& xs) {
    long n1 = 0;
    for (double x : xs) n1 += hard_forward(m, x).expert == 0 ? 1 : 0;
    const long n = static_cast<long>(xs.size());
    return static_cast<double>(2 * n1 - n) / static_cast<double>(n);
}

double hard_mean_importance(const HardMoEModel& m, const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) sum += hard_forward(m, x).p1;
    return sum / static_cast<double>(xs.size());
}

double hard_mse(const HardMoEModel& m, const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) {
        const double e = hard_forward(m, x).prediction - piecewise_target(x);
        sum += e * e;
    }
    return sum / static_cast<double>(xs.size());
}

}  // namespace routerlab
