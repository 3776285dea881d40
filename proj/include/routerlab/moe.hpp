// moe.hpp
// Two small trainable two-expert models on the piecewise-affine
// regression target: a soft mixture with an input-dependent sigmoid
// router, and a hard top-1 model trained with a straight-through
// router gradient and an optional load-balancing penalty. Gradients
// are hand-derived; there is no autodiff here.
#ifndef ROUTERLAB_MOE_HPP
#define ROUTERLAB_MOE_HPP

#include <cstdint>
#include <vector>

#include "routerlab/rng.hpp"

namespace routerlab {

/// y(x) = -1 - 0.7x + 0.05 sin(8 pi x) for x < 0,
///         1 + 0.7x + 0.05 sin(8 pi x) for x >= 0.
double piecewise_target(double x);

struct Batch {
    std::vector<double> x;
    std::vector<double> y;
};

/// x ~ Uniform[-1, 1), y = piecewise_target(x).
Batch sample_batch(SplitMix64& rng, int n);

// ---------------------------------------------------------------------------
// Soft mixture: p1(x) = sigma((alpha*x + beta + h)/T),
//               yhat = p1*f1 + (1-p1)*f2, f_i(x) = w_i*x + c_i.
// ---------------------------------------------------------------------------

struct SoftMoEModel {
    double alpha = 1.0;   // trainable router slope
    double beta = 0.0;    // trainable router offset
    double h = 0.0;       // fixed external bias
    double temp = 0.2;    // router temperature
    double w1 = 0.0, c1 = 0.0;
    double w2 = 0.0, c2 = 0.0;
    double reg = 1e-4;    // router weight regularization
    double lr = 0.05;

    /// Decision boundary -(beta+h)/alpha; meaningful only for alpha != 0.
    double boundary() const { return -(beta + h) / alpha; }
};

/// Random init per the documented defaults: experts w, c ~ U(-0.5, 0.5),
/// alpha ~ U(0.5, 1.5), beta = 0.
SoftMoEModel init_soft_model(SplitMix64& rng, double h, double temp,
                             double reg, double lr);

struct SoftForward {
    double prediction;
    double p1;
};

SoftForward soft_forward(const SoftMoEModel& m, double x);

struct SoftGrads {
    double alpha = 0, beta = 0, w1 = 0, c1 = 0, w2 = 0, c2 = 0;
};

/// L = mean((yhat - y)^2) + reg*(alpha^2 + beta^2).
double soft_loss(const SoftMoEModel& m, const Batch& batch);
SoftGrads soft_gradients(const SoftMoEModel& m, const Batch& batch);

struct SoftStepStats {
    double loss;  // value before the update
    double mse;
};

/// One SGD step on soft_loss; gradients are evaluated at the incoming
/// parameters and applied jointly.
SoftStepStats soft_sgd_step(SoftMoEModel& m, const Batch& batch);

// ---------------------------------------------------------------------------
// Hard top-1: z(x) = (w_r1*x + h/2, w_r2*x - h/2), forward uses
// argmax (ties to expert 1), training uses the straight-through
// composite: the router gradient path runs through the softmax
// surrogate p = softmax(z/T) while the forward value stays hard.
// ---------------------------------------------------------------------------

struct HardMoEModel {
    double w_r1 = 0.0, w_r2 = 0.0;  // trainable router weights
    double h = 0.0;                  // fixed bias pair (h/2, -h/2)
    double temp = 0.5;               // surrogate softmax temperature
    double w1 = 0.0, c1 = 0.0;
    double w2 = 0.0, c2 = 0.0;
    double lambda_lb = 0.0;          // balancing penalty weight
    double lr = 0.05;
};

HardMoEModel init_hard_model(SplitMix64& rng, double h, double temp,
                             double lambda_lb, double lr);

struct HardForward {
    double prediction;
    int expert;   // 0 or 1; ties resolve to 0
    double p1;    // soft importance of expert 1
};

HardForward hard_forward(const HardMoEModel& m, double x);

struct HardGrads {
    double w_r1 = 0, w_r2 = 0, w1 = 0, c1 = 0, w2 = 0, c2 = 0;
};

/// Reported objective: MSE of the hard forward plus
/// lambda_lb * sum_i (mean_batch p_i - 1/2)^2.
double hard_loss(const HardMoEModel& m, const Batch& batch);

/// The smooth surrogate the router gradient differentiates:
/// mean((p1*f1 + p2*f2 - y)^2) plus the same penalty.
double hard_surrogate_loss(const HardMoEModel& m, const Batch& batch);

/// Expert gradients are the exact gradients of hard_loss (each sample
/// trains its selected expert only); router gradients are the exact
/// gradients of hard_surrogate_loss.
HardGrads hard_gradients(const HardMoEModel& m, const Batch& batch);

struct HardStepStats {
    double mse;       // hard-forward MSE before the update
    double lb_loss;   // penalty value before the update
    double u_hat;     // (N1 - N2)/B of the hard assignment
    double mean_p1;   // mean soft importance
    int n_expert1;
    int n_expert2;
    bool dead_router;  // one expert received the whole batch
};

HardStepStats hard_sgd_step(HardMoEModel& m, const Batch& batch);

// Evaluation helpers on a fixed grid.

/// Uniform grid of n points spanning [-1, 1].
std::vector<double> eval_grid(int n);

/// E[u] = 2 E_x p1(x) - 1 over the grid.
double soft_expected_imbalance(const SoftMoEModel& m,
                               const std::vector<double>& xs);
double soft_mse(const SoftMoEModel& m, const std::vector<double>& xs);

/// Hard load imbalance over the grid (fraction routed to 1 minus to 2).
double hard_load_imbalance(const HardMoEModel& m, const std::vector<double>& xs);
double hard_mean_importance(const HardMoEModel& m, const std::vector<double>& xs);
double hard_mse(const HardMoEModel& m, const std::vector<double>& xs);

}  // namespace routerlab

#endif
