// simulator.hpp
// The discrete stochastic batch-routing process and its deterministic
// mean-field limit. Each step routes a batch of B tokens at frozen
// probabilities (N1 ~ Binomial(B, p1)) and applies the summed score
// update, optionally with the load-feedback balancing term rho.
#ifndef ROUTERLAB_SIMULATOR_HPP
#define ROUTERLAB_SIMULATOR_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "routerlab/core_model.hpp"
#include "routerlab/rng.hpp"

namespace routerlab {

struct SimConfig {
    RouterParams params;
    double eta = 0.002;       // adaptation step
    int batch_size = 512;     // tokens per step
    double rho = 0.0;         // balancing feedback (a_eff = a - rho)
    long steps = 0;
    std::uint64_t seed = 0;
    RouterState init{};

    void validate() const;
};

struct StepResult {
    RouterState state;  // after the update
    double u_hat;       // (N1 - N2) / B of this batch
    double l1;          // N1 / B
};

/// One batch update: samples N1 ~ Binomial(B, p1(state)), then
/// r_i += eta * (a*l_i - rho*(l_i - 1/2) - gamma*r_i + b_i).
StepResult step_batch(const RouterState& state, const SimConfig& cfg,
                      SplitMix64& rng);

struct Trajectory {
    RouterState initial;
    std::vector<double> times;   // t = n*eta (or n*dt) after each step
    std::vector<double> y;       // r1 - r2 after each step
    std::vector<double> u_hat;   // batch imbalance (mean-field: tanh(y/2T))
    std::vector<double> l1;      // batch load fraction (mean-field: p1)
    RouterState final_state;
};

/// Iterates step_batch for cfg.steps; fully deterministic given cfg.seed.
/// u_hat[n] is the imbalance of the batch routed from the state at time
/// n*eta; y[n] is the score difference after that update.
Trajectory run_trajectory(const SimConfig& cfg);

/// Classical fixed-step RK4 on r_i' = (a-rho)*p_i + rho/2 - gamma*r_i + b_i.
/// The step count is round(t_end/dt) with dt adjusted to land on t_end.
Trajectory integrate_mean_field(const RouterParams& params, double rho,
                                RouterState init, double t_end, double dt);

struct EnsembleStats {
    std::vector<double> times;      // sampling instants n*eta
    std::vector<double> mean_u_hat;
    std::vector<double> std_u_hat;  // sample standard deviation
};

/// Pointwise mean and sample std of u_hat over n_runs independent
/// trajectories. Run i uses the stream derive_stream(cfg.seed, i), so
/// the result is independent of the execution schedule.
EnsembleStats run_ensemble(const SimConfig& cfg, int n_runs, int threads = 1);

/// Splits [0, n) across up to `threads` workers. Results must be
/// written to index-addressed slots; used by every parallel experiment.
void parallel_for(long n, int threads, const std::function<void(long)>& body);

}  // namespace routerlab

#endif
