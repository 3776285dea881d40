#include "routerlab/simulator.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

namespace routerlab {

void SimConfig::validate() const {
    params.validate();
    if (!(eta > 0.0) || !std::isfinite(eta))
        throw std::invalid_argument("SimConfig: eta must be finite and > 0");
    if (batch_size < 1)
        throw std::invalid_argument("SimConfig: batch_size must be >= 1");
    if (!(rho >= 0.0) || !std::isfinite(rho))
        throw std::invalid_argument("SimConfig: rho must be finite and >= 0");
    if (steps < 0)
        throw std::invalid_argument("SimConfig: steps must be >= 0");
}

StepResult step_batch(const RouterState& state, const SimConfig& cfg,
                      SplitMix64& rng) {
    const RouterParams& p = cfg.params;
    const double p1 = softmax_probs(state, p.temp).p1;
    const std::uint64_t B = static_cast<std::uint64_t>(cfg.batch_size);
    const std::uint64_t n1 = binomial(rng, B, p1);
    const double l1 = static_cast<double>(n1) / static_cast<double>(B);
    const double l2 = static_cast<double>(B - n1) / static_cast<double>(B);
    StepResult res;
    res.state.r1 = state.r1 + cfg.eta * (p.a * l1 - cfg.rho * (l1 - 0.5)
                                         - p.gamma * state.r1 + p.b1);
    res.state.r2 = state.r2 + cfg.eta * (p.a * l2 - cfg.rho * (l2 - 0.5)
                                         - p.gamma * state.r2 + p.b2);
    res.u_hat = (2.0 * static_cast<double>(n1) - static_cast<double>(B))
                / static_cast<double>(B);
    res.l1 = l1;
    return res;
}

Trajectory run_trajectory(const SimConfig& cfg) {
    cfg.validate();
    Trajectory traj;
    traj.initial = cfg.init;
    traj.times.reserve(cfg.steps);
    traj.y.reserve(cfg.steps);
    traj.u_hat.reserve(cfg.steps);
    traj.l1.reserve(cfg.steps);
    SplitMix64 rng(cfg.seed);
    RouterState s = cfg.init;
    for (long n = 0; n < cfg.steps; ++n) {
        const StepResult r = step_batch(s, cfg, rng);
        s = r.state;
        traj.times.push_back(static_cast<double>(n + 1) * cfg.eta);
        traj.y.push_back(s.y());
        traj.u_hat.push_back(r.u_hat);
        traj.l1.push_back(r.l1);
    }
    traj.final_state = s;
    return traj;
}

namespace {

struct Deriv {
    double d1, d2;
};

Deriv mean_field_rhs(const RouterParams& p, double rho, const RouterState& s) {
    const Probs pr = softmax_probs(s, p.temp);
    return {(p.a - rho) * pr.p1 + 0.5 * rho - p.gamma * s.r1 + p.b1,
            (p.a - rho) * pr.p2 + 0.5 * rho - p.gamma * s.r2 + p.b2};
}

}  // namespace

Trajectory integrate_mean_field(const RouterParams& params, double rho,
                                RouterState init, double t_end, double dt) {
    params.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("integrate_mean_field: dt must be > 0");
    if (!(t_end >= 0.0)) throw std::invalid_argument("integrate_mean_field: t_end must be >= 0");

    const long n_steps = t_end > 0.0
        ? std::max<long>(1, std::lround(t_end / dt)) : 0;
    const double step = n_steps > 0 ? t_end / static_cast<double>(n_steps) : dt;

    Trajectory traj;
    traj.initial = init;
    RouterState s = init;
    for (long n = 0; n < n_steps; ++n) {
        const Deriv k1 = mean_field_rhs(params, rho, s);
        const RouterState s2{s.r1 + 0.5 * step * k1.d1, s.r2 + 0.5 * step * k1.d2};
        const Deriv k2 = mean_field_rhs(params, rho, s2);
        const RouterState s3{s.r1 + 0.5 * step * k2.d1, s.r2 + 0.5 * step * k2.d2};
        const Deriv k3 = mean_field_rhs(params, rho, s3);
        const RouterState s4{s.r1 + step * k3.d1, s.r2 + step * k3.d2};
        const Deriv k4 = mean_field_rhs(params, rho, s4);
        s.r1 += step / 6.0 * (k1.d1 + 2.0 * k2.d1 + 2.0 * k3.d1 + k4.d1);
        s.r2 += step / 6.0 * (k1.d2 + 2.0 * k2.d2 + 2.0 * k3.d2 + k4.d2);
        traj.times.push_back(static_cast<double>(n + 1) * step);
        traj.y.push_back(s.y());
        traj.u_hat.push_back(load_difference(s.y(), params.temp));
        traj.l1.push_back(softmax_probs(s, params.temp).p1);
    }
    traj.final_state = s;
    return traj;
}

void parallel_for(long n, int threads, const std::function<void(long)>& body) {
    if (n <= 0) return;
    const int workers = static_cast<int>(std::min<long>(std::max(threads, 1), n));
    if (workers == 1) {
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (long i = w; i < n; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

EnsembleStats run_ensemble(const SimConfig& cfg, int n_runs, int threads) {
    cfg.validate();
    if (n_runs < 1) throw std::invalid_argument("run_ensemble: n_runs must be >= 1");

    std::vector<std::vector<double>> paths(n_runs);
    parallel_for(n_runs, threads, [&](long i) {
        SimConfig run_cfg = cfg;
        run_cfg.seed = derive_stream(cfg.seed, static_cast<std::uint64_t>(i));
        paths[i] = run_trajectory(run_cfg).u_hat;
    });

    EnsembleStats stats;
    const long n = cfg.steps;
    stats.times.resize(n);
    stats.mean_u_hat.assign(n, 0.0);
    stats.std_u_hat.assign(n, 0.0);
    // times are the sampling instants: batch t is routed from the state
    // at t*eta, so that is the instant the mean-field map is compared at.
    for (long t = 0; t < n; ++t) stats.times[t] = static_cast<double>(t) * cfg.eta;
    for (int r = 0; r < n_runs; ++r)
        for (long t = 0; t < n; ++t) stats.mean_u_hat[t] += paths[r][t];
    for (long t = 0; t < n; ++t) stats.mean_u_hat[t] /= n_runs;
    if (n_runs > 1) {
        for (int r = 0; r < n_runs; ++r)
            for (long t = 0; t < n; ++t) {
                const double d = paths[r][t] - stats.mean_u_hat[t];
                stats.std_u_hat[t] += d * d;
            }
        for (long t = 0; t < n; ++t)
            stats.std_u_hat[t] = std::sqrt(stats.std_u_hat[t] / (n_runs - 1));
    }
    return stats;
}

}  // namespace routerlab
