#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "routerlab/simulator.hpp"

using namespace routerlab;

namespace {

SimConfig basic_cfg(double a, double gamma, double temp, double h) {
    SimConfig cfg;
    cfg.params = RouterParams::from_skew(a, gamma, temp, h);
    return cfg;
}

}  // namespace

TEST_CASE("step_batch: reinforcement disabled gives pure decay") {
    SimConfig cfg = basic_cfg(0.0, 1.0, 1.0, 0.0);
    cfg.eta = 0.1;
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        SplitMix64 rng(seed);
        const StepResult r = step_batch({1.0, -1.0}, cfg, rng);
        CHECK(r.state.r1 == doctest::Approx(0.9).epsilon(1e-15));
        CHECK(r.state.r2 == doctest::Approx(-0.9).epsilon(1e-15));
    }
}

TEST_CASE("step_batch: law of large numbers at B = 1e6") {
    SimConfig cfg = basic_cfg(3.0, 1.0, 1.0, 0.4);
    cfg.batch_size = 1000000;
    cfg.eta = 0.01;
    const RouterState s{0.3, -0.2};
    const double p1 = softmax_probs(s, 1.0).p1;
    SplitMix64 rng(5);
    const StepResult r = step_batch(s, cfg, rng);
    const double se = std::sqrt(p1 * (1.0 - p1) / cfg.batch_size);
    CHECK(std::abs(r.l1 - p1) < 3.0 * se);
    // the realized increment equals the drift evaluated at the realized load
    const double drift1 = cfg.params.a * r.l1 - cfg.params.gamma * s.r1 + cfg.params.b1;
    CHECK(r.state.r1 - s.r1 == doctest::Approx(cfg.eta * drift1).epsilon(1e-14));
}

TEST_CASE("step_batch: rho = a cancels the feedback in y") {
    SimConfig cfg = basic_cfg(2.5, 1.0, 1.0, 0.3);
    cfg.rho = 2.5;
    cfg.eta = 0.05;
    const RouterState s{0.8, 0.1};
    // different seeds draw different N1, but the y-update is sampling-free
    std::vector<double> ys;
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        SplitMix64 rng(seed);
        ys.push_back(step_batch(s, cfg, rng).state.y());
    }
    const double expected = s.y() + cfg.eta * (-1.0 * s.y() + 0.3);
    for (double y : ys) CHECK(y == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("martingale residual is identically zero") {
    SimConfig cfg = basic_cfg(3.0, 0.8, 1.2, 0.1);
    cfg.rho = 0.4;
    cfg.eta = 0.01;
    SplitMix64 rng(9);
    RouterState s{0.2, -0.1};
    for (int n = 0; n < 200; ++n) {
        const StepResult r = step_batch(s, cfg, rng);
        const double l1 = r.l1, l2 = 1.0 - r.l1;
        const double d1 = cfg.params.a * l1 - cfg.rho * (l1 - 0.5)
                        - cfg.params.gamma * s.r1 + cfg.params.b1;
        const double d2 = cfg.params.a * l2 - cfg.rho * (l2 - 0.5)
                        - cfg.params.gamma * s.r2 + cfg.params.b2;
        CHECK(r.state.r1 == s.r1 + cfg.eta * d1);
        CHECK(r.state.r2 == s.r2 + cfg.eta * d2);
        s = r.state;
    }
}

TEST_CASE("run_trajectory basics") {
    SimConfig cfg = basic_cfg(3.0, 1.0, 1.0, 0.08);
    cfg.steps = 0;
    cfg.init = {0.3, 0.1};
    const Trajectory empty = run_trajectory(cfg);
    CHECK(empty.times.empty());
    CHECK(empty.initial.r1 == 0.3);
    CHECK(empty.final_state.r1 == 0.3);
    CHECK(empty.final_state.r2 == 0.1);

    cfg.steps = 500;
    cfg.seed = 77;
    const Trajectory t1 = run_trajectory(cfg);
    const Trajectory t2 = run_trajectory(cfg);
    CHECK(t1.y == t2.y);          // bitwise determinism
    CHECK(t1.u_hat == t2.u_hat);
    CHECK(t1.l1 == t2.l1);
    for (double u : t1.u_hat) {
        CHECK(u >= -1.0);
        CHECK(u <= 1.0);
    }
}

TEST_CASE("integrate_mean_field: closed-form decay and RK4 order") {
    const auto params = RouterParams::from_skew(0.0, 1.0, 1.0, 0.0);
    const Trajectory t = integrate_mean_field(params, 0.0, {1.0, 0.0}, 1.0, 1e-3);
    CHECK(std::abs(t.final_state.r1 - std::exp(-1.0)) < 1e-8);
    CHECK(std::abs(t.final_state.r2) < 1e-15);

    // order-4: halving dt cuts the error by >= 14x (use a coarse dt so
    // truncation dominates roundoff)
    const auto p2 = RouterParams::from_skew(0.0, 1.3, 1.0, 0.0);
    const double exact = std::exp(-1.3);
    const double e1 = std::abs(
        integrate_mean_field(p2, 0.0, {1.0, 0.0}, 1.0, 0.1).final_state.r1 - exact);
    const double e2 = std::abs(
        integrate_mean_field(p2, 0.0, {1.0, 0.0}, 1.0, 0.05).final_state.r1 - exact);
    CHECK(e1 / e2 >= 14.0);
}

TEST_CASE("integrate_mean_field: symmetric manifold and convergence") {
    // h = 0, y0 = 0 stays exactly on y = 0.
    const auto psym = RouterParams::from_skew(4.0, 1.0, 1.0, 0.0);
    const Trajectory ts = integrate_mean_field(psym, 0.0, {0.0, 0.0}, 5.0, 1e-3);
    for (double y : ts.y) CHECK(y == 0.0);

    // y0 = 0.1 converges to the oracle equilibrium.
    const double y_star = oracles::bisect(
        [](double y) { return 4.0 * std::tanh(0.5 * y) - y; }, 0.5, 8.0);
    const Trajectory tc = integrate_mean_field(psym, 0.0, {0.05, -0.05}, 20.0, 1e-3);
    CHECK(std::abs(tc.final_state.y() - y_star) < 1e-4);
}

TEST_CASE("run_ensemble: single run, symmetry, and thread independence") {
    SimConfig cfg = basic_cfg(3.0, 1.0, 1.0, 0.08);
    cfg.steps = 300;
    cfg.seed = 11;
    const EnsembleStats one = run_ensemble(cfg, 1);
    SimConfig run0 = cfg;
    run0.seed = derive_stream(cfg.seed, 0);
    const Trajectory t0 = run_trajectory(run0);
    CHECK(one.mean_u_hat == t0.u_hat);
    for (double s : one.std_u_hat) CHECK(s == 0.0);

    // below threshold, h = 0: the ensemble mean stays within 4 sigma/sqrt(n)
    SimConfig sym = basic_cfg(1.0, 1.0, 1.0, 0.0);
    sym.steps = 400;
    sym.seed = 12;
    const int runs = 16;
    const EnsembleStats es = run_ensemble(sym, runs);
    for (std::size_t i = 0; i < es.mean_u_hat.size(); ++i)
        CHECK(std::abs(es.mean_u_hat[i])
              <= 4.0 * es.std_u_hat[i] / std::sqrt(double(runs)) + 1e-12);

    // identical output regardless of the parallelism schedule
    cfg.steps = 200;
    const EnsembleStats s1 = run_ensemble(cfg, 8, 1);
    const EnsembleStats s3 = run_ensemble(cfg, 8, 3);
    CHECK(s1.mean_u_hat == s3.mean_u_hat);
    CHECK(s1.std_u_hat == s3.std_u_hat);
}

TEST_CASE("stochastic-approximation scaling in eta") {
    // max-over-time |mean u_hat - u_mf| roughly halves when eta halves
    // and the run count quadruples.
    auto max_dev = [](double eta, int runs, std::uint64_t seed) {
        SimConfig cfg = basic_cfg(3.0, 1.0, 1.0, 0.08);
        cfg.eta = eta;
        cfg.batch_size = 512;
        cfg.steps = static_cast<long>(std::lround(10.0 / eta));
        cfg.seed = seed;
        const EnsembleStats es = run_ensemble(cfg, runs, 4);
        const Trajectory mf = integrate_mean_field(cfg.params, 0.0, {0.0, 0.0},
                                                   10.0, eta / 2.0);
        double dev = 0.0;
        for (long n = 0; n < cfg.steps; ++n) {
            const double u_mf = n == 0 ? 0.0 : mf.u_hat[2 * n - 1];
            dev = std::max(dev, std::abs(es.mean_u_hat[n] - u_mf));
        }
        return dev;
    };
    const double coarse = max_dev(0.004, 20, 31);
    const double fine = max_dev(0.002, 80, 31);
    CHECK(fine / coarse > 0.2);
    CHECK(fine / coarse < 0.72);
}
