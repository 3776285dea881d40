#include "routerlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "routerlab/moe.hpp"

namespace routerlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double trailing_mean(const std::vector<double>& v, double fraction) {
    if (v.empty()) return kNaN;
    const std::size_t n = v.size();
    std::size_t start = n - std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n))));
    double sum = 0.0;
    for (std::size_t i = start; i < n; ++i) sum += v[i];
    return sum / static_cast<double>(n - start);
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i)
        g[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i)
                        / static_cast<double>(n - 1));
    return g;
}

}  // namespace

void SweepSchedule::validate() const {
    if (h_values.size() < 2)
        throw std::invalid_argument("SweepSchedule: need at least 2 h values");
    for (std::size_t i = 1; i < h_values.size(); ++i)
        if (!(h_values[i] > h_values[i - 1]))
            throw std::invalid_argument("SweepSchedule: grid must be strictly ascending");
    if (steps_per_value < 1)
        throw std::invalid_argument("SweepSchedule: steps_per_value must be >= 1");
}

SweepSchedule make_schedule(double span, int n_h, long steps_per_value) {
    SweepSchedule s;
    s.steps_per_value = steps_per_value;
    s.h_values.resize(n_h);
    for (int i = 0; i < n_h; ++i)
        s.h_values[i] = -span + 2.0 * span * static_cast<double>(i)
                        / static_cast<double>(n_h - 1);
    s.validate();
    return s;
}

SweepSchedule default_schedule(double a, double gamma, double temp,
                               long steps_per_value) {
    const double H = hysteresis_boundary(a, gamma, temp);
    const double span = H > 0.0 ? 1.5 * H : 0.2;
    return make_schedule(span, 81, steps_per_value);
}

HysteresisOutcome run_hysteresis(double a, double gamma, double temp,
                                 double rho, double eta, int batch_size,
                                 const SweepSchedule& schedule,
                                 std::uint64_t seed) {
    schedule.validate();
    const double a_eff = std::max(a - rho, 0.0);

    HysteresisOutcome out;
    out.predicted_h = hysteresis_boundary(a_eff, gamma, temp);

    // Start on the lowest branch of the effective field at the first h.
    const double h0 = schedule.h_values.front();
    const auto eq = find_equilibria(RouterParams::from_skew(a_eff, gamma, temp, h0));
    const double y0 = eq.equilibria.front().y;
    const double s0 = a / gamma;  // sum equilibrium; balancing cancels in the sum
    RouterState state{0.5 * (s0 + y0), 0.5 * (s0 - y0)};

    SplitMix64 rng(derive_stream(seed, 0));
    SimConfig cfg;
    cfg.eta = eta;
    cfg.batch_size = batch_size;
    cfg.rho = rho;
    cfg.steps = schedule.steps_per_value;

    auto settle = [&](double h) {
        cfg.params = RouterParams::from_skew(a, gamma, temp, h);
        std::vector<double> u_path;
        u_path.reserve(schedule.steps_per_value);
        for (long n = 0; n < schedule.steps_per_value; ++n) {
            const StepResult r = step_batch(state, cfg, rng);
            state = r.state;
            u_path.push_back(r.u_hat);
        }
        return trailing_mean(u_path, 0.5);
    };

    for (double h : schedule.h_values) out.up.push_back({h, settle(h)});
    for (auto it = schedule.h_values.rbegin(); it != schedule.h_values.rend(); ++it)
        out.down.push_back({*it, settle(*it)});

    auto find_switch = [](const std::vector<SweepRecord>& recs, bool& found) {
        const bool start_neg = recs.front().mean_u_hat < 0.0;
        for (const auto& r : recs) {
            const bool neg = r.mean_u_hat < 0.0;
            if (neg != start_neg && r.mean_u_hat != 0.0) {
                found = true;
                return r.h;
            }
        }
        found = false;
        return kNaN;
    };
    out.switch_up = find_switch(out.up, out.switched_up);
    out.switch_down = find_switch(out.down, out.switched_down);
    out.width = (out.switched_up && out.switched_down)
                ? out.switch_up - out.switch_down : kNaN;
    return out;
}

Table exp_mean_field_comparison(const MeanFieldCompareConfig& cfg,
                                std::uint64_t seed, int threads) {
    SimConfig sim;
    sim.params = RouterParams::from_skew(cfg.a, cfg.gamma, cfg.temp, cfg.h);
    sim.eta = cfg.eta;
    sim.batch_size = cfg.batch_size;
    sim.steps = cfg.steps;
    sim.seed = seed;
    sim.init = {cfg.init_r1, cfg.init_r2};
    const EnsembleStats stats = run_ensemble(sim, cfg.runs, threads);

    // Dense mean-field path at dt = eta/2 so t = n*eta lands on a sample.
    const double t_end = static_cast<double>(cfg.steps) * cfg.eta;
    const Trajectory mf = integrate_mean_field(sim.params, 0.0, sim.init,
                                               t_end, cfg.eta / 2.0);

    Table t;
    t.header = {"time", "mean_u_hat", "std_u_hat", "u_mf"};
    for (long n = 0; n < cfg.steps; ++n) {
        const double u_mf = n == 0
            ? load_difference(sim.init.y(), cfg.temp)
            : mf.u_hat[static_cast<std::size_t>(2 * n - 1)];
        t.add_row({stats.times[n], stats.mean_u_hat[n], stats.std_u_hat[n], u_mf});
    }
    return t;
}

namespace {

SweepSchedule schedule_for(double a_eff, double gamma, double temp, int n_h,
                           double span_factor, double fallback_span,
                           long steps_per_value) {
    const double H = hysteresis_boundary(a_eff, gamma, temp);
    const double span = H > 0.0 ? span_factor * H : fallback_span;
    return make_schedule(span, n_h, steps_per_value);
}

}  // namespace

HysteresisTables exp_hysteresis(const HysteresisConfig& cfg, std::uint64_t seed) {
    const SweepSchedule sched =
        schedule_for(std::max(cfg.a - cfg.rho, 0.0), cfg.gamma, cfg.temp, cfg.n_h,
                     cfg.span_factor, cfg.fallback_span, cfg.steps_per_value);
    HysteresisTables res;
    res.outcome = run_hysteresis(cfg.a, cfg.gamma, cfg.temp, cfg.rho, cfg.eta,
                                 cfg.batch_size, sched, seed);

    res.sweep.header = {"direction", "h", "mean_u_hat"};
    for (const auto& r : res.outcome.up)
        res.sweep.add_row({std::string("up"), r.h, r.mean_u_hat});
    for (const auto& r : res.outcome.down)
        res.sweep.add_row({std::string("down"), r.h, r.mean_u_hat});

    res.summary.header = {"direction", "switched", "switch_h", "fold_h_pred"};
    res.summary.add_row({std::string("up"),
                         static_cast<std::int64_t>(res.outcome.switched_up),
                         res.outcome.switch_up, res.outcome.predicted_h});
    res.summary.add_row({std::string("down"),
                         static_cast<std::int64_t>(res.outcome.switched_down),
                         res.outcome.switch_down, -res.outcome.predicted_h});
    return res;
}

Table exp_collapse_map(const CollapseMapConfig& cfg, std::uint64_t seed,
                       int threads) {
    const std::vector<double> temps = log_grid(cfg.temp_min, cfg.temp_max, cfg.n_temp);
    const std::vector<double> gammas = log_grid(cfg.gamma_min, cfg.gamma_max, cfg.n_gamma);

    const long n_cells = static_cast<long>(cfg.n_temp) * cfg.n_gamma;
    const long n_jobs = n_cells * cfg.replicates;
    std::vector<double> abs_final(n_jobs, 0.0);

    parallel_for(n_jobs, threads, [&](long j) {
        const long cell = j / cfg.replicates;
        const double temp = temps[static_cast<std::size_t>(cell) % cfg.n_temp];
        const double gamma = gammas[static_cast<std::size_t>(cell) / cfg.n_temp];
        SplitMix64 rng(derive_stream(seed, static_cast<std::uint64_t>(j)));
        const double y0 = rng.uniform(-cfg.init_asym, cfg.init_asym);
        SimConfig sim;
        sim.params = RouterParams::from_skew(cfg.a, gamma, temp, 0.0);
        sim.eta = cfg.eta;
        sim.batch_size = cfg.batch_size;
        sim.steps = cfg.steps;
        sim.seed = rng.next();
        sim.init = {0.5 * y0, -0.5 * y0};
        const Trajectory traj = run_trajectory(sim);
        abs_final[j] = std::abs(trailing_mean(traj.u_hat, cfg.trailing_fraction));
    });

    Table t;
    t.header = {"temp", "gamma", "mean_abs_u_hat", "temp_threshold"};
    for (long cell = 0; cell < n_cells; ++cell) {
        const double temp = temps[static_cast<std::size_t>(cell) % cfg.n_temp];
        const double gamma = gammas[static_cast<std::size_t>(cell) / cfg.n_temp];
        double mean = 0.0;
        for (int r = 0; r < cfg.replicates; ++r)
            mean += abs_final[cell * cfg.replicates + r];
        mean /= cfg.replicates;
        t.add_row({temp, gamma, mean, cfg.a / (2.0 * gamma)});
    }
    return t;
}

CriticalTempTables exp_critical_temperature(const CriticalTempConfig& cfg,
                                            std::uint64_t seed, int threads) {
    const int n_gamma = static_cast<int>(cfg.gammas.size());
    const long n_jobs = static_cast<long>(n_gamma) * cfg.n_temp * cfg.replicates;
    std::vector<double> abs_final(n_jobs, 0.0);

    auto temp_at = [&](int gi, int ti) {
        const double t_c = cfg.a / (2.0 * cfg.gammas[gi]);
        const double lo = cfg.t_lo_factor * t_c, hi = cfg.t_hi_factor * t_c;
        return lo + (hi - lo) * static_cast<double>(ti)
               / static_cast<double>(cfg.n_temp - 1);
    };

    parallel_for(n_jobs, threads, [&](long j) {
        const int rep = static_cast<int>(j % cfg.replicates);
        const long pair = j / cfg.replicates;
        const int ti = static_cast<int>(pair % cfg.n_temp);
        const int gi = static_cast<int>(pair / cfg.n_temp);
        const double gamma = cfg.gammas[gi];
        const double temp = temp_at(gi, ti);
        SplitMix64 rng(derive_stream(seed, static_cast<std::uint64_t>(j)));
        const double y0 = rng.uniform(-cfg.init_asym, cfg.init_asym);
        SimConfig sim;
        sim.params = RouterParams::from_skew(cfg.a, gamma, temp, 0.0);
        sim.eta = cfg.eta;
        sim.batch_size = cfg.batch_size;
        sim.steps = std::max<long>(1, std::lround(cfg.scaled_time / (gamma * cfg.eta)));
        sim.seed = rng.next();
        sim.init = {0.5 * y0, -0.5 * y0};
        (void)rep;
        const Trajectory traj = run_trajectory(sim);
        abs_final[j] = std::abs(trailing_mean(traj.u_hat, cfg.trailing_fraction));
    });

    CriticalTempTables res;
    res.scan.header = {"gamma", "temp", "final_abs_u_hat"};
    res.onset.header = {"gamma", "t_onset_measured", "t_critical"};
    for (int gi = 0; gi < n_gamma; ++gi) {
        double onset = kNaN;
        for (int ti = 0; ti < cfg.n_temp; ++ti) {
            const long pair = static_cast<long>(gi) * cfg.n_temp + ti;
            double mean = 0.0;
            for (int r = 0; r < cfg.replicates; ++r)
                mean += abs_final[pair * cfg.replicates + r];
            mean /= cfg.replicates;
            const double temp = temp_at(gi, ti);
            res.scan.add_row({cfg.gammas[gi], temp, mean});
            // largest scanned T whose final |u| still reaches the level
            if (mean >= cfg.onset_level && !(onset > temp)) onset = temp;
        }
        res.onset.add_row({cfg.gammas[gi], onset, cfg.a / (2.0 * cfg.gammas[gi])});
    }
    return res;
}

Table exp_hysteresis_width_vs_a(const WidthVsAConfig& cfg, std::uint64_t seed,
                                int threads) {
    const long n = static_cast<long>(cfg.a_values.size());
    std::vector<HysteresisOutcome> outcomes(n);
    parallel_for(n, threads, [&](long i) {
        const double a = cfg.a_values[i];
        const SweepSchedule sched =
            schedule_for(a, cfg.gamma, cfg.temp, cfg.n_h, cfg.span_factor,
                         cfg.fallback_span, cfg.steps_per_value);
        outcomes[i] = run_hysteresis(a, cfg.gamma, cfg.temp, 0.0, cfg.eta,
                                     cfg.batch_size, sched,
                                     derive_stream(seed, static_cast<std::uint64_t>(i)));
    });
    Table t;
    t.header = {"a", "width_measured", "width_predicted"};
    for (long i = 0; i < n; ++i)
        t.add_row({cfg.a_values[i], outcomes[i].width, 2.0 * outcomes[i].predicted_h});
    return t;
}

Table exp_balancing_feedback(const BalancingConfig& cfg, std::uint64_t seed,
                             int threads) {
    // One h grid for every rho (derived from rho = 0) so widths share
    // the same quantization.
    const SweepSchedule sched =
        schedule_for(cfg.a, cfg.gamma, cfg.temp, cfg.n_h, cfg.span_factor,
                     0.2, cfg.steps_per_value);
    const long n = static_cast<long>(cfg.rho_values.size());
    std::vector<HysteresisOutcome> outcomes(n);
    parallel_for(n, threads, [&](long i) {
        outcomes[i] = run_hysteresis(cfg.a, cfg.gamma, cfg.temp, cfg.rho_values[i],
                                     cfg.eta, cfg.batch_size, sched,
                                     derive_stream(seed, static_cast<std::uint64_t>(i)));
    });
    Table t;
    t.header = {"rho", "width_measured", "width_predicted"};
    for (long i = 0; i < n; ++i)
        t.add_row({cfg.rho_values[i], outcomes[i].width, 2.0 * outcomes[i].predicted_h});
    return t;
}

namespace {

std::vector<double> linear_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

}  // namespace

Table exp_soft_moe_bias_sweep(const SoftMoeConfig& cfg, std::uint64_t seed) {
    const std::vector<double> h_grid = linear_grid(cfg.h_min, cfg.h_max, cfg.n_h);
    const std::vector<double> xs = eval_grid(cfg.eval_points);

    SplitMix64 rng(derive_stream(seed, 0));
    SoftMoEModel model = init_soft_model(rng, h_grid.front(), cfg.temp,
                                         cfg.reg, cfg.lr);

    Table t;
    t.header = {"direction", "h", "mean_u", "x_star", "x_star_defined", "mse"};
    auto visit = [&](const std::string& direction, double h) {
        model.h = h;
        for (long s = 0; s < cfg.steps_per_value; ++s) {
            const Batch b = sample_batch(rng, cfg.batch_size);
            soft_sgd_step(model, b);
        }
        const bool defined = model.alpha != 0.0;
        t.add_row({direction, h, soft_expected_imbalance(model, xs),
                   defined ? model.boundary() : kNaN,
                   static_cast<std::int64_t>(defined), soft_mse(model, xs)});
    };
    for (double h : h_grid) visit("up", h);
    for (auto it = h_grid.rbegin(); it != h_grid.rend(); ++it) visit("down", *it);
    return t;
}

Table exp_hard_moe_bias_sweep(const HardMoeSweepConfig& cfg,
                              std::uint64_t seed, int threads) {
    const std::vector<double> h_grid = linear_grid(cfg.h_min, cfg.h_max, cfg.n_h);
    const std::vector<double> xs = eval_grid(cfg.eval_points);
    const long n_lambda = static_cast<long>(cfg.lambdas.size());

    struct Row {
        double lambda, h, u_hat, mean_p1, mse;
        std::string direction;
    };
    std::vector<std::vector<Row>> rows(n_lambda);

    parallel_for(n_lambda, threads, [&](long li) {
        // Same base stream for every lambda: curves differ only by the
        // penalty, not by the data draw.
        SplitMix64 rng(derive_stream(seed, 0));
        HardMoEModel model = init_hard_model(rng, h_grid.front(), cfg.temp,
                                             cfg.lambdas[li], cfg.lr);
        auto visit = [&](const std::string& direction, double h) {
            model.h = h;
            for (long s = 0; s < cfg.steps_per_value; ++s) {
                const Batch b = sample_batch(rng, cfg.batch_size);
                hard_sgd_step(model, b);
            }
            rows[li].push_back({cfg.lambdas[li], h, hard_load_imbalance(model, xs),
                                hard_mean_importance(model, xs),
                                hard_mse(model, xs), direction});
        };
        for (double h : h_grid) visit("up", h);
        for (auto it = h_grid.rbegin(); it != h_grid.rend(); ++it) visit("down", *it);
    });

    Table t;
    t.header = {"lambda_lb", "direction", "h", "u_hat_hard", "mean_p1", "mse"};
    for (const auto& per_lambda : rows)
        for (const auto& r : per_lambda)
            t.add_row({r.lambda, r.direction, r.h, r.u_hat, r.mean_p1, r.mse});
    return t;
}

Table exp_hard_moe_lambda_scan(const HardMoeLambdaConfig& cfg,
                               std::uint64_t seed, int threads) {
    const std::vector<double> xs = eval_grid(cfg.eval_points);
    const long n_jobs = static_cast<long>(cfg.lambdas.size()) * cfg.replicates;
    std::vector<double> abs_u(n_jobs), mse(n_jobs);

    parallel_for(n_jobs, threads, [&](long j) {
        const long li = j / cfg.replicates;
        const long rep = j % cfg.replicates;
        // Replicate rep sees the same stream at every lambda.
        SplitMix64 rng(derive_stream(seed, static_cast<std::uint64_t>(rep)));
        HardMoEModel model = init_hard_model(rng, cfg.h, cfg.temp,
                                             cfg.lambdas[li], cfg.lr);
        for (long s = 0; s < cfg.steps; ++s) {
            const Batch b = sample_batch(rng, cfg.batch_size);
            hard_sgd_step(model, b);
        }
        abs_u[j] = std::abs(hard_load_imbalance(model, xs));
        mse[j] = hard_mse(model, xs);
    });

    Table t;
    t.header = {"lambda_lb", "mean_abs_u_hat", "std_abs_u_hat", "mean_mse", "std_mse"};
    for (std::size_t li = 0; li < cfg.lambdas.size(); ++li) {
        double mu = 0.0, mm = 0.0;
        for (int r = 0; r < cfg.replicates; ++r) {
            mu += abs_u[li * cfg.replicates + r];
            mm += mse[li * cfg.replicates + r];
        }
        mu /= cfg.replicates;
        mm /= cfg.replicates;
        double su = 0.0, sm = 0.0;
        for (int r = 0; r < cfg.replicates; ++r) {
            su += (abs_u[li * cfg.replicates + r] - mu) * (abs_u[li * cfg.replicates + r] - mu);
            sm += (mse[li * cfg.replicates + r] - mm) * (mse[li * cfg.replicates + r] - mm);
        }
        if (cfg.replicates > 1) {
            su = std::sqrt(su / (cfg.replicates - 1));
            sm = std::sqrt(sm / (cfg.replicates - 1));
        }
        t.add_row({cfg.lambdas[li], mu, su, mm, sm});
    }
    return t;
}

// ---------------------------------------------------------------------------
// JSON registry
// ---------------------------------------------------------------------------

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    MeanFieldCompareConfig, a, gamma, temp, h, batch_size, eta, steps, runs,
    init_r1, init_r2)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    HysteresisConfig, a, gamma, temp, rho, eta, batch_size, n_h, span_factor,
    fallback_span, steps_per_value)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    CollapseMapConfig, a, temp_min, temp_max, n_temp, gamma_min, gamma_max,
    n_gamma, replicates, eta, batch_size, steps, init_asym, trailing_fraction)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    CriticalTempConfig, a, gammas, onset_level, t_lo_factor, t_hi_factor,
    n_temp, replicates, eta, batch_size, scaled_time, init_asym,
    trailing_fraction)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    WidthVsAConfig, a_values, gamma, temp, eta, batch_size, n_h, span_factor,
    fallback_span, steps_per_value)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    BalancingConfig, a, gamma, temp, rho_values, eta, batch_size, n_h,
    span_factor, steps_per_value)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    SoftMoeConfig, temp, lr, reg, h_min, h_max, n_h, steps_per_value,
    batch_size, eval_points)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    HardMoeSweepConfig, temp, lr, lambdas, h_min, h_max, n_h, steps_per_value,
    batch_size, eval_points)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    HardMoeLambdaConfig, h, temp, lr, lambdas, replicates, steps, batch_size,
    eval_points)

namespace {

template <typename Cfg>
nlohmann::json defaults_of() {
    return nlohmann::json(Cfg{});
}

nlohmann::json merge_checked(const nlohmann::json& defaults,
                             const nlohmann::json& overrides) {
    nlohmann::json out = defaults;
    for (const auto& [key, value] : overrides.items()) {
        if (!defaults.contains(key))
            throw std::invalid_argument("unknown config key: " + key);
        out[key] = value;
    }
    return out;
}

std::string fmt2(double v) { return format_double(v); }

}  // namespace

std::vector<std::string> experiment_names() {
    return {"mean-field-compare", "hysteresis", "collapse-map", "critical-temp",
            "width-vs-a", "balancing", "soft-moe", "hard-moe"};
}

nlohmann::json experiment_default_config(const std::string& name) {
    if (name == "mean-field-compare") return defaults_of<MeanFieldCompareConfig>();
    if (name == "hysteresis") return defaults_of<HysteresisConfig>();
    if (name == "collapse-map") return defaults_of<CollapseMapConfig>();
    if (name == "critical-temp") return defaults_of<CriticalTempConfig>();
    if (name == "width-vs-a") return defaults_of<WidthVsAConfig>();
    if (name == "balancing") return defaults_of<BalancingConfig>();
    if (name == "soft-moe") return defaults_of<SoftMoeConfig>();
    if (name == "hard-moe") {
        nlohmann::json j;
        j["sweep"] = defaults_of<HardMoeSweepConfig>();
        j["lambda_scan"] = defaults_of<HardMoeLambdaConfig>();
        return j;
    }
    throw std::invalid_argument("unknown experiment: " + name);
}

nlohmann::json experiment_resolve_config(const std::string& name,
                                         const nlohmann::json& overrides) {
    const nlohmann::json defaults = experiment_default_config(name);
    if (name == "hard-moe") {
        nlohmann::json out = defaults;
        for (const auto& [key, value] : overrides.items()) {
            if (key != "sweep" && key != "lambda_scan")
                throw std::invalid_argument("unknown config key: " + key);
            out[key] = merge_checked(defaults[key], value);
        }
        return out;
    }
    return merge_checked(defaults, overrides);
}

ExperimentOutput run_experiment(const std::string& name,
                                const nlohmann::json& config,
                                std::uint64_t seed, int threads) {
    ExperimentOutput out;
    if (name == "mean-field-compare") {
        const auto cfg = config.get<MeanFieldCompareConfig>();
        Table t = exp_mean_field_comparison(cfg, seed, threads);
        double max_dev = 0.0;
        for (const auto& row : t.rows)
            max_dev = std::max(max_dev, std::abs(std::get<double>(row[1])
                                                 - std::get<double>(row[3])));
        out.summary = "max |mean u_hat - u_mf| = " + fmt2(max_dev)
                    + " over " + std::to_string(t.rows.size()) + " steps";
        out.tables.emplace_back("mean_field_compare", std::move(t));
    } else if (name == "hysteresis") {
        const auto cfg = config.get<HysteresisConfig>();
        HysteresisTables r = exp_hysteresis(cfg, seed);
        out.summary = "width = " + fmt2(r.outcome.width)
                    + ", predicted 2H = " + fmt2(2.0 * r.outcome.predicted_h);
        out.tables.emplace_back("hysteresis_sweep", std::move(r.sweep));
        out.tables.emplace_back("hysteresis_summary", std::move(r.summary));
    } else if (name == "collapse-map") {
        const auto cfg = config.get<CollapseMapConfig>();
        Table t = exp_collapse_map(cfg, seed, threads);
        out.summary = std::to_string(t.rows.size()) + " cells at a = " + fmt2(cfg.a);
        out.tables.emplace_back("collapse_map", std::move(t));
    } else if (name == "critical-temp") {
        const auto cfg = config.get<CriticalTempConfig>();
        CriticalTempTables r = exp_critical_temperature(cfg, seed, threads);
        out.summary = std::to_string(r.onset.rows.size()) + " gamma values";
        out.tables.emplace_back("critical_temperature", std::move(r.onset));
        out.tables.emplace_back("critical_temperature_scan", std::move(r.scan));
    } else if (name == "width-vs-a") {
        const auto cfg = config.get<WidthVsAConfig>();
        Table t = exp_hysteresis_width_vs_a(cfg, seed, threads);
        out.summary = std::to_string(t.rows.size()) + " feedback strengths";
        out.tables.emplace_back("width_vs_a", std::move(t));
    } else if (name == "balancing") {
        const auto cfg = config.get<BalancingConfig>();
        Table t = exp_balancing_feedback(cfg, seed, threads);
        out.summary = std::to_string(t.rows.size()) + " rho values at a = " + fmt2(cfg.a);
        out.tables.emplace_back("balancing", std::move(t));
    } else if (name == "soft-moe") {
        const auto cfg = config.get<SoftMoeConfig>();
        Table t = exp_soft_moe_bias_sweep(cfg, seed);
        out.summary = std::to_string(t.rows.size()) + " sweep records";
        out.tables.emplace_back("soft_moe_sweep", std::move(t));
    } else if (name == "hard-moe") {
        const auto sweep_cfg = config.at("sweep").get<HardMoeSweepConfig>();
        const auto scan_cfg = config.at("lambda_scan").get<HardMoeLambdaConfig>();
        Table sweep = exp_hard_moe_bias_sweep(sweep_cfg, seed, threads);
        Table scan = exp_hard_moe_lambda_scan(scan_cfg, derive_stream(seed, 1),
                                              threads);
        out.summary = std::to_string(sweep.rows.size()) + " sweep records, "
                    + std::to_string(scan.rows.size()) + " lambda points";
        out.tables.emplace_back("hard_moe_sweep", std::move(sweep));
        out.tables.emplace_back("hard_moe_lambda_scan", std::move(scan));
    } else {
        throw std::invalid_argument("unknown experiment: " + name);
    }
    return out;
}

}  // namespace routerlab
