// experiments.hpp
// Scripted experiment protocols: mean-field comparison, quasi-static
// hysteresis sweeps, collapse maps, threshold/width/balancing
// validations, and the trainable-MoE bias sweeps and penalty scan.
//
// Every experiment is a pure function of (config, seed): re-running
// produces byte-identical tables, independent of the thread count.
// Predicted columns (H(a), T_c, effective thresholds) always come from
// the bifurcation module.
#ifndef ROUTERLAB_EXPERIMENTS_HPP
#define ROUTERLAB_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "routerlab/bifurcation.hpp"
#include "routerlab/simulator.hpp"
#include "routerlab/table.hpp"

namespace routerlab {

// ---------------------------------------------------------------------------
// Quasi-static sweep machinery
// ---------------------------------------------------------------------------

struct SweepSchedule {
    std::vector<double> h_values;  // strictly ascending grid
    long steps_per_value = 4000;
    bool warm_start = true;

    void validate() const;
};

/// Uniform grid of n_h values over +-span, ascending.
SweepSchedule make_schedule(double span, int n_h, long steps_per_value);

/// Default slow schedule: +-1.5*H(a) when the bistable strip is
/// nonempty, else a fixed fallback span of 0.2.
SweepSchedule default_schedule(double a, double gamma, double temp,
                               long steps_per_value);

struct SweepRecord {
    double h;
    double mean_u_hat;  // trailing-window mean of the settle phase
};

struct HysteresisOutcome {
    std::vector<SweepRecord> up;
    std::vector<SweepRecord> down;
    // first grid h (in sweep order) where the trailing mean changes sign;
    // NaN with switched=false when no sign change occurred
    double switch_up;
    double switch_down;
    bool switched_up;
    bool switched_down;
    double width;        // switch_up - switch_down, NaN if either missing
    double predicted_h;  // H(a_eff) with a_eff = max(a - rho, 0)
};

/// Up sweep from the lower branch, then a down sweep continuing from
/// the up sweep's final state. The trailing 50% of each settle phase is
/// averaged.
HysteresisOutcome run_hysteresis(double a, double gamma, double temp,
                                 double rho, double eta, int batch_size,
                                 const SweepSchedule& schedule,
                                 std::uint64_t seed);

// ---------------------------------------------------------------------------
// Batch-routing experiments (paper-style protocols)
// ---------------------------------------------------------------------------

struct MeanFieldCompareConfig {
    double a = 3.0;
    double gamma = 1.0;
    double temp = 1.0;
    double h = 0.08;
    int batch_size = 512;
    double eta = 0.002;
    long steps = 10000;
    int runs = 40;
    double init_r1 = 0.0;
    double init_r2 = 0.0;
};

/// Columns: time, mean_u_hat, std_u_hat, u_mf, aligned on t = n*eta.
Table exp_mean_field_comparison(const MeanFieldCompareConfig& cfg,
                                std::uint64_t seed, int threads);

struct HysteresisConfig {
    double a = 4.0;
    double gamma = 1.0;
    double temp = 1.0;
    double rho = 0.0;
    double eta = 0.002;
    int batch_size = 512;
    int n_h = 81;
    double span_factor = 1.5;    // grid half-width = span_factor * H(a_eff)
    double fallback_span = 0.2;  // used when the bistable strip is empty
    long steps_per_value = 12000;
};

struct HysteresisTables {
    Table sweep;    // direction, h, mean_u_hat
    Table summary;  // direction, switched, switch_h, fold_h_pred
    HysteresisOutcome outcome;
};

HysteresisTables exp_hysteresis(const HysteresisConfig& cfg, std::uint64_t seed);

struct CollapseMapConfig {
    double a = 3.0;
    double temp_min = 0.1, temp_max = 3.0;
    int n_temp = 41;
    double gamma_min = 0.1, gamma_max = 3.0;
    int n_gamma = 41;
    int replicates = 8;
    double eta = 0.005;
    int batch_size = 512;
    long steps = 8000;
    double init_asym = 0.01;         // y0 ~ U(-init_asym, init_asym)
    double trailing_fraction = 0.25;
};

/// Columns: temp, gamma, mean_abs_u_hat, temp_threshold (= a/(2 gamma)).
/// Grids are log-spaced; h = 0 throughout.
Table exp_collapse_map(const CollapseMapConfig& cfg, std::uint64_t seed,
                       int threads);

struct CriticalTempConfig {
    double a = 3.0;
    std::vector<double> gammas = {0.5, 1.0, 2.0};
    double onset_level = 0.1;
    double t_lo_factor = 0.4;  // scan grid spans [t_lo, t_hi] * T_c
    double t_hi_factor = 1.1;
    int n_temp = 29;
    int replicates = 8;
    double eta = 0.005;
    int batch_size = 512;
    double scaled_time = 40.0;  // gamma * t_end, so runtime tracks 1/gamma
    double init_asym = 0.01;
    double trailing_fraction = 0.25;
};

struct CriticalTempTables {
    Table onset;  // gamma, t_onset_measured, t_critical
    Table scan;   // gamma, temp, final_abs_u_hat
};

/// The measured onset for each gamma is the largest scanned T whose
/// final |u_hat| still reaches onset_level (NaN when none does).
CriticalTempTables exp_critical_temperature(const CriticalTempConfig& cfg,
                                            std::uint64_t seed, int threads);

struct WidthVsAConfig {
    std::vector<double> a_values = {2.5, 3.0, 4.0, 5.0};
    double gamma = 1.0;
    double temp = 1.0;
    double eta = 0.002;
    int batch_size = 512;
    int n_h = 81;
    double span_factor = 1.5;
    double fallback_span = 0.2;
    long steps_per_value = 12000;
};

/// Columns: a, width_measured, width_predicted (= 2 H(a)).
Table exp_hysteresis_width_vs_a(const WidthVsAConfig& cfg, std::uint64_t seed,
                                int threads);

struct BalancingConfig {
    double a = 4.0;
    double gamma = 1.0;
    double temp = 1.0;
    std::vector<double> rho_values = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2,
                                      1.4, 1.6, 1.8, 2.0, 2.2, 2.4};
    double eta = 0.002;
    int batch_size = 512;
    int n_h = 81;
    double span_factor = 1.5;  // h grid fixed from rho = 0 for all rho
    long steps_per_value = 12000;
};

/// Columns: rho, width_measured, width_predicted (= 2 H(a - rho)).
Table exp_balancing_feedback(const BalancingConfig& cfg, std::uint64_t seed,
                             int threads);

// ---------------------------------------------------------------------------
// Trainable-MoE experiments
// ---------------------------------------------------------------------------

struct SoftMoeConfig {
    double temp = 0.2;
    double lr = 0.05;
    double reg = 1e-4;
    double h_min = -5.0, h_max = 5.0;
    int n_h = 41;
    long steps_per_value = 2000;
    int batch_size = 64;
    int eval_points = 201;
};

/// Columns: direction, h, mean_u, x_star, x_star_defined, mse.
/// Warm-started chain: up sweep, then down sweep from the final state.
/// x_star is the nan sentinel whenever |alpha| is numerically zero.
Table exp_soft_moe_bias_sweep(const SoftMoeConfig& cfg, std::uint64_t seed);

struct HardMoeSweepConfig {
    double temp = 0.5;
    double lr = 0.05;
    std::vector<double> lambdas = {0.0, 1.0};
    double h_min = -5.0, h_max = 5.0;
    int n_h = 41;
    long steps_per_value = 2000;
    int batch_size = 64;
    int eval_points = 201;
};

/// Columns: lambda_lb, direction, h, u_hat_hard, mean_p1, mse.
Table exp_hard_moe_bias_sweep(const HardMoeSweepConfig& cfg,
                              std::uint64_t seed, int threads);

struct HardMoeLambdaConfig {
    double h = 2.0;
    double temp = 0.5;
    double lr = 0.05;
    std::vector<double> lambdas = {0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0};
    int replicates = 5;
    long steps = 4000;
    int batch_size = 64;
    int eval_points = 201;
};

/// Columns: lambda_lb, mean_abs_u_hat, std_abs_u_hat, mean_mse, std_mse.
/// Fresh random init per (lambda, replicate).
Table exp_hard_moe_lambda_scan(const HardMoeLambdaConfig& cfg,
                               std::uint64_t seed, int threads);

// ---------------------------------------------------------------------------
// Named registry (used by the CLI and by manifest replay)
// ---------------------------------------------------------------------------

struct ExperimentOutput {
    // file stem -> table; the CLI writes <stem>.csv for each
    std::vector<std::pair<std::string, Table>> tables;
    std::string summary;  // one human-readable line
};

std::vector<std::string> experiment_names();

/// Defaults for `name` as JSON (the fully-materialized config).
nlohmann::json experiment_default_config(const std::string& name);

/// Defaults overlaid with `overrides` (unknown keys rejected).
nlohmann::json experiment_resolve_config(const std::string& name,
                                         const nlohmann::json& overrides);

/// Runs experiment `name` with a fully-resolved config.
ExperimentOutput run_experiment(const std::string& name,
                                const nlohmann::json& config,
                                std::uint64_t seed, int threads);

}  // namespace routerlab

#endif
