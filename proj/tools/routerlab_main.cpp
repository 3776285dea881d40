// routerlab command-line front end.
//
// Subcommands cover the closed-form operations (equilibria, fold-curve,
// hysteresis-boundary), the simulators (simulate, mean-field) and the
// experiment suite (exp ...). Every run writes CSV data files plus a
// manifest JSON that fully describes the run; `replay` reruns a
// manifest and reproduces the CSV files byte for byte.
//
// Exit codes: 0 success, 2 usage, 3 parameter-domain error, 4 I/O error.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "routerlab/bifurcation.hpp"
#include "routerlab/experiments.hpp"
#include "routerlab/simulator.hpp"
#include "routerlab/table.hpp"
#include "routerlab/version.hpp"

namespace rl = routerlab;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Basic (non-experiment) operations, config-struct style so that they
// share the manifest/replay machinery with the experiments.
// ---------------------------------------------------------------------------

struct EquilibriaConfig {
    double a = 4.0, gamma = 1.0, temp = 1.0, h = 0.0;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(EquilibriaConfig, a, gamma, temp, h)

struct FoldCurveConfig {
    double gamma = 1.0, temp = 1.0;
    double q_min = -2.5, q_max = 2.5;
    int q_count = 201;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(FoldCurveConfig, gamma, temp,
                                                q_min, q_max, q_count)

struct BoundaryConfig {
    double a = 4.0, gamma = 1.0, temp = 1.0;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(BoundaryConfig, a, gamma, temp)

struct SimulateConfig {
    double a = 3.0, gamma = 1.0, temp = 1.0, h = 0.0;
    double eta = 0.002, rho = 0.0;
    int batch_size = 512;
    long steps = 5000;
    double init_r1 = 0.0, init_r2 = 0.0;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SimulateConfig, a, gamma, temp,
                                                h, eta, rho, batch_size, steps,
                                                init_r1, init_r2)

struct MeanFieldConfig {
    double a = 3.0, gamma = 1.0, temp = 1.0, h = 0.0;
    double rho = 0.0, t_end = 20.0, dt = 0.001;
    double init_r1 = 0.0, init_r2 = 0.0;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(MeanFieldConfig, a, gamma, temp,
                                                h, rho, t_end, dt, init_r1,
                                                init_r2)

const std::vector<std::string> kBasicNames = {
    "equilibria", "fold-curve", "hysteresis-boundary", "simulate", "mean-field"};

json basic_default_config(const std::string& name) {
    if (name == "equilibria") return json(EquilibriaConfig{});
    if (name == "fold-curve") return json(FoldCurveConfig{});
    if (name == "hysteresis-boundary") return json(BoundaryConfig{});
    if (name == "simulate") return json(SimulateConfig{});
    if (name == "mean-field") return json(MeanFieldConfig{});
    throw std::invalid_argument("unknown subcommand: " + name);
}

rl::ExperimentOutput run_basic(const std::string& name, const json& config,
                               std::uint64_t seed) {
    rl::ExperimentOutput out;
    if (name == "equilibria") {
        const auto cfg = config.get<EquilibriaConfig>();
        const auto set = rl::find_equilibria(
            rl::RouterParams::from_skew(cfg.a, cfg.gamma, cfg.temp, cfg.h));
        rl::Table t;
        t.header = {"y", "f_y", "stability"};
        for (const auto& e : set.equilibria)
            t.add_row({e.y, e.f_y, std::string(rl::to_string(e.stability))});
        out.summary = std::to_string(set.equilibria.size()) + " equilibria ("
                    + (set.regime == rl::Regime::bistable ? "bistable" : "monostable")
                    + ")";
        out.tables.emplace_back("equilibria", std::move(t));
    } else if (name == "fold-curve") {
        const auto cfg = config.get<FoldCurveConfig>();
        if (cfg.q_count < 2 || !(cfg.q_max > cfg.q_min))
            throw std::invalid_argument("fold-curve: need q_max > q_min and q_count >= 2");
        std::vector<double> qs(cfg.q_count);
        for (int i = 0; i < cfg.q_count; ++i)
            qs[i] = cfg.q_min + (cfg.q_max - cfg.q_min) * static_cast<double>(i)
                    / static_cast<double>(cfg.q_count - 1);
        rl::Table t;
        t.header = {"q", "a", "h"};
        for (const auto& p : rl::fold_curve(qs, cfg.gamma, cfg.temp))
            t.add_row({p.q, p.a, p.h});
        out.summary = std::to_string(qs.size()) + " fold-curve points";
        out.tables.emplace_back("fold_curve", std::move(t));
    } else if (name == "hysteresis-boundary") {
        const auto cfg = config.get<BoundaryConfig>();
        const double H = rl::hysteresis_boundary(cfg.a, cfg.gamma, cfg.temp);
        rl::Table t;
        t.header = {"a", "gamma", "temp", "H"};
        t.add_row({cfg.a, cfg.gamma, cfg.temp, H});
        out.summary = "H = " + rl::format_double(H);
        out.tables.emplace_back("hysteresis_boundary", std::move(t));
    } else if (name == "simulate") {
        const auto cfg = config.get<SimulateConfig>();
        rl::SimConfig sim;
        sim.params = rl::RouterParams::from_skew(cfg.a, cfg.gamma, cfg.temp, cfg.h);
        sim.eta = cfg.eta;
        sim.batch_size = cfg.batch_size;
        sim.rho = cfg.rho;
        sim.steps = cfg.steps;
        sim.seed = seed;
        sim.init = {cfg.init_r1, cfg.init_r2};
        const rl::Trajectory traj = rl::run_trajectory(sim);
        rl::Table t;
        t.header = {"time", "y", "u_hat", "l1"};
        for (std::size_t i = 0; i < traj.times.size(); ++i)
            t.add_row({traj.times[i], traj.y[i], traj.u_hat[i], traj.l1[i]});
        out.summary = std::to_string(traj.times.size()) + " steps, final y = "
                    + rl::format_double(traj.final_state.y());
        out.tables.emplace_back("trajectory", std::move(t));
    } else if (name == "mean-field") {
        const auto cfg = config.get<MeanFieldConfig>();
        const auto params = rl::RouterParams::from_skew(cfg.a, cfg.gamma,
                                                        cfg.temp, cfg.h);
        const rl::Trajectory traj = rl::integrate_mean_field(
            params, cfg.rho, {cfg.init_r1, cfg.init_r2}, cfg.t_end, cfg.dt);
        rl::Table t;
        t.header = {"time", "y", "u", "p1"};
        for (std::size_t i = 0; i < traj.times.size(); ++i)
            t.add_row({traj.times[i], traj.y[i], traj.u_hat[i], traj.l1[i]});
        out.summary = "final y = " + rl::format_double(traj.final_state.y());
        out.tables.emplace_back("mean_field", std::move(t));
    } else {
        throw std::invalid_argument("unknown subcommand: " + name);
    }
    return out;
}

bool is_basic(const std::string& name) {
    for (const auto& n : kBasicNames)
        if (n == name) return true;
    return false;
}

json subcommand_default_config(const std::string& name) {
    return is_basic(name) ? basic_default_config(name)
                          : rl::experiment_default_config(name);
}

json subcommand_resolve_config(const std::string& name, const json& overrides) {
    if (is_basic(name)) {
        json out = basic_default_config(name);
        for (const auto& [key, value] : overrides.items()) {
            if (!out.contains(key))
                throw std::invalid_argument("unknown config key: " + key);
            out[key] = value;
        }
        return out;
    }
    return rl::experiment_resolve_config(name, overrides);
}

rl::ExperimentOutput run_subcommand(const std::string& name, const json& config,
                                    std::uint64_t seed, int threads) {
    return is_basic(name) ? run_basic(name, config, seed)
                          : rl::run_experiment(name, config, seed, threads);
}

// ---------------------------------------------------------------------------
// Flag plumbing: every key of the default config becomes a --flag whose
// default is the config default; flags set on the command line override
// the --config file, which overrides the defaults.
// ---------------------------------------------------------------------------

std::string key_to_flag(const std::string& key) {
    std::string f = "--";
    for (char c : key) f += c == '_' ? '-' : c;
    return f;
}

std::string default_str_of(const json& v) {
    if (v.is_array()) {
        std::string s;
        for (const auto& e : v) {
            if (!s.empty()) s += ',';
            s += e.is_number_integer() ? std::to_string(e.get<long long>())
                                       : rl::format_double(e.get<double>());
        }
        return s;
    }
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    return rl::format_double(v.get<double>());
}

json flag_value_to_json(const std::string& text, const json& like) {
    if (like.is_array()) {
        json arr = json::array();
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const std::size_t comma = text.find(',', pos);
            const std::string tok = text.substr(
                pos, comma == std::string::npos ? std::string::npos : comma - pos);
            if (!tok.empty()) arr.push_back(std::stod(tok));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        return arr;
    }
    if (like.is_number_integer()) return std::stoll(text);
    return std::stod(text);
}

struct FlagSet {
    // flat key path (e.g. "a" or "sweep.temp") -> captured text
    std::map<std::string, std::string> texts;

    void attach(CLI::App* cmd, const json& defaults, const std::string& prefix) {
        for (const auto& [key, value] : defaults.items()) {
            const std::string path = prefix.empty() ? key : prefix + "." + key;
            if (value.is_object()) {
                attach(cmd, value, path);
                continue;
            }
            std::string flag = key_to_flag(path);
            for (auto& c : flag)
                if (c == '.') c = '-';
            cmd->add_option(flag, texts[path])
                ->default_str(default_str_of(value));
        }
    }

    json overrides(CLI::App* cmd, const json& defaults) const {
        json out = json::object();
        for (const auto& [path, text] : texts) {
            std::string flag = key_to_flag(path);
            for (auto& c : flag)
                if (c == '.') c = '-';
            if (cmd->count(flag) == 0) continue;
            const json* like = &defaults;
            json* slot = &out;
            std::size_t pos = 0;
            for (;;) {
                const std::size_t dot = path.find('.', pos);
                const std::string part = path.substr(
                    pos, dot == std::string::npos ? std::string::npos : dot - pos);
                like = &like->at(part);
                if (dot == std::string::npos) {
                    (*slot)[part] = flag_value_to_json(text, *like);
                    break;
                }
                slot = &(*slot)[part];
                pos = dot + 1;
            }
        }
        return out;
    }
};

struct CommonOpts {
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    int threads = 0;  // 0 = hardware concurrency
    bool to_stdout = false;
    std::string config_path;
};

void attach_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--seed", c.seed, "Master RNG seed")->capture_default_str();
    cmd->add_option("--out-dir", c.out_dir, "Output directory")->capture_default_str();
    cmd->add_option("--threads", c.threads,
                    "Worker thread cap (0 = hardware concurrency)")
        ->capture_default_str();
    cmd->add_flag("--stdout", c.to_stdout, "Also print CSV data to stdout");
    cmd->add_option("--config", c.config_path,
                    "JSON config file; command-line flags override it");
}

int effective_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

json load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::ios_base::failure("cannot read config file: " + path);
    json j;
    f >> j;
    return j;
}

std::string sanitize(const std::string& name) {
    std::string s = name;
    for (auto& c : s)
        if (c == ' ' || c == '-') c = '_';
    return s;
}

int execute(const std::string& display_name, const json& resolved,
            const CommonOpts& common) {
    const auto t0 = std::chrono::steady_clock::now();
    const int threads = effective_threads(common.threads);
    rl::ExperimentOutput out = run_subcommand(display_name, resolved,
                                              common.seed, threads);

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(common.out_dir, ec);
    if (ec) throw std::ios_base::failure("cannot create out dir: " + common.out_dir);

    json manifest;
    manifest["subcommand"] = display_name;
    manifest["seed"] = common.seed;
    manifest["threads"] = threads;
    manifest["config"] = resolved;
    manifest["version"] = rl::kVersion;
    json outputs = json::array();
    for (const auto& [stem, table] : out.tables) {
        const std::string fname = stem + ".csv";
        rl::write_file((fs::path(common.out_dir) / fname).string(), table.to_csv());
        outputs.push_back(fname);
    }
    manifest["outputs"] = outputs;
    const auto t1 = std::chrono::steady_clock::now();
    manifest["wall_time_s"] =
        std::chrono::duration<double>(t1 - t0).count();
    const std::string manifest_name = sanitize(display_name) + "_manifest.json";
    rl::write_file((fs::path(common.out_dir) / manifest_name).string(),
                   manifest.dump(2) + "\n");

    std::cout << display_name << ": " << out.summary << "\n";
    for (const auto& o : outputs)
        std::cout << "  wrote " << (fs::path(common.out_dir) / o.get<std::string>()).string()
                  << "\n";
    std::cout << "  wrote " << (fs::path(common.out_dir) / manifest_name).string()
              << "\n";
    if (common.to_stdout)
        for (const auto& [stem, table] : out.tables)
            std::cout << "# " << stem << ".csv\n" << table.to_csv();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"routerlab: two-expert adaptive softmax router laboratory"};
    app.require_subcommand(1);

    struct Registered {
        std::string name;
        CLI::App* cmd;
        CommonOpts common;
        FlagSet flags;
        json defaults;
    };
    std::vector<std::unique_ptr<Registered>> cmds;

    auto register_cmd = [&](CLI::App* parent, const std::string& name,
                            const std::string& display, const std::string& desc) {
        auto reg = std::make_unique<Registered>();
        reg->name = display;
        reg->cmd = parent->add_subcommand(name, desc);
        reg->defaults = subcommand_default_config(display);
        reg->flags.attach(reg->cmd, reg->defaults, "");
        attach_common(reg->cmd, reg->common);
        cmds.push_back(std::move(reg));
    };

    register_cmd(&app, "equilibria", "equilibria",
                 "Roots of F(y) = 0 with stability classification");
    register_cmd(&app, "fold-curve", "fold-curve",
                 "Parametric fold curve (a(q), h(q))");
    register_cmd(&app, "hysteresis-boundary", "hysteresis-boundary",
                 "Bistable strip half-width H(a)");
    register_cmd(&app, "simulate", "simulate",
                 "Stochastic batch-routing trajectory");
    register_cmd(&app, "mean-field", "mean-field",
                 "Deterministic mean-field ODE trajectory");

    CLI::App* exp = app.add_subcommand("exp", "Experiment suite");
    exp->require_subcommand(1);
    register_cmd(exp, "mean-field-compare", "mean-field-compare",
                 "Ensemble mean vs mean-field ODE");
    register_cmd(exp, "hysteresis", "hysteresis",
                 "Quasi-static up/down sweep of the skew h");
    register_cmd(exp, "collapse-map", "collapse-map",
                 "Final |u_hat| over a (T, gamma) grid at h = 0");
    register_cmd(exp, "critical-temp", "critical-temp",
                 "Finite-time collapse onset vs T_c = a/(2 gamma)");
    register_cmd(exp, "width-vs-a", "width-vs-a",
                 "Hysteresis width against 2 H(a)");
    register_cmd(exp, "balancing", "balancing",
                 "Hysteresis suppression by load feedback rho");
    register_cmd(exp, "soft-moe", "soft-moe",
                 "Trainable soft-mixture bias sweep");
    register_cmd(exp, "hard-moe", "hard-moe",
                 "Hard top-1 bias sweep and balancing-penalty scan");

    // replay
    CLI::App* replay = app.add_subcommand("replay", "Re-run a manifest");
    std::string manifest_path;
    CommonOpts replay_common;
    replay->add_option("manifest", manifest_path, "Path to a *_manifest.json")
        ->required();
    replay->add_option("--out-dir", replay_common.out_dir, "Output directory")
        ->capture_default_str();
    replay->add_option("--threads", replay_common.threads,
                       "Worker thread cap (0 = hardware concurrency)")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (replay->parsed()) {
            const json manifest = load_config_file(manifest_path);
            const std::string name = manifest.at("subcommand").get<std::string>();
            CommonOpts common = replay_common;
            common.seed = manifest.at("seed").get<std::uint64_t>();
            const json resolved =
                subcommand_resolve_config(name, manifest.at("config"));
            return execute(name, resolved, common);
        }
        for (const auto& reg : cmds) {
            if (!reg->cmd->parsed()) continue;
            // A nested subcommand counts as parsed only when the branch
            // actually ran; "exp" itself is not in cmds.
            json file_overrides = json::object();
            if (!reg->common.config_path.empty())
                file_overrides = load_config_file(reg->common.config_path);
            json merged = subcommand_resolve_config(reg->name, file_overrides);
            const json flag_overrides = reg->flags.overrides(reg->cmd, reg->defaults);
            merged = subcommand_resolve_config(
                reg->name, [&] {
                    json o = file_overrides;
                    for (const auto& [k, v] : flag_overrides.items()) {
                        if (o.contains(k) && o[k].is_object() && v.is_object())
                            for (const auto& [k2, v2] : v.items()) o[k][k2] = v2;
                        else
                            o[k] = v;
                    }
                    return o;
                }());
            return execute(reg->name, merged, reg->common);
        }
        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 3;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
