// Black-box tests of the routerlab CLI: exit codes, help text, flag and
// config-file precedence, output files, and rerun determinism.
// argv[1] is the binary path.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

int g_failures = 0;
std::string g_bin;
fs::path g_tmp;

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run(const std::string& args) {
    const fs::path out_file = g_tmp / "cmd_output.txt";
    const std::string cmd = g_bin + " " + args + " > " + out_file.string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    std::ifstream f(out_file);
    std::ostringstream ss;
    ss << f.rdbuf();
    return {WEXITSTATUS(raw), ss.str()};
}

void check(bool ok, const std::string& what) {
    if (!ok) {
        std::cout << "[FAIL] " << what << "\n";
        ++g_failures;
    } else {
        std::cout << "[ok] " << what << "\n";
    }
}

std::string read_file(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_tests <routerlab binary>\n";
        return 99;
    }
    g_bin = argv[1];
    g_tmp = fs::temp_directory_path() / "routerlab_cli_tests";
    fs::remove_all(g_tmp);
    fs::create_directories(g_tmp);

    // --- help and usage -----------------------------------------------------
    {
        const RunResult help = run("--help");
        check(help.exit_code == 0, "--help exits 0");
        check(contains(help.output, "equilibria") && contains(help.output, "exp"),
              "--help lists subcommands");

        const RunResult sub_help = run("equilibria --help");
        check(sub_help.exit_code == 0, "subcommand --help exits 0");
        check(contains(sub_help.output, "--a") && contains(sub_help.output, "--gamma")
                  && contains(sub_help.output, "--seed")
                  && contains(sub_help.output, "--out-dir"),
              "subcommand --help lists flags");

        const RunResult exp_help = run("exp hysteresis --help");
        check(exp_help.exit_code == 0 && contains(exp_help.output, "--steps-per-value")
                  && contains(exp_help.output, "12000"),
              "exp hysteresis --help lists flags with defaults");

        check(run("no-such-command").exit_code == 2, "unknown subcommand exits 2");
        check(run("equilibria --bogus 1").exit_code == 2, "unknown flag exits 2");
        check(run("").exit_code == 2, "missing subcommand exits 2");
    }

    // --- domain and I/O errors ----------------------------------------------
    {
        const RunResult bad = run("equilibria --temp -1 --out-dir " + (g_tmp / "x").string());
        check(bad.exit_code == 3, "invalid domain exits 3");
        check(contains(bad.output, "temp"), "domain error names the violated invariant");

        const fs::path blocker = g_tmp / "blocker";
        std::ofstream(blocker) << "file";
        const RunResult io = run("hysteresis-boundary --a 2 --out-dir "
                                 + (blocker / "sub").string());
        check(io.exit_code == 4, "unwritable output path exits 4");
    }

    // --- equilibria example --------------------------------------------------
    {
        const fs::path d = g_tmp / "eq";
        const RunResult r = run("equilibria --a 4 --gamma 1 --temp 1 --h 0 --out-dir "
                                + d.string());
        check(r.exit_code == 0, "equilibria runs");
        const std::string csv = read_file(d / "equilibria.csv");
        check(contains(csv, "y,f_y,stability"), "equilibria csv header");
        std::istringstream lines(csv);
        std::string line;
        std::getline(lines, line);
        std::vector<std::vector<std::string>> rows;
        while (std::getline(lines, line)) {
            std::vector<std::string> cells;
            std::istringstream ls(line);
            std::string cell;
            while (std::getline(ls, cell, ',')) cells.push_back(cell);
            rows.push_back(cells);
        }
        check(rows.size() == 3, "equilibria: three rows at a=4");
        if (rows.size() == 3) {
            check(std::abs(std::stod(rows[0][0]) + 3.8301) < 2e-3
                      && std::abs(std::stod(rows[1][0])) < 1e-9
                      && std::abs(std::stod(rows[2][0]) - 3.8301) < 2e-3,
                  "equilibria: y values near {-3.8301, 0, 3.8301}");
            check(rows[0][2] == "stable" && rows[1][2] == "unstable"
                      && rows[2][2] == "stable",
                  "equilibria: stability flags");
        }
        check(contains(read_file(d / "equilibria_manifest.json"), "\"subcommand\""),
              "manifest written");
    }

    // --- hysteresis-boundary at threshold ------------------------------------
    {
        const fs::path d = g_tmp / "hb";
        const RunResult r = run("hysteresis-boundary --a 2 --gamma 1 --temp 1 --out-dir "
                                + d.string());
        check(r.exit_code == 0 && contains(r.output, "H = 0"),
              "hysteresis-boundary --a 2 prints H = 0");
        check(contains(read_file(d / "hysteresis_boundary.csv"), "2,1,1,0"),
              "boundary csv row");
    }

    // --- config file + flag precedence ---------------------------------------
    {
        const fs::path cfgfile = g_tmp / "cfg.json";
        std::ofstream(cfgfile) << R"({"a": 5.0, "n_h": 11, "steps_per_value": 200})";
        const fs::path d = g_tmp / "cfgrun";
        const RunResult r = run("exp hysteresis --config " + cfgfile.string()
                                + " --a 4 --seed 3 --out-dir " + d.string());
        check(r.exit_code == 0, "config + flags run");
        const std::string manifest = read_file(d / "hysteresis_manifest.json");
        check(contains(manifest, "\"a\": 4"), "flag overrides config file");
        check(contains(manifest, "\"n_h\": 11"), "config file overrides default");
        check(contains(manifest, "\"steps_per_value\": 200"), "config value kept");

        std::ofstream(g_tmp / "bad.json") << R"({"bogus_key": 1})";
        check(run("exp hysteresis --config " + (g_tmp / "bad.json").string()).exit_code == 3,
              "unknown config key exits 3");
    }

    // --- stdout flag ----------------------------------------------------------
    {
        const RunResult r = run("fold-curve --q-count 5 --stdout --out-dir "
                                + (g_tmp / "fc").string());
        check(r.exit_code == 0 && contains(r.output, "q,a,h"),
              "--stdout prints CSV data");
        const RunResult quiet = run("fold-curve --q-count 5 --out-dir "
                                    + (g_tmp / "fc2").string());
        check(quiet.exit_code == 0 && !contains(quiet.output, "q,a,h"),
              "no CSV on stdout without --stdout");
    }

    // --- determinism of a full default run (spec example) ---------------------
    {
        const fs::path d1 = g_tmp / "det1", d2 = g_tmp / "det2";
        check(run("exp hysteresis --a 4 --seed 7 --out-dir " + d1.string()).exit_code == 0,
              "default hysteresis run 1");
        check(run("exp hysteresis --a 4 --seed 7 --out-dir " + d2.string()).exit_code == 0,
              "default hysteresis run 2");
        check(read_file(d1 / "hysteresis_sweep.csv")
                  == read_file(d2 / "hysteresis_sweep.csv")
              && read_file(d1 / "hysteresis_summary.csv")
                  == read_file(d2 / "hysteresis_summary.csv"),
              "identical CSVs across reruns");
    }

    // --- simulate / mean-field round out the surface ---------------------------
    {
        const fs::path d = g_tmp / "sim";
        check(run("simulate --a 3 --h 0.08 --steps 200 --seed 5 --out-dir "
                  + d.string()).exit_code == 0,
              "simulate runs");
        check(contains(read_file(d / "trajectory.csv"), "time,y,u_hat,l1"),
              "trajectory csv header");
        check(run("mean-field --a 4 --t-end 5 --out-dir " + d.string()).exit_code == 0,
              "mean-field runs");
        check(contains(read_file(d / "mean_field.csv"), "time,y,u,p1"),
              "mean-field csv header");
    }

    fs::remove_all(g_tmp);
    std::cout << (g_failures == 0 ? "cli_tests: all passed"
                                  : "cli_tests: " + std::to_string(g_failures)
                                        + " failures")
              << std::endl;
    return g_failures;
}
