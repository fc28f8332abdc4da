// Copyright 2026 The vdshadow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>
#include <iostream>

#include "vdshadow/runner.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitSelftestFailure = 3;

struct GlobalFlags {
    long seed = -1;
    int threads = 0;
    std::string out_dir;
};

void apply_overrides(vdshadow::ExperimentConfig &cfg, const GlobalFlags &flags) {
    if (flags.seed >= 0) {
        cfg.core.seed = static_cast<uint64_t>(flags.seed);
    }
    if (flags.threads > 0) {
        cfg.threads = flags.threads;
    }
    if (!flags.out_dir.empty()) {
        cfg.out_dir = flags.out_dir;
    }
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"virtual-distillation shadow estimation toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags flags;
    app.add_option("--seed", flags.seed, "override the config seed");
    app.add_option("--threads", flags.threads, "worker threads (0 = hardware)");
    app.add_option("--out-dir", flags.out_dir, "override the output directory");

    std::string run_config;
    bool run_selftest = false;
    auto *run = app.add_subcommand("run", "run estimators from a config file");
    run->add_option("config", run_config, "config file path")->required();
    run->add_flag("--self-test", run_selftest, "fail (exit 3) if any estimate misses its oracle by > 5 sigma");

    std::string fig_id;
    long fig_shots = 100000;
    auto *rep = app.add_subcommand("reproduce", "emit the data and chart for a named figure");
    rep->add_option("figure", fig_id, "one of fig3a, fig3b, fig4, fig5, fig6")->required();
    rep->add_option("--shots", fig_shots, "shots per ensemble for measurement figures");

    std::string bounds_config;
    auto *bounds = app.add_subcommand("bounds", "emit a variance-bound trade-off table");
    bounds->add_option("config", bounds_config, "config file path")->required();

    std::string bench_config;
    auto *bench = app.add_subcommand("bench", "benchmark the shallow post-processing kernel");
    bench->add_option("config", bench_config, "config file path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfigError;
    }

    try {
        if (*run) {
            vdshadow::ExperimentConfig cfg =
                vdshadow::ExperimentConfig::from_config(vdshadow::Config::parse_file(run_config));
            apply_overrides(cfg, flags);
            vdshadow::RunResult result = vdshadow::cmd_run(cfg, run_selftest);
            for (const auto &path : result.artifacts) {
                std::cout << "wrote " << path << "\n";
            }
            for (const auto &row : result.rows) {
                std::cout << "M=" << row.m << " " << row.estimator << " = " << row.value.real();
                if (std::abs(row.value.imag()) > 1e-12) {
                    std::cout << (row.value.imag() < 0 ? " - " : " + ") << std::abs(row.value.imag()) << "i";
                }
                std::cout << " +- " << row.std_error;
                if (row.has_oracle) {
                    std::cout << " (oracle " << row.oracle.real() << ")";
                }
                std::cout << "\n";
            }
            if (run_selftest && !result.selftest_passed) {
                std::cerr << "self-test failed: an estimate misses its oracle by more than 5 std errors\n";
                return kExitSelftestFailure;
            }
        } else if (*rep) {
            std::string out_dir = flags.out_dir.empty() ? "out" : flags.out_dir;
            uint64_t seed = flags.seed >= 0 ? static_cast<uint64_t>(flags.seed) : 1;
            vdshadow::FigureResult result = vdshadow::cmd_reproduce(fig_id, out_dir, static_cast<size_t>(fig_shots),
                                                                    seed, flags.threads);
            for (const auto &path : result.artifacts) {
                std::cout << "wrote " << path << "\n";
            }
        } else if (*bounds) {
            vdshadow::Config cfg = vdshadow::Config::parse_file(bounds_config);
            std::string out_dir = flags.out_dir.empty() ? cfg.get("out_dir", "out") : flags.out_dir;
            vdshadow::FigureResult result = vdshadow::cmd_bounds(cfg, out_dir);
            for (const auto &path : result.artifacts) {
                std::cout << "wrote " << path << "\n";
            }
        } else if (*bench) {
            vdshadow::Config cfg = vdshadow::Config::parse_file(bench_config);
            std::string out_dir = flags.out_dir.empty() ? cfg.get("out_dir", "out") : flags.out_dir;
            std::vector<long> n_list = cfg.get_int_list("bench_n_list", {512, 1024, 2048});
            std::vector<long> a_list = cfg.get_int_list("bench_a_list", {2, 4, 8});
            long fixed_a = cfg.get_int("bench_fixed_a", 2);
            long fixed_n = cfg.get_int("bench_fixed_n", 384);
            int reps = static_cast<int>(cfg.get_int("bench_reps", 1));
            uint64_t seed = flags.seed >= 0 ? static_cast<uint64_t>(flags.seed)
                                            : static_cast<uint64_t>(cfg.get_int("seed", 7));
            vdshadow::BenchResult result = vdshadow::cmd_bench_postprocess(n_list, a_list, fixed_a, fixed_n, seed,
                                                                           reps, out_dir, flags.threads);
            for (const auto &row : result.rows) {
                std::cout << row.kind << " N=" << row.num_snapshots << " a=" << row.a << " " << row.seconds
                          << " s\n";
            }
            std::cout << "slope vs N: " << result.n_slope << "\n";
            std::cout << "slope vs a: " << result.a_slope << "\n";
            for (const auto &path : result.artifacts) {
                std::cout << "wrote " << path << "\n";
            }
        }
    } catch (const vdshadow::ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
