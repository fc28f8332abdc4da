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

#ifndef VDSHADOW_RUNNER_H
#define VDSHADOW_RUNNER_H

#include <chrono>
#include <filesystem>

#include "vdshadow/bounds.hpp"
#include "vdshadow/config.hpp"
#include "vdshadow/oracle.hpp"
#include "vdshadow/report.hpp"
#include "vdshadow/shallow.hpp"

namespace vdshadow {

struct EstimateRow {
    double p = 0;
    int m = 0;
    std::string estimator;
    cdouble value{0, 0};
    double std_error = 0;
    bool has_oracle = false;
    cdouble oracle{0, 0};
    size_t shots = 0;
};

namespace detail {

inline cdouble oracle_trace_product_value(const ExperimentCore &core, const std::vector<SubsystemOperator> &ops) {
    QuantumState rho = exact_noisy_state(core.prep, core.noise, core.n);
    std::vector<CMat> dense;
    dense.reserve(ops.size());
    for (const auto &op : ops) {
        dense.push_back(op.to_dense());
    }
    return exact_trace_product(rho.mat, dense);
}

inline cdouble oracle_linear_value(const ExperimentCore &core, const SubsystemOperator &op, int m) {
    QuantumState rho = exact_noisy_state(core.prep, core.noise, core.n);
    std::vector<CMat> numer(static_cast<size_t>(m), CMat::Identity(rho.dim(), rho.dim()));
    numer[0] = op.to_dense();
    std::vector<CMat> denom(static_cast<size_t>(m), CMat::Identity(rho.dim(), rho.dim()));
    return exact_trace_product(rho.mat, numer) / exact_trace_product(rho.mat, denom);
}

inline cdouble oracle_nonlinear_value(const ExperimentCore &core, const SubsystemOperator &op1,
                                      const SubsystemOperator &op2, int m) {
    QuantumState rho = exact_noisy_state(core.prep, core.noise, core.n);
    std::vector<CMat> numer(static_cast<size_t>(2 * m), CMat::Identity(rho.dim(), rho.dim()));
    numer[0] = op1.to_dense();
    numer[static_cast<size_t>(m)] = op2.to_dense();
    std::vector<CMat> denom(static_cast<size_t>(m), CMat::Identity(rho.dim(), rho.dim()));
    cdouble den = exact_trace_product(rho.mat, denom);
    return exact_trace_product(rho.mat, numer) / (den * den);
}

inline void write_snapshot_log(const ShadowEnsemble &ens, const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    for (const Snapshot &snap : ens.snapshots) {
        out << snapshot_to_line(snap, ens.core.tags) << "\n";
    }
}

inline std::vector<std::string> estimate_csv_row(const EstimateRow &row, bool with_p) {
    std::vector<std::string> fields;
    if (with_p) {
        fields.push_back(format_number(row.p));
    }
    fields.push_back(std::to_string(row.m));
    fields.push_back(row.estimator);
    fields.push_back(format_number(row.value.real()));
    fields.push_back(format_number(row.value.imag()));
    fields.push_back(format_number(row.std_error));
    fields.push_back(row.has_oracle ? format_number(row.oracle.real()) : "");
    fields.push_back(std::to_string(row.shots));
    return fields;
}

}  // namespace detail

struct RunResult {
    std::vector<EstimateRow> rows;
    std::vector<std::string> artifacts;
    bool selftest_passed = true;
};

/// Runs the configured estimators for every M in m_list; writes one snapshot
/// log per ensemble and a single estimates CSV. In selftest mode every row
/// carrying an oracle value must satisfy |estimate - oracle| <= 5 std_error.
inline RunResult cmd_run(const ExperimentConfig &cfg, bool selftest = false, bool write_files = true) {
    RunResult result;
    std::filesystem::path dir(cfg.out_dir);
    if (write_files) {
        std::filesystem::create_directories(dir);
    }
    bool oracle_ok = cfg.core.n <= 6;
    auto push = [&](EstimateRow row) {
        result.rows.push_back(std::move(row));
    };

    if (cfg.estimator == "trace_product" || cfg.estimator == "shallow") {
        if (cfg.ops.empty()) {
            throw ConfigError("estimator '" + cfg.estimator + "' requires the ops key");
        }
    } else if (cfg.observable.empty()) {
        throw ConfigError("estimator '" + cfg.estimator + "' requires the observable key");
    }

    for (long m_long : cfg.m_list) {
        int m = static_cast<int>(m_long);
        if (cfg.estimator == "linear") {
            ExperimentCore core = cfg.core_for(m);
            SubsystemOperator op = parse_observable(cfg.observable, core.n);
            ShadowEnsemble ens = run_ensemble(core, cfg.shots, cfg.threads);
            if (write_files) {
                std::string log_path = (dir / (cfg.label + "_M" + std::to_string(m) + ".log")).string();
                detail::write_snapshot_log(ens, log_path);
                result.artifacts.push_back(log_path);
            }
            EstimateResult est = estimate_linear_vd(ens, op, cfg.threads, cfg.bootstrap);
            EstimateRow row;
            row.p = core.noise.error_rate;
            row.m = m;
            row.estimator = "linear_vd";
            row.value = est.value;
            row.std_error = est.std_error;
            row.shots = est.shots;
            if (oracle_ok) {
                row.has_oracle = true;
                row.oracle = detail::oracle_linear_value(core, op, m);
            }
            push(row);
            std::vector<SubsystemOperator> idents(static_cast<size_t>(m), SubsystemOperator::identity(core.n));
            EstimateResult purity = estimate_trace_product(ens, idents, cfg.threads);
            EstimateRow prow;
            prow.p = core.noise.error_rate;
            prow.m = m;
            prow.estimator = "trace_power";
            prow.value = purity.value;
            prow.std_error = purity.std_error;
            prow.shots = purity.shots;
            if (oracle_ok) {
                prow.has_oracle = true;
                prow.oracle = detail::oracle_trace_product_value(core, idents);
            }
            push(prow);
        } else if (cfg.estimator == "nonlinear") {
            ExperimentCore core2 = cfg.core_for(2 * m);
            ExperimentCore core1 = cfg.core_for(m);
            core1.seed = core1.seed + 101;  // disjoint stream for the denominator ensemble
            SubsystemOperator op1 = parse_observable(cfg.observable, core2.n);
            SubsystemOperator op2 =
                parse_observable(cfg.observable2.empty() ? cfg.observable : cfg.observable2, core2.n);
            ShadowEnsemble ens2 = run_ensemble(core2, cfg.shots, cfg.threads);
            ShadowEnsemble ens1 = run_ensemble(core1, cfg.shots, cfg.threads);
            if (write_files) {
                std::string log_path = (dir / (cfg.label + "_M" + std::to_string(2 * m) + ".log")).string();
                detail::write_snapshot_log(ens2, log_path);
                result.artifacts.push_back(log_path);
            }
            EstimateResult est = estimate_nonlinear_vd(ens2, ens1, op1, op2, cfg.threads, cfg.bootstrap);
            EstimateRow row;
            row.p = core2.noise.error_rate;
            row.m = m;
            row.estimator = "nonlinear_vd";
            row.value = est.value;
            row.std_error = est.std_error;
            row.shots = est.shots;
            if (oracle_ok) {
                row.has_oracle = true;
                row.oracle = detail::oracle_nonlinear_value(core2, op1, op2, m);
            }
            push(row);
            std::vector<SubsystemOperator> idents(static_cast<size_t>(m), SubsystemOperator::identity(core1.n));
            EstimateResult purity = estimate_trace_product(ens1, idents, cfg.threads);
            EstimateRow prow;
            prow.p = core1.noise.error_rate;
            prow.m = m;
            prow.estimator = "trace_power";
            prow.value = purity.value;
            prow.std_error = purity.std_error;
            prow.shots = purity.shots;
            if (oracle_ok) {
                prow.has_oracle = true;
                prow.oracle = detail::oracle_trace_product_value(core1, idents);
            }
            push(prow);
        } else if (cfg.estimator == "trace_product") {
            std::vector<SubsystemOperator> ops = parse_observable_list(cfg.ops, cfg.core.n);
            int order = static_cast<int>(ops.size());
            ExperimentCore core = cfg.core_for(order);
            ShadowEnsemble ens = run_ensemble(core, cfg.shots, cfg.threads);
            if (write_files) {
                std::string log_path = (dir / (cfg.label + "_M" + std::to_string(order) + ".log")).string();
                detail::write_snapshot_log(ens, log_path);
                result.artifacts.push_back(log_path);
            }
            EstimateResult est = estimate_trace_product(ens, ops, cfg.threads);
            EstimateRow row;
            row.p = core.noise.error_rate;
            row.m = order;
            row.estimator = "trace_product";
            row.value = est.value;
            row.std_error = est.std_error;
            row.shots = est.shots;
            if (oracle_ok) {
                row.has_oracle = true;
                row.oracle = detail::oracle_trace_product_value(core, ops);
            }
            push(row);
            break;  // ops fix the order; m_list does not apply
        } else if (cfg.estimator == "shallow") {
            std::vector<SubsystemOperator> ops = parse_observable_list(cfg.ops, cfg.core.n);
            if (cfg.a < 2 || static_cast<int>(ops.size()) % cfg.a != 0) {
                throw ConfigError("shallow estimator requires a >= 2 dividing the ops count");
            }
            int block_order = static_cast<int>(ops.size()) / cfg.a;
            ExperimentCore core = cfg.core_for(block_order);
            ShadowEnsemble ens = run_ensemble(core, cfg.shots, cfg.threads);
            if (write_files) {
                std::string log_path = (dir / (cfg.label + "_blocks.log")).string();
                detail::write_snapshot_log(ens, log_path);
                result.artifacts.push_back(log_path);
            }
            EstimateRow row;
            row.p = core.noise.error_rate;
            row.m = static_cast<int>(ops.size());
            row.shots = ens.size();
            if (cfg.a == 2) {
                EstimateResult est = combine_two_blocks(ens, ops, cfg.threads);
                row.estimator = "shallow_a2";
                row.value = est.value;
                row.std_error = est.std_error;
            } else {
                row.estimator = "shallow_a" + std::to_string(cfg.a);
                row.value = combine_a_blocks_fast(ens, ops, cfg.a, cfg.threads);
                row.std_error = 0;
            }
            if (oracle_ok) {
                row.has_oracle = true;
                row.oracle = detail::oracle_trace_product_value(core, ops);
            }
            push(row);
            break;
        } else {
            throw ConfigError("unknown estimator '" + cfg.estimator + "'");
        }
    }

    if (write_files) {
        CsvWriter csv({"M", "estimator", "value_re", "value_im", "std_error", "oracle_value", "N"});
        for (const auto &row : result.rows) {
            csv.add_row(detail::estimate_csv_row(row, false));
        }
        std::string csv_path = (dir / (cfg.label + "_estimates.csv")).string();
        csv.write_file(csv_path);
        result.artifacts.push_back(csv_path);
    }
    if (selftest) {
        for (const auto &row : result.rows) {
            if (!row.has_oracle || row.std_error <= 0) {
                continue;
            }
            if (std::abs(row.value - row.oracle) > 5.0 * row.std_error) {
                result.selftest_passed = false;
            }
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Figure reproduction

struct FigureResult {
    std::vector<EstimateRow> rows;
    std::vector<std::string> artifacts;
};

namespace detail {

inline std::vector<TradeoffRow> tradeoffs_order_default() {
    return tradeoff_order_sweep(5, 6);
}

inline FigureResult reproduce_bound_sweep(const std::string &fig, const std::string &out_dir) {
    std::vector<TradeoffRow> rows = fig == "fig3a" ? tradeoff_qubit_sweep(2, 10) : tradeoffs_order_default();
    FigureResult out;
    CsvWriter csv({fig == "fig3a" ? "n" : "x", "pauli_bound", "clifford_bound", "mixed_bound"});
    SvgPlot plot(fig == "fig3a" ? "Variance bounds vs qubits" : "Variance bounds vs order",
                 fig == "fig3a" ? "n" : "x", "variance bound", true);
    SvgSeries pauli, cliff, mixed;
    pauli.name = "pauli";
    cliff.name = "clifford";
    mixed.name = "mixed";
    pauli.style = cliff.style = mixed.style = SvgSeries::Style::Line;
    pauli.color = "#1f6fb2";
    cliff.color = "#2e9e4f";
    mixed.color = "#c2701f";
    for (const auto &row : rows) {
        csv.add_row({format_number(row.sweep), format_number(row.pauli), format_number(row.clifford),
                     format_number(row.mixed)});
        pauli.x.push_back(row.sweep);
        pauli.y.push_back(row.pauli);
        cliff.x.push_back(row.sweep);
        cliff.y.push_back(row.clifford);
        mixed.x.push_back(row.sweep);
        mixed.y.push_back(row.mixed);
    }
    plot.add_series(pauli);
    plot.add_series(cliff);
    plot.add_series(mixed);
    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    std::string csv_path = (dir / (fig + ".csv")).string();
    std::string svg_path = (dir / (fig + ".svg")).string();
    csv.write_file(csv_path);
    plot.write_file(svg_path);
    out.artifacts = {csv_path, svg_path};
    return out;
}

}  // namespace detail

/// Reproduces one of the named figures: bound sweeps (fig3a, fig3b), linear
/// Pauli-type estimation (fig4), nonlinear estimation (fig5), linear
/// Clifford-type estimation (fig6). Measurement figures run both error rates
/// p = 0.1 and p = 0.2.
inline FigureResult cmd_reproduce(const std::string &fig, const std::string &out_dir, size_t shots = 100000,
                                  uint64_t seed = 1, int threads = 0) {
    if (fig == "fig3a" || fig == "fig3b") {
        return detail::reproduce_bound_sweep(fig, out_dir);
    }
    if (fig != "fig4" && fig != "fig5" && fig != "fig6") {
        throw ConfigError("unknown figure id '" + fig + "'");
    }
    FigureResult out;
    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    CsvWriter csv({"p", "M", "estimator", "value_re", "value_im", "std_error", "oracle_value", "N"});

    bool clifford_type = fig == "fig6";
    bool nonlinear = fig == "fig5";
    std::string obs_label = clifford_type ? "proj0" : "ZZI";
    int m_max = nonlinear ? 4 : 5;
    double ideal = clifford_type ? 0.5 : 1.0;

    for (double p : {0.1, 0.2}) {
        ExperimentConfig cfg;
        cfg.core.n = 3;
        cfg.core.prep = StatePrep::ghz();
        cfg.core.noise = NoiseSpec{p, 'Y', 0};
        cfg.core.seed = seed;
        cfg.shots = shots;
        cfg.threads = threads;
        cfg.tag_spec = clifford_type ? "clifford" : "pauli";
        cfg.estimator = nonlinear ? "nonlinear" : "linear";
        cfg.observable = obs_label;
        cfg.observable2 = obs_label;
        cfg.m_list.clear();
        for (int m = 1; m <= m_max; m++) {
            cfg.m_list.push_back(m);
        }
        cfg.out_dir = out_dir;
        cfg.label = fig + "_p" + format_number(p);
        RunResult run = cmd_run(cfg, false, false);
        for (const auto &row : run.rows) {
            out.rows.push_back(row);
            csv.add_row(detail::estimate_csv_row(row, true));
        }

        SvgPlot plot(fig + " (p=" + format_number(p) + ")", "order M",
                     nonlinear ? "Tr(O rho^M O rho^M)/Tr(rho^M)^2" : "Tr(O rho^M)/Tr(rho^M)");
        SvgSeries ideal_line, est, power;
        ideal_line.name = "ideal";
        ideal_line.style = SvgSeries::Style::Line;
        ideal_line.color = "#2e9e4f";
        est.name = "estimate";
        est.style = SvgSeries::Style::PointsWithErrorBars;
        power.name = "trace of rho^M";
        power.color = "#d9a821";
        ideal_line.x = {1.0, double(m_max)};
        ideal_line.y = {ideal, ideal};
        for (const auto &row : out.rows) {
            if (row.p != p) {
                continue;
            }
            if (row.estimator == "trace_power") {
                power.x.push_back(row.m);
                power.y.push_back(row.value.real());
            } else {
                est.x.push_back(row.m);
                est.y.push_back(row.value.real());
                est.yerr.push_back(row.std_error);
            }
        }
        plot.add_series(ideal_line);
        plot.add_series(est);
        plot.add_series(power);
        std::string svg_path = (dir / (fig + "_p" + format_number(p) + ".svg")).string();
        plot.write_file(svg_path);
        out.artifacts.push_back(svg_path);
    }
    std::string csv_path = (dir / (fig + ".csv")).string();
    csv.write_file(csv_path);
    out.artifacts.push_back(csv_path);
    return out;
}

// ---------------------------------------------------------------------------
// Post-processing benchmark

struct BenchRow {
    std::string kind;
    long num_snapshots = 0;
    long a = 0;
    double seconds = 0;
};

struct BenchResult {
    std::vector<BenchRow> rows;
    double n_slope = 0;
    double a_slope = 0;
    std::vector<std::string> artifacts;
};

/// Times combine_a_blocks_fast on synthetic n=1 ensembles over an N sweep at
/// fixed a and an a sweep at fixed N, then fits log-log slopes.
inline BenchResult cmd_bench_postprocess(const std::vector<long> &n_list, const std::vector<long> &a_list,
                                         long fixed_a = 2, long fixed_n = 384, uint64_t seed = 7,
                                         int reps = 1, const std::string &out_dir = "", int threads = 0) {
    BenchResult result;
    auto make_ensemble = [&](long shots) {
        ExperimentCore core;
        core.n = 1;
        core.m = 1;
        core.prep = StatePrep::ghz();
        core.noise = NoiseSpec{0.1, 'Y', 0};
        core.tags = ShadowTypeTag::all_clifford(1);
        core.seed = seed;
        return run_ensemble(core, static_cast<size_t>(shots), threads);
    };
    auto time_combine = [&](const ShadowEnsemble &ens, int a) {
        std::vector<SubsystemOperator> ops(static_cast<size_t>(a),
                                           SubsystemOperator::from_pauli(PauliString::from_label("Z")));
        double best = 0;
        for (int r = 0; r < std::max(reps, 1); r++) {
            auto start = std::chrono::steady_clock::now();
            volatile double sink = std::abs(combine_a_blocks_fast(ens, ops, a, threads));
            (void)sink;
            auto stop = std::chrono::steady_clock::now();
            double secs = std::chrono::duration<double>(stop - start).count();
            best = r == 0 ? secs : std::min(best, secs);
        }
        return best;
    };

    std::vector<double> log_n, log_tn;
    for (long shots : n_list) {
        ShadowEnsemble ens = make_ensemble(shots);
        double secs = time_combine(ens, static_cast<int>(fixed_a));
        result.rows.push_back({"n_sweep", shots, fixed_a, secs});
        log_n.push_back(std::log(double(shots)));
        log_tn.push_back(std::log(secs));
    }
    std::vector<double> log_a, log_ta;
    ShadowEnsemble fixed_ens = make_ensemble(fixed_n);
    for (long a : a_list) {
        double secs = time_combine(fixed_ens, static_cast<int>(a));
        result.rows.push_back({"a_sweep", fixed_n, a, secs});
        log_a.push_back(std::log(double(a)));
        log_ta.push_back(std::log(secs));
    }
    if (log_n.size() >= 2) {
        result.n_slope = fit_slope(log_n, log_tn);
    }
    if (log_a.size() >= 2) {
        result.a_slope = fit_slope(log_a, log_ta);
    }
    if (!out_dir.empty()) {
        std::filesystem::path dir(out_dir);
        std::filesystem::create_directories(dir);
        CsvWriter csv({"kind", "N", "a", "seconds"});
        for (const auto &row : result.rows) {
            csv.add_row({row.kind, std::to_string(row.num_snapshots), std::to_string(row.a),
                         format_number(row.seconds)});
        }
        csv.add_row({"slope_vs_N", "", "", format_number(result.n_slope)});
        csv.add_row({"slope_vs_a", "", "", format_number(result.a_slope)});
        std::string path = (dir / "bench_postprocess.csv").string();
        csv.write_file(path);
        result.artifacts.push_back(path);
    }
    return result;
}

/// Bound sweep driven by a config file: sweep = fig3a (over n) or fig3b
/// (over x), with optional sweep_min / sweep_max range overrides.
inline FigureResult cmd_bounds(const Config &cfg, const std::string &out_dir) {
    std::string sweep = cfg.get("sweep", "fig3a");
    std::vector<TradeoffRow> rows;
    std::string axis;
    if (sweep == "fig3a") {
        int lo = static_cast<int>(cfg.get_int("sweep_min", 2));
        int hi = static_cast<int>(cfg.get_int("sweep_max", 10));
        if (lo < 1 || hi < lo) {
            throw ConfigError("bad sweep range");
        }
        rows = tradeoff_qubit_sweep(lo, hi);
        axis = "n";
    } else if (sweep == "fig3b") {
        int n = static_cast<int>(cfg.get_int("n", 5));
        int hi = static_cast<int>(cfg.get_int("sweep_max", 6));
        if (hi < 1) {
            throw ConfigError("bad sweep range");
        }
        rows = tradeoff_order_sweep(n, hi);
        axis = "x";
    } else {
        throw ConfigError("sweep must be fig3a or fig3b");
    }
    FigureResult out;
    CsvWriter csv({axis, "pauli_bound", "clifford_bound", "mixed_bound"});
    for (const auto &row : rows) {
        csv.add_row({format_number(row.sweep), format_number(row.pauli), format_number(row.clifford),
                     format_number(row.mixed)});
    }
    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    std::string path = (dir / ("bounds_" + sweep + ".csv")).string();
    csv.write_file(path);
    out.artifacts.push_back(path);
    return out;
}

}  // namespace vdshadow

#endif
