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

#ifndef VDSHADOW_VD_H
#define VDSHADOW_VD_H

#include "vdshadow/shadows.hpp"

namespace vdshadow {

/// Estimator output. std_error combines the real and imaginary standard
/// errors in quadrature; the parts are kept separately as well.
struct EstimateResult {
    cdouble value{0, 0};
    double std_error = 0;
    double se_re = 0;
    double se_im = 0;
    size_t shots = 0;
    bool unstable = false;
    std::string description;
};

namespace detail {

struct MeanStats {
    cdouble mean{0, 0};
    double se_re = 0, se_im = 0;
};

inline MeanStats mean_and_se(const std::vector<cdouble> &values) {
    MeanStats out;
    size_t n = values.size();
    for (cdouble v : values) {
        out.mean += v;
    }
    out.mean /= double(n);
    if (n >= 2) {
        double var_re = 0, var_im = 0;
        for (cdouble v : values) {
            var_re += (v.real() - out.mean.real()) * (v.real() - out.mean.real());
            var_im += (v.imag() - out.mean.imag()) * (v.imag() - out.mean.imag());
        }
        var_re /= double(n - 1);
        var_im /= double(n - 1);
        out.se_re = std::sqrt(var_re / double(n));
        out.se_im = std::sqrt(var_im / double(n));
    }
    return out;
}

}  // namespace detail

/// Classifies a dense matrix into the cheapest equivalent subsystem factor.
inline SubsystemOperator classify_operator(const CMat &m, double tol = 1e-9) {
    int n = 0;
    while ((Eigen::Index(1) << n) < m.rows()) {
        n++;
    }
    Eigen::Index d = Eigen::Index(1) << n;
    if (d != m.rows() || m.rows() != m.cols()) {
        throw std::invalid_argument("classify_operator: not a square power-of-two matrix");
    }
    if ((m - CMat::Identity(d, d)).cwiseAbs().maxCoeff() <= tol) {
        return SubsystemOperator::identity(n);
    }
    CMat proj = CMat::Zero(d, d);
    proj(0, 0) = 1;
    if ((m - proj).cwiseAbs().maxCoeff() <= tol) {
        return SubsystemOperator::projector0(n);
    }
    if (n <= 4) {
        for (int sign = 0; sign < 2; sign++) {
            for (uint64_t x = 0; x < uint64_t(d); x++) {
                for (uint64_t z = 0; z < uint64_t(d); z++) {
                    PauliString p = PauliString::hermitian(n, x, z, sign == 1);
                    if ((m - p.dense()).cwiseAbs().maxCoeff() <= tol) {
                        return SubsystemOperator::from_pauli(p);
                    }
                }
            }
        }
    }
    return SubsystemOperator::from_dense(m, 1e-8);
}

/// Mean over snapshots of Tr((X0+iY0)(x)O_1(x)...(x)O_M . M(rho_hat_i)),
/// the plain-shadow estimate of the woven trace product.
inline EstimateResult estimate_trace_product(const ShadowEnsemble &ens, const std::vector<SubsystemOperator> &ops,
                                             int threads = 0) {
    if (ens.snapshots.empty()) {
        throw std::invalid_argument("estimate_trace_product: empty ensemble");
    }
    if (static_cast<int>(ops.size()) != ens.order()) {
        throw std::invalid_argument("estimate_trace_product: operator count does not match ensemble order");
    }
    FactorizedObservable obs(ens.core.n, AncillaOp::XplusIY, ops);
    std::vector<cdouble> values = evaluate_ensemble(ens, {obs}, threads)[0];
    detail::MeanStats stats = detail::mean_and_se(values);
    EstimateResult out;
    out.value = stats.mean;
    out.se_re = stats.se_re;
    out.se_im = stats.se_im;
    out.std_error = std::hypot(stats.se_re, stats.se_im);
    out.shots = values.size();
    out.description = "trace_product[M=" + std::to_string(ens.order()) + "]";
    return out;
}

inline EstimateResult estimate_trace_product(const ShadowEnsemble &ens, const std::vector<CMat> &ops,
                                             int threads = 0) {
    std::vector<SubsystemOperator> factors;
    factors.reserve(ops.size());
    for (const CMat &m : ops) {
        factors.push_back(classify_operator(m));
    }
    return estimate_trace_product(ens, factors, threads);
}

namespace detail {

struct RatioSamples {
    std::vector<cdouble> numer;
    std::vector<cdouble> denom;
};

/// Bootstrap of a ratio of means over shared snapshots.
inline EstimateResult bootstrap_ratio(const RatioSamples &samples, size_t resamples, uint64_t seed,
                                      int threads) {
    size_t n = samples.numer.size();
    cdouble sum_n{0, 0}, sum_d{0, 0};
    for (size_t i = 0; i < n; i++) {
        sum_n += samples.numer[i];
        sum_d += samples.denom[i];
    }
    EstimateResult out;
    out.shots = n;
    out.value = sum_n / sum_d;
    std::vector<cdouble> replicas(resamples);
    auto work = [&](size_t begin, size_t step) {
        for (size_t b = begin; b < resamples; b += step) {
            Rng rng = Rng::stream(seed, 0xb007u, b);
            cdouble rn{0, 0}, rd{0, 0};
            for (size_t i = 0; i < n; i++) {
                size_t idx = rng.next_below(n);
                rn += samples.numer[idx];
                rd += samples.denom[idx];
            }
            replicas[b] = rn / rd;
        }
    };
    if (threads <= 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; t++) {
            pool.emplace_back(work, t, threads);
        }
        for (auto &th : pool) {
            th.join();
        }
    }
    MeanStats stats = mean_and_se(replicas);
    out.se_re = stats.se_re * std::sqrt(double(resamples));
    out.se_im = stats.se_im * std::sqrt(double(resamples));
    out.std_error = std::hypot(out.se_re, out.se_im);
    // Denominator consistent with zero flags the ratio as unstable.
    MeanStats dstats = mean_and_se(samples.denom);
    if (std::abs(dstats.mean) < 2.0 * std::hypot(dstats.se_re, dstats.se_im)) {
        out.unstable = true;
    }
    return out;
}

/// Delete-one jackknife standard error of the same ratio.
inline double jackknife_ratio_se(const RatioSamples &samples) {
    size_t n = samples.numer.size();
    cdouble sum_n{0, 0}, sum_d{0, 0};
    for (size_t i = 0; i < n; i++) {
        sum_n += samples.numer[i];
        sum_d += samples.denom[i];
    }
    std::vector<cdouble> loo(n);
    cdouble mean_loo{0, 0};
    for (size_t i = 0; i < n; i++) {
        loo[i] = (sum_n - samples.numer[i]) / (sum_d - samples.denom[i]);
        mean_loo += loo[i];
    }
    mean_loo /= double(n);
    double acc = 0;
    for (size_t i = 0; i < n; i++) {
        acc += std::norm(loo[i] - mean_loo);
    }
    return std::sqrt(acc * double(n - 1) / double(n));
}

}  // namespace detail

inline size_t default_bootstrap_resamples() {
    return 1000;
}

/// <O> = Tr(O rho^M) / Tr(rho^M) from one order-M ensemble; numerator and
/// denominator share snapshots and the bootstrap absorbs their correlation.
inline EstimateResult estimate_linear_vd(const ShadowEnsemble &ens, const SubsystemOperator &op, int threads = 0,
                                         size_t resamples = default_bootstrap_resamples()) {
    int m = ens.order();
    std::vector<SubsystemOperator> numer_ops(static_cast<size_t>(m), SubsystemOperator::identity(ens.core.n));
    numer_ops[0] = op;
    std::vector<SubsystemOperator> denom_ops(static_cast<size_t>(m), SubsystemOperator::identity(ens.core.n));
    FactorizedObservable numer(ens.core.n, AncillaOp::XplusIY, numer_ops);
    FactorizedObservable denom(ens.core.n, AncillaOp::XplusIY, denom_ops);
    auto values = evaluate_ensemble(ens, {numer, denom}, threads);
    detail::RatioSamples samples{std::move(values[0]), std::move(values[1])};
    EstimateResult out = detail::bootstrap_ratio(samples, resamples, ens.core.seed, threads);
    out.description = "linear_vd[M=" + std::to_string(m) + "]";
    return out;
}

/// <O1 O2> = Tr(O1 rho^M O2 rho^M) / Tr(rho^M)^2. The numerator comes from
/// the order-2M ensemble; the denominator is the product of two independent
/// Tr(rho^M) estimates taken on disjoint halves of the order-M ensemble, so
/// that its square stays unbiased.
inline EstimateResult estimate_nonlinear_vd(const ShadowEnsemble &ens_2m, const ShadowEnsemble &ens_m,
                                            const SubsystemOperator &op1, const SubsystemOperator &op2,
                                            int threads = 0,
                                            size_t resamples = default_bootstrap_resamples()) {
    int m = ens_m.order();
    if (ens_2m.order() != 2 * m) {
        throw std::invalid_argument("estimate_nonlinear_vd: numerator ensemble must have order 2M");
    }
    if (ens_m.size() < 4) {
        throw std::invalid_argument("estimate_nonlinear_vd: denominator ensemble too small to split");
    }
    std::vector<SubsystemOperator> numer_ops(static_cast<size_t>(2 * m), SubsystemOperator::identity(ens_2m.core.n));
    numer_ops[0] = op1;
    numer_ops[static_cast<size_t>(m)] = op2;
    FactorizedObservable numer(ens_2m.core.n, AncillaOp::XplusIY, numer_ops);
    std::vector<cdouble> numer_values = evaluate_ensemble(ens_2m, {numer}, threads)[0];

    std::vector<SubsystemOperator> denom_ops(static_cast<size_t>(m), SubsystemOperator::identity(ens_m.core.n));
    FactorizedObservable denom(ens_m.core.n, AncillaOp::XplusIY, denom_ops);
    std::vector<cdouble> denom_values = evaluate_ensemble(ens_m, {denom}, threads)[0];
    size_t half = denom_values.size() / 2;
    std::vector<cdouble> denom_a(denom_values.begin(), denom_values.begin() + half);
    std::vector<cdouble> denom_b(denom_values.begin() + half, denom_values.end());

    auto mean_of = [](const std::vector<cdouble> &v) {
        cdouble s{0, 0};
        for (cdouble x : v) {
            s += x;
        }
        return s / double(v.size());
    };
    cdouble da = mean_of(denom_a), db = mean_of(denom_b);

    EstimateResult out;
    out.shots = numer_values.size();
    out.value = mean_of(numer_values) / (da * db);
    std::vector<cdouble> replicas(resamples);
    size_t nn = numer_values.size();
    auto work = [&](size_t begin, size_t step) {
        for (size_t b = begin; b < resamples; b += step) {
            Rng rng = Rng::stream(ens_2m.core.seed, 0xb117u, b);
            cdouble rn{0, 0}, ra{0, 0}, rb{0, 0};
            for (size_t i = 0; i < nn; i++) {
                rn += numer_values[rng.next_below(nn)];
            }
            for (size_t i = 0; i < denom_a.size(); i++) {
                ra += denom_a[rng.next_below(denom_a.size())];
            }
            for (size_t i = 0; i < denom_b.size(); i++) {
                rb += denom_b[rng.next_below(denom_b.size())];
            }
            rn /= double(nn);
            ra /= double(denom_a.size());
            rb /= double(denom_b.size());
            replicas[b] = rn / (ra * rb);
        }
    };
    int workers = threads <= 1 ? 1 : threads;
    if (workers == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; t++) {
            pool.emplace_back(work, t, workers);
        }
        for (auto &th : pool) {
            th.join();
        }
    }
    detail::MeanStats stats = detail::mean_and_se(replicas);
    out.se_re = stats.se_re * std::sqrt(double(resamples));
    out.se_im = stats.se_im * std::sqrt(double(resamples));
    out.std_error = std::hypot(out.se_re, out.se_im);
    detail::MeanStats da_stats = detail::mean_and_se(denom_a);
    detail::MeanStats db_stats = detail::mean_and_se(denom_b);
    double prod_se = std::abs(da) * std::hypot(db_stats.se_re, db_stats.se_im) +
                     std::abs(db) * std::hypot(da_stats.se_re, da_stats.se_im);
    if (std::abs(da * db) < 2.0 * prod_se) {
        out.unstable = true;
    }
    out.description = "nonlinear_vd[M=" + std::to_string(m) + "]";
    return out;
}

}  // namespace vdshadow

#endif
