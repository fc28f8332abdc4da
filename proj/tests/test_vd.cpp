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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "vdshadow/vd.hpp"

using namespace vdshadow;

namespace {

ExperimentCore ghz_core(int n, int m, double p, const ShadowTypeTag &tags, uint64_t seed = 1) {
    ExperimentCore core;
    core.n = n;
    core.m = m;
    core.prep = StatePrep::ghz();
    core.noise = NoiseSpec{p, 'Y', 0};
    core.tags = tags;
    core.seed = seed;
    return core;
}

SubsystemOperator zzi() {
    return SubsystemOperator::from_pauli(PauliString::from_label("ZZI"));
}

}  // namespace

TEST_CASE("classify_operator finds the cheap forms") {
    CHECK(classify_operator(CMat::Identity(8, 8)).kind == SubsystemOperator::Kind::Identity);
    CHECK(classify_operator(PauliString::from_label("ZZI").dense()).kind == SubsystemOperator::Kind::Pauli);
    CMat proj = CMat::Zero(4, 4);
    proj(0, 0) = 1;
    CHECK(classify_operator(proj).kind == SubsystemOperator::Kind::Projector0);
    Rng rng(1);
    CMat dense = vdshadow::testing::random_hermitian(2, rng);
    CHECK(classify_operator(dense).kind == SubsystemOperator::Kind::Dense);
}

TEST_CASE("trace product estimates against closed forms") {
    const size_t shots = 30000;
    SUBCASE("M=3 purity 0.730") {
        ExperimentCore core = ghz_core(3, 3, 0.1, ShadowTypeTag::all_pauli(3), 31);
        ShadowEnsemble ens = run_ensemble(core, shots, 0);
        std::vector<SubsystemOperator> ops(3, SubsystemOperator::identity(3));
        EstimateResult est = estimate_trace_product(ens, ops);
        CHECK(std::abs(est.value.real() - 0.730) < 5.0 * est.se_re);
        CHECK(std::abs(est.value.imag()) < 5.0 * est.se_im);
    }
    SUBCASE("M=3 with one ZZI factor 0.728") {
        ExperimentCore core = ghz_core(3, 3, 0.1, ShadowTypeTag::all_pauli(3), 32);
        ShadowEnsemble ens = run_ensemble(core, shots, 0);
        std::vector<SubsystemOperator> ops = {zzi(), SubsystemOperator::identity(3),
                                              SubsystemOperator::identity(3)};
        EstimateResult est = estimate_trace_product(ens, ops);
        CHECK(std::abs(est.value.real() - 0.728) < 5.0 * est.se_re);
    }
    SUBCASE("M=1 reduces to plain shadow estimation") {
        ExperimentCore core = ghz_core(3, 1, 0.1, ShadowTypeTag::all_pauli(1), 33);
        ShadowEnsemble ens = run_ensemble(core, shots, 0);
        EstimateResult est = estimate_trace_product(ens, {zzi()});
        CHECK(std::abs(est.value.real() - 0.8) < 5.0 * est.se_re);
    }
    SUBCASE("dense-matrix overload classifies on the fly") {
        ExperimentCore core = ghz_core(3, 1, 0.1, ShadowTypeTag::all_pauli(1), 34);
        ShadowEnsemble ens = run_ensemble(core, 4000, 0);
        EstimateResult a = estimate_trace_product(ens, std::vector<CMat>{PauliString::from_label("ZZI").dense()});
        EstimateResult b = estimate_trace_product(ens, {zzi()});
        CHECK(std::abs(a.value - b.value) < 1e-12);
    }
    SUBCASE("empty ensemble and arity errors") {
        ExperimentCore core = ghz_core(3, 1, 0.1, ShadowTypeTag::all_pauli(1), 35);
        ShadowEnsemble empty;
        empty.core = core;
        CHECK_THROWS(estimate_trace_product(empty, {zzi()}));
        ShadowEnsemble ens = run_ensemble(core, 16, 1);
        std::vector<SubsystemOperator> too_many(2, SubsystemOperator::identity(3));
        CHECK_THROWS(estimate_trace_product(ens, too_many));
    }
}

TEST_CASE("linear virtual distillation") {
    const size_t shots = 30000;
    SUBCASE("pure state gives 1") {
        ExperimentCore core = ghz_core(3, 2, 0.0, ShadowTypeTag::all_pauli(2), 41);
        ShadowEnsemble ens = run_ensemble(core, shots, 0);
        EstimateResult est = estimate_linear_vd(ens, zzi(), 0, 400);
        CHECK(std::abs(est.value.real() - 1.0) < 5.0 * std::max(est.se_re, 1e-6));
        CHECK(!est.unstable);
    }
    SUBCASE("p=0.1, M=2 ratio") {
        ExperimentCore core = ghz_core(3, 2, 0.1, ShadowTypeTag::all_pauli(2), 42);
        ShadowEnsemble ens = run_ensemble(core, shots, 0);
        EstimateResult est = estimate_linear_vd(ens, zzi(), 0, 400);
        CHECK(std::abs(est.value.real() - 0.8 / 0.82) < 5.0 * est.se_re);
    }
    SUBCASE("clifford type projector at M=3") {
        ExperimentCore core = ghz_core(3, 3, 0.1, ShadowTypeTag::all_clifford(3), 43);
        ShadowEnsemble ens = run_ensemble(core, shots, 0);
        EstimateResult est = estimate_linear_vd(ens, SubsystemOperator::projector0(3), 0, 400);
        double want = (0.729 * 0.5) / 0.730;
        CHECK(std::abs(est.value.real() - want) < 5.0 * est.se_re);
    }
}

TEST_CASE("nonlinear virtual distillation") {
    const size_t shots = 30000;
    SUBCASE("pure state gives 1") {
        ExperimentCore c2 = ghz_core(3, 4, 0.0, ShadowTypeTag::all_pauli(4), 51);
        ExperimentCore c1 = ghz_core(3, 2, 0.0, ShadowTypeTag::all_pauli(2), 52);
        ShadowEnsemble e2 = run_ensemble(c2, shots, 0);
        ShadowEnsemble e1 = run_ensemble(c1, shots, 0);
        EstimateResult est = estimate_nonlinear_vd(e2, e1, zzi(), zzi(), 0, 400);
        CHECK(std::abs(est.value.real() - 1.0) < 5.0 * std::max(est.se_re, 1e-6));
    }
    SUBCASE("noisy M=2 against the exact oracle") {
        ExperimentCore c2 = ghz_core(3, 4, 0.1, ShadowTypeTag::all_pauli(4), 53);
        ExperimentCore c1 = ghz_core(3, 2, 0.1, ShadowTypeTag::all_pauli(2), 54);
        ShadowEnsemble e2 = run_ensemble(c2, shots, 0);
        ShadowEnsemble e1 = run_ensemble(c1, shots, 0);
        EstimateResult est = estimate_nonlinear_vd(e2, e1, zzi(), zzi(), 0, 400);
        // Tr(O rho^2 O rho^2) / Tr(rho^2)^2 for the rank-2 noisy GHZ state.
        double want = (0.81 * 0.81 + 0.01 * 0.01) / (0.82 * 0.82);
        CHECK(std::abs(est.value.real() - want) < 5.0 * est.se_re);
    }
    SUBCASE("identity observables at a pure state give a ratio of identical quantities") {
        ExperimentCore c2 = ghz_core(3, 4, 0.0, ShadowTypeTag::all_pauli(4), 55);
        ExperimentCore c1 = ghz_core(3, 2, 0.0, ShadowTypeTag::all_pauli(2), 56);
        ShadowEnsemble e2 = run_ensemble(c2, 20000, 0);
        ShadowEnsemble e1 = run_ensemble(c1, 20000, 0);
        EstimateResult est = estimate_nonlinear_vd(e2, e1, SubsystemOperator::identity(3),
                                                   SubsystemOperator::identity(3), 0, 400);
        CHECK(std::abs(est.value.real() - 1.0) < 5.0 * std::max(est.se_re, 1e-6));
    }
    SUBCASE("order mismatch throws") {
        ExperimentCore c2 = ghz_core(3, 3, 0.0, ShadowTypeTag::all_pauli(3), 57);
        ExperimentCore c1 = ghz_core(3, 2, 0.0, ShadowTypeTag::all_pauli(2), 58);
        ShadowEnsemble e2 = run_ensemble(c2, 64, 1);
        ShadowEnsemble e1 = run_ensemble(c1, 64, 1);
        CHECK_THROWS(estimate_nonlinear_vd(e2, e1, zzi(), zzi()));
    }
}

TEST_CASE("consistency: error shrinks as N grows and stays within 5 SE") {
    double oracle = 0.8 / 0.82;
    ExperimentCore core = ghz_core(3, 2, 0.1, ShadowTypeTag::all_pauli(2), 61);
    ShadowEnsemble full = run_ensemble(core, 100000, 0);
    std::vector<double> errs;
    for (size_t n_shots : {size_t(1000), size_t(10000), size_t(100000)}) {
        ShadowEnsemble sub;
        sub.core = full.core;
        sub.snapshots.assign(full.snapshots.begin(), full.snapshots.begin() + n_shots);
        EstimateResult est = estimate_linear_vd(sub, zzi(), 0, 400);
        errs.push_back(std::abs(est.value.real() - oracle));
        CHECK(std::abs(est.value.real() - oracle) < 5.0 * est.se_re);
    }
    CHECK(errs.back() < errs.front());
}

TEST_CASE("monotone mitigation toward the ideal value") {
    std::vector<double> oracle_seq;
    for (int m = 1; m <= 5; m++) {
        double num = std::pow(0.9, m) - std::pow(0.1, m);
        double den = std::pow(0.9, m) + std::pow(0.1, m);
        oracle_seq.push_back(num / den);
    }
    for (size_t i = 1; i < oracle_seq.size(); i++) {
        CHECK(oracle_seq[i] > oracle_seq[i - 1]);
        CHECK(oracle_seq[i] <= 1.0);
    }
    for (int m = 1; m <= 5; m++) {
        ExperimentCore core = ghz_core(3, m, 0.1, ShadowTypeTag::all_pauli(m), 70 + m);
        ShadowEnsemble ens = run_ensemble(core, 10000, 0);
        EstimateResult est = estimate_linear_vd(ens, zzi(), 0, 300);
        CHECK(std::abs(est.value.real() - oracle_seq[m - 1]) < 5.0 * est.se_re);
    }
}

TEST_CASE("bootstrap and jackknife standard errors agree within a factor of two") {
    ExperimentCore core = ghz_core(3, 2, 0.1, ShadowTypeTag::all_pauli(2), 81);
    ShadowEnsemble ens = run_ensemble(core, 20000, 0);
    std::vector<SubsystemOperator> numer_ops(2, SubsystemOperator::identity(3));
    numer_ops[0] = zzi();
    std::vector<SubsystemOperator> denom_ops(2, SubsystemOperator::identity(3));
    FactorizedObservable numer(3, AncillaOp::XplusIY, numer_ops);
    FactorizedObservable denom(3, AncillaOp::XplusIY, denom_ops);
    auto values = evaluate_ensemble(ens, {numer, denom}, 0);
    detail::RatioSamples samples{values[0], values[1]};
    EstimateResult boot = detail::bootstrap_ratio(samples, 1000, core.seed, 0);
    double jack = detail::jackknife_ratio_se(samples);
    CHECK(boot.std_error < 2.0 * jack);
    CHECK(jack < 2.0 * boot.std_error);
}

TEST_CASE("unstable flag trips when the denominator is consistent with zero") {
    detail::RatioSamples samples;
    Rng rng(3);
    for (int i = 0; i < 200; i++) {
        samples.numer.push_back(cdouble(1.0, 0));
        samples.denom.push_back(cdouble(rng.next_bool() ? 1.0 : -1.0, 0));
    }
    EstimateResult est = detail::bootstrap_ratio(samples, 200, 5, 1);
    CHECK(est.unstable);
}
