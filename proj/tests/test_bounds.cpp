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
#include "vdshadow/bounds.hpp"
#include "vdshadow/vd.hpp"

using namespace vdshadow;

namespace {

FactorDescriptor unit_local(int locality) {
    FactorDescriptor f;
    f.locality = locality;
    f.inf_norm = 1.0;
    f.trace = 0.0;
    f.trace_sq = 1.0;
    f.traceless_inf = 1.0;
    return f;
}

}  // namespace

TEST_CASE("pauli bound closed forms") {
    BoundInput in;
    in.n = 3;
    in.factors = {unit_local(2), unit_local(2)};
    CHECK(pauli_bound(in) == doctest::Approx(768.0));

    BoundInput idents;
    idents.n = 3;
    idents.factors = {FactorDescriptor::identity(3), FactorDescriptor::identity(3)};
    CHECK(pauli_bound(idents) == doctest::Approx(3.0));

    BoundInput single;
    single.n = 3;
    single.factors = {unit_local(1)};
    CHECK(pauli_bound(single) == doctest::Approx(12.0));
}

TEST_CASE("clifford bound closed forms") {
    BoundInput in;
    in.n = 3;
    FactorDescriptor proj = describe_factor(SubsystemOperator::projector0(3));
    in.factors = {proj, proj};
    CHECK(clifford_bound(in) == doctest::Approx(3.0 * 3.34375 * 3.34375));

    BoundInput idents;
    idents.n = 3;
    idents.factors = {FactorDescriptor::identity(3), FactorDescriptor::identity(3)};
    CHECK(clifford_bound(idents) == doctest::Approx(3.0));

    // Traceless unit-Frobenius factors give 3 * 3^{N-1}.
    FactorDescriptor traceless;
    traceless.locality = 3;
    traceless.inf_norm = 1.0;
    traceless.trace = 0.0;
    traceless.trace_sq = 1.0;
    traceless.traceless_inf = 1.0;
    BoundInput tl;
    tl.n = 3;
    tl.factors = {traceless, traceless, traceless};
    CHECK(clifford_bound(tl) == doctest::Approx(3.0 * 27.0));
}

TEST_CASE("mixed bound closed forms") {
    SUBCASE("empty global set reduces to the local variance") {
        BoundInput in;
        in.n = 4;
        in.factors = {unit_local(1), unit_local(2)};
        in.local_set = {0, 1};
        CHECK(mixed_bound(in) == doctest::Approx(9.0 * std::pow(4.0, 3)));
    }
    SUBCASE("stated family values at x=1, n=5") {
        BoundInput in;
        in.n = 5;
        in.factors = {sweep_local_descriptor(), sweep_global_descriptor(5)};
        in.local_set = {0};
        in.global_set = {1};
        CHECK(mixed_bound(in) == doctest::Approx(9.0 * 4.0 * (3.0 + 1.0 / 32.0)));
        CHECK(mixed_bound(in) == doctest::Approx(109.125));
    }
    SUBCASE("overlapping sets throw") {
        BoundInput in;
        in.n = 2;
        in.factors = {unit_local(1)};
        in.local_set = {0};
        in.global_set = {0};
        CHECK_THROWS(mixed_bound(in));
    }
}

TEST_CASE("bounds are monotone in locality and nontrivial count") {
    Rng rng(7);
    for (int rep = 0; rep < 50; rep++) {
        BoundInput in;
        in.n = 4;
        int count = 1 + int(rng.next_below(3));
        for (int i = 0; i < count; i++) {
            FactorDescriptor f = unit_local(1 + int(rng.next_below(3)));
            f.trace = rng.next_double();
            f.trace_sq = 1.0 + rng.next_double();
            f.traceless_inf = rng.next_double();
            in.factors.push_back(f);
        }
        double base_p = pauli_bound(in);
        double base_c = clifford_bound(in);

        BoundInput more_local = in;
        more_local.factors[0].locality = std::min(in.n, more_local.factors[0].locality + 1);
        CHECK(pauli_bound(more_local) >= base_p);

        BoundInput more_factors = in;
        more_factors.factors.push_back(unit_local(1));
        CHECK(pauli_bound(more_factors) >= base_p);
        CHECK(clifford_bound(more_factors) >= base_c);
    }
}

TEST_CASE("describe_factor matches dense computation") {
    Rng rng(8);
    CMat dense = vdshadow::testing::random_hermitian(2, rng);
    FactorDescriptor f = describe_factor(SubsystemOperator::from_dense(dense));
    CHECK(f.trace == doctest::Approx(dense.trace().real()).epsilon(1e-9));
    CHECK(f.trace_sq == doctest::Approx((dense * dense).trace().real()).epsilon(1e-9));
    CHECK(f.inf_norm == doctest::Approx(hermitian_inf_norm(dense)).epsilon(1e-9));

    FactorDescriptor zz = describe_factor(SubsystemOperator::from_pauli(PauliString::from_label("ZZI")));
    CHECK(zz.locality == 2);
    CHECK(zz.trace == doctest::Approx(0.0));
    CHECK(zz.trace_sq == doctest::Approx(8.0));

    FactorDescriptor proj = describe_factor(SubsystemOperator::projector0(3));
    CHECK(proj.trace == doctest::Approx(1.0));
    CHECK(proj.trace_sq == doctest::Approx(1.0));
    CHECK(proj.traceless_inf == doctest::Approx(7.0 / 8.0));
}

TEST_CASE("qubit sweep: monotone columns and mixed wins at large n") {
    auto rows = tradeoff_qubit_sweep(2, 10);
    REQUIRE(rows.size() == 9);
    for (size_t i = 1; i < rows.size(); i++) {
        CHECK(rows[i].pauli > rows[i - 1].pauli);
        CHECK(rows[i].clifford > rows[i - 1].clifford);
        CHECK(rows[i].mixed <= rows[i - 1].mixed);
    }
    const TradeoffRow &last = rows.back();
    CHECK(last.mixed <= std::min(last.pauli, last.clifford));

    auto single = tradeoff_qubit_sweep(4, 4);
    CHECK(single.size() == 1);
}

TEST_CASE("order sweep growth rates") {
    auto rows = tradeoff_order_sweep(5, 6);
    REQUIRE(rows.size() == 6);
    double dn = 1.0 / 32.0;
    for (size_t i = 1; i < rows.size(); i++) {
        CHECK(rows[i].pauli / rows[i - 1].pauli == doctest::Approx(16.0));
        CHECK(rows[i].clifford / rows[i - 1].clifford == doctest::Approx((3.0 + dn) * (3.0 + dn)));
        CHECK(rows[i].mixed / rows[i - 1].mixed == doctest::Approx(4.0 * (3.0 + dn)));
    }
}

TEST_CASE("empirical single-shot variance stays below the bound") {
    ExperimentCore core;
    core.n = 3;
    core.m = 2;
    core.prep = StatePrep::ghz();
    core.noise = NoiseSpec{0.1, 'Y', 0};
    core.tags = ShadowTypeTag::all_pauli(2);
    core.seed = 33;
    ShadowEnsemble ens = run_ensemble(core, 20000, 0);
    std::vector<SubsystemOperator> factors = {SubsystemOperator::from_pauli(PauliString::from_label("ZZI")),
                                              SubsystemOperator::identity(3)};
    FactorizedObservable obs(3, AncillaOp::X, factors);
    auto values = evaluate_ensemble(ens, {obs}, 0);
    double mean = 0;
    for (cdouble v : values[0]) {
        mean += v.real();
    }
    mean /= double(values[0].size());
    double var = 0;
    for (cdouble v : values[0]) {
        var += (v.real() - mean) * (v.real() - mean);
    }
    var /= double(values[0].size() - 1);
    BoundInput in = BoundInput::from_observable(obs);
    CHECK(var <= pauli_bound(in));
}
