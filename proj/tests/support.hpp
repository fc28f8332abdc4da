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

#ifndef VDSHADOW_TESTS_SUPPORT_H
#define VDSHADOW_TESTS_SUPPORT_H

#include "vdshadow/oracle.hpp"
#include "vdshadow/rng.hpp"

namespace vdshadow::testing {

inline CMat random_hermitian(int n, Rng &rng, double scale = 1.0) {
    Eigen::Index d = Eigen::Index(1) << n;
    CMat m(d, d);
    for (Eigen::Index r = 0; r < d; r++) {
        for (Eigen::Index c = 0; c < d; c++) {
            m(r, c) = cdouble(2 * rng.next_double() - 1, 2 * rng.next_double() - 1);
        }
    }
    CMat h = 0.5 * (m + m.adjoint());
    return scale * h / std::max(1.0, hermitian_inf_norm(h));
}

inline CMat random_unitary(int n, Rng &rng) {
    Eigen::Index d = Eigen::Index(1) << n;
    CMat m(d, d);
    for (Eigen::Index r = 0; r < d; r++) {
        for (Eigen::Index c = 0; c < d; c++) {
            double u1 = std::max(rng.next_double(), 1e-12);
            double u2 = rng.next_double();
            double mag = std::sqrt(-2.0 * std::log(u1));
            m(r, c) = cdouble(mag * std::cos(2 * M_PI * u2), mag * std::sin(2 * M_PI * u2));
        }
    }
    Eigen::HouseholderQR<CMat> qr(m);
    CMat q = qr.householderQ();
    CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < d; i++) {
        cdouble ph = r(i, i) / std::abs(r(i, i));
        q.col(i) *= ph;
    }
    return q;
}

inline CVec ghz_vector(int n) {
    CVec v = CVec::Zero(Eigen::Index(1) << n);
    v(0) = 1.0 / std::sqrt(2.0);
    v((Eigen::Index(1) << n) - 1) = 1.0 / std::sqrt(2.0);
    return v;
}

/// Gate-level simulation of the full-width swap-test circuit (no resets):
/// ancilla Hadamard, M prepared copies, and M-1 controlled swaps realizing
/// the cyclic right shift. Returns the exact output density matrix, for
/// cross-checking the block-built construction.
inline QuantumState gate_level_swap_test(const StatePrep &prep, const NoiseSpec &noise, int n, int m) {
    int total = n * m + 1;
    QuantumState state = QuantumState::zero_density(total);
    apply_gate(state, GateSpec::hadamard(0));
    for (int j = 0; j < m; j++) {
        std::vector<int> reg(n);
        for (int q = 0; q < n; q++) {
            reg[q] = 1 + j * n + q;
        }
        prep.apply(state, reg);
        NoiseSpec local = noise;
        local.target_qubit = reg[0] + noise.target_qubit;
        apply_noise(state, local, nullptr);
    }
    // Controlled cyclic right shift: controlled swaps of copy 1 with copies
    // 2..M in time order move copy k to slot k+1 and copy M to slot 1.
    for (int j = 2; j <= m; j++) {
        for (int q = 0; q < n; q++) {
            apply_gate(state, GateSpec::controlled_swap(0, 1 + q, 1 + (j - 1) * n + q));
        }
    }
    return state;
}

inline double total_variation(const std::vector<double> &p, const std::vector<double> &q) {
    double acc = 0;
    for (size_t i = 0; i < p.size(); i++) {
        acc += std::abs(p[i] - q[i]);
    }
    return 0.5 * acc;
}

}  // namespace vdshadow::testing

#endif
