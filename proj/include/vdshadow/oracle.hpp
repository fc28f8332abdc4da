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

#ifndef VDSHADOW_ORACLE_H
#define VDSHADOW_ORACLE_H

#include <unordered_set>

#include "vdshadow/shadows.hpp"

namespace vdshadow {

/// Exact noisy state Lambda(|psi><psi|) as a density matrix.
inline QuantumState exact_noisy_state(const StatePrep &prep, const NoiseSpec &noise, int n) {
    if (n > 13) {
        throw std::invalid_argument("exact_noisy_state: n too large for dense oracle");
    }
    CVec psi = prep.ideal_statevector(n);
    QuantumState state = QuantumState::from_density(n, psi * psi.adjoint());
    apply_noise(state, noise, nullptr);
    return state;
}

/// Literal Tr(O_1 rho O_2 rho ... O_M rho).
inline cdouble exact_trace_product(const CMat &rho, const std::vector<CMat> &ops) {
    CMat acc = CMat::Identity(rho.rows(), rho.cols());
    for (const CMat &op : ops) {
        if (op.rows() != rho.rows() || op.cols() != rho.cols()) {
            throw std::invalid_argument("exact_trace_product: dimension mismatch");
        }
        acc = acc * op * rho;
    }
    return acc.trace();
}

/// Cyclic right-shift permutation matrix on M n-qubit subsystems: the state
/// of subsystem j moves to subsystem j+1 and subsystem M wraps to 1.
inline CMat cyclic_shift_matrix(int n, int m) {
    Eigen::Index dim = Eigen::Index(1) << (n * m);
    CMat s = CMat::Zero(dim, dim);
    uint64_t sub_mask = (uint64_t(1) << n) - 1;
    for (uint64_t from = 0; from < uint64_t(dim); from++) {
        uint64_t to = 0;
        for (int j = 0; j < m; j++) {
            uint64_t bits = (from >> (n * j)) & sub_mask;
            int dest = (j + 1) % m;
            to |= bits << (n * dest);
        }
        s(Eigen::Index(to), Eigen::Index(from)) = 1;
    }
    return s;
}

/// The swap-test output state on nM+1 qubits: ancilla (qubit 0) blocks
/// weighting rho^(x)M against its cyclically shifted copies.
inline QuantumState exact_rho_f(const QuantumState &rho, int m) {
    if (rho.kind != QuantumState::Kind::Density) {
        throw std::invalid_argument("exact_rho_f: density input required");
    }
    int n = rho.num_qubits;
    if (n * m + 1 > 13) {
        throw std::invalid_argument("exact_rho_f: total qubit count exceeds dense oracle limit");
    }
    CMat copies = CMat::Identity(1, 1);
    for (int j = 0; j < m; j++) {
        copies = tensor_le(copies, rho.mat);
    }
    CMat shift = cyclic_shift_matrix(n, m);
    CMat blocks[2][2];
    blocks[0][0] = copies;
    blocks[0][1] = copies * shift.adjoint();
    blocks[1][0] = shift * copies;
    blocks[1][1] = shift * copies * shift.adjoint();
    Eigen::Index sub = copies.rows();
    CMat out = CMat::Zero(2 * sub, 2 * sub);
    for (int a = 0; a < 2; a++) {
        for (int b = 0; b < 2; b++) {
            for (Eigen::Index i = 0; i < sub; i++) {
                for (Eigen::Index j = 0; j < sub; j++) {
                    out(2 * i + a, 2 * j + b) = 0.5 * blocks[a][b](i, j);
                }
            }
        }
    }
    return QuantumState::from_density(n * m + 1, std::move(out));
}

// ---------------------------------------------------------------------------
// Exact distribution of the qubit-reset schedule

namespace detail {

struct FixedCliffordLayers {
    // Dense unitaries for slots 1..M plus the ancilla layer.
    std::vector<CMat> slot_unitary;
    CMat ancilla_unitary;
};

inline void reset_distribution_recurse(const ExperimentCore &core, const FixedCliffordLayers &layers,
                                       QuantumState state, double weight, int slot, uint64_t packed,
                                       std::vector<double> &out) {
    int n = core.n;
    std::vector<int> reg_a(n), reg_b(n);
    for (int q = 0; q < n; q++) {
        reg_a[q] = 1 + q;
        reg_b[q] = 1 + n + q;
    }
    NoiseSpec noise_b = core.noise;
    noise_b.target_qubit = 1 + n + core.noise.target_qubit;
    if (slot <= core.m && core.m >= 2) {
        QuantumState layered = state;
        apply_gate(layered, GateSpec::custom_unitary(reg_b, layers.slot_unitary[slot - 1]));
        std::vector<double> probs = measurement_distribution(layered, reg_b);
        for (uint64_t z = 0; z < probs.size(); z++) {
            if (probs[z] <= 1e-15) {
                continue;
            }
            QuantumState branch = layered;
            project_outcome(branch, reg_b, z);
            uint64_t next_packed = packed | (z << (1 + uint64_t(n) * (uint64_t(slot) - 1)));
            if (slot < core.m) {
                reset_qubits(branch, reg_b);
                core.prep.apply(branch, reg_b);
                apply_noise(branch, noise_b, nullptr);
                for (int q = 0; q < n; q++) {
                    apply_gate(branch, GateSpec::controlled_swap(0, reg_a[q], reg_b[q]));
                }
            }
            reset_distribution_recurse(core, layers, std::move(branch), weight * probs[z], slot + 1, next_packed,
                                       out);
        }
        return;
    }
    // Terminal layers on register A and the ancilla.
    apply_gate(state, GateSpec::custom_unitary(reg_a, layers.slot_unitary[0]));
    apply_gate(state, GateSpec::custom_unitary({0}, layers.ancilla_unitary));
    std::vector<int> all;
    all.push_back(0);
    for (int q = 0; q < n; q++) {
        all.push_back(reg_a[q]);
    }
    std::vector<double> probs = measurement_distribution(state, all);
    for (uint64_t za = 0; za < probs.size(); za++) {
        uint64_t bit0 = za & 1;
        uint64_t z_slot1 = za >> 1;
        uint64_t idx = packed | bit0 | (z_slot1 << 1);
        out[idx] += weight * probs[za];
    }
}

}  // namespace detail

/// Exact joint outcome distribution of the qubit-reset schedule with fixed
/// Clifford layers. Outcome packing matches the rho_f qubit layout: bit 0 is
/// the ancilla, bits 1..n slot 1, bits n(j-1)+1..nj slot j.
inline std::vector<double> reset_circuit_distribution(const ExperimentCore &core,
                                                      const std::vector<CMat> &slot_unitaries,
                                                      const CMat &ancilla_unitary) {
    core.validate();
    int n = core.n, m = core.m;
    if (static_cast<int>(slot_unitaries.size()) != m) {
        throw std::invalid_argument("reset_circuit_distribution: need one unitary per slot");
    }
    detail::FixedCliffordLayers layers{slot_unitaries, ancilla_unitary};
    std::vector<double> out(size_t(1) << (n * m + 1), 0.0);
    std::vector<int> reg_a(n), reg_b(n);
    for (int q = 0; q < n; q++) {
        reg_a[q] = 1 + q;
        reg_b[q] = 1 + n + q;
    }
    int total_qubits = m == 1 ? n + 1 : 2 * n + 1;
    QuantumState state = QuantumState::zero_density(total_qubits);
    NoiseSpec noise_a = core.noise;
    noise_a.target_qubit = 1 + core.noise.target_qubit;
    apply_gate(state, GateSpec::hadamard(0));
    core.prep.apply(state, reg_a);
    apply_noise(state, noise_a, nullptr);
    if (m >= 2) {
        NoiseSpec noise_b = core.noise;
        noise_b.target_qubit = 1 + n + core.noise.target_qubit;
        core.prep.apply(state, reg_b);
        apply_noise(state, noise_b, nullptr);
        for (int q = 0; q < n; q++) {
            apply_gate(state, GateSpec::controlled_swap(0, reg_a[q], reg_b[q]));
        }
    }
    detail::reset_distribution_recurse(core, layers, std::move(state), 1.0, 2, 0, out);
    return out;
}

/// Joint outcome distribution induced by measuring exact_rho_f after the
/// same fixed Clifford layers; same outcome packing.
inline std::vector<double> rho_f_distribution(const ExperimentCore &core, const std::vector<CMat> &slot_unitaries,
                                              const CMat &ancilla_unitary) {
    int n = core.n, m = core.m;
    QuantumState rho_e = exact_noisy_state(core.prep, core.noise, n);
    QuantumState rho_f = exact_rho_f(rho_e, m);
    QuantumState transformed = rho_f;
    apply_gate(transformed, GateSpec::custom_unitary({0}, ancilla_unitary));
    for (int j = 1; j <= m; j++) {
        std::vector<int> reg(n);
        for (int q = 0; q < n; q++) {
            reg[q] = 1 + n * (j - 1) + q;
        }
        apply_gate(transformed, GateSpec::custom_unitary(reg, slot_unitaries[j - 1]));
    }
    std::vector<int> all(n * m + 1);
    for (int q = 0; q <= n * m; q++) {
        all[q] = q;
    }
    return measurement_distribution(transformed, all);
}

// ---------------------------------------------------------------------------
// Exhaustive estimator expectation

/// Every element of the n-qubit Clifford group (mod phase); supported for
/// n <= 2 (24 and 11520 elements).
inline const std::vector<CliffordElement> &enumerate_clifford_group(int n) {
    if (n == 1) {
        return single_qubit_cliffords();
    }
    if (n != 2) {
        throw std::invalid_argument("enumerate_clifford_group: supported for n in {1,2}");
    }
    static const std::vector<CliffordElement> group2 = [] {
        CliffordElement h0, h1, s0, s1, cnot01, cnot10;
        for (CliffordElement *c : {&h0, &h1, &s0, &s1, &cnot01, &cnot10}) {
            *c = CliffordElement::identity(2);
        }
        h0.image_x[0] = PauliString::from_label("ZI");
        h0.image_z[0] = PauliString::from_label("XI");
        h1.image_x[1] = PauliString::from_label("IZ");
        h1.image_z[1] = PauliString::from_label("IX");
        s0.image_x[0] = PauliString::from_label("YI");
        s1.image_x[1] = PauliString::from_label("IY");
        cnot01.image_x[0] = PauliString::from_label("XX");
        cnot01.image_z[1] = PauliString::from_label("ZZ");
        cnot10.image_x[1] = PauliString::from_label("XX");
        cnot10.image_z[0] = PauliString::from_label("ZZ");
        std::vector<CliffordElement> found = {CliffordElement::identity(2)};
        std::unordered_set<std::string> seen = {found[0].serialize()};
        for (size_t i = 0; i < found.size(); i++) {
            for (const CliffordElement *g : {&h0, &h1, &s0, &s1, &cnot01, &cnot10}) {
                CliffordElement next = found[i].then(*g);
                if (seen.insert(next.serialize()).second) {
                    found.push_back(next);
                }
            }
        }
        return found;
    }();
    return group2;
}

namespace detail {

/// Exact per-slot channel operator: the group-and-outcome average of
/// factor_value times the snapshot projector C^dag |z><z| C. Contracting
/// these against rho_f gives the exact estimator mean.
inline CMat slot_channel_operator(ShadowTag tag, int n, const SubsystemOperator &op) {
    Eigen::Index d = Eigen::Index(1) << n;
    CMat phi = CMat::Zero(d, d);
    Snapshot probe;
    probe.slots.resize(1);
    if (tag == ShadowTag::Clifford) {
        const auto &group = enumerate_clifford_group(n);
        for (const auto &c : group) {
            CMat u = clifford_to_unitary(c);
            probe.slots[0].tag = ShadowTag::Clifford;
            probe.slots[0].global_clifford = c;
            for (uint64_t z = 0; z < uint64_t(d); z++) {
                probe.slots[0].z_bits = z;
                cdouble f = factor_value(probe, 1, op);
                CVec col = u.adjoint() * CVec::Unit(d, Eigen::Index(z));
                phi += f * (col * col.adjoint());
            }
        }
        return phi / double(group.size());
    }
    size_t tuples = 1;
    for (int q = 0; q < n; q++) {
        tuples *= 24;
    }
    if (tuples * (size_t(1) << n) > 10'000'000) {
        throw std::invalid_argument("slot_channel_operator: enumeration guard exceeded");
    }
    probe.slots[0].tag = ShadowTag::Pauli;
    probe.slots[0].local_cliffords.resize(n);
    for (size_t t = 0; t < tuples; t++) {
        size_t rest = t;
        for (int q = 0; q < n; q++) {
            probe.slots[0].local_cliffords[q] = static_cast<uint8_t>(rest % 24);
            rest /= 24;
        }
        CMat u = CMat::Identity(1, 1);
        for (int q = 0; q < n; q++) {
            u = tensor_le(u, single_qubit_clifford_unitaries()[probe.slots[0].local_cliffords[q]]);
        }
        for (uint64_t z = 0; z < uint64_t(d); z++) {
            probe.slots[0].z_bits = z;
            cdouble f = factor_value(probe, 1, op);
            CVec col = u.adjoint() * CVec::Unit(d, Eigen::Index(z));
            phi += f * (col * col.adjoint());
        }
    }
    return phi / double(tuples);
}

inline CMat ancilla_channel_operator(AncillaOp op) {
    CMat phi = CMat::Zero(2, 2);
    Snapshot probe;
    for (int idx = 0; idx < 24; idx++) {
        const CMat &u = single_qubit_clifford_unitaries()[idx];
        probe.ancilla_clifford = static_cast<uint8_t>(idx);
        for (uint64_t z = 0; z < 2; z++) {
            probe.ancilla_bit = static_cast<uint8_t>(z);
            cdouble f = ancilla_factor(probe, op);
            CVec col = u.adjoint() * CVec::Unit(2, Eigen::Index(z));
            phi += f * (col * col.adjoint());
        }
    }
    return phi / 24.0;
}

}  // namespace detail

/// Exact expectation of evaluate_snapshot over all Clifford selections and
/// all outcome branches, weighted by the exact circuit distribution. The
/// per-slot averages integrate the actual evaluator formulas, so this is an
/// end-to-end oracle for unbiasedness.
inline cdouble exhaustive_estimator_mean(const ExperimentCore &core, const FactorizedObservable &obs) {
    core.validate();
    if (obs.order() != core.m) {
        throw std::invalid_argument("exhaustive_estimator_mean: observable arity mismatch");
    }
    QuantumState rho_e = exact_noisy_state(core.prep, core.noise, core.n);
    QuantumState rho_f = exact_rho_f(rho_e, core.m);
    CMat joint = detail::ancilla_channel_operator(obs.ancilla_op);
    for (int slot = 1; slot <= core.m; slot++) {
        // Slot s carries observable factor sigma(s); sigma is an involution.
        const SubsystemOperator &op = obs.factors[slot_of_factor(slot, core.m) - 1];
        joint = tensor_le(joint, detail::slot_channel_operator(core.tags.slots[slot], core.n, op));
    }
    return (joint * rho_f.mat).trace();
}

}  // namespace vdshadow

#endif
