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

#ifndef VDSHADOW_QSIM_H
#define VDSHADOW_QSIM_H

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "vdshadow/linalg.hpp"
#include "vdshadow/pauli.hpp"
#include "vdshadow/rng.hpp"

namespace vdshadow {

/// Pure statevector or exact density matrix over `num_qubits` qubits.
/// Statevectors carry sampled trajectories; density matrices carry exact
/// channel evolution for oracles.
struct QuantumState {
    enum class Kind { Statevector, Density };

    int num_qubits = 0;
    Kind kind = Kind::Statevector;
    CVec vec;
    CMat mat;

    static QuantumState zero_statevector(int n) {
        QuantumState s;
        s.num_qubits = n;
        s.kind = Kind::Statevector;
        s.vec = CVec::Zero(Eigen::Index(1) << n);
        s.vec(0) = 1;
        return s;
    }

    static QuantumState zero_density(int n) {
        QuantumState s;
        s.num_qubits = n;
        s.kind = Kind::Density;
        s.mat = CMat::Zero(Eigen::Index(1) << n, Eigen::Index(1) << n);
        s.mat(0, 0) = 1;
        return s;
    }

    static QuantumState from_statevector(int n, CVec v) {
        QuantumState s;
        s.num_qubits = n;
        s.kind = Kind::Statevector;
        s.vec = std::move(v);
        s.check_invariants();
        return s;
    }

    static QuantumState from_density(int n, CMat m) {
        QuantumState s;
        s.num_qubits = n;
        s.kind = Kind::Density;
        s.mat = std::move(m);
        s.check_invariants();
        return s;
    }

    Eigen::Index dim() const {
        return Eigen::Index(1) << num_qubits;
    }

    void check_invariants() const {
        if (kind == Kind::Statevector) {
            if (vec.size() != dim()) {
                throw std::invalid_argument("QuantumState: statevector length mismatch");
            }
            if (std::abs(vec.norm() - 1.0) > kExactTol) {
                throw std::runtime_error("QuantumState: statevector norm drifted");
            }
        } else {
            if (mat.rows() != dim() || mat.cols() != dim()) {
                throw std::invalid_argument("QuantumState: density dimension mismatch");
            }
            if (std::abs(mat.trace().real() - 1.0) > kExactTol || std::abs(mat.trace().imag()) > kExactTol) {
                throw std::runtime_error("QuantumState: density trace drifted");
            }
            if (!is_hermitian(mat, kExactTol)) {
                throw std::runtime_error("QuantumState: density not Hermitian");
            }
        }
    }
};

struct GateSpec {
    enum class Kind { Hadamard, PauliX, PauliY, PauliZ, ControlledSwap, CustomUnitary };

    Kind kind = Kind::Hadamard;
    std::vector<int> targets;
    int control = -1;  // controlled_swap only
    CMat unitary;      // custom_unitary only

    static GateSpec hadamard(int q) {
        GateSpec g;
        g.kind = Kind::Hadamard;
        g.targets = {q};
        return g;
    }
    static GateSpec pauli_x(int q) {
        GateSpec g;
        g.kind = Kind::PauliX;
        g.targets = {q};
        return g;
    }
    static GateSpec pauli_y(int q) {
        GateSpec g;
        g.kind = Kind::PauliY;
        g.targets = {q};
        return g;
    }
    static GateSpec pauli_z(int q) {
        GateSpec g;
        g.kind = Kind::PauliZ;
        g.targets = {q};
        return g;
    }
    static GateSpec controlled_swap(int control, int a, int b) {
        GateSpec g;
        g.kind = Kind::ControlledSwap;
        g.control = control;
        g.targets = {a, b};
        return g;
    }
    static GateSpec custom_unitary(std::vector<int> targets, CMat u) {
        GateSpec g;
        g.kind = Kind::CustomUnitary;
        g.targets = std::move(targets);
        g.unitary = std::move(u);
        return g;
    }

    void validate(int num_qubits) const {
        std::vector<int> all = targets;
        if (kind == Kind::ControlledSwap) {
            all.push_back(control);
            if (targets.size() != 2) {
                throw std::invalid_argument("GateSpec: controlled_swap takes two targets");
            }
        }
        for (int q : all) {
            if (q < 0 || q >= num_qubits) {
                throw std::invalid_argument("GateSpec: qubit index out of range");
            }
        }
        for (size_t i = 0; i < all.size(); i++) {
            for (size_t j = i + 1; j < all.size(); j++) {
                if (all[i] == all[j]) {
                    throw std::invalid_argument("GateSpec: duplicate qubit index");
                }
            }
        }
        if (kind == Kind::CustomUnitary) {
            Eigen::Index want = Eigen::Index(1) << targets.size();
            if (unitary.rows() != want || unitary.cols() != want) {
                throw std::invalid_argument("GateSpec: unitary size does not match targets");
            }
            if (!is_unitary(unitary)) {
                throw std::invalid_argument("GateSpec: matrix is not unitary");
            }
        }
    }
};

/// Single-qubit Pauli error applied with probability p to one target qubit.
struct NoiseSpec {
    double error_rate = 0.0;
    char pauli_op = 'Y';
    int target_qubit = 0;

    void validate() const {
        if (error_rate < 0.0 || error_rate > 1.0) {
            throw std::invalid_argument("NoiseSpec: error_rate outside [0,1]");
        }
        if (pauli_op != 'X' && pauli_op != 'Y' && pauli_op != 'Z') {
            throw std::invalid_argument("NoiseSpec: pauli_op must be X, Y or Z");
        }
    }

    CMat pauli_matrix() const {
        switch (pauli_op) {
            case 'X':
                return vdshadow::pauli_x();
            case 'Y':
                return vdshadow::pauli_y();
            default:
                return vdshadow::pauli_z();
        }
    }
};

namespace detail {

inline void apply_single_qubit(CVec &v, int q, const CMat &u) {
    Eigen::Index step = Eigen::Index(1) << q;
    cdouble u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
    for (Eigen::Index base = 0; base < v.size(); base += 2 * step) {
        for (Eigen::Index i = base; i < base + step; i++) {
            cdouble a = v(i), b = v(i + step);
            v(i) = u00 * a + u01 * b;
            v(i + step) = u10 * a + u11 * b;
        }
    }
}

inline void apply_dense_on_targets(CVec &v, const std::vector<int> &targets, const CMat &u) {
    size_t t = targets.size();
    Eigen::Index sub = Eigen::Index(1) << t;
    uint64_t mask = 0;
    for (int q : targets) {
        mask |= uint64_t(1) << q;
    }
    std::vector<cdouble> amp(sub);
    for (uint64_t base = 0; base < uint64_t(v.size()); base++) {
        if (base & mask) {
            continue;
        }
        for (Eigen::Index s = 0; s < sub; s++) {
            uint64_t idx = base;
            for (size_t b = 0; b < t; b++) {
                idx |= ((uint64_t(s) >> b) & 1) << targets[b];
            }
            amp[s] = v(Eigen::Index(idx));
        }
        for (Eigen::Index r = 0; r < sub; r++) {
            cdouble acc = 0;
            for (Eigen::Index s = 0; s < sub; s++) {
                acc += u(r, s) * amp[s];
            }
            uint64_t idx = base;
            for (size_t b = 0; b < t; b++) {
                idx |= ((uint64_t(r) >> b) & 1) << targets[b];
            }
            v(Eigen::Index(idx)) = acc;
        }
    }
}

inline void apply_cswap(CVec &v, int control, int a, int b) {
    uint64_t cm = uint64_t(1) << control;
    uint64_t am = uint64_t(1) << a;
    uint64_t bm = uint64_t(1) << b;
    for (uint64_t i = 0; i < uint64_t(v.size()); i++) {
        bool bit_a = i & am;
        bool bit_b = i & bm;
        if ((i & cm) && bit_a && !bit_b) {
            uint64_t j = (i ^ am) | bm;
            std::swap(v(Eigen::Index(i)), v(Eigen::Index(j)));
        }
    }
}

inline CMat gate_full_matrix(const GateSpec &gate, int num_qubits) {
    switch (gate.kind) {
        case GateSpec::Kind::Hadamard:
            return embed_operator(hadamard_matrix(), gate.targets, num_qubits);
        case GateSpec::Kind::PauliX:
            return embed_operator(vdshadow::pauli_x(), gate.targets, num_qubits);
        case GateSpec::Kind::PauliY:
            return embed_operator(vdshadow::pauli_y(), gate.targets, num_qubits);
        case GateSpec::Kind::PauliZ:
            return embed_operator(vdshadow::pauli_z(), gate.targets, num_qubits);
        case GateSpec::Kind::ControlledSwap: {
            CMat cs = CMat::Identity(8, 8);
            // Qubit order within the embedded block: control, then the two
            // swap targets (indices 0,1,2 of the 3-qubit block).
            cs(Eigen::Index(0b011), Eigen::Index(0b011)) = 0;
            cs(Eigen::Index(0b101), Eigen::Index(0b101)) = 0;
            cs(Eigen::Index(0b011), Eigen::Index(0b101)) = 1;
            cs(Eigen::Index(0b101), Eigen::Index(0b011)) = 1;
            return embed_operator(cs, {gate.control, gate.targets[0], gate.targets[1]}, num_qubits);
        }
        case GateSpec::Kind::CustomUnitary:
            return embed_operator(gate.unitary, gate.targets, num_qubits);
    }
    throw std::logic_error("gate_full_matrix: unreachable");
}

}  // namespace detail

/// Applies a gate in place. Statevectors use dispatched kernels; density
/// matrices are conjugated by the dense embedding.
inline void apply_gate(QuantumState &state, const GateSpec &gate) {
    gate.validate(state.num_qubits);
    if (state.kind == QuantumState::Kind::Statevector) {
        switch (gate.kind) {
            case GateSpec::Kind::Hadamard:
                detail::apply_single_qubit(state.vec, gate.targets[0], hadamard_matrix());
                break;
            case GateSpec::Kind::PauliX:
                detail::apply_single_qubit(state.vec, gate.targets[0], pauli_x());
                break;
            case GateSpec::Kind::PauliY:
                detail::apply_single_qubit(state.vec, gate.targets[0], pauli_y());
                break;
            case GateSpec::Kind::PauliZ:
                detail::apply_single_qubit(state.vec, gate.targets[0], pauli_z());
                break;
            case GateSpec::Kind::ControlledSwap:
                detail::apply_cswap(state.vec, gate.control, gate.targets[0], gate.targets[1]);
                break;
            case GateSpec::Kind::CustomUnitary:
                if (gate.targets.size() == 1) {
                    detail::apply_single_qubit(state.vec, gate.targets[0], gate.unitary);
                } else {
                    detail::apply_dense_on_targets(state.vec, gate.targets, gate.unitary);
                }
                break;
        }
    } else {
        CMat u = detail::gate_full_matrix(gate, state.num_qubits);
        state.mat = u * state.mat * u.adjoint();
    }
    state.check_invariants();
}

/// Trajectory path: applies the Pauli with probability p (rng required).
/// Density path: applies the channel (1-p) rho + p P rho P exactly.
inline void apply_noise(QuantumState &state, const NoiseSpec &noise, Rng *rng) {
    noise.validate();
    if (state.kind == QuantumState::Kind::Statevector) {
        if (rng == nullptr) {
            throw std::invalid_argument("apply_noise: trajectory path needs an rng");
        }
        if (rng->next_bernoulli(noise.error_rate)) {
            GateSpec g;
            g.targets = {noise.target_qubit};
            g.kind = noise.pauli_op == 'X'   ? GateSpec::Kind::PauliX
                     : noise.pauli_op == 'Y' ? GateSpec::Kind::PauliY
                                             : GateSpec::Kind::PauliZ;
            apply_gate(state, g);
        }
    } else {
        CMat p = embed_operator(noise.pauli_matrix(), {noise.target_qubit}, state.num_qubits);
        state.mat = (1.0 - noise.error_rate) * state.mat + noise.error_rate * (p * state.mat * p.adjoint());
        state.check_invariants();
    }
}

/// Measures the given qubits in the computational basis (trajectory path).
/// Returns the sampled bits (bit i of the result = qubits[i]) and collapses
/// the state to the normalized projection.
inline uint64_t measure_computational(QuantumState &state, const std::vector<int> &qubits, Rng &rng) {
    if (state.kind != QuantumState::Kind::Statevector) {
        throw std::invalid_argument("measure_computational: statevector path only");
    }
    uint64_t result = 0;
    for (size_t k = 0; k < qubits.size(); k++) {
        int q = qubits[k];
        if (q < 0 || q >= state.num_qubits) {
            throw std::invalid_argument("measure_computational: qubit out of range");
        }
        uint64_t qm = uint64_t(1) << q;
        double p1 = 0;
        for (uint64_t i = 0; i < uint64_t(state.vec.size()); i++) {
            if (i & qm) {
                p1 += std::norm(state.vec(Eigen::Index(i)));
            }
        }
        bool bit = rng.next_double() < p1;
        double keep = bit ? p1 : 1.0 - p1;
        if (keep <= 0) {
            throw std::logic_error("measure_computational: zero-probability branch selected");
        }
        double scale = 1.0 / std::sqrt(keep);
        for (uint64_t i = 0; i < uint64_t(state.vec.size()); i++) {
            bool set = i & qm;
            if (set == bit) {
                state.vec(Eigen::Index(i)) *= scale;
            } else {
                state.vec(Eigen::Index(i)) = 0;
            }
        }
        if (bit) {
            result |= uint64_t(1) << k;
        }
    }
    state.check_invariants();
    return result;
}

/// Returns each outcome's Born probability for measuring `qubits`, ordered by
/// the packed outcome bits. Used by exact branch enumeration.
inline std::vector<double> measurement_distribution(const QuantumState &state, const std::vector<int> &qubits) {
    std::vector<double> probs(size_t(1) << qubits.size(), 0.0);
    auto accumulate = [&](uint64_t basis_index, double weight) {
        uint64_t outcome = 0;
        for (size_t k = 0; k < qubits.size(); k++) {
            outcome |= ((basis_index >> qubits[k]) & 1) << k;
        }
        probs[outcome] += weight;
    };
    if (state.kind == QuantumState::Kind::Statevector) {
        for (uint64_t i = 0; i < uint64_t(state.vec.size()); i++) {
            accumulate(i, std::norm(state.vec(Eigen::Index(i))));
        }
    } else {
        for (uint64_t i = 0; i < uint64_t(state.mat.rows()); i++) {
            accumulate(i, state.mat(Eigen::Index(i), Eigen::Index(i)).real());
        }
    }
    return probs;
}

/// Projects the state onto the given outcome of the given qubits and
/// renormalizes. Returns the outcome probability.
inline double project_outcome(QuantumState &state, const std::vector<int> &qubits, uint64_t outcome) {
    uint64_t mask = 0, want = 0;
    for (size_t k = 0; k < qubits.size(); k++) {
        mask |= uint64_t(1) << qubits[k];
        want |= ((outcome >> k) & 1) << qubits[k];
    }
    double p = 0;
    if (state.kind == QuantumState::Kind::Statevector) {
        for (uint64_t i = 0; i < uint64_t(state.vec.size()); i++) {
            if ((i & mask) == want) {
                p += std::norm(state.vec(Eigen::Index(i)));
            } else {
                state.vec(Eigen::Index(i)) = 0;
            }
        }
        if (p > 0) {
            state.vec /= std::sqrt(p);
        }
    } else {
        for (uint64_t r = 0; r < uint64_t(state.mat.rows()); r++) {
            for (uint64_t c = 0; c < uint64_t(state.mat.cols()); c++) {
                if ((r & mask) != want || (c & mask) != want) {
                    state.mat(Eigen::Index(r), Eigen::Index(c)) = 0;
                }
            }
        }
        p = state.mat.trace().real();
        if (p > 0) {
            state.mat /= p;
        }
    }
    return p;
}

/// Returns the designated qubits to |0>. On the trajectory path the qubits
/// must already be collapsed (a computational product unentangled with the
/// rest); resetting an entangled qubit signals a circuit-schedule misuse.
inline void reset_qubits(QuantumState &state, const std::vector<int> &qubits) {
    if (state.kind == QuantumState::Kind::Statevector) {
        for (int q : qubits) {
            uint64_t qm = uint64_t(1) << q;
            double p1 = 0;
            for (uint64_t i = 0; i < uint64_t(state.vec.size()); i++) {
                if (i & qm) {
                    p1 += std::norm(state.vec(Eigen::Index(i)));
                }
            }
            if (p1 > kExactTol && p1 < 1.0 - kExactTol) {
                throw std::runtime_error("reset_qubits: qubit is not in a measured computational state");
            }
            if (p1 >= 1.0 - kExactTol) {
                GateSpec flip = GateSpec::pauli_x(q);
                apply_gate(state, flip);
            }
        }
    } else {
        // Channel form: trace out, then adjoin |0><0|.
        for (int q : qubits) {
            uint64_t qm = uint64_t(1) << q;
            Eigen::Index dim = state.mat.rows();
            CMat next = CMat::Zero(dim, dim);
            for (uint64_t r = 0; r < uint64_t(dim); r++) {
                if (r & qm) {
                    continue;
                }
                for (uint64_t c = 0; c < uint64_t(dim); c++) {
                    if (c & qm) {
                        continue;
                    }
                    next(Eigen::Index(r), Eigen::Index(c)) =
                        state.mat(Eigen::Index(r), Eigen::Index(c)) +
                        state.mat(Eigen::Index(r | qm), Eigen::Index(c | qm));
                }
            }
            state.mat = std::move(next);
        }
        state.check_invariants();
    }
}

/// Tr(O rho) for density states, <psi|O|psi> for statevectors.
inline cdouble exact_expectation(const QuantumState &state, const CMat &op) {
    if (op.rows() != state.dim() || op.cols() != state.dim()) {
        throw std::invalid_argument("exact_expectation: dimension mismatch");
    }
    if (state.kind == QuantumState::Kind::Statevector) {
        return state.vec.dot(op * state.vec);
    }
    return (op * state.mat).trace();
}

}  // namespace vdshadow

#endif
