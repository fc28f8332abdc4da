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

#ifndef VDSHADOW_SHADOWS_H
#define VDSHADOW_SHADOWS_H

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "vdshadow/clifford.hpp"
#include "vdshadow/qsim.hpp"

namespace vdshadow {

// ---------------------------------------------------------------------------
// State preparation

struct StatePrep {
    enum class Kind { Ghz, CustomUnitary };

    Kind kind = Kind::Ghz;
    CMat unitary;  // custom only, 2^n x 2^n

    static StatePrep ghz() {
        return StatePrep{};
    }

    static StatePrep custom(CMat u) {
        StatePrep p;
        p.kind = Kind::CustomUnitary;
        p.unitary = std::move(u);
        return p;
    }

    void validate(int n) const {
        if (kind == Kind::CustomUnitary) {
            Eigen::Index want = Eigen::Index(1) << n;
            if (unitary.rows() != want || unitary.cols() != want || !is_unitary(unitary)) {
                throw std::invalid_argument("StatePrep: custom matrix is not a unitary of the right size");
            }
        }
    }

    /// Applies the preparation to |0..0> on the given register qubits.
    void apply(QuantumState &state, const std::vector<int> &reg) const {
        if (kind == Kind::Ghz) {
            apply_gate(state, GateSpec::hadamard(reg[0]));
            CMat cnot(4, 4);
            cnot << 1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0;
            for (size_t k = 1; k < reg.size(); k++) {
                apply_gate(state, GateSpec::custom_unitary({reg[0], reg[k]}, cnot));
            }
        } else {
            apply_gate(state, GateSpec::custom_unitary(reg, unitary));
        }
    }

    CVec ideal_statevector(int n) const {
        validate(n);
        QuantumState s = QuantumState::zero_statevector(n);
        std::vector<int> reg(n);
        for (int q = 0; q < n; q++) {
            reg[q] = q;
        }
        apply(s, reg);
        return s.vec;
    }
};

// ---------------------------------------------------------------------------
// Shadow types and observables

enum class ShadowTag : uint8_t { Pauli, Clifford };

/// Per-subsystem shadow tags for slots 0..M. Slot 0 is the ancilla and is
/// always Pauli.
struct ShadowTypeTag {
    std::vector<ShadowTag> slots;

    static ShadowTypeTag all_pauli(int m) {
        ShadowTypeTag t;
        t.slots.assign(m + 1, ShadowTag::Pauli);
        return t;
    }

    static ShadowTypeTag all_clifford(int m) {
        ShadowTypeTag t;
        t.slots.assign(m + 1, ShadowTag::Clifford);
        t.slots[0] = ShadowTag::Pauli;
        return t;
    }

    /// Tags from a string over {P, C} for slots 1..M.
    static ShadowTypeTag from_string(const std::string &s) {
        ShadowTypeTag t;
        t.slots.push_back(ShadowTag::Pauli);
        for (char c : s) {
            if (c == 'P' || c == 'p') {
                t.slots.push_back(ShadowTag::Pauli);
            } else if (c == 'C' || c == 'c') {
                t.slots.push_back(ShadowTag::Clifford);
            } else {
                throw std::invalid_argument("ShadowTypeTag: tag characters must be P or C");
            }
        }
        return t;
    }

    std::string to_string() const {
        std::string s;
        for (size_t j = 1; j < slots.size(); j++) {
            s += slots[j] == ShadowTag::Pauli ? 'P' : 'C';
        }
        return s;
    }

    int order() const {
        return static_cast<int>(slots.size()) - 1;
    }

    void validate(int m) const {
        if (order() != m) {
            throw std::invalid_argument("ShadowTypeTag: tag arity does not match order M");
        }
        if (slots.empty() || slots[0] != ShadowTag::Pauli) {
            throw std::invalid_argument("ShadowTypeTag: ancilla slot must be Pauli");
        }
    }
};

enum class AncillaOp : uint8_t { Identity, X, Y, XplusIY };

/// One tensor factor of a factorized observable on an n-qubit subsystem.
struct SubsystemOperator {
    enum class Kind { Identity, Pauli, Projector0, Dense };

    Kind kind = Kind::Identity;
    PauliString pauli;  // Pauli kind
    CMat dense;         // Dense kind
    int num_qubits = 0;

    static SubsystemOperator identity(int n) {
        SubsystemOperator f;
        f.num_qubits = n;
        return f;
    }

    static SubsystemOperator from_pauli(const PauliString &p) {
        if (p.is_identity_up_to_phase() && p.phase_exp == 0) {
            return identity(p.num_qubits);
        }
        if (!p.is_hermitian()) {
            throw std::invalid_argument("SubsystemOperator: Pauli factor must be Hermitian");
        }
        SubsystemOperator f;
        f.kind = Kind::Pauli;
        f.pauli = p;
        f.num_qubits = p.num_qubits;
        return f;
    }

    /// |0><0| on every qubit of the subsystem.
    static SubsystemOperator projector0(int n) {
        SubsystemOperator f;
        f.kind = Kind::Projector0;
        f.num_qubits = n;
        return f;
    }

    static SubsystemOperator from_dense(CMat m, double tol = kExactTol) {
        if (!is_hermitian(m, tol)) {
            throw std::invalid_argument("SubsystemOperator: dense factor must be Hermitian");
        }
        return raw_dense(std::move(m));
    }

    /// Internal factors (leading-operator products) may be non-Hermitian.
    static SubsystemOperator raw_dense(CMat m) {
        int n = 0;
        while ((Eigen::Index(1) << n) < m.rows()) {
            n++;
        }
        if ((Eigen::Index(1) << n) != m.rows() || m.rows() != m.cols()) {
            throw std::invalid_argument("SubsystemOperator: dense factor must be square power-of-two");
        }
        SubsystemOperator f;
        f.kind = Kind::Dense;
        f.dense = std::move(m);
        f.num_qubits = n;
        return f;
    }

    static SubsystemOperator raw_pauli(const PauliString &p) {
        SubsystemOperator f;
        f.kind = Kind::Pauli;
        f.pauli = p;
        f.num_qubits = p.num_qubits;
        return f;
    }

    bool is_identity() const {
        return kind == Kind::Identity;
    }

    /// Number of non-identity tensor legs (full n for dense factors).
    int locality() const {
        switch (kind) {
            case Kind::Identity:
                return 0;
            case Kind::Pauli:
                return pauli.weight();
            default:
                return num_qubits;
        }
    }

    CMat to_dense() const {
        Eigen::Index d = Eigen::Index(1) << num_qubits;
        switch (kind) {
            case Kind::Identity:
                return CMat::Identity(d, d);
            case Kind::Pauli:
                return pauli.dense();
            case Kind::Projector0: {
                CMat m = CMat::Zero(d, d);
                m(0, 0) = 1;
                return m;
            }
            default:
                return dense;
        }
    }

    cdouble trace() const {
        switch (kind) {
            case Kind::Identity:
                return cdouble(double(Eigen::Index(1) << num_qubits), 0);
            case Kind::Pauli:
                return pauli.is_identity_up_to_phase() ? cdouble(double(Eigen::Index(1) << num_qubits), 0) * pauli.phase_value()
                                                       : cdouble(0, 0);
            case Kind::Projector0:
                return cdouble(1, 0);
            default:
                return dense.trace();
        }
    }
};

/// A_0 (x) O_1 (x) ... (x) O_M, stored factor by factor.
struct FactorizedObservable {
    int subsystem_qubits = 0;
    AncillaOp ancilla_op = AncillaOp::XplusIY;
    std::vector<SubsystemOperator> factors;

    FactorizedObservable() = default;

    FactorizedObservable(int n, AncillaOp anc, std::vector<SubsystemOperator> ops)
        : subsystem_qubits(n), ancilla_op(anc), factors(std::move(ops)) {
        for (const auto &f : factors) {
            if (f.num_qubits != n) {
                throw std::invalid_argument("FactorizedObservable: factor size mismatch");
            }
        }
    }

    int order() const {
        return static_cast<int>(factors.size());
    }

    /// 1 + number of non-identity subsystem factors.
    int nontrivial_count() const {
        int c = 1;
        for (const auto &f : factors) {
            if (!f.is_identity()) {
                c++;
            }
        }
        return c;
    }
};

// ---------------------------------------------------------------------------
// Snapshots

struct SubsystemRecord {
    ShadowTag tag = ShadowTag::Pauli;
    std::vector<uint8_t> local_cliffords;  // Pauli tag: indices into the 24-table
    CliffordElement global_clifford;       // Clifford tag
    uint64_t z_bits = 0;                   // little-endian within the subsystem
};

/// One run of the shot schedule: outcome bits and Clifford labels for the
/// ancilla (slot 0) and the M subsystem slots.
struct Snapshot {
    uint64_t shot = 0;
    uint8_t ancilla_clifford = 0;  // index into the 24-table
    uint8_t ancilla_bit = 0;
    std::vector<SubsystemRecord> slots;  // slots 1..M

    int order() const {
        return static_cast<int>(slots.size());
    }
};

// ---------------------------------------------------------------------------
// Experiment core configuration

struct ExperimentCore {
    int n = 1;  // qubits per subsystem
    int m = 1;  // VD order M
    StatePrep prep;
    NoiseSpec noise;  // target_qubit is register-local
    ShadowTypeTag tags;
    uint64_t seed = 0;

    void validate() const {
        if (n < 1 || n > 16) {
            throw std::invalid_argument("ExperimentCore: n out of range");
        }
        if (m < 1) {
            throw std::invalid_argument("ExperimentCore: order M must be >= 1");
        }
        prep.validate(n);
        noise.validate();
        if (noise.target_qubit < 0 || noise.target_qubit >= n) {
            throw std::invalid_argument("ExperimentCore: noise target outside register");
        }
        tags.validate(m);
    }
};

struct ShadowEnsemble {
    ExperimentCore core;
    std::vector<Snapshot> snapshots;

    int order() const {
        return core.m;
    }
    size_t size() const {
        return snapshots.size();
    }
};

// ---------------------------------------------------------------------------
// Shot execution

namespace detail {

inline const std::vector<CMat> &single_qubit_clifford_unitaries() {
    static const std::vector<CMat> table = [] {
        std::vector<CMat> out;
        for (const auto &c : single_qubit_cliffords()) {
            out.push_back(clifford_to_unitary(c));
        }
        return out;
    }();
    return table;
}

inline void apply_register_unitary(QuantumState &state, const std::vector<int> &reg, const CMat &u) {
    if (reg.size() == 1) {
        detail::apply_single_qubit(state.vec, reg[0], u);
    } else {
        detail::apply_dense_on_targets(state.vec, reg, u);
    }
}

/// Samples, applies, and records the randomized measurement layer for one
/// register; returns the measured bits.
inline SubsystemRecord randomized_measurement(QuantumState &state, const std::vector<int> &reg, ShadowTag tag,
                                              Rng &rng) {
    SubsystemRecord rec;
    rec.tag = tag;
    int n = static_cast<int>(reg.size());
    if (tag == ShadowTag::Pauli) {
        rec.local_cliffords.resize(n);
        for (int q = 0; q < n; q++) {
            uint8_t idx = static_cast<uint8_t>(rng.next_below(24));
            rec.local_cliffords[q] = idx;
            detail::apply_single_qubit(state.vec, reg[q], single_qubit_clifford_unitaries()[idx]);
        }
    } else {
        rec.global_clifford = sample_uniform_clifford(n, rng);
        apply_register_unitary(state, reg, clifford_to_unitary(rec.global_clifford));
    }
    rec.z_bits = measure_computational(state, reg, rng);
    return rec;
}

}  // namespace detail

/// Runs one shot of the qubit-reset schedule and returns its Snapshot.
///
/// Register layout: ancilla = qubit 0, register A = qubits 1..n, register
/// B = qubits n+1..2n. For M = 1 register B is not allocated. Noise is
/// applied to the configured register-local qubit after every preparation.
inline Snapshot run_shot(const ExperimentCore &core, uint64_t shot_index) {
    core.validate();
    Rng rng = Rng::stream(core.seed, shot_index);
    int n = core.n;
    int m = core.m;
    std::vector<int> reg_a(n), reg_b(n);
    for (int q = 0; q < n; q++) {
        reg_a[q] = 1 + q;
        reg_b[q] = 1 + n + q;
    }
    int total_qubits = m == 1 ? n + 1 : 2 * n + 1;
    QuantumState state = QuantumState::zero_statevector(total_qubits);

    NoiseSpec noise_a = core.noise;
    noise_a.target_qubit = 1 + core.noise.target_qubit;
    NoiseSpec noise_b = core.noise;
    noise_b.target_qubit = 1 + n + core.noise.target_qubit;

    auto cswap_all = [&] {
        for (int q = 0; q < n; q++) {
            apply_gate(state, GateSpec::controlled_swap(0, reg_a[q], reg_b[q]));
        }
    };

    apply_gate(state, GateSpec::hadamard(0));
    core.prep.apply(state, reg_a);
    apply_noise(state, noise_a, &rng);

    Snapshot snap;
    snap.shot = shot_index;
    snap.slots.resize(m);

    if (m >= 2) {
        core.prep.apply(state, reg_b);
        apply_noise(state, noise_b, &rng);
        cswap_all();
        // The register measured at round t carries woven subsystem t+1: the
        // first measurement reads the copy displaced out of register A.
        for (int slot = 2; slot <= m; slot++) {
            snap.slots[slot - 1] = detail::randomized_measurement(state, reg_b, core.tags.slots[slot], rng);
            if (slot < m) {
                reset_qubits(state, reg_b);
                core.prep.apply(state, reg_b);
                apply_noise(state, noise_b, &rng);
                cswap_all();
            }
        }
    }
    snap.slots[0] = detail::randomized_measurement(state, reg_a, core.tags.slots[1], rng);

    uint8_t anc_idx = static_cast<uint8_t>(rng.next_below(24));
    snap.ancilla_clifford = anc_idx;
    detail::apply_single_qubit(state.vec, 0, detail::single_qubit_clifford_unitaries()[anc_idx]);
    snap.ancilla_bit = static_cast<uint8_t>(measure_computational(state, {0}, rng));
    return snap;
}

/// Runs N shots, parallelized across threads (deterministic regardless of
/// thread count: every shot derives its own rng stream).
inline ShadowEnsemble run_ensemble(const ExperimentCore &core, size_t num_shots, int threads = 0) {
    core.validate();
    ShadowEnsemble ens;
    ens.core = core;
    ens.snapshots.resize(num_shots);
    if (threads <= 0) {
        threads = static_cast<int>(std::thread::hardware_concurrency());
        if (threads <= 0) {
            threads = 1;
        }
    }
    threads = static_cast<int>(std::min<size_t>(static_cast<size_t>(threads), std::max<size_t>(num_shots, 1)));
    if (threads <= 1 || num_shots < 256) {
        for (size_t i = 0; i < num_shots; i++) {
            ens.snapshots[i] = run_shot(core, i);
        }
        return ens;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; t++) {
        pool.emplace_back([&, t] {
            for (size_t i = t; i < num_shots; i += threads) {
                ens.snapshots[i] = run_shot(core, i);
            }
        });
    }
    for (auto &th : pool) {
        th.join();
    }
    return ens;
}

// ---------------------------------------------------------------------------
// Snapshot evaluation

namespace detail {

/// Cache of dense reconstructions for one snapshot during evaluation.
struct SnapshotDenseCache {
    std::vector<std::optional<CMat>> slot_unitary;   // Clifford tag
    std::vector<std::optional<CVec>> slot_column;    // Clifford tag, U|0..0>
    std::vector<std::optional<CMat>> slot_mp_shadow; // Pauli tag, dense M_P(rho_hat)

    explicit SnapshotDenseCache(int m) : slot_unitary(m), slot_column(m), slot_mp_shadow(m) {}
};

inline CMat pauli_slot_shadow_dense(const SubsystemRecord &rec) {
    CMat out = CMat::Identity(1, 1);
    for (size_t q = 0; q < rec.local_cliffords.size(); q++) {
        const CMat &u = single_qubit_clifford_unitaries()[rec.local_cliffords[q]];
        CVec z = CVec::Zero(2);
        z(Eigen::Index((rec.z_bits >> q) & 1)) = 1;
        CVec col = u.adjoint() * z;
        CMat rho_hat = col * col.adjoint();
        out = tensor_le(out, 3.0 * rho_hat - CMat::Identity(2, 2));
    }
    return out;
}

}  // namespace detail

/// Tr(op . M(rho_hat^(slot))) for one subsystem slot (1..M) of a snapshot,
/// where M is the Clifford or Pauli inverse map chosen by the slot's tag.
inline cdouble factor_value(const Snapshot &snap, int slot, const SubsystemOperator &op,
                            detail::SnapshotDenseCache *cache = nullptr) {
    const SubsystemRecord &rec = snap.slots.at(slot - 1);
    int n = op.num_qubits;
    double d = double(Eigen::Index(1) << n);
    if (op.kind == SubsystemOperator::Kind::Identity) {
        return {1, 0};
    }
    if (rec.tag == ShadowTag::Clifford) {
        if (op.kind == SubsystemOperator::Kind::Pauli && !op.pauli.is_identity_up_to_phase()) {
            PauliString conj = rec.global_clifford.conjugate(op.pauli);
            return (d + 1.0) * conj.diagonal_entry(rec.z_bits);
        }
        if (op.kind == SubsystemOperator::Kind::Projector0) {
            CVec col;
            if (cache != nullptr) {
                auto &slot_col = cache->slot_column.at(slot - 1);
                if (!slot_col) {
                    slot_col = clifford_state_column(rec.global_clifford);
                }
                col = *slot_col;
            } else {
                col = clifford_state_column(rec.global_clifford);
            }
            double amp2 = std::norm(col(Eigen::Index(rec.z_bits)));
            return (d + 1.0) * amp2 - 1.0;
        }
        CMat u;
        if (cache != nullptr) {
            auto &slot_u = cache->slot_unitary.at(slot - 1);
            if (!slot_u) {
                slot_u = clifford_to_unitary(rec.global_clifford);
            }
            u = *slot_u;
        } else {
            u = clifford_to_unitary(rec.global_clifford);
        }
        CMat dense_op = op.to_dense();
        CVec row = u.row(Eigen::Index(rec.z_bits)).adjoint();  // C^dag |z>
        cdouble sandwich = row.dot(dense_op * row);
        return (d + 1.0) * sandwich - dense_op.trace();
    }
    // Pauli tag.
    if (op.kind == SubsystemOperator::Kind::Pauli) {
        cdouble out = op.pauli.phase_value();
        for (int q = 0; q < n; q++) {
            bool x = op.pauli.x_bit(q), z = op.pauli.z_bit(q);
            if (!x && !z) {
                continue;
            }
            PauliString leg(1, x ? 1 : 0, z ? 1 : 0, (x && z) ? 1 : 0);  // Hermitian leg
            PauliString conj = single_qubit_cliffords()[rec.local_cliffords[q]].conjugate(leg);
            cdouble v = conj.diagonal_entry((rec.z_bits >> q) & 1);
            if (v == cdouble(0, 0)) {
                return {0, 0};
            }
            out *= 3.0 * v;
        }
        // phase_value above double-counts the Y legs' phases baked into
        // the Hermitian legs, so divide them back out.
        int y_legs = std::popcount(op.pauli.x_bits & op.pauli.z_bits);
        static const cdouble inv_i[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
        out *= inv_i[y_legs % 4];
        return out;
    }
    if (op.kind == SubsystemOperator::Kind::Projector0) {
        cdouble out = 1;
        for (int q = 0; q < n; q++) {
            const CMat &u = detail::single_qubit_clifford_unitaries()[rec.local_cliffords[q]];
            double amp2 = std::norm(u(Eigen::Index((rec.z_bits >> q) & 1), 0));
            out *= 3.0 * amp2 - 1.0;
        }
        return out;
    }
    CMat shadow;
    if (cache != nullptr) {
        auto &slot_m = cache->slot_mp_shadow.at(slot - 1);
        if (!slot_m) {
            slot_m = detail::pauli_slot_shadow_dense(rec);
        }
        shadow = *slot_m;
    } else {
        shadow = detail::pauli_slot_shadow_dense(rec);
    }
    return (op.to_dense() * shadow).trace();
}

/// 3 <z0| C0 A C0^dag |z0> for the ancilla slot; identity gives 1.
inline cdouble ancilla_factor(const Snapshot &snap, AncillaOp op) {
    if (op == AncillaOp::Identity) {
        return {1, 0};
    }
    const CliffordElement &c = single_qubit_cliffords()[snap.ancilla_clifford];
    auto pauli_term = [&](const char *label) {
        PauliString conj = c.conjugate(PauliString::from_label(label));
        return conj.diagonal_entry(snap.ancilla_bit);
    };
    switch (op) {
        case AncillaOp::X:
            return 3.0 * pauli_term("X");
        case AncillaOp::Y:
            return 3.0 * pauli_term("Y");
        default:
            return 3.0 * (pauli_term("X") + cdouble(0, 1) * pauli_term("Y"));
    }
}

/// Slot that carries observable factor j (1-based) in an order-m snapshot.
/// Fixes the cyclic order of the woven product; the assignment is pinned by
/// the exact density-matrix oracle tests.
inline int slot_of_factor(int j, int m) {
    return j == 1 ? 1 : m + 2 - j;
}

/// Tr(O_tilde . M_tilde(rho_hat_i)) for one snapshot, evaluated as the
/// product of per-slot factors without forming the big tensor product.
inline cdouble evaluate_snapshot(const Snapshot &snap, const FactorizedObservable &obs,
                                 detail::SnapshotDenseCache *cache = nullptr) {
    if (snap.order() != obs.order()) {
        throw std::invalid_argument("evaluate_snapshot: observable arity mismatch");
    }
    cdouble value = ancilla_factor(snap, obs.ancilla_op);
    int m = obs.order();
    for (int j = 1; j <= m; j++) {
        if (value == cdouble(0, 0)) {
            break;
        }
        value *= factor_value(snap, slot_of_factor(j, m), obs.factors[j - 1], cache);
    }
    return value;
}

/// Evaluates a list of observables against every snapshot. Returns
/// values[k][i] for observable k, snapshot i. Parallelized over snapshots.
inline std::vector<std::vector<cdouble>> evaluate_ensemble(const ShadowEnsemble &ens,
                                                           const std::vector<FactorizedObservable> &observables,
                                                           int threads = 0) {
    size_t count = ens.snapshots.size();
    std::vector<std::vector<cdouble>> values(observables.size(), std::vector<cdouble>(count));
    if (threads <= 0) {
        threads = static_cast<int>(std::thread::hardware_concurrency());
        if (threads <= 0) {
            threads = 1;
        }
    }
    auto work = [&](size_t begin, size_t step) {
        for (size_t i = begin; i < count; i += step) {
            detail::SnapshotDenseCache cache(ens.core.m);
            for (size_t k = 0; k < observables.size(); k++) {
                values[k][i] = evaluate_snapshot(ens.snapshots[i], observables[k], &cache);
            }
        }
    };
    if (threads <= 1 || count < 256) {
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
    return values;
}

/// Dense Tr(op . M(rho_hat)) against slot j of a snapshot (j = 0 addresses
/// the ancilla). Correctness-first path used in tests and fallbacks.
inline cdouble snapshot_factor_value(const Snapshot &snap, int slot, const CMat &op) {
    if (slot == 0) {
        if (op.rows() != 2 || op.cols() != 2) {
            throw std::invalid_argument("snapshot_factor_value: ancilla operator must be 2x2");
        }
        const CMat &u = detail::single_qubit_clifford_unitaries()[snap.ancilla_clifford];
        CVec z = CVec::Zero(2);
        z(snap.ancilla_bit) = 1;
        CVec col = u.adjoint() * z;
        CMat shadow = 3.0 * (col * col.adjoint()) - CMat::Identity(2, 2);
        return (op * shadow).trace();
    }
    const SubsystemRecord &rec = snap.slots.at(slot - 1);
    int n = rec.tag == ShadowTag::Pauli ? static_cast<int>(rec.local_cliffords.size())
                                        : rec.global_clifford.num_qubits;
    Eigen::Index d = Eigen::Index(1) << n;
    if (op.rows() != d || op.cols() != d) {
        throw std::invalid_argument("snapshot_factor_value: operator dimension mismatch");
    }
    if (rec.tag == ShadowTag::Pauli) {
        CMat shadow = detail::pauli_slot_shadow_dense(rec);
        return (op * shadow).trace();
    }
    CMat u = clifford_to_unitary(rec.global_clifford);
    CVec col = u.adjoint() * CVec::Unit(d, Eigen::Index(rec.z_bits));
    cdouble sandwich = col.dot(op * col);
    return (double(d) + 1.0) * sandwich - op.trace();
}

// ---------------------------------------------------------------------------
// Snapshot log serialization

/// Log line: shot, tag string, ancilla "idx:bit", then one field per slot
/// 1..M ("payload:zhex"; Pauli payload is comma-joined table indices,
/// Clifford payload is the serialized tableau). Tab-separated, little-endian
/// bit order throughout.
inline std::string snapshot_to_line(const Snapshot &snap, const ShadowTypeTag &tags) {
    std::ostringstream out;
    out << snap.shot << '\t' << tags.to_string() << '\t' << int(snap.ancilla_clifford) << ':'
        << int(snap.ancilla_bit);
    for (int j = 1; j <= snap.order(); j++) {
        const SubsystemRecord &rec = snap.slots[j - 1];
        out << '\t';
        if (rec.tag == ShadowTag::Pauli) {
            for (size_t q = 0; q < rec.local_cliffords.size(); q++) {
                out << (q ? "," : "") << int(rec.local_cliffords[q]);
            }
        } else {
            out << rec.global_clifford.serialize();
        }
        out << ':' << std::hex << rec.z_bits << std::dec;
    }
    return out.str();
}

inline Snapshot snapshot_from_line(const std::string &line) {
    std::istringstream in(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(in, field, '\t')) {
        fields.push_back(field);
    }
    if (fields.size() < 3) {
        throw std::invalid_argument("snapshot_from_line: too few fields");
    }
    Snapshot snap;
    snap.shot = std::stoull(fields[0]);
    ShadowTypeTag tags = ShadowTypeTag::from_string(fields[1]);
    size_t colon = fields[2].find(':');
    snap.ancilla_clifford = static_cast<uint8_t>(std::stoi(fields[2].substr(0, colon)));
    snap.ancilla_bit = static_cast<uint8_t>(std::stoi(fields[2].substr(colon + 1)));
    int m = tags.order();
    if (static_cast<int>(fields.size()) != 3 + m) {
        throw std::invalid_argument("snapshot_from_line: slot count does not match tags");
    }
    snap.slots.resize(m);
    for (int j = 1; j <= m; j++) {
        const std::string &f = fields[2 + j];
        size_t cut = f.rfind(':');
        std::string payload = f.substr(0, cut);
        uint64_t z = std::stoull(f.substr(cut + 1), nullptr, 16);
        SubsystemRecord rec;
        rec.tag = tags.slots[j];
        rec.z_bits = z;
        if (rec.tag == ShadowTag::Pauli) {
            std::istringstream ps(payload);
            std::string tok;
            while (std::getline(ps, tok, ',')) {
                rec.local_cliffords.push_back(static_cast<uint8_t>(std::stoi(tok)));
            }
        } else {
            rec.global_clifford = CliffordElement::parse(payload);
        }
        snap.slots[j - 1] = rec;
    }
    return snap;
}

}  // namespace vdshadow

#endif
