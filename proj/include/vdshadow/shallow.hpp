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

#ifndef VDSHADOW_SHALLOW_H
#define VDSHADOW_SHALLOW_H

#include "vdshadow/vd.hpp"

namespace vdshadow {

/// An order-M observable split into `a` consecutive blocks of M/a factors,
/// each block carrying its own X0+iY0 ancilla factor.
struct BlockObservable {
    int subsystem_qubits = 0;
    int block_order = 0;  // M/a
    std::vector<FactorizedObservable> blocks;

    static BlockObservable split(int n, const std::vector<SubsystemOperator> &ops, int a) {
        if (a < 1 || ops.empty() || static_cast<int>(ops.size()) % a != 0) {
            throw std::invalid_argument("BlockObservable: a must divide the factor count");
        }
        BlockObservable out;
        out.subsystem_qubits = n;
        int big_m = static_cast<int>(ops.size());
        int m = big_m / a;
        out.block_order = m;
        // Distribute factors so the composite woven product reproduces the
        // literal order Tr(O_1 rho ... O_M rho): block k's local factor j
        // lands on global weave slot (k-1)m + sigma_m(j), which must carry
        // factor sigma_M of that slot. Both sigmas are the slot_of_factor
        // involutions.
        for (int k = 1; k <= a; k++) {
            std::vector<SubsystemOperator> part;
            part.reserve(m);
            for (int j = 1; j <= m; j++) {
                int global_slot = (k - 1) * m + slot_of_factor(j, m);
                part.push_back(ops[slot_of_factor(global_slot, big_m) - 1]);
            }
            out.blocks.emplace_back(n, AncillaOp::XplusIY, std::move(part));
        }
        return out;
    }

    int num_blocks() const {
        return static_cast<int>(blocks.size());
    }
};

/// N x N cross matrices E_{k1,k1'} for 1 <= k1 <= k1' <= a. The diagonal
/// matrices E_{k,k} have zero diagonal entries. Element conventions:
///   (E_{k,k})_{x,y}   = g_k(y) (d+1) <z_y| C_y Q_k C_x^dag |z_x>,
///   (E_{k1,k1'})_{x,y} = (-1)^{k1'-k1} (prod_{w=k1}^{k1'-1} G_w)
///                        g_{k1'}(y) (d+1) <z_y| C_y Q_{k1'}...Q_{k1} C_x^dag |z_x>,
/// where Q_k is block k's leading factor, g_k collects block k's ancilla and
/// non-leading factors on one snapshot, and G_w sums g_w over all snapshots.
struct CrossMatrixSet {
    int num_blocks = 0;
    std::vector<std::vector<CMat>> e;  // e[k1][k1'] for 0-based k1 <= k1'

    const CMat &at(int k1, int k1p) const {
        return e.at(k1).at(k1p);
    }
};

namespace detail {

/// Per-snapshot data shared by the shallow combiners: the slot-1 shadow
/// columns W_i = C_i^dag |z_i> and the per-block scalar factors.
struct ShallowData {
    int a = 0;
    int n = 0;
    Eigen::Index num = 0;
    double d = 0;
    CMat pw;                                 // d x N
    std::vector<Eigen::VectorXcd> g_block;   // block k (0-based) -> N-vector
    std::vector<cdouble> g_sum;              // per block
    std::vector<CMat> q_block;               // block leading factor, dense
};

inline CVec slot1_shadow_column(const Snapshot &snap, int n) {
    const SubsystemRecord &rec = snap.slots.at(0);
    Eigen::Index d = Eigen::Index(1) << n;
    CMat u;
    if (rec.tag == ShadowTag::Clifford) {
        u = clifford_to_unitary(rec.global_clifford);
    } else {
        if (n != 1) {
            throw std::invalid_argument("shallow: Pauli-tagged leading slot is only supported at n=1");
        }
        u = single_qubit_clifford_unitaries()[rec.local_cliffords[0]];
    }
    return u.adjoint() * CVec::Unit(d, Eigen::Index(rec.z_bits));
}

inline ShallowData build_shallow_data(const ShadowEnsemble &ens, const BlockObservable &blocks, int threads = 0) {
    ShallowData data;
    data.a = blocks.num_blocks();
    data.n = ens.core.n;
    data.num = Eigen::Index(ens.size());
    data.d = double(Eigen::Index(1) << data.n);
    if (blocks.block_order != ens.order()) {
        throw std::invalid_argument("shallow: ensemble order does not match block order");
    }
    Eigen::Index d = Eigen::Index(1) << data.n;
    data.pw.resize(d, data.num);
    for (Eigen::Index i = 0; i < data.num; i++) {
        data.pw.col(i) = slot1_shadow_column(ens.snapshots[i], data.n);
    }
    // Block scalars: evaluate each block with its leading factor dropped.
    std::vector<FactorizedObservable> scalar_obs;
    for (const auto &block : blocks.blocks) {
        FactorizedObservable copy = block;
        copy.factors[0] = SubsystemOperator::identity(data.n);
        scalar_obs.push_back(std::move(copy));
    }
    auto values = evaluate_ensemble(ens, scalar_obs, threads);
    for (int k = 0; k < data.a; k++) {
        Eigen::VectorXcd g(data.num);
        cdouble sum{0, 0};
        for (Eigen::Index i = 0; i < data.num; i++) {
            g(i) = values[k][i];
            sum += g(i);
        }
        data.g_block.push_back(std::move(g));
        data.g_sum.push_back(sum);
        data.q_block.push_back(blocks.blocks[k].factors[0].to_dense());
    }
    return data;
}

/// Chain order of the woven cycle: position 0 holds block 0 and positions
/// u >= 1 hold block a-u (descending labels). Consecutive chain positions
/// are the snapshot pairs bridged by the leading-slot contraction.
inline int chain_block(int u, int a) {
    return u == 0 ? 0 : a - u;
}

struct ChainView {
    const ShallowData *data;
    int a;

    const Eigen::VectorXcd &g(int u) const {
        return data->g_block[chain_block(u, a)];
    }
    cdouble gsum(int u) const {
        return data->g_sum[chain_block(u, a)];
    }
    const CMat &q(int u) const {
        return data->q_block[chain_block(u, a)];
    }
    /// Product Q_u Q_{u+1} ... Q_{v-1} over chain positions (v may exceed a
    /// to describe wrap-around arcs).
    CMat bridge(int u, int v) const {
        CMat r = q(u % a);
        for (int w = u + 1; w < v; w++) {
            r = r * q(w % a);
        }
        return r;
    }
};

/// Dense zero-diagonal arc matrix between adjacent survivors u and u+1.
inline CMat dense_arc(const ChainView &chain, int u) {
    const ShallowData &d = *chain.data;
    CMat t = chain.q(u) * d.pw;               // d x N
    CMat s = d.pw.adjoint() * t;              // N x N
    CMat a = (d.d + 1.0) * (chain.g(u).asDiagonal() * s);
    a.diagonal().setZero();
    return a;
}

/// Factored arc between survivors u < v with free-summed raised interiors:
/// A = left * pw - diag(left * pw), left = scale * diag(g_u) pw^dag R.
struct FactoredArc {
    CMat left;               // N x d
    Eigen::VectorXcd diag;   // diag(left * pw)
};

inline FactoredArc factored_arc(const ChainView &chain, int u, int v) {
    const ShallowData &d = *chain.data;
    cdouble scale{d.d + 1.0, 0};
    for (int w = u + 1; w < v; w++) {
        scale *= -chain.gsum(w % chain.a);
    }
    CMat r = chain.bridge(u, v);
    FactoredArc arc;
    arc.left = scale * (chain.g(u).asDiagonal() * (d.pw.adjoint() * r));
    arc.diag.resize(d.num);
    for (Eigen::Index x = 0; x < d.num; x++) {
        arc.diag(x) = arc.left.row(x) * d.pw.col(x);
    }
    return arc;
}

inline CMat materialize_arc(const FactoredArc &arc, const CMat &pw) {
    CMat a = arc.left * pw;
    a.diagonal() -= arc.diag;
    return a;
}

/// Sum over all injective block-to-snapshot assignments of the product of
/// block scalars (subset-DP permanent of the a x N scalar table).
inline cdouble distinct_tuple_scalar_sum(const ShallowData &data) {
    int a = data.a;
    std::vector<cdouble> dp(size_t(1) << a, cdouble(0, 0));
    dp[0] = 1;
    for (Eigen::Index i = 0; i < data.num; i++) {
        for (int mask = (1 << a) - 1; mask >= 0; mask--) {
            if (dp[mask] == cdouble(0, 0)) {
                continue;
            }
            for (int k = 0; k < a; k++) {
                if (mask & (1 << k)) {
                    continue;
                }
                dp[mask | (1 << k)] += dp[mask] * data.g_block[k](i);
            }
        }
    }
    return dp[(size_t(1) << a) - 1];
}

}  // namespace detail

/// Materialized cross matrices (see CrossMatrixSet for the element
/// conventions). Raised-block scalar factors inside the off-diagonal
/// matrices are summed freely over all snapshots.
inline CrossMatrixSet build_cross_matrices(const ShadowEnsemble &ens, const BlockObservable &blocks,
                                           int threads = 0) {
    detail::ShallowData data = detail::build_shallow_data(ens, blocks, threads);
    int a = data.a;
    Eigen::Index num = data.num;
    CrossMatrixSet out;
    out.num_blocks = a;
    out.e.assign(a, std::vector<CMat>(a));
    for (int k1 = 0; k1 < a; k1++) {
        for (int k1p = k1; k1p < a; k1p++) {
            CMat r = data.q_block[k1p];
            for (int w = k1p - 1; w >= k1; w--) {
                r = r * data.q_block[w];
            }
            cdouble scale{data.d + 1.0, 0};
            for (int w = k1; w < k1p; w++) {
                scale *= -data.g_sum[w];
            }
            CMat sandw = data.pw.adjoint() * (r * data.pw);  // (x ket, y bra) -> entry (y, x)
            CMat e(num, num);
            for (Eigen::Index x = 0; x < num; x++) {
                for (Eigen::Index y = 0; y < num; y++) {
                    e(x, y) = scale * data.g_block[k1p](y) * sandw(y, x);
                }
            }
            if (k1 == k1p) {
                e.diagonal().setZero();
            }
            out.e[k1][k1p] = std::move(e);
        }
    }
    return out;
}

/// Order-M estimate from `a` order-M/a blocks via the zero-diagonal matrix
/// recursion. Survivor chains run through dense or rank-d arc matrices; the
/// all-raised term uses the exact distinct-tuple scalar sum. Cycle-closing
/// snapshot coincidences are excluded on the dense closings and on the
/// single-survivor diagonal terms; raised-block interior sums are free.
/// Work is O(a^2 N^3 + a^3 d N^2).
inline cdouble combine_a_blocks_fast(const ShadowEnsemble &ens, const BlockObservable &blocks, int a,
                                     int threads = 0) {
    if (a < 2) {
        throw std::invalid_argument("combine_a_blocks_fast: a must be at least 2");
    }
    if (blocks.num_blocks() != a) {
        throw std::invalid_argument("combine_a_blocks_fast: block count does not match a");
    }
    Eigen::Index num = Eigen::Index(ens.size());
    if (num < a) {
        throw std::invalid_argument("combine_a_blocks_fast: need at least a snapshots");
    }
    if (ens.core.n != 1 && ens.core.tags.slots.at(1) != ShadowTag::Clifford) {
        throw std::invalid_argument(
            "combine_a_blocks_fast: the leading slot must be Clifford-tagged (any tag works at n=1)");
    }
    detail::ShallowData data = detail::build_shallow_data(ens, blocks, threads);
    detail::ChainView chain{&data, a};
    Eigen::Index n_snap = data.num;
    cdouble total{0, 0};

    // Arc matrices: dense for adjacent survivors, factored otherwise.
    std::vector<CMat> adjacent(a);  // adjacent[u] bridges chain positions u -> u+1
    for (int u = 0; u + 1 < a; u++) {
        adjacent[u] = detail::dense_arc(chain, u);
    }

    // Survivor sets containing chain position 0.
    {
        std::vector<CMat> h(a);  // h[v]: chains 0 = u_1 < ... < u_t = v
        for (int v = 1; v < a; v++) {
            if (v == 1) {
                h[v] = adjacent[0];
            } else {
                detail::FactoredArc arc = detail::factored_arc(chain, 0, v);
                h[v] = detail::materialize_arc(arc, data.pw);
            }
            for (int u = 1; u < v; u++) {
                if (u == v - 1) {
                    h[v] += h[u] * adjacent[u];
                } else {
                    detail::FactoredArc arc = detail::factored_arc(chain, u, v);
                    h[v] += (h[u] * arc.left) * data.pw;
                    h[v] -= h[u] * arc.diag.asDiagonal();
                }
            }
        }
        for (int v = 1; v < a; v++) {
            if (v == a - 1) {
                // Wrap arc with no raised interior: full product then trace,
                // with the coincidence diagonal excluded.
                CMat wrap = detail::dense_arc(chain, a - 1);
                CMat closed = h[v] * wrap;
                total += closed.trace();
            } else {
                detail::FactoredArc arc = detail::factored_arc(chain, v, a);
                cdouble tr = ((data.pw * h[v]) * arc.left).trace();
                cdouble corr{0, 0};
                for (Eigen::Index x = 0; x < n_snap; x++) {
                    corr += h[v](x, x) * arc.diag(x);
                }
                total += tr - corr;
            }
        }
    }

    // Survivor sets avoiding position 0 with at least two survivors. The
    // chains are tracked in the d-dimensional contraction pw * H, so no
    // N x N products arise; cycle-closing coincidences are not excluded on
    // these terms.
    for (int f = 1; f < a; f++) {
        std::vector<CMat> phi(a);  // phi[s] = pw * H^{(f)}_s, d x N
        phi[f] = data.pw;
        for (int s = f + 1; s < a; s++) {
            phi[s] = CMat::Zero(Eigen::Index(data.d), n_snap);
            for (int u = f; u < s; u++) {
                if (u == s - 1) {
                    phi[s] += phi[u] * adjacent[u];
                } else {
                    detail::FactoredArc arc = detail::factored_arc(chain, u, s);
                    phi[s] += (phi[u] * arc.left) * data.pw;
                    phi[s] -= phi[u] * arc.diag.asDiagonal();
                }
            }
        }
        for (int s = f + 1; s < a; s++) {
            detail::FactoredArc arc = detail::factored_arc(chain, s, f + a);
            total += (phi[s] * arc.left).trace();
        }
    }

    // Single-survivor terms: the full cycle collapses onto one snapshot and
    // every raised block sum excludes that snapshot.
    for (int u = 0; u < a; u++) {
        CMat cyc = chain.bridge(u, u + a);
        CMat t = cyc * data.pw;  // d x N
        for (Eigen::Index x = 0; x < n_snap; x++) {
            cdouble sandwich = data.pw.col(x).dot(t.col(x));
            cdouble term = chain.g(u)(x) * (data.d + 1.0) * sandwich;
            for (int w = u + 1; w < u + a; w++) {
                int pos = w % a;
                term *= -(chain.gsum(pos) - chain.g(pos)(x));
            }
            total += term;
        }
    }

    // All blocks raised: exact all-distinct scalar sum times the closed
    // operator cycle.
    {
        cdouble k_term = chain.bridge(0, a).trace();
        double sign = (a % 2 == 0) ? 1.0 : -1.0;
        total += sign * k_term * detail::distinct_tuple_scalar_sum(data);
    }

    double norm = 1.0;
    for (int t = 0; t < a; t++) {
        norm /= double(n_snap - t);
    }
    return total * norm;
}

inline cdouble combine_a_blocks_fast(const ShadowEnsemble &ens, const std::vector<SubsystemOperator> &ops, int a,
                                     int threads = 0) {
    return combine_a_blocks_fast(ens, BlockObservable::split(ens.core.n, ops, a), a, threads);
}

// ---------------------------------------------------------------------------
// Brute-force reference

namespace detail {

inline CMat block_shadow_dense(const Snapshot &snap, int n) {
    CMat out = CMat::Identity(1, 1);
    {
        const CMat &u = single_qubit_clifford_unitaries()[snap.ancilla_clifford];
        CVec col = u.adjoint() * CVec::Unit(2, snap.ancilla_bit);
        out = tensor_le(out, 3.0 * (col * col.adjoint()) - CMat::Identity(2, 2));
    }
    for (const SubsystemRecord &rec : snap.slots) {
        if (rec.tag == ShadowTag::Clifford) {
            Eigen::Index d = Eigen::Index(1) << n;
            CMat u = clifford_to_unitary(rec.global_clifford);
            CVec col = u.adjoint() * CVec::Unit(d, Eigen::Index(rec.z_bits));
            out = tensor_le(out, (double(d) + 1.0) * (col * col.adjoint()) - CMat::Identity(d, d));
        } else {
            out = tensor_le(out, pauli_slot_shadow_dense(rec));
        }
    }
    return out;
}

inline CMat block_observable_dense(const FactorizedObservable &obs) {
    CMat anc(2, 2);
    switch (obs.ancilla_op) {
        case AncillaOp::Identity:
            anc = CMat::Identity(2, 2);
            break;
        case AncillaOp::X:
            anc = pauli_x();
            break;
        case AncillaOp::Y:
            anc = pauli_y();
            break;
        default:
            anc = pauli_x() + cdouble(0, 1) * pauli_y();
            break;
    }
    CMat out = anc;
    int m = obs.order();
    for (int slot = 1; slot <= m; slot++) {
        out = tensor_le(out, obs.factors[slot_of_factor(slot, m) - 1].to_dense());
    }
    return out;
}

/// Permutation matrix cycling the leading subsystems of `a` stacked blocks
/// (block k's content moves to block k+1, block a wraps to block 1).
inline CMat leading_slot_cycle(int a, int n, int m) {
    int block_bits = 1 + n * m;
    Eigen::Index dim = Eigen::Index(1) << (block_bits * a);
    uint64_t lead_mask = ((uint64_t(1) << n) - 1) << 1;  // slot 1 within a block
    CMat s = CMat::Zero(dim, dim);
    for (uint64_t from = 0; from < uint64_t(dim); from++) {
        uint64_t to = from;
        for (int k = 0; k < a; k++) {
            to &= ~(lead_mask << (block_bits * ((k + 1) % a)));
        }
        for (int k = 0; k < a; k++) {
            uint64_t bits = (from >> (block_bits * k + 1)) & ((uint64_t(1) << n) - 1);
            int dest = (k + 1) % a;
            to |= bits << (block_bits * dest + 1);
        }
        s(Eigen::Index(to), Eigen::Index(from)) = 1;
    }
    return s;
}

}  // namespace detail

/// Literal sum over all-distinct index tuples with dense tensor evaluation.
/// This is the reference the fast path is measured against.
inline cdouble brute_force_combine(const ShadowEnsemble &ens, const BlockObservable &blocks, int a) {
    if (blocks.num_blocks() != a) {
        throw std::invalid_argument("brute_force_combine: block count does not match a");
    }
    size_t n_snap = ens.size();
    double tuples = std::pow(double(n_snap), a);
    if (tuples > 1e7) {
        throw std::invalid_argument("brute_force_combine: N^a exceeds the guard");
    }
    int n = ens.core.n;
    int m = blocks.block_order;
    int block_bits = 1 + n * m;
    if (block_bits * a > 12) {
        throw std::invalid_argument("brute_force_combine: dense tensor too large");
    }
    std::vector<CMat> shadows;
    shadows.reserve(n_snap);
    for (const Snapshot &snap : ens.snapshots) {
        shadows.push_back(detail::block_shadow_dense(snap, n));
    }
    CMat obs = CMat::Identity(1, 1);
    for (const auto &block : blocks.blocks) {
        obs = tensor_le(obs, detail::block_observable_dense(block));
    }
    CMat weight = obs * detail::leading_slot_cycle(a, n, m);

    cdouble total{0, 0};
    std::vector<size_t> idx(a, 0);
    if (a == 1) {
        for (size_t i = 0; i < n_snap; i++) {
            total += (weight * shadows[i]).trace();
        }
        return total / double(n_snap);
    }
    for (;;) {
        bool distinct = true;
        for (int p = 0; p < a && distinct; p++) {
            for (int q = p + 1; q < a; q++) {
                if (idx[p] == idx[q]) {
                    distinct = false;
                    break;
                }
            }
        }
        if (distinct) {
            CMat kron = shadows[idx[0]];
            for (int k = 1; k < a; k++) {
                kron = tensor_le(kron, shadows[idx[k]]);
            }
            total += (weight * kron).trace();
        }
        int pos = 0;
        while (pos < a) {
            if (++idx[pos] < n_snap) {
                break;
            }
            idx[pos] = 0;
            pos++;
        }
        if (pos == a) {
            break;
        }
    }
    double norm = 1.0;
    for (int t = 0; t < a; t++) {
        norm /= double(n_snap - t);
    }
    return total * norm;
}

inline cdouble brute_force_combine(const ShadowEnsemble &ens, const std::vector<SubsystemOperator> &ops, int a) {
    return brute_force_combine(ens, BlockObservable::split(ens.core.n, ops, a), a);
}

// ---------------------------------------------------------------------------
// Two-block combiner via the Pauli expansion of the leading-slot swap

/// Order-M estimate from two order-M/2 blocks:
///   (1/d) sum_s U-statistic cross mean of the per-snapshot values with P_s
/// absorbed into the two leading factors. Works for any shadow tag. The
/// standard error is a delete-one jackknife.
inline EstimateResult combine_two_blocks(const ShadowEnsemble &ens, const std::vector<SubsystemOperator> &ops,
                                         int threads = 0) {
    if (ops.size() % 2 != 0) {
        throw std::invalid_argument("combine_two_blocks: M must be even");
    }
    int m = static_cast<int>(ops.size()) / 2;
    if (ens.order() != m) {
        throw std::invalid_argument("combine_two_blocks: ensemble order must be M/2");
    }
    size_t n_snap = ens.size();
    if (n_snap < 2) {
        throw std::invalid_argument("combine_two_blocks: need at least two snapshots");
    }
    int n = ens.core.n;
    Eigen::Index d = Eigen::Index(1) << n;
    BlockObservable blocks = BlockObservable::split(n, ops, 2);

    std::vector<FactorizedObservable> scalar_obs;
    for (const auto &block : blocks.blocks) {
        FactorizedObservable copy = block;
        copy.factors[0] = SubsystemOperator::identity(n);
        scalar_obs.push_back(std::move(copy));
    }
    auto bases = evaluate_ensemble(ens, scalar_obs, threads);

    const SubsystemOperator &lead1 = blocks.blocks[0].factors[0];
    const SubsystemOperator &lead2 = blocks.blocks[1].factors[0];

    // Leading factors with each Pauli absorbed; products of Pauli factors
    // stay in the cheap tableau path, everything else goes dense.
    std::vector<SubsystemOperator> lead1_s, lead2_s;
    for (uint64_t x = 0; x < uint64_t(d); x++) {
        for (uint64_t z = 0; z < uint64_t(d); z++) {
            PauliString ps = PauliString::hermitian(n, x, z, false);
            auto absorb = [&](const SubsystemOperator &lead) {
                if (lead.kind == SubsystemOperator::Kind::Identity) {
                    return SubsystemOperator::raw_pauli(ps);
                }
                if (lead.kind == SubsystemOperator::Kind::Pauli) {
                    return SubsystemOperator::raw_pauli(lead.pauli * ps);
                }
                return SubsystemOperator::raw_dense(lead.to_dense() * ps.dense());
            };
            lead1_s.push_back(absorb(lead1));
            lead2_s.push_back(absorb(lead2));
        }
    }

    // Two streaming passes keep memory at O(d^2 + N): the first collects the
    // per-Pauli sums, the second folds them into the delete-one aggregates.
    size_t terms = lead1_s.size();
    std::vector<cdouble> sv(terms, cdouble(0, 0)), su(terms, cdouble(0, 0)), svu(terms, cdouble(0, 0));
    auto leads_for = [&](size_t i, size_t s, detail::SnapshotDenseCache &cache) {
        cdouble lv = factor_value(ens.snapshots[i], 1, lead1_s[s], &cache);
        cdouble lu = factor_value(ens.snapshots[i], 1, lead2_s[s], &cache);
        return std::pair<cdouble, cdouble>(bases[0][i] * lv, bases[1][i] * lu);
    };
    for (size_t i = 0; i < n_snap; i++) {
        detail::SnapshotDenseCache cache(ens.core.m);
        for (size_t s = 0; s < terms; s++) {
            auto [v, u] = leads_for(i, s, cache);
            sv[s] += v;
            su[s] += u;
            svu[s] += v * u;
        }
    }
    cdouble t_sum{0, 0};
    for (size_t s = 0; s < terms; s++) {
        t_sum += sv[s] * su[s] - svu[s];
    }
    std::vector<cdouble> alpha(n_snap, cdouble(0, 0));
    std::vector<cdouble> beta(n_snap, cdouble(0, 0));
    std::vector<cdouble> gamma(n_snap, cdouble(0, 0));
    for (size_t i = 0; i < n_snap; i++) {
        detail::SnapshotDenseCache cache(ens.core.m);
        for (size_t s = 0; s < terms; s++) {
            auto [v, u] = leads_for(i, s, cache);
            alpha[i] += v * su[s];
            beta[i] += u * sv[s];
            gamma[i] += v * u;
        }
    }
    double dd = double(d);
    double pairs = double(n_snap) * double(n_snap - 1);
    EstimateResult out;
    out.shots = n_snap;
    out.value = t_sum / (dd * pairs);
    if (n_snap >= 3) {
        double loo_pairs = double(n_snap - 1) * double(n_snap - 2);
        std::vector<cdouble> loo(n_snap);
        cdouble loo_mean{0, 0};
        for (size_t i = 0; i < n_snap; i++) {
            loo[i] = (t_sum - alpha[i] - beta[i] + 2.0 * gamma[i]) / (dd * loo_pairs);
            loo_mean += loo[i];
        }
        loo_mean /= double(n_snap);
        double acc_re = 0, acc_im = 0;
        for (size_t i = 0; i < n_snap; i++) {
            acc_re += (loo[i].real() - loo_mean.real()) * (loo[i].real() - loo_mean.real());
            acc_im += (loo[i].imag() - loo_mean.imag()) * (loo[i].imag() - loo_mean.imag());
        }
        double scale = double(n_snap - 1) / double(n_snap);
        out.se_re = std::sqrt(scale * acc_re);
        out.se_im = std::sqrt(scale * acc_im);
        out.std_error = std::hypot(out.se_re, out.se_im);
    }
    out.description = "two_block_combine[M=" + std::to_string(ops.size()) + "]";
    return out;
}

/// Fast path versus brute force on the same data; used to surface the
/// relaxation gap of the matrix recursion at a >= 3.
struct CombineComparison {
    cdouble fast;
    cdouble brute;
    double abs_diff;
};

inline CombineComparison compare_combiners(const ShadowEnsemble &ens, const std::vector<SubsystemOperator> &ops,
                                           int a) {
    BlockObservable blocks = BlockObservable::split(ens.core.n, ops, a);
    CombineComparison cmp{};
    cmp.fast = combine_a_blocks_fast(ens, blocks, a);
    cmp.brute = brute_force_combine(ens, blocks, a);
    cmp.abs_diff = std::abs(cmp.fast - cmp.brute);
    return cmp;
}

}  // namespace vdshadow

#endif
