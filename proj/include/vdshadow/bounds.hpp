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

#ifndef VDSHADOW_BOUNDS_H
#define VDSHADOW_BOUNDS_H

#include "vdshadow/shadows.hpp"

namespace vdshadow {

/// Scalar descriptors of one observable factor, enough to evaluate the
/// closed-form variance bounds without ever touching the matrix.
struct FactorDescriptor {
    bool is_identity = false;
    int locality = 0;            // non-identity tensor legs
    double inf_norm = 1.0;       // operator norm
    double trace = 0.0;          // Tr(O)
    double trace_sq = 0.0;       // Tr(O^2)
    double traceless_inf = 0.0;  // || O - Tr(O)/2^n I ||_inf

    static FactorDescriptor identity(int n) {
        FactorDescriptor f;
        f.is_identity = true;
        f.inf_norm = 1.0;
        double d = double(Eigen::Index(1) << n);
        f.trace = d;
        f.trace_sq = d;
        f.traceless_inf = 0.0;
        return f;
    }
};

/// Descriptors computed from a subsystem operator (dense eigenvalues for
/// dense factors, closed forms for Pauli factors and projectors).
inline FactorDescriptor describe_factor(const SubsystemOperator &op) {
    int n = op.num_qubits;
    double d = double(Eigen::Index(1) << n);
    FactorDescriptor f;
    switch (op.kind) {
        case SubsystemOperator::Kind::Identity:
            return FactorDescriptor::identity(n);
        case SubsystemOperator::Kind::Pauli: {
            f.locality = op.pauli.weight();
            f.inf_norm = 1.0;
            f.trace = 0.0;
            f.trace_sq = d;
            f.traceless_inf = 1.0;
            return f;
        }
        case SubsystemOperator::Kind::Projector0: {
            f.locality = n;
            f.inf_norm = 1.0;
            f.trace = 1.0;
            f.trace_sq = 1.0;
            f.traceless_inf = 1.0 - 1.0 / d;
            return f;
        }
        default: {
            f.locality = n;
            CMat m = op.to_dense();
            f.inf_norm = hermitian_inf_norm(m);
            f.trace = m.trace().real();
            f.trace_sq = (m * m).trace().real();
            CMat m0 = m - (f.trace / d) * CMat::Identity(m.rows(), m.cols());
            f.traceless_inf = hermitian_inf_norm(m0);
            return f;
        }
    }
}

/// Inputs to the variance bounds: per-factor descriptors plus an optional
/// local/global split for the mixed-type bound.
struct BoundInput {
    int n = 1;
    std::vector<FactorDescriptor> factors;
    std::vector<int> local_set;   // indices into factors
    std::vector<int> global_set;  // indices into factors

    void validate() const {
        for (int i : local_set) {
            for (int j : global_set) {
                if (i == j) {
                    throw std::invalid_argument("BoundInput: local and global sets overlap");
                }
            }
        }
        for (const auto &f : factors) {
            if (f.locality < 0 || f.locality > n || f.inf_norm < 0 || f.trace_sq < 0) {
                throw std::invalid_argument("BoundInput: malformed descriptor");
            }
        }
    }

    static BoundInput from_observable(const FactorizedObservable &obs) {
        BoundInput in;
        in.n = obs.subsystem_qubits;
        for (const auto &f : obs.factors) {
            in.factors.push_back(describe_factor(f));
        }
        return in;
    }
};

/// Single-shot variance bound for Pauli-type shadows:
/// 3 * 4^{sum locality} * max inf-norm^2.
inline double pauli_bound(const BoundInput &in) {
    in.validate();
    int loc_sum = 0;
    double norm2 = 1.0;
    for (const auto &f : in.factors) {
        loc_sum += f.locality;
        norm2 = std::max(norm2, f.inf_norm * f.inf_norm);
    }
    return 3.0 * std::pow(4.0, double(loc_sum)) * norm2;
}

namespace detail {

inline double clifford_factor_value(const FactorDescriptor &f, double d, bool scale_cross_term) {
    double cross = 2.0 * f.trace * f.traceless_inf;
    double square = f.trace * f.trace;
    if (scale_cross_term) {
        return 3.0 * f.trace_sq + (cross + square) / d;
    }
    return 3.0 * f.trace_sq + cross + square / d;
}

}  // namespace detail

/// Single-shot variance bound for the Clifford-type shadow:
/// 3 * (max_j 3Tr(O_j^2) + (2Tr(O_j)||O_j0|| + Tr(O_j)^2)/2^n)^{N-1}.
inline double clifford_bound(const BoundInput &in) {
    in.validate();
    double d = double(Eigen::Index(1) << in.n);
    int nontrivial = 1;
    double peak = 0.0;
    for (const auto &f : in.factors) {
        if (f.is_identity) {
            continue;
        }
        nontrivial++;
        peak = std::max(peak, detail::clifford_factor_value(f, d, true));
    }
    if (nontrivial == 1) {
        return 3.0;
    }
    return 3.0 * std::pow(peak, double(nontrivial - 1));
}

/// Mixed-type bound 9 * Var_L * Var_G with the local factors costed as in
/// the Pauli bound and the global ones as in the Clifford bound (with the
/// cross term left unscaled, as the mixed-type formula states it).
inline double mixed_bound(const BoundInput &in) {
    in.validate();
    double d = double(Eigen::Index(1) << in.n);
    int loc_sum = 0;
    double norm2 = 1.0;
    for (int i : in.local_set) {
        const auto &f = in.factors.at(i);
        loc_sum += f.locality;
        norm2 = std::max(norm2, f.inf_norm * f.inf_norm);
    }
    double var_l = std::pow(4.0, double(loc_sum)) * norm2;
    int nontrivial = 1;
    double peak = 0.0;
    for (int i : in.global_set) {
        const auto &f = in.factors.at(i);
        if (f.is_identity) {
            continue;
        }
        nontrivial++;
        peak = std::max(peak, detail::clifford_factor_value(f, d, false));
    }
    double var_g = nontrivial == 1 ? 1.0 : std::pow(peak, double(nontrivial - 1));
    return 9.0 * var_l * var_g;
}

// ---------------------------------------------------------------------------
// Trade-off sweeps

struct TradeoffRow {
    double sweep = 0;
    double pauli = 0;
    double clifford = 0;
    double mixed = 0;
};

/// Descriptor used for the global factor of the mixed-family sweeps; its
/// per-factor cost evaluates to 3 + 2^-n.
inline FactorDescriptor sweep_global_descriptor(int n) {
    FactorDescriptor f;
    f.locality = n;
    f.inf_norm = 1.0;
    f.trace = 1.0;
    f.trace_sq = 1.0;
    f.traceless_inf = 0.0;
    return f;
}

inline FactorDescriptor sweep_local_descriptor() {
    FactorDescriptor f;
    f.locality = 1;
    f.inf_norm = 1.0;
    f.trace = 0.0;
    f.trace_sq = 1.0;
    f.traceless_inf = 1.0;
    return f;
}

/// Sweep over n for Tr(O1 rho O2 rho) with O1 a 1-local unit-norm factor and
/// O2 a global projector. Pauli and Clifford columns cost the actual mixed
/// observable under each pure strategy; the mixed column applies the split.
inline std::vector<TradeoffRow> tradeoff_qubit_sweep(int n_min, int n_max) {
    std::vector<TradeoffRow> rows;
    for (int n = n_min; n <= n_max; n++) {
        double d = double(Eigen::Index(1) << n);
        BoundInput in;
        in.n = n;
        FactorDescriptor local = sweep_local_descriptor();
        FactorDescriptor pauli_string_global;  // Z-type string descriptor
        pauli_string_global.locality = 1;
        pauli_string_global.inf_norm = 1.0;
        pauli_string_global.trace = 0.0;
        pauli_string_global.trace_sq = d;
        pauli_string_global.traceless_inf = 1.0;
        FactorDescriptor projector;
        projector.locality = n;
        projector.inf_norm = 1.0;
        projector.trace = 1.0;
        projector.trace_sq = 1.0;
        projector.traceless_inf = 1.0 - 1.0 / d;

        BoundInput pauli_in;
        pauli_in.n = n;
        FactorDescriptor local_as_global = local;
        local_as_global.locality = 1;
        FactorDescriptor proj_as_pauli = projector;  // global operator costs n legs
        pauli_in.factors = {local_as_global, proj_as_pauli};
        BoundInput cliff_in;
        cliff_in.n = n;
        cliff_in.factors = {pauli_string_global, projector};
        BoundInput mixed_in;
        mixed_in.n = n;
        mixed_in.factors = {local, sweep_global_descriptor(n)};
        mixed_in.local_set = {0};
        mixed_in.global_set = {1};

        TradeoffRow row;
        row.sweep = n;
        row.pauli = pauli_bound(pauli_in);
        row.clifford = clifford_bound(cliff_in);
        row.mixed = mixed_bound(mixed_in);
        rows.push_back(row);
    }
    return rows;
}

/// Sweep over the order x for Tr((O1 rho)^x (O2 rho)^x) at fixed n. The pure
/// columns are the strategy envelopes (all factors local, respectively all
/// global-projector-like); the mixed column costs the actual split, giving
/// the stated rates 4^x and (3+2^-n)^x per family.
inline std::vector<TradeoffRow> tradeoff_order_sweep(int n, int x_max) {
    std::vector<TradeoffRow> rows;
    for (int x = 1; x <= x_max; x++) {
        BoundInput pauli_in;
        pauli_in.n = n;
        BoundInput cliff_in;
        cliff_in.n = n;
        BoundInput mixed_in;
        mixed_in.n = n;
        for (int i = 0; i < x; i++) {
            pauli_in.factors.push_back(sweep_local_descriptor());
            pauli_in.factors.push_back(sweep_local_descriptor());
            cliff_in.factors.push_back(sweep_global_descriptor(n));
            cliff_in.factors.push_back(sweep_global_descriptor(n));
            mixed_in.factors.push_back(sweep_local_descriptor());
            mixed_in.local_set.push_back(static_cast<int>(mixed_in.factors.size()) - 1);
            mixed_in.factors.push_back(sweep_global_descriptor(n));
            mixed_in.global_set.push_back(static_cast<int>(mixed_in.factors.size()) - 1);
        }
        TradeoffRow row;
        row.sweep = x;
        row.pauli = pauli_bound(pauli_in);
        row.clifford = clifford_bound(cliff_in);
        row.mixed = mixed_bound(mixed_in);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace vdshadow

#endif
