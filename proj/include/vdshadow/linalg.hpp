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

#ifndef VDSHADOW_LINALG_H
#define VDSHADOW_LINALG_H

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <complex>
#include <stdexcept>
#include <vector>

namespace vdshadow {

using cdouble = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline constexpr double kExactTol = 1e-10;

// Qubit convention throughout the library: little-endian. Qubit q holds bit q
// of the basis index, so qubit 0 is the least significant bit.

inline CMat identity_matrix(Eigen::Index dim) {
    return CMat::Identity(dim, dim);
}

inline CMat pauli_x() {
    CMat m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline CMat pauli_y() {
    CMat m(2, 2);
    m << cdouble(0, 0), cdouble(0, -1), cdouble(0, 1), cdouble(0, 0);
    return m;
}

inline CMat pauli_z() {
    CMat m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

inline CMat hadamard_matrix() {
    CMat m(2, 2);
    double s = 1.0 / std::sqrt(2.0);
    m << s, s, s, -s;
    return m;
}

inline CMat phase_s_matrix() {
    CMat m(2, 2);
    m << 1, 0, 0, cdouble(0, 1);
    return m;
}

/// Tensor product with `low` acting on the low-order qubits.
inline CMat tensor_le(const CMat &low, const CMat &high) {
    CMat out(low.rows() * high.rows(), low.cols() * high.cols());
    for (Eigen::Index hr = 0; hr < high.rows(); hr++) {
        for (Eigen::Index hc = 0; hc < high.cols(); hc++) {
            out.block(hr * low.rows(), hc * low.cols(), low.rows(), low.cols()) = high(hr, hc) * low;
        }
    }
    return out;
}

/// Tensor product of a factor list; factors[0] acts on the lowest qubits.
inline CMat tensor_le(const std::vector<CMat> &factors) {
    if (factors.empty()) {
        return CMat::Identity(1, 1);
    }
    CMat out = factors[0];
    for (size_t k = 1; k < factors.size(); k++) {
        out = tensor_le(out, factors[k]);
    }
    return out;
}

/// Embeds an operator acting on `targets` (distinct qubit indices) into an
/// n-qubit operator. targets[t] carries bit t of the operator's own index.
inline CMat embed_operator(const CMat &op, const std::vector<int> &targets, int num_qubits) {
    Eigen::Index dim = Eigen::Index(1) << num_qubits;
    Eigen::Index sub = Eigen::Index(1) << targets.size();
    if (op.rows() != sub || op.cols() != sub) {
        throw std::invalid_argument("embed_operator: operator size does not match target count");
    }
    uint64_t target_mask = 0;
    for (int q : targets) {
        if (q < 0 || q >= num_qubits) {
            throw std::invalid_argument("embed_operator: target qubit out of range");
        }
        target_mask |= uint64_t(1) << q;
    }
    CMat out = CMat::Zero(dim, dim);
    for (Eigen::Index col = 0; col < dim; col++) {
        uint64_t rest = uint64_t(col) & ~target_mask;
        uint64_t sub_col = 0;
        for (size_t t = 0; t < targets.size(); t++) {
            sub_col |= ((uint64_t(col) >> targets[t]) & 1) << t;
        }
        for (Eigen::Index sub_row = 0; sub_row < sub; sub_row++) {
            cdouble v = op(sub_row, Eigen::Index(sub_col));
            if (v == cdouble(0, 0)) {
                continue;
            }
            uint64_t row = rest;
            for (size_t t = 0; t < targets.size(); t++) {
                row |= ((uint64_t(sub_row) >> t) & 1) << targets[t];
            }
            out(Eigen::Index(row), col) += v;
        }
    }
    return out;
}

inline bool is_unitary(const CMat &u, double tol = kExactTol) {
    if (u.rows() != u.cols()) {
        return false;
    }
    return (u.adjoint() * u - CMat::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

inline bool is_hermitian(const CMat &m, double tol = kExactTol) {
    if (m.rows() != m.cols()) {
        return false;
    }
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

/// Eigenvalues of a Hermitian matrix, ascending.
inline Eigen::VectorXd hermitian_eigenvalues(const CMat &m) {
    Eigen::SelfAdjointEigenSolver<CMat> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

/// Operator infinity norm of a Hermitian matrix (largest |eigenvalue|).
inline double hermitian_inf_norm(const CMat &m) {
    Eigen::VectorXd ev = hermitian_eigenvalues(m);
    return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

}  // namespace vdshadow

#endif
