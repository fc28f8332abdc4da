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

#ifndef VDSHADOW_PAULI_H
#define VDSHADOW_PAULI_H

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "vdshadow/linalg.hpp"

namespace vdshadow {

/// Signed n-qubit Pauli operator in the form i^phase_exp * X^x * Z^z,
/// where bit q of x/z refers to qubit q. Supports up to 32 qubits.
struct PauliString {
    int num_qubits = 0;
    uint64_t x_bits = 0;
    uint64_t z_bits = 0;
    int phase_exp = 0;  // exponent of i, mod 4

    PauliString() = default;

    explicit PauliString(int n) : num_qubits(n) {
        if (n < 0 || n > 32) {
            throw std::invalid_argument("PauliString: qubit count out of range");
        }
    }

    PauliString(int n, uint64_t x, uint64_t z, int k) : num_qubits(n), x_bits(x), z_bits(z), phase_exp(((k % 4) + 4) % 4) {
        if (n < 0 || n > 32) {
            throw std::invalid_argument("PauliString: qubit count out of range");
        }
        uint64_t mask = n == 0 ? 0 : ((n == 64 ? ~uint64_t(0) : (uint64_t(1) << n) - 1));
        if ((x & ~mask) || (z & ~mask)) {
            throw std::invalid_argument("PauliString: bits outside qubit range");
        }
    }

    /// Hermitian Pauli from a label such as "XIZ"; character q names qubit q.
    static PauliString from_label(const std::string &label, int sign = +1) {
        PauliString p(static_cast<int>(label.size()));
        int y_count = 0;
        for (size_t q = 0; q < label.size(); q++) {
            switch (label[q]) {
                case 'I':
                case 'i':
                    break;
                case 'X':
                case 'x':
                    p.x_bits |= uint64_t(1) << q;
                    break;
                case 'Y':
                case 'y':
                    p.x_bits |= uint64_t(1) << q;
                    p.z_bits |= uint64_t(1) << q;
                    y_count++;
                    break;
                case 'Z':
                case 'z':
                    p.z_bits |= uint64_t(1) << q;
                    break;
                default:
                    throw std::invalid_argument("PauliString: bad label character");
            }
        }
        p.phase_exp = y_count % 4;
        if (sign == -1) {
            p.phase_exp = (p.phase_exp + 2) % 4;
        } else if (sign != 1) {
            throw std::invalid_argument("PauliString: sign must be +1 or -1");
        }
        return p;
    }

    static PauliString identity(int n) {
        return PauliString(n);
    }

    /// Canonical Hermitian Pauli i^{|x&z|} X^x Z^z with an extra sign bit.
    static PauliString hermitian(int n, uint64_t x, uint64_t z, bool negative) {
        int k = std::popcount(x & z) % 4;
        if (negative) {
            k = (k + 2) % 4;
        }
        return PauliString(n, x, z, k);
    }

    bool x_bit(int q) const {
        return (x_bits >> q) & 1;
    }
    bool z_bit(int q) const {
        return (z_bits >> q) & 1;
    }

    bool is_identity_up_to_phase() const {
        return x_bits == 0 && z_bits == 0;
    }

    bool is_hermitian() const {
        return ((phase_exp + std::popcount(x_bits & z_bits)) % 2) == 0;
    }

    int weight() const {
        return std::popcount(x_bits | z_bits);
    }

    cdouble phase_value() const {
        static const cdouble values[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        return values[phase_exp];
    }

    bool commutes_with(const PauliString &other) const {
        int anti = std::popcount(x_bits & other.z_bits) + std::popcount(z_bits & other.x_bits);
        return anti % 2 == 0;
    }

    PauliString operator*(const PauliString &other) const {
        if (num_qubits != other.num_qubits) {
            throw std::invalid_argument("PauliString: size mismatch in product");
        }
        PauliString out(num_qubits);
        out.x_bits = x_bits ^ other.x_bits;
        out.z_bits = z_bits ^ other.z_bits;
        // Reordering Z^z X^x' picks up (-1)^{|z & x'|}.
        int k = phase_exp + other.phase_exp + 2 * std::popcount(z_bits & other.x_bits);
        out.phase_exp = k % 4;
        return out;
    }

    PauliString negated() const {
        PauliString out = *this;
        out.phase_exp = (out.phase_exp + 2) % 4;
        return out;
    }

    /// <z|P|z> for a computational basis state (bit q of z = qubit q).
    cdouble diagonal_entry(uint64_t z) const {
        if (x_bits != 0) {
            return {0, 0};
        }
        cdouble v = phase_value();
        return (std::popcount(z & z_bits) % 2 == 0) ? v : -v;
    }

    CMat dense() const {
        CMat out = CMat::Identity(1, 1);
        for (int q = 0; q < num_qubits; q++) {
            CMat leg(2, 2);
            bool x = x_bit(q), z = z_bit(q);
            if (x && z) {
                leg << 0, -1, 1, 0;  // XZ
            } else if (x) {
                leg = pauli_x();
            } else if (z) {
                leg = pauli_z();
            } else {
                leg = identity_matrix(2);
            }
            out = tensor_le(out, leg);
        }
        return phase_value() * out;
    }

    /// Applies P to a statevector in place: P|i> = i^k (-1)^{|z&i|} |i^x>.
    void apply_to_vector(CVec &v) const {
        CVec out(v.size());
        cdouble ph = phase_value();
        for (Eigen::Index i = 0; i < v.size(); i++) {
            cdouble a = ph * v(i);
            if (std::popcount(uint64_t(i) & z_bits) % 2) {
                a = -a;
            }
            out(Eigen::Index(uint64_t(i) ^ x_bits)) = a;
        }
        v = std::move(out);
    }

    std::string label() const {
        std::string s;
        for (int q = 0; q < num_qubits; q++) {
            bool x = x_bit(q), z = z_bit(q);
            s += x && z ? 'Y' : x ? 'X' : z ? 'Z' : 'I';
        }
        return s;
    }

    bool operator==(const PauliString &other) const {
        return num_qubits == other.num_qubits && x_bits == other.x_bits && z_bits == other.z_bits &&
               phase_exp == other.phase_exp;
    }
};

}  // namespace vdshadow

#endif
