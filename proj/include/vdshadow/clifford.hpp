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

#ifndef VDSHADOW_CLIFFORD_H
#define VDSHADOW_CLIFFORD_H

#include <algorithm>
#include <bit>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "vdshadow/linalg.hpp"
#include "vdshadow/pauli.hpp"
#include "vdshadow/rng.hpp"

namespace vdshadow {

/// n-qubit Clifford element, stored as the conjugation images of the
/// generators X_q and Z_q (a stabilizer tableau: 2n x 2n symplectic binary
/// matrix plus 2n sign bits). Global phase is not represented.
struct CliffordElement {
    int num_qubits = 0;
    std::vector<PauliString> image_x;  // C X_q C^dag
    std::vector<PauliString> image_z;  // C Z_q C^dag

    CliffordElement() = default;

    static CliffordElement identity(int n) {
        CliffordElement c;
        c.num_qubits = n;
        c.image_x.reserve(n);
        c.image_z.reserve(n);
        for (int q = 0; q < n; q++) {
            c.image_x.push_back(PauliString(n, uint64_t(1) << q, 0, 0));
            c.image_z.push_back(PauliString(n, 0, uint64_t(1) << q, 0));
        }
        return c;
    }

    bool is_valid() const {
        if (static_cast<int>(image_x.size()) != num_qubits || static_cast<int>(image_z.size()) != num_qubits) {
            return false;
        }
        for (int p = 0; p < num_qubits; p++) {
            if (!image_x[p].is_hermitian() || !image_z[p].is_hermitian()) {
                return false;
            }
            for (int q = 0; q < num_qubits; q++) {
                bool xx = image_x[p].commutes_with(image_x[q]);
                bool zz = image_z[p].commutes_with(image_z[q]);
                bool xz = image_x[p].commutes_with(image_z[q]);
                if (!xx || !zz || xz != (p != q)) {
                    return false;
                }
            }
        }
        return true;
    }

    /// C P C^dag as a signed Pauli.
    PauliString conjugate(const PauliString &p) const {
        if (p.num_qubits != num_qubits) {
            throw std::invalid_argument("CliffordElement: Pauli size mismatch");
        }
        PauliString out(num_qubits);
        out.phase_exp = p.phase_exp;
        for (int q = 0; q < num_qubits; q++) {
            if (p.x_bit(q)) {
                out = out * image_x[q];
            }
        }
        for (int q = 0; q < num_qubits; q++) {
            if (p.z_bit(q)) {
                out = out * image_z[q];
            }
        }
        return out;
    }

    /// Composition: (a.then(b)) acts as b after a, i.e. (b*a) P (b*a)^dag.
    CliffordElement then(const CliffordElement &b) const {
        if (b.num_qubits != num_qubits) {
            throw std::invalid_argument("CliffordElement: size mismatch in composition");
        }
        CliffordElement out;
        out.num_qubits = num_qubits;
        out.image_x.reserve(num_qubits);
        out.image_z.reserve(num_qubits);
        for (int q = 0; q < num_qubits; q++) {
            out.image_x.push_back(b.conjugate(image_x[q]));
            out.image_z.push_back(b.conjugate(image_z[q]));
        }
        return out;
    }

    CliffordElement inverse() const {
        // The symplectic inverse of M is Omega M^T Omega; signs are fixed by
        // conjugating the unsigned candidates forward.
        int n = num_qubits;
        CliffordElement out;
        out.num_qubits = n;
        out.image_x.assign(n, PauliString(n));
        out.image_z.assign(n, PauliString(n));
        for (int q = 0; q < n; q++) {
            uint64_t xq_x = 0, xq_z = 0, zq_x = 0, zq_z = 0;
            for (int s = 0; s < n; s++) {
                if ((image_z[s].z_bits >> q) & 1) {
                    xq_x |= uint64_t(1) << s;
                }
                if ((image_x[s].z_bits >> q) & 1) {
                    xq_z |= uint64_t(1) << s;
                }
                if ((image_z[s].x_bits >> q) & 1) {
                    zq_x |= uint64_t(1) << s;
                }
                if ((image_x[s].x_bits >> q) & 1) {
                    zq_z |= uint64_t(1) << s;
                }
            }
            out.image_x[q] = PauliString::hermitian(n, xq_x, xq_z, false);
            out.image_z[q] = PauliString::hermitian(n, zq_x, zq_z, false);
        }
        // Fix signs so that conjugating forward reproduces the generators.
        for (int q = 0; q < n; q++) {
            PauliString fx = conjugate(out.image_x[q]);
            if (fx.phase_exp != 0) {
                out.image_x[q] = out.image_x[q].negated();
            }
            PauliString fz = conjugate(out.image_z[q]);
            if (fz.phase_exp != 0) {
                out.image_z[q] = out.image_z[q].negated();
            }
        }
        return out;
    }

    bool operator==(const CliffordElement &other) const {
        return num_qubits == other.num_qubits && image_x == other.image_x && image_z == other.image_z;
    }

    /// Textual form: "n:xhex.zhex.phase,..." with the 2n rows listed as the
    /// X images then the Z images.
    std::string serialize() const {
        std::ostringstream out;
        out << num_qubits << ':';
        auto put = [&](const PauliString &p, bool last) {
            out << std::hex << p.x_bits << '.' << p.z_bits << '.' << std::dec << p.phase_exp;
            if (!last) {
                out << ',';
            }
        };
        for (int q = 0; q < num_qubits; q++) {
            put(image_x[q], false);
        }
        for (int q = 0; q < num_qubits; q++) {
            put(image_z[q], q + 1 == num_qubits);
        }
        return out.str();
    }

    static CliffordElement parse(const std::string &text) {
        auto colon = text.find(':');
        if (colon == std::string::npos) {
            throw std::invalid_argument("CliffordElement: malformed serialization");
        }
        int n = std::stoi(text.substr(0, colon));
        CliffordElement out;
        out.num_qubits = n;
        std::istringstream rows(text.substr(colon + 1));
        std::string row;
        std::vector<PauliString> parsed;
        while (std::getline(rows, row, ',')) {
            size_t a = row.find('.');
            size_t b = row.find('.', a + 1);
            if (a == std::string::npos || b == std::string::npos) {
                throw std::invalid_argument("CliffordElement: malformed row");
            }
            uint64_t x = std::stoull(row.substr(0, a), nullptr, 16);
            uint64_t z = std::stoull(row.substr(a + 1, b - a - 1), nullptr, 16);
            int k = std::stoi(row.substr(b + 1));
            parsed.push_back(PauliString(n, x, z, k));
        }
        if (static_cast<int>(parsed.size()) != 2 * n) {
            throw std::invalid_argument("CliffordElement: wrong row count");
        }
        out.image_x.assign(parsed.begin(), parsed.begin() + n);
        out.image_z.assign(parsed.begin() + n, parsed.end());
        if (!out.is_valid()) {
            throw std::invalid_argument("CliffordElement: tableau is not symplectic");
        }
        return out;
    }
};

namespace detail {

// Vectors over F_2^{2n} packed as x bits in [0,n) and z bits in [n,2n).
inline int symplectic_form(uint64_t u, uint64_t v, int n) {
    uint64_t ux = u & ((uint64_t(1) << n) - 1), uz = u >> n;
    uint64_t vx = v & ((uint64_t(1) << n) - 1), vz = v >> n;
    return (std::popcount(ux & vz) + std::popcount(uz & vx)) % 2;
}

// Extracts a maximal independent subset of the given vectors (F_2 row
// reduction); used to carry the symplectic complement between rounds.
inline std::vector<uint64_t> independent_subset(const std::vector<uint64_t> &vecs) {
    std::vector<uint64_t> picked;
    uint64_t pivot_rows[64] = {};
    for (uint64_t v : vecs) {
        uint64_t r = v;
        while (r != 0) {
            int h = 63 - std::countl_zero(r);
            if (pivot_rows[h] == 0) {
                pivot_rows[h] = r;
                picked.push_back(v);
                break;
            }
            r ^= pivot_rows[h];
        }
    }
    return picked;
}

}  // namespace detail

/// Uniformly random element of the n-qubit Clifford group (mod global phase).
///
/// The symplectic part is built pair by pair with exactly counted choices, so
/// the distribution over the 2^{2n} |Sp(2n,2)| tableaux is exactly uniform.
inline CliffordElement sample_uniform_clifford(int n, Rng &rng) {
    if (n < 1 || n > 16) {
        throw std::invalid_argument("sample_uniform_clifford: n out of range [1,16]");
    }
    std::vector<uint64_t> basis;
    for (int q = 0; q < 2 * n; q++) {
        basis.push_back(uint64_t(1) << q);
    }
    std::vector<uint64_t> pair_e(n), pair_f(n);
    for (int j = 0; j < n; j++) {
        size_t m = basis.size();
        uint64_t v = 0;
        while (v == 0) {
            uint64_t coeffs = rng.next_u64() & ((uint64_t(1) << m) - 1);
            v = 0;
            for (size_t i = 0; i < m; i++) {
                if ((coeffs >> i) & 1) {
                    v ^= basis[i];
                }
            }
        }
        uint64_t w0 = 0;
        for (uint64_t b : basis) {
            if (detail::symplectic_form(v, b, n) == 1) {
                w0 = b;
                break;
            }
        }
        uint64_t coeffs = rng.next_u64() & ((uint64_t(1) << m) - 1);
        uint64_t w = 0;
        for (size_t i = 0; i < m; i++) {
            if ((coeffs >> i) & 1) {
                w ^= basis[i];
            }
        }
        if (detail::symplectic_form(v, w, n) == 0) {
            w ^= w0;
        }
        pair_e[j] = v;
        pair_f[j] = w;
        std::vector<uint64_t> next;
        for (uint64_t g : basis) {
            uint64_t h = g;
            if (detail::symplectic_form(w, g, n)) {
                h ^= v;
            }
            if (detail::symplectic_form(v, g, n)) {
                h ^= w;
            }
            if (h != 0) {
                next.push_back(h);
            }
        }
        basis = detail::independent_subset(next);
        if (basis.size() != size_t(2 * (n - j - 1))) {
            throw std::logic_error("sample_uniform_clifford: complement has wrong dimension");
        }
    }
    CliffordElement out;
    out.num_qubits = n;
    uint64_t lowmask = (uint64_t(1) << n) - 1;
    for (int q = 0; q < n; q++) {
        out.image_x.push_back(PauliString::hermitian(n, pair_e[q] & lowmask, pair_e[q] >> n, rng.next_bool()));
        out.image_z.push_back(PauliString::hermitian(n, pair_f[q] & lowmask, pair_f[q] >> n, rng.next_bool()));
    }
    return out;
}

/// The 24 single-qubit Cliffords, generated by closure of {H, S} and listed
/// in a fixed canonical order.
inline const std::vector<CliffordElement> &single_qubit_cliffords() {
    static const std::vector<CliffordElement> table = [] {
        CliffordElement h, s;
        h.num_qubits = s.num_qubits = 1;
        h.image_x = {PauliString::from_label("Z")};
        h.image_z = {PauliString::from_label("X")};
        s.image_x = {PauliString::from_label("Y")};
        s.image_z = {PauliString::from_label("Z")};
        std::vector<CliffordElement> found = {CliffordElement::identity(1)};
        std::vector<std::string> keys = {found[0].serialize()};
        for (size_t i = 0; i < found.size(); i++) {
            for (const CliffordElement *g : {&h, &s}) {
                CliffordElement next = found[i].then(*g);
                std::string key = next.serialize();
                if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
                    keys.push_back(key);
                    found.push_back(next);
                }
            }
        }
        std::sort(found.begin(), found.end(), [](const CliffordElement &a, const CliffordElement &b) {
            return a.serialize() < b.serialize();
        });
        return found;
    }();
    return table;
}

inline std::vector<CliffordElement> enumerate_single_qubit_cliffords() {
    return single_qubit_cliffords();
}

/// U|0...0>, i.e. the stabilizer state fixed by the Z images.
inline CVec clifford_state_column(const CliffordElement &c) {
    int n = c.num_qubits;
    Eigen::Index dim = Eigen::Index(1) << n;
    for (Eigen::Index trial = 0; trial < dim; trial++) {
        CVec v = CVec::Zero(dim);
        v(trial) = 1;
        for (int q = 0; q < n; q++) {
            CVec pv = v;
            c.image_z[q].apply_to_vector(pv);
            v = 0.5 * (v + pv);
        }
        double norm = v.norm();
        if (norm > 1e-6) {
            return v / norm;
        }
    }
    throw std::logic_error("clifford_state_column: projector produced no state");
}

/// Dense unitary realizing the tableau. Global phase is canonicalized by
/// making the first nonzero entry of the first column real positive.
inline CMat clifford_to_unitary(const CliffordElement &c) {
    int n = c.num_qubits;
    if (n > 13) {
        throw std::invalid_argument("clifford_to_unitary: n too large for dense form");
    }
    Eigen::Index dim = Eigen::Index(1) << n;
    CVec psi0 = clifford_state_column(c);
    CMat u(dim, dim);
    for (Eigen::Index z = 0; z < dim; z++) {
        CVec col = psi0;
        for (int q = 0; q < n; q++) {
            if ((uint64_t(z) >> q) & 1) {
                c.image_x[q].apply_to_vector(col);
            }
        }
        u.col(z) = col;
    }
    for (Eigen::Index r = 0; r < dim; r++) {
        cdouble v = u(r, 0);
        if (std::abs(v) > 1e-8) {
            u *= std::conj(v) / std::abs(v);
            break;
        }
    }
    return u;
}

}  // namespace vdshadow

#endif
