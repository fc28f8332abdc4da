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

#include <map>
#include <set>

#include "support.hpp"

using namespace vdshadow;

namespace {

double unitary_distance_up_to_phase(const CMat &a, const CMat &b) {
    cdouble overlap = (a.adjoint() * b).trace();
    if (std::abs(overlap) < 1e-12) {
        return 1.0;
    }
    cdouble phase = overlap / std::abs(overlap);
    return (a * phase - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("pauli strings multiply like their dense forms") {
    for (int xa = 0; xa < 2; xa++) {
        for (int za = 0; za < 2; za++) {
            for (int ka = 0; ka < 4; ka++) {
                for (int xb = 0; xb < 2; xb++) {
                    for (int zb = 0; zb < 2; zb++) {
                        PauliString a(1, xa, za, ka);
                        PauliString b(1, xb, zb, 0);
                        CMat want = a.dense() * b.dense();
                        CMat got = (a * b).dense();
                        CHECK((want - got).cwiseAbs().maxCoeff() < 1e-12);
                    }
                }
            }
        }
    }
    PauliString p = PauliString::from_label("XYZ");
    PauliString q = PauliString::from_label("ZZX");
    CHECK(((p * q).dense() - p.dense() * q.dense()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(p.is_hermitian());
    CHECK(p.weight() == 3);
    CHECK(PauliString::from_label("IZI").weight() == 1);
}

TEST_CASE("single-qubit clifford table") {
    const auto &table = enumerate_single_qubit_cliffords();
    CHECK(table.size() == 24);

    bool has_identity = false;
    for (const auto &c : table) {
        if (c == CliffordElement::identity(1)) {
            has_identity = true;
        }
    }
    CHECK(has_identity);

    // Closure under composition.
    std::set<std::string> keys;
    for (const auto &c : table) {
        keys.insert(c.serialize());
    }
    for (const auto &a : table) {
        for (const auto &b : table) {
            CHECK(keys.count(a.then(b).serialize()) == 1);
        }
    }

    // Every element permutes {X,Y,Z} up to sign.
    for (const auto &c : table) {
        std::set<std::pair<uint64_t, uint64_t>> images;
        for (const char *label : {"X", "Y", "Z"}) {
            PauliString img = c.conjugate(PauliString::from_label(label));
            CHECK(img.is_hermitian());
            CHECK(!img.is_identity_up_to_phase());
            images.insert({img.x_bits, img.z_bits});
        }
        CHECK(images.size() == 3);
    }
}

TEST_CASE("known conjugations") {
    CliffordElement h, s;
    h.num_qubits = s.num_qubits = 1;
    h.image_x = {PauliString::from_label("Z")};
    h.image_z = {PauliString::from_label("X")};
    s.image_x = {PauliString::from_label("Y")};
    s.image_z = {PauliString::from_label("Z")};
    CHECK(h.conjugate(PauliString::from_label("Z")) == PauliString::from_label("X"));
    CHECK(s.conjugate(PauliString::from_label("X")) == PauliString::from_label("Y"));
    CHECK(s.conjugate(PauliString::from_label("Y")) == PauliString::from_label("X", -1));
}

TEST_CASE("tableau conjugation matches dense conjugation") {
    Rng rng(11);
    for (int n = 1; n <= 3; n++) {
        for (int rep = 0; rep < 8; rep++) {
            CliffordElement c = sample_uniform_clifford(n, rng);
            REQUIRE(c.is_valid());
            CMat u = clifford_to_unitary(c);
            REQUIRE(is_unitary(u, 1e-9));
            uint64_t x = rng.next_below(uint64_t(1) << n);
            uint64_t z = rng.next_below(uint64_t(1) << n);
            if (x == 0 && z == 0) {
                x = 1;
            }
            PauliString p = PauliString::hermitian(n, x, z, rng.next_bool());
            CMat want = u * p.dense() * u.adjoint();
            CMat got = c.conjugate(p).dense();
            CHECK((want - got).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
}

TEST_CASE("composition matches dense multiplication up to phase") {
    Rng rng(12);
    for (int n = 1; n <= 3; n++) {
        CliffordElement a = sample_uniform_clifford(n, rng);
        CliffordElement b = sample_uniform_clifford(n, rng);
        CliffordElement ab = a.then(b);
        REQUIRE(ab.is_valid());
        CMat want = clifford_to_unitary(b) * clifford_to_unitary(a);
        CMat got = clifford_to_unitary(ab);
        CHECK(unitary_distance_up_to_phase(want, got) < 1e-9);
    }
    // Associativity on tableaux.
    CliffordElement a = sample_uniform_clifford(2, rng);
    CliffordElement b = sample_uniform_clifford(2, rng);
    CliffordElement c = sample_uniform_clifford(2, rng);
    CHECK(a.then(b).then(c) == a.then(b.then(c)));
}

TEST_CASE("inverse composes to the identity") {
    Rng rng(13);
    for (int n = 1; n <= 3; n++) {
        for (int rep = 0; rep < 6; rep++) {
            CliffordElement c = sample_uniform_clifford(n, rng);
            CliffordElement inv = c.inverse();
            CHECK(c.then(inv) == CliffordElement::identity(n));
            CHECK(inv.then(c) == CliffordElement::identity(n));
        }
    }
}

TEST_CASE("clifford_to_unitary canonical examples") {
    CMat id = clifford_to_unitary(CliffordElement::identity(2));
    CHECK((id - CMat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);

    CliffordElement h;
    h.num_qubits = 1;
    h.image_x = {PauliString::from_label("Z")};
    h.image_z = {PauliString::from_label("X")};
    CHECK((clifford_to_unitary(h) - hadamard_matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("unitary action is self-consistent for random two-qubit elements") {
    Rng rng(14);
    for (int rep = 0; rep < 100; rep++) {
        CliffordElement c = sample_uniform_clifford(2, rng);
        CMat u = clifford_to_unitary(c);
        for (int q = 0; q < 2; q++) {
            CMat lhs_x = u * PauliString(2, uint64_t(1) << q, 0, 0).dense() * u.adjoint();
            CHECK((lhs_x - c.image_x[q].dense()).cwiseAbs().maxCoeff() < 1e-9);
            CMat lhs_z = u * PauliString(2, 0, uint64_t(1) << q, 0).dense() * u.adjoint();
            CHECK((lhs_z - c.image_z[q].dense()).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
}

TEST_CASE("serialization round trip") {
    Rng rng(15);
    for (int n = 1; n <= 4; n++) {
        CliffordElement c = sample_uniform_clifford(n, rng);
        CliffordElement back = CliffordElement::parse(c.serialize());
        CHECK(back == c);
    }
    CHECK_THROWS(CliffordElement::parse("garbage"));
}

TEST_CASE("same seed gives the same element") {
    Rng a(99), b(99);
    CHECK(sample_uniform_clifford(3, a) == sample_uniform_clifford(3, b));
}

TEST_CASE("two-qubit group enumeration closes at 11520") {
    const auto &group = enumerate_clifford_group(2);
    CHECK(group.size() == 11520);
}

TEST_CASE("single-qubit sampling frequencies are uniform") {
    Rng rng(21);
    std::map<std::string, int> counts;
    const int samples = 100000;
    for (int i = 0; i < samples; i++) {
        counts[sample_uniform_clifford(1, rng).serialize()]++;
    }
    CHECK(counts.size() == 24);
    double expect = samples / 24.0;
    double sigma = std::sqrt(expect * (1.0 - 1.0 / 24.0));
    for (const auto &[key, count] : counts) {
        CHECK(std::abs(count - expect) < 5.0 * sigma);
    }
}

TEST_CASE("symplectic structure preserved under composition") {
    Rng rng(22);
    for (int rep = 0; rep < 20; rep++) {
        CliffordElement a = sample_uniform_clifford(3, rng);
        CliffordElement b = sample_uniform_clifford(3, rng);
        CHECK(a.then(b).is_valid());
    }
}
