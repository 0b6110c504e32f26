/*
   Copyright 2026 The polydecoh Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "polydecoh/errors.hpp"
#include "polydecoh/superpos.hpp"

using namespace polydecoh;

namespace {

ModelParams chain(int n) {
    ModelParams p;
    p.nSites = n;
    return p;
}

std::vector<SuperpositionSpec> all_specs(int n) {
    std::vector<SuperpositionSpec> specs{{SuperpositionKind::GroundExcited, 0}};
    for (int i = n / 2 + 1; i <= n - 1; ++i) {
        specs.push_back({SuperpositionKind::PairGroundGeometry, i});
        specs.push_back({SuperpositionKind::PairExcitedGeometry, i});
    }
    return specs;
}

double max_diff(const OccupationMatrix& a, const OccupationMatrix& b) {
    return std::max((a.up - b.up).cwiseAbs().maxCoeff(), (a.down - b.down).cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("superpositions agree with the Fock-space oracle") {
    for (int n : {4, 6, 8}) {
        for (const auto& spec : all_specs(n)) {
            CAPTURE(n);
            CAPTURE(to_string(spec.kind));
            CAPTURE(spec.level);
            const auto gamma = build_superposition(spec, chain(n));
            const auto state = fock::explicit_superposition(spec, n);
            CHECK(state.norm() == doctest::Approx(1.0).epsilon(1e-15));
            CHECK(max_diff(gamma, fock::fock_oracle_1rdm(state)) < 1e-13);
        }
    }
}

TEST_CASE("four-site ground-excited entries") {
    const auto g = build_superposition({SuperpositionKind::GroundExcited, 0}, chain(4));
    Eigen::MatrixXcd up = Eigen::MatrixXcd::Zero(4, 4);
    up(0, 0) = 1.0;
    up(1, 1) = up(2, 2) = up(1, 2) = up(2, 1) = 0.5;
    Eigen::MatrixXcd down = Eigen::MatrixXcd::Zero(4, 4);
    down(0, 0) = down(1, 1) = 1.0;
    CHECK((g.up - up).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((g.down - down).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("six-site pair coherence sits in the excited spin only") {
    const auto p = chain(6);
    const SuperpositionSpec spec{SuperpositionKind::PairGroundGeometry, 4};
    const auto g = fock::fock_oracle_1rdm(fock::explicit_superposition(spec, 6));
    CHECK(g.up(3, 4).real() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(g.up(4, 3).real() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(g.up(2, 2)) < 1e-14);  // HOMO emptied
    CHECK((g.down - g.down.diagonal().asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs(g.down(2, 2) - 1.0) < 1e-14);
}

TEST_CASE("occupation matrix invariants") {
    for (int n : {4, 8, 20, 100}) {
        for (const auto& spec : all_specs(n)) {
            const auto g = build_superposition(spec, chain(n));
            CHECK(g.up.trace().real() == doctest::Approx(n / 2).epsilon(1e-15));
            CHECK(g.down.trace().real() == doctest::Approx(n / 2).epsilon(1e-15));
            CHECK(g.trace() == doctest::Approx(n).epsilon(1e-15));
            for (const auto* m : {&g.up, &g.down}) {
                CHECK((*m - m->adjoint()).cwiseAbs().maxCoeff() < 1e-14);
                CHECK(m->imag().cwiseAbs().maxCoeff() == 0.0);
                if (n <= 20) {
                    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(*m);
                    CHECK(es.eigenvalues().minCoeff() > -1e-14);
                    CHECK(es.eigenvalues().maxCoeff() < 1.0 + 1e-14);
                }
            }
        }
    }
}

TEST_CASE("coherent superpositions are pure rotated determinants") {
    // Each class superposes two determinants that differ by a single spin-up
    // orbital, so the state is again a determinant in a rotated orbital
    // basis: gamma is idempotent while carrying off-diagonal coherence.
    for (const auto& spec : all_specs(8)) {
        const auto g = build_superposition(spec, chain(8));
        const Eigen::MatrixXcd offDiag = g.up - Eigen::MatrixXcd(g.up.diagonal().asDiagonal());
        CHECK(offDiag.cwiseAbs().maxCoeff() == doctest::Approx(0.5));
        CHECK((g.up * g.up - g.up).cwiseAbs().maxCoeff() < 1e-15);
        const Eigen::MatrixXcd d = g.up.diagonal().asDiagonal();
        CHECK((d * d - d).cwiseAbs().maxCoeff() == doctest::Approx(0.25));
    }
}

TEST_CASE("single-determinant limit is diagonal") {
    const auto p = chain(6);
    const auto ge = fock::fock_oracle_1rdm(
        fock::explicit_superposition({SuperpositionKind::GroundExcited, 0}, 6, 1.0, 0.0));
    CHECK(max_diff(ge, diagonal_occupation(ground_state_occupation(p))) < 1e-15);

    const auto pair = fock::fock_oracle_1rdm(
        fock::explicit_superposition({SuperpositionKind::PairGroundGeometry, 4}, 6, 1.0, 0.0));
    CHECK(max_diff(pair, diagonal_occupation(excited_occupation(4, p))) < 1e-15);

    const auto ground = fock::fock_oracle_1rdm(fock::slater_determinant(ground_state_occupation(p)));
    CHECK(max_diff(ground, diagonal_occupation(ground_state_occupation(p))) < 1e-15);
    CHECK(ground.trace() == doctest::Approx(6.0));
}

TEST_CASE("nuclear preparation surface follows the kind") {
    const auto p = chain(20);
    const SuperpositionSpec ge{SuperpositionKind::GroundExcited, 0};
    const SuperpositionSpec pg{SuperpositionKind::PairGroundGeometry, 11};
    const SuperpositionSpec pe{SuperpositionKind::PairExcitedGeometry, 11};
    CHECK(ge.nuclear_prep() == NuclearSurface::Ground);
    CHECK(pg.nuclear_prep() == NuclearSurface::Ground);
    CHECK(pe.nuclear_prep() == NuclearSurface::Excited);
    CHECK(ge.preparation_occupation(p) == ground_state_occupation(p));
    CHECK(pg.preparation_occupation(p) == ground_state_occupation(p));
    CHECK(pe.preparation_occupation(p) == excited_occupation(11, p));
    CHECK(ge.default_watched_levels(p) == std::vector<int>{11});
    CHECK(pe.default_watched_levels(p) == std::vector<int>{11, 12});
}

TEST_CASE("level range and kind parsing") {
    const auto p = chain(20);
    CHECK_THROWS_AS(build_superposition({SuperpositionKind::PairGroundGeometry, 20}, p), InvalidInput);
    CHECK_THROWS_AS(build_superposition({SuperpositionKind::PairExcitedGeometry, 10}, p), InvalidInput);
    CHECK_NOTHROW(build_superposition({SuperpositionKind::PairExcitedGeometry, 19}, p));
    CHECK_NOTHROW(build_superposition({SuperpositionKind::GroundExcited, 0}, p));

    CHECK(parse_superposition_kind("ground-excited") == SuperpositionKind::GroundExcited);
    CHECK(parse_superposition_kind("Pair-Ground") == SuperpositionKind::PairGroundGeometry);
    CHECK(parse_superposition_kind("pair-excited") == SuperpositionKind::PairExcitedGeometry);
    for (auto k : {SuperpositionKind::GroundExcited, SuperpositionKind::PairGroundGeometry,
                   SuperpositionKind::PairExcitedGeometry})
        CHECK(parse_superposition_kind(to_string(k)) == k);
    CHECK_THROWS_AS(parse_superposition_kind("bogus"), InvalidInput);
}

TEST_CASE("fock oracle size cap") {
    CHECK_THROWS_AS(fock::ManyBodyState(9), InvalidInput);
    CHECK_THROWS_AS(fock::explicit_superposition({SuperpositionKind::GroundExcited, 0}, 10), InvalidInput);
}

TEST_CASE("fermionic signs of single excitations") {
    // c^dag_a c_b on |1100> (spin up, 4 levels) moving from level 0 to 2
    // passes one occupied mode, flipping the sign.
    fock::ManyBodyState s(4);
    s.add(0b0011, 1.0);
    const auto moved = s.excite(2, 0, 0);
    REQUIRE(moved.amplitudes().size() == 1);
    CHECK(moved.amplitudes().begin()->first == 0b0110);
    CHECK(moved.amplitudes().begin()->second.real() == -1.0);
    CHECK(s.excite(0, 2, 0).amplitudes().empty());
    CHECK(s.excite(1, 0, 0).amplitudes().empty());
}
