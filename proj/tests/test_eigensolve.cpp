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
#include <cstring>
#include <numbers>
#include <random>
#include <vector>

#include "polydecoh/eigensolve.hpp"
#include "polydecoh/errors.hpp"
#include "polydecoh/model.hpp"
#include "polydecoh/relax.hpp"

using namespace polydecoh;

namespace {

void check_decomposition(const Eigen::MatrixXd& a, const EigenDecomposition& e) {
    const int n = static_cast<int>(a.rows());
    REQUIRE(e.size() == n);
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    for (int k = 0; k < n; ++k) {
        const Eigen::VectorXd r = a * e.vectors.col(k) - e.values[k] * e.vectors.col(k);
        CHECK(r.cwiseAbs().maxCoeff() < 1e-10 * scale);
        if (k > 0) CHECK(e.values[k - 1] <= e.values[k]);
        int first = 0;
        const double vmax = e.vectors.col(k).cwiseAbs().maxCoeff();
        while (std::abs(e.vectors(first, k)) <= 1e-10 * vmax) ++first;
        CHECK(e.vectors(first, k) > 0.0);
    }
    const Eigen::MatrixXd gram = e.vectors.transpose() * e.vectors;
    CHECK((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
    const Eigen::MatrixXd back = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
    CHECK((back - a).norm() <= 1e-9 * std::max(1.0, a.norm()));
}

Eigen::MatrixXd random_symmetric(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = g(rng);
    return a;
}

}  // namespace

TEST_CASE("two-site chain") {
    ModelParams p;
    p.nSites = 4;
    SingleParticleHamiltonian h{Eigen::VectorXd::Constant(1, -p.t0)};
    const auto e = eig_tridiagonal(h);
    CHECK(e.values[0] == doctest::Approx(-2.5).epsilon(1e-15));
    CHECK(e.values[1] == doctest::Approx(2.5).epsilon(1e-15));
    check_decomposition(h.dense(), e);
}

TEST_CASE("four-site uniform chain") {
    ModelParams p;
    p.nSites = 4;
    const auto h = build_hamiltonian(Eigen::VectorXd::Zero(4), p);
    const auto e = eig_tridiagonal(h);
    const double c1 = 2 * p.t0 * std::cos(std::numbers::pi / 5);
    const double c2 = 2 * p.t0 * std::cos(2 * std::numbers::pi / 5);
    CHECK(e.values[0] == doctest::Approx(-c1).epsilon(1e-14));
    CHECK(e.values[1] == doctest::Approx(-c2).epsilon(1e-14));
    CHECK(e.values[2] == doctest::Approx(c2).epsilon(1e-14));
    CHECK(e.values[3] == doctest::Approx(c1).epsilon(1e-14));
    CHECK(e.values[0] == doctest::Approx(-4.045).epsilon(1e-4));
    CHECK(e.values[1] == doctest::Approx(-1.545).epsilon(1e-3));
    check_decomposition(h.dense(), e);
}

TEST_CASE("relaxed hundred-site spectrum") {
    ModelParams p;
    p.nSites = 100;
    const auto r = optimize_geometry(ground_state_occupation(p), p);
    const auto& v = r.spectrum.values;
    CHECK(v[99] - v[0] == doctest::Approx(10.0).epsilon(0.03));
    int negative = 0;
    for (int k = 0; k < 100; ++k) negative += v[k] < 0.0;
    CHECK(negative == 50);
    CHECK(v[50] - v[49] > 0.5);
    check_decomposition(build_hamiltonian(r.u0, p).dense(), r.spectrum);
}

TEST_CASE("random tridiagonal matrices") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    for (int n : {2, 3, 5, 17, 64, 200}) {
        std::vector<double> d(n), e(n - 1);
        for (auto& x : d) x = g(rng);
        for (auto& x : e) x = g(rng);
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) a(i, i) = d[i];
        for (int i = 0; i + 1 < n; ++i) a(i, i + 1) = a(i + 1, i) = e[i];
        check_decomposition(a, eig_tridiagonal(d, e));
    }
}

TEST_CASE("tridiagonal matrix with a decoupled block") {
    std::vector<double> d{1.0, 2.0, 3.0, 4.0};
    std::vector<double> e{0.5, 0.0, 0.25};
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
    for (int i = 0; i < 4; ++i) a(i, i) = d[i];
    a(0, 1) = a(1, 0) = 0.5;
    a(2, 3) = a(3, 2) = 0.25;
    check_decomposition(a, eig_tridiagonal(d, e));
}

TEST_CASE("identity matrix") {
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(5, 5);
    const auto e = eig_symmetric(a);
    for (int k = 0; k < 5; ++k) CHECK(e.values[k] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK((e.vectors.cwiseAbs() - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-15);
    check_decomposition(a, e);
}

TEST_CASE("two-by-two symmetric matrix") {
    Eigen::MatrixXd a(2, 2);
    a << 2, 1, 1, 2;
    const auto e = eig_symmetric(a);
    CHECK(e.values[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(e.values[1] == doctest::Approx(3.0).epsilon(1e-15));
    check_decomposition(a, e);
}

TEST_CASE("elastic chain hessian has the analytic clamped-chain spectrum") {
    const int n = 10;
    const double k = 21.0;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n - 2, n - 2);
    for (int i = 0; i < n - 2; ++i) {
        a(i, i) = 2 * k;
        if (i + 1 < n - 2) a(i, i + 1) = a(i + 1, i) = -k;
    }
    const auto e = eig_symmetric(a);
    for (int j = 1; j <= n - 2; ++j)
        CHECK(std::abs(e.values[j - 1] - k * 4 * std::pow(std::sin(j * std::numbers::pi / (2 * (n - 1))), 2)) < 1e-10);
    check_decomposition(a, e);
}

TEST_CASE("random dense symmetric matrices") {
    std::mt19937_64 rng(13);
    for (int n : {1, 2, 3, 8, 33, 98}) {
        const Eigen::MatrixXd a = random_symmetric(n, rng);
        check_decomposition(a, eig_symmetric(a));
    }
}

TEST_CASE("degenerate spectrum") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Constant(6, 6, 1.0);
    check_decomposition(a, eig_symmetric(a));
}

TEST_CASE("asymmetric input is rejected") {
    Eigen::MatrixXd a(2, 2);
    a << 1, 2, 2.001, 1;
    CHECK_THROWS_AS(eig_symmetric(a), InvalidInput);
    a(1, 0) = 2.0 + 1e-13;
    CHECK_NOTHROW(eig_symmetric(a));
}

TEST_CASE("repeated solves are bitwise identical") {
    std::mt19937_64 rng(29);
    const Eigen::MatrixXd a = random_symmetric(40, rng);
    const auto e1 = eig_symmetric(a);
    const auto e2 = eig_symmetric(a);
    CHECK(std::memcmp(e1.values.data(), e2.values.data(), sizeof(double) * 40) == 0);
    CHECK(std::memcmp(e1.vectors.data(), e2.vectors.data(), sizeof(double) * 1600) == 0);
}
