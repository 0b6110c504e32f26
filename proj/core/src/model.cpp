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

#include "polydecoh/model.hpp"

#include <cmath>
#include <string>

#include "polydecoh/errors.hpp"

namespace polydecoh {

namespace {

void require_length(const Eigen::Index actual, const int expected, const char* what) {
    if (actual != expected) {
        throw InvalidInput("model", std::string(what) + " has length " + std::to_string(actual) +
                                        ", expected " + std::to_string(expected));
    }
}

}  // namespace

void ModelParams::validate() const {
    if (nSites < 4 || nSites % 2 != 0) {
        throw InvalidInput("model", "nSites must be even and >= 4, got " + std::to_string(nSites));
    }
    const auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw InvalidInput("model", std::string(name) + " must be strictly positive");
        }
    };
    positive(t0, "t0");
    positive(springK, "springK");
    positive(massM, "massM");
    positive(latticeA, "latticeA");
    positive(hbar, "hbar");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw InvalidInput("model", "alpha must be non-negative");
    }
}

LatticeState LatticeState::at_rest(const Eigen::VectorXd& u) {
    return LatticeState{u, Eigen::VectorXd::Zero(u.size())};
}

Eigen::MatrixXd SingleParticleHamiltonian::dense() const {
    const int n = size();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) {
        h(i, i + 1) = hopping[i];
        h(i + 1, i) = hopping[i];
    }
    return h;
}

SingleParticleHamiltonian build_hamiltonian(const Eigen::VectorXd& u, const ModelParams& params) {
    require_length(u.size(), params.nSites, "displacement vector");
    const int n = params.nSites;
    SingleParticleHamiltonian h{Eigen::VectorXd(n - 1)};
    for (int i = 0; i + 1 < n; ++i) {
        h.hopping[i] = -params.t0 + params.alpha * (u[i + 1] - u[i]);
    }
    return h;
}

SiteDensityMatrix site_density_matrix(const OrbitalMatrix& orbitals, const OccupationMatrix& gamma) {
    const Eigen::Index k = orbitals.cols();
    if (gamma.up.rows() != k || gamma.up.cols() != k || gamma.down.rows() != k || gamma.down.cols() != k) {
        throw InvalidInput("model", "occupation matrix does not match the orbital count");
    }
    constexpr double kHermitianTol = 1e-10;
    if ((gamma.up - gamma.up.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol ||
        (gamma.down - gamma.down.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol) {
        throw InvalidInput("model", "occupation matrix is not Hermitian");
    }
    // rho(n, m) = sum conj(C(n,e)) G(e,e') C(m,e')  =>  rho = conj(C) G C^T
    const Eigen::MatrixXcd g = gamma.spin_summed();
    Eigen::MatrixXcd rho = orbitals.conjugate() * g * orbitals.transpose();
    // Remove round-off asymmetry so downstream Hermitian checks are exact.
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return SiteDensityMatrix{std::move(rho)};
}

SiteDensityMatrix site_density_matrix(const Eigen::MatrixXd& orbitals, const Eigen::VectorXd& occupation) {
    if (occupation.size() != orbitals.cols()) {
        throw InvalidInput("model", "occupation vector does not match the orbital count");
    }
    const Eigen::MatrixXd rho = orbitals * occupation.asDiagonal() * orbitals.transpose();
    return SiteDensityMatrix{(0.5 * (rho + rho.transpose())).cast<Complex>()};
}

double electronic_energy(const SingleParticleHamiltonian& h, const SiteDensityMatrix& rho) {
    require_length(rho.size(), h.size(), "density matrix");
    double e = 0.0;
    for (int n = 0; n + 1 < h.size(); ++n) {
        e += 2.0 * (h.hopping[n] * rho.rho(n + 1, n)).real();
    }
    return e;
}

double elastic_energy(const Eigen::VectorXd& u, const ModelParams& params) {
    double e = 0.0;
    for (Eigen::Index n = 0; n + 1 < u.size(); ++n) {
        const double d = u[n + 1] - u[n];
        e += d * d;
    }
    return 0.5 * params.springK * e;
}

double kinetic_energy(const Eigen::VectorXd& p, const ModelParams& params) {
    return p.squaredNorm() / (2.0 * params.massM);
}

double total_energy(const LatticeState& state, const SiteDensityMatrix& rho, const ModelParams& params) {
    require_length(state.u.size(), params.nSites, "displacement vector");
    require_length(state.p.size(), params.nSites, "momentum vector");
    require_length(rho.size(), params.nSites, "density matrix");
    return kinetic_energy(state.p, params) + elastic_energy(state.u, params) +
           electronic_energy(build_hamiltonian(state.u, params), rho);
}

Eigen::VectorXd energy_gradient(const Eigen::VectorXd& u, const SiteDensityMatrix& rho,
                                const ModelParams& params) {
    require_length(u.size(), params.nSites, "displacement vector");
    require_length(rho.size(), params.nSites, "density matrix");
    const int n = params.nSites;
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
    for (int m = 1; m + 1 < n; ++m) {
        g[m] = 2.0 * params.alpha * (rho.rho(m, m - 1) - rho.rho(m, m + 1)).real() +
               params.springK * (2.0 * u[m] - u[m - 1] - u[m + 1]);
    }
    return g;
}

}  // namespace polydecoh
