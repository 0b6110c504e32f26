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

#pragma once

#include <complex>

#include <Eigen/Dense>

namespace polydecoh {

using Complex = std::complex<double>;

/// Parameters of the SSH chain. Units are eV, Angstrom and fs throughout.
struct ModelParams {
    double t0 = 2.5;           ///< hopping integral (eV)
    double alpha = 4.1;        ///< electron-lattice coupling (eV/A)
    double springK = 21.0;     ///< elastic constant (eV/A^2)
    double massM = 1349.14;    ///< CH-group mass (eV fs^2/A^2)
    double latticeA = 1.22;    ///< lattice constant (A)
    int nSites = 20;
    double hbar = 0.6582119569;  ///< eV fs

    /// Throws InvalidInput unless nSites is even and >= 4 and every constant
    /// except alpha is strictly positive. alpha may be zero (decoupled chain).
    void validate() const;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Site displacements u (A) and momenta p (eV fs/A). Sites 0 and N-1 are
/// clamped and always hold exact zeros.
struct LatticeState {
    Eigen::VectorXd u;
    Eigen::VectorXd p;

    static LatticeState at_rest(const Eigen::VectorXd& u);
    int size() const { return static_cast<int>(u.size()); }
};

/// Real symmetric tridiagonal matrix with zero diagonal. hopping[n] couples
/// sites n and n+1 (0-based).
struct SingleParticleHamiltonian {
    Eigen::VectorXd hopping;

    int size() const { return static_cast<int>(hopping.size()) + 1; }
    Eigen::MatrixXd dense() const;
};

/// Per-spin one-particle density matrix of the initial many-electron state,
/// expressed in the basis of the propagated orbitals:
/// up(e, e') = <c^dagger_{e,up} c_{e',up}>.
struct OccupationMatrix {
    Eigen::MatrixXcd up;
    Eigen::MatrixXcd down;

    int size() const { return static_cast<int>(up.rows()); }
    double trace() const { return (up.trace() + down.trace()).real(); }
    /// Spin-summed matrix; the orbitals are shared by both spin channels.
    Eigen::MatrixXcd spin_summed() const { return up + down; }
};

/// Column e holds the site amplitudes <n|e(t)>.
using OrbitalMatrix = Eigen::MatrixXcd;

/// Spin-summed site density matrix rho(n, m) = sum_s <c^dagger_{n,s} c_{m,s}>.
struct SiteDensityMatrix {
    Eigen::MatrixXcd rho;

    int size() const { return static_cast<int>(rho.rows()); }
    double trace() const { return rho.trace().real(); }
};

/// h[n] = -t0 + alpha (u[n+1] - u[n]).
SingleParticleHamiltonian build_hamiltonian(const Eigen::VectorXd& u, const ModelParams& params);

/// rho(n, m) = sum_s sum_{e,e'} conj(<n|e>) <m|e'> gamma_s(e, e'). The
/// orbital matrix may hold fewer columns than sites (an active subset), in
/// which case gamma must match the column count.
SiteDensityMatrix site_density_matrix(const OrbitalMatrix& orbitals, const OccupationMatrix& gamma);

/// Same contraction for real orbitals (eigenvectors) and a diagonal
/// spin-summed occupation.
SiteDensityMatrix site_density_matrix(const Eigen::MatrixXd& orbitals, const Eigen::VectorXd& occupation);

/// Tr(h rho) = sum_n 2 Re{h[n] rho(n+1, n)}.
double electronic_energy(const SingleParticleHamiltonian& h, const SiteDensityMatrix& rho);

double elastic_energy(const Eigen::VectorXd& u, const ModelParams& params);

double kinetic_energy(const Eigen::VectorXd& p, const ModelParams& params);

/// Kinetic + elastic + electronic energy of the chain (eV).
double total_energy(const LatticeState& state, const SiteDensityMatrix& rho, const ModelParams& params);

/// dE/du_m = 2 alpha Re{rho(m,m-1) - rho(m,m+1)} + K (2u_m - u_{m-1} - u_{m+1})
/// for the interior sites; the clamped end components are reported as zero.
Eigen::VectorXd energy_gradient(const Eigen::VectorXd& u, const SiteDensityMatrix& rho,
                                const ModelParams& params);

}  // namespace polydecoh
