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

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "polydecoh/eigensolve.hpp"
#include "polydecoh/model.hpp"

namespace polydecoh {

/// Single-determinant occupation: per spin, per level (ascending energy,
/// 0-based storage) either 0 or 1.
struct OccupationFunction {
    std::vector<std::uint8_t> up;
    std::vector<std::uint8_t> down;

    int size() const { return static_cast<int>(up.size()); }
    int electron_count() const;
    /// Spin-summed occupation per level (0, 1 or 2).
    Eigen::VectorXd spin_summed() const;

    friend bool operator==(const OccupationFunction&, const OccupationFunction&) = default;
};

struct RelaxOptions {
    int maxIter = 5000;
    double tol = 1e-10;     ///< max |delta u| at exit (A)
    double mixing = 0.5;    ///< linear mixing between sweeps
};

struct RelaxedGeometry {
    Eigen::VectorXd u0;
    double electronicEnergy = 0.0;  ///< Tr(h rho) at u0 (eV)
    double energy = 0.0;            ///< electronic + elastic (eV)
    int iterations = 0;
    double residual = 0.0;          ///< max |delta u| of the final sweep (A)
    EigenDecomposition spectrum;    ///< eigen-decomposition of H_elec(u0)
};

/// Lowest N/2 levels occupied in both spins.
OccupationFunction ground_state_occupation(const ModelParams& params);

/// Ground occupation with the spin-up HOMO electron promoted to `level`
/// (1-based, N/2+1 <= level <= N).
OccupationFunction excited_occupation(int level, const ModelParams& params);

/// Spin-summed site density matrix of the occupied eigenorbitals.
SiteDensityMatrix occupied_density(const EigenDecomposition& spectrum, const OccupationFunction& f);

/// Self-consistent minimum-energy geometry for a fixed level occupation.
/// Each sweep diagonalizes H_elec(u), rebuilds rho from the occupied
/// orbitals, solves the clamped elastic equations
///   2u_m - u_{m+1} - u_{m-1} = -(2 alpha / K) Re{rho(m,m-1) - rho(m,m+1)}
/// exactly and mixes the result into u. Starts from `initialGuess` when it
/// is non-empty, otherwise from the undistorted chain.
RelaxedGeometry optimize_geometry(const OccupationFunction& f, const ModelParams& params,
                                  const RelaxOptions& opts = {},
                                  const Eigen::VectorXd& initialGuess = Eigen::VectorXd());

}  // namespace polydecoh
