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

#include <Eigen/Dense>

#include "polydecoh/model.hpp"
#include "polydecoh/relax.hpp"

namespace polydecoh {

/// Harmonic normal modes over the N-2 interior sites.
struct NormalModeBasis {
    Eigen::VectorXd frequencies;   ///< omega_j (1/fs), ascending
    Eigen::VectorXd eigenvalues;   ///< Hessian eigenvalues lambda_j (eV/A^2)
    Eigen::MatrixXd modes;         ///< (N-2)x(N-2), column j is mode j over interior sites
    double zeroPointEnergy = 0.0;  ///< sum_j hbar omega_j / 2 (eV)
    RelaxedGeometry baseGeometry;

    int count() const { return static_cast<int>(frequencies.size()); }
};

/// Hessian of the adiabatic energy around the relaxed geometry, restricted
/// to interior sites (eV/A^2). The electronic part is the second-order
/// perturbative response of the occupied determinant; pairs of an occupied
/// and an empty level closer than 1e-9 eV raise SingularityError.
Eigen::MatrixXd build_hessian(const RelaxedGeometry& relaxed, const OccupationFunction& f,
                              const ModelParams& params);

/// omega_j = sqrt(lambda_j / M). Throws UnstableGeometry if any lambda_j <= 0.
NormalModeBasis normal_modes(const Eigen::MatrixXd& hessian, const RelaxedGeometry& relaxed,
                             const ModelParams& params);

/// Participation ratio 1 / sum_n v_n^4 of a normalized mode (1 .. N-2).
double participation_ratio(const Eigen::VectorXd& mode);

}  // namespace polydecoh
