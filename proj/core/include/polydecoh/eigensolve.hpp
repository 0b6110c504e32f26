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

#include <span>

#include <Eigen/Dense>

#include "polydecoh/model.hpp"

namespace polydecoh {

/// Ascending eigenvalues with orthonormal column eigenvectors. The first
/// component of each eigenvector that is not negligible is positive.
struct EigenDecomposition {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;

    int size() const { return static_cast<int>(values.size()); }
};

/// Full spectrum of the single-particle Hamiltonian by implicit-shift QL.
EigenDecomposition eig_tridiagonal(const SingleParticleHamiltonian& h);

/// General real symmetric tridiagonal matrix: `diagonal` has n entries,
/// `offDiagonal` n-1.
EigenDecomposition eig_tridiagonal(std::span<const double> diagonal, std::span<const double> offDiagonal);

/// Dense real symmetric matrix: Householder reduction to tridiagonal form
/// followed by implicit QL. Throws InvalidInput when the input is not
/// symmetric within 1e-10 (relative to its largest entry).
EigenDecomposition eig_symmetric(const Eigen::MatrixXd& a);

}  // namespace polydecoh
