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
#include <random>

#include <Eigen/Dense>

#include "polydecoh/model.hpp"
#include "polydecoh/phonons.hpp"

namespace polydecoh {

/// Seed of the private random stream of one trajectory. Streams for distinct
/// indices are decorrelated by SplitMix64 finalization, so trajectories can
/// be sampled in any order.
std::uint64_t trajectory_seed(std::uint64_t masterSeed, std::uint64_t trajectoryIndex);

/// Standard normal deviates from a 64-bit Mersenne Twister via the polar-free
/// Box-Muller transform. Both the engine and the transform are fully
/// specified, so streams are identical across platforms and standard
/// libraries (unlike std::normal_distribution).
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}
    double next();

private:
    double uniform_open_closed();  // (0, 1]

    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool hasCached_ = false;
};

struct SampledInitialCondition {
    LatticeState state;
    std::int64_t trajectoryIndex = 0;
    std::uint64_t seed = 0;
    Eigen::VectorXd Q;  ///< sampled normal coordinates (A)
    Eigen::VectorXd P;  ///< sampled normal momenta (eV fs/A)
};

/// Draws Q_j ~ N(0, hbar/(2 M omega_j)) and P_j ~ N(0, hbar M omega_j / 2)
/// and maps them onto interior sites around the relaxed geometry.
/// `zeroVariance` skips the draws (Q = P = 0) for degenerate ensembles.
SampledInitialCondition sample_initial_condition(const NormalModeBasis& modes, const ModelParams& params,
                                                 std::uint64_t masterSeed, std::int64_t trajectoryIndex,
                                                 bool zeroVariance = false);

/// Classical energy of a sampled condition measured from the minimum in the
/// harmonic approximation: sum p^2/2M + 1/2 eta^T F eta, eta = u - u0.
double harmonic_energy(const SampledInitialCondition& sample, const NormalModeBasis& modes,
                       const ModelParams& params);

}  // namespace polydecoh
