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

#include "polydecoh/wigner.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "polydecoh/errors.hpp"

namespace polydecoh {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t trajectory_seed(std::uint64_t masterSeed, std::uint64_t trajectoryIndex) {
    return splitmix64(splitmix64(masterSeed) ^ splitmix64(trajectoryIndex + 0x632be59bd9b4e019ULL));
}

double GaussianStream::uniform_open_closed() {
    // 53 random mantissa bits mapped to (0, 1].
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double GaussianStream::next() {
    if (hasCached_) {
        hasCached_ = false;
        return cached_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_open_closed()));
    const double phi = 2.0 * std::numbers::pi * uniform_open_closed();
    cached_ = r * std::sin(phi);
    hasCached_ = true;
    return r * std::cos(phi);
}

SampledInitialCondition sample_initial_condition(const NormalModeBasis& modes, const ModelParams& params,
                                                 std::uint64_t masterSeed, std::int64_t trajectoryIndex,
                                                 bool zeroVariance) {
    const int n = params.nSites;
    const int count = modes.count();
    if (count != n - 2 || modes.baseGeometry.u0.size() != n) {
        throw InvalidInput("wigner", "normal-mode basis does not match the chain length");
    }
    for (int j = 0; j < count; ++j) {
        if (!(modes.frequencies[j] > 0.0)) {
            throw InvalidInput("wigner", "mode " + std::to_string(j + 1) + " has a non-positive frequency");
        }
    }

    SampledInitialCondition out;
    out.trajectoryIndex = trajectoryIndex;
    out.seed = trajectory_seed(masterSeed, static_cast<std::uint64_t>(trajectoryIndex));
    out.Q = Eigen::VectorXd::Zero(count);
    out.P = Eigen::VectorXd::Zero(count);
    if (!zeroVariance) {
        GaussianStream gauss(out.seed);
        for (int j = 0; j < count; ++j) {
            const double w = modes.frequencies[j];
            out.Q[j] = std::sqrt(params.hbar / (2.0 * params.massM * w)) * gauss.next();
            out.P[j] = std::sqrt(params.hbar * params.massM * w / 2.0) * gauss.next();
        }
    }

    out.state.u = modes.baseGeometry.u0;
    out.state.p = Eigen::VectorXd::Zero(n);
    out.state.u.segment(1, count) += modes.modes * out.Q;
    out.state.p.segment(1, count) = modes.modes * out.P;
    out.state.u[0] = out.state.u[n - 1] = 0.0;
    out.state.p[0] = out.state.p[n - 1] = 0.0;
    return out;
}

double harmonic_energy(const SampledInitialCondition& sample, const NormalModeBasis& modes,
                       const ModelParams& params) {
    const int count = modes.count();
    const Eigen::VectorXd eta = sample.state.u.segment(1, count) - modes.baseGeometry.u0.segment(1, count);
    const Eigen::VectorXd projected = modes.modes.transpose() * eta;
    const double potential = 0.5 * (modes.eigenvalues.array() * projected.array().square()).sum();
    return kinetic_energy(sample.state.p, params) + potential;
}

}  // namespace polydecoh
