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

#include "polydecoh/phonons.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "polydecoh/eigensolve.hpp"
#include "polydecoh/errors.hpp"

namespace polydecoh {

namespace {

constexpr double kDegenerateGap = 1e-9;

// V^n(e, e') for every interior site n (0-based 1..N-2), stored at index n-1.
// Amplitudes outside the chain are zero.
void coupling_vector(const Eigen::MatrixXd& psi, int e, int ep, Eigen::VectorXd& out) {
    const int n = static_cast<int>(psi.rows());
    const auto amp = [&](int site, int level) { return (site < 0 || site >= n) ? 0.0 : psi(site, level); };
    for (int site = 1; site + 1 < n; ++site) {
        out[site - 1] = amp(site, e) * (amp(site - 1, ep) - amp(site + 1, ep)) +
                        amp(site, ep) * (amp(site - 1, e) - amp(site + 1, e));
    }
}

}  // namespace

Eigen::MatrixXd build_hessian(const RelaxedGeometry& relaxed, const OccupationFunction& f,
                              const ModelParams& params) {
    params.validate();
    const int n = params.nSites;
    const int interior = n - 2;
    if (relaxed.u0.size() != n || relaxed.spectrum.size() != n || f.size() != n) {
        throw InvalidInput("phonons", "relaxed geometry, occupation and chain length disagree");
    }
    const Eigen::VectorXd& eps = relaxed.spectrum.values;
    const Eigen::MatrixXd& psi = relaxed.spectrum.vectors;

    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(interior, interior);
    Eigen::VectorXd v(interior);
    const std::vector<std::uint8_t>* spins[] = {&f.up, &f.down};
    for (const auto* occ : spins) {
        for (int ep = 0; ep < n; ++ep) {
            if ((*occ)[ep] == 0) continue;
            for (int e = 0; e < n; ++e) {
                if ((*occ)[e] != 0) continue;
                const double gap = eps[ep] - eps[e];
                if (std::abs(gap) < kDegenerateGap) {
                    throw SingularityError("occupied level " + std::to_string(ep + 1) + " and empty level " +
                                               std::to_string(e + 1) + " are degenerate",
                                           ep + 1, e + 1);
                }
                coupling_vector(psi, e, ep, v);
                hess.noalias() += (2.0 * params.alpha * params.alpha / gap) * (v * v.transpose());
            }
        }
    }
    for (int i = 0; i < interior; ++i) {
        hess(i, i) += 2.0 * params.springK;
        if (i + 1 < interior) {
            hess(i, i + 1) -= params.springK;
            hess(i + 1, i) -= params.springK;
        }
    }
    return 0.5 * (hess + hess.transpose());
}

NormalModeBasis normal_modes(const Eigen::MatrixXd& hessian, const RelaxedGeometry& relaxed,
                             const ModelParams& params) {
    params.validate();
    if (hessian.rows() != params.nSites - 2) {
        throw InvalidInput("phonons", "Hessian must cover the N-2 interior sites");
    }
    const EigenDecomposition eig = eig_symmetric(hessian);
    std::vector<int> unstable;
    for (int j = 0; j < eig.size(); ++j) {
        if (!(eig.values[j] > 0.0)) unstable.push_back(j + 1);
    }
    if (!unstable.empty()) {
        std::string list;
        for (int j : unstable) list += (list.empty() ? "" : ", ") + std::to_string(j);
        throw UnstableGeometry("non-positive Hessian eigenvalues for modes " + list, unstable);
    }
    NormalModeBasis out;
    out.eigenvalues = eig.values;
    out.frequencies = (eig.values / params.massM).cwiseSqrt();
    out.modes = eig.vectors;
    out.zeroPointEnergy = 0.5 * params.hbar * out.frequencies.sum();
    out.baseGeometry = relaxed;
    return out;
}

double participation_ratio(const Eigen::VectorXd& mode) {
    const double sum4 = mode.array().pow(4).sum();
    return sum4 > 0.0 ? mode.squaredNorm() * mode.squaredNorm() / sum4 : 0.0;
}

}  // namespace polydecoh
