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

#include "polydecoh/relax.hpp"

#include <cmath>
#include <string>

#include "polydecoh/errors.hpp"

namespace polydecoh {

int OccupationFunction::electron_count() const {
    int count = 0;
    for (auto v : up) count += v;
    for (auto v : down) count += v;
    return count;
}

Eigen::VectorXd OccupationFunction::spin_summed() const {
    Eigen::VectorXd f(size());
    for (int i = 0; i < size(); ++i) f[i] = static_cast<double>(up[i]) + static_cast<double>(down[i]);
    return f;
}

OccupationFunction ground_state_occupation(const ModelParams& params) {
    params.validate();
    const int n = params.nSites;
    OccupationFunction f{std::vector<std::uint8_t>(n, 0), std::vector<std::uint8_t>(n, 0)};
    for (int i = 0; i < n / 2; ++i) {
        f.up[i] = 1;
        f.down[i] = 1;
    }
    return f;
}

OccupationFunction excited_occupation(int level, const ModelParams& params) {
    params.validate();
    const int n = params.nSites;
    if (level < n / 2 + 1 || level > n) {
        throw InvalidInput("relax", "excitation level " + std::to_string(level) + " outside [" +
                                        std::to_string(n / 2 + 1) + ", " + std::to_string(n) + "]");
    }
    OccupationFunction f = ground_state_occupation(params);
    f.up[n / 2 - 1] = 0;
    f.up[level - 1] = 1;
    return f;
}

SiteDensityMatrix occupied_density(const EigenDecomposition& spectrum, const OccupationFunction& f) {
    return site_density_matrix(spectrum.vectors, f.spin_summed());
}

namespace {

// Re rho(n, n+1) for n = 0..N-2 from real orbitals and spin-summed occupations.
Eigen::VectorXd bond_orders(const EigenDecomposition& spectrum, const Eigen::VectorXd& occupation) {
    const Eigen::Index n = spectrum.vectors.rows();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n - 1);
    for (Eigen::Index e = 0; e < occupation.size(); ++e) {
        if (occupation[e] == 0.0) continue;
        const auto v = spectrum.vectors.col(e);
        b += occupation[e] * v.head(n - 1).cwiseProduct(v.tail(n - 1));
    }
    return b;
}

// Solves 2x_m - x_{m-1} - x_{m+1} = rhs_m for interior m with x_0 = x_{N-1} = 0.
Eigen::VectorXd solve_clamped_laplacian(const Eigen::VectorXd& rhs) {
    const Eigen::Index n = rhs.size();
    const Eigen::Index m = n - 2;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    if (m <= 0) return x;
    Eigen::VectorXd cprime(m);
    Eigen::VectorXd dprime(m);
    cprime[0] = -0.5;
    dprime[0] = rhs[1] / 2.0;
    for (Eigen::Index i = 1; i < m; ++i) {
        const double denom = 2.0 + cprime[i - 1];
        cprime[i] = -1.0 / denom;
        dprime[i] = (rhs[i + 1] + dprime[i - 1]) / denom;
    }
    x[m] = dprime[m - 1];
    for (Eigen::Index i = m - 2; i >= 0; --i) {
        x[i + 1] = dprime[i] - cprime[i] * x[i + 2];
    }
    return x;
}

}  // namespace

RelaxedGeometry optimize_geometry(const OccupationFunction& f, const ModelParams& params,
                                  const RelaxOptions& opts, const Eigen::VectorXd& initialGuess) {
    params.validate();
    const int n = params.nSites;
    if (f.size() != n || static_cast<int>(f.down.size()) != n) {
        throw InvalidInput("relax", "occupation function does not match the chain length");
    }
    if (f.electron_count() != n) {
        throw InvalidInput("relax", "occupation must hold N electrons for a neutral chain");
    }
    if (!(opts.tol > 0.0) || opts.maxIter < 1 || !(opts.mixing > 0.0 && opts.mixing <= 1.0)) {
        throw InvalidInput("relax", "invalid relaxation options");
    }

    Eigen::VectorXd u = initialGuess.size() == 0 ? Eigen::VectorXd::Zero(n) : initialGuess;
    if (u.size() != n) throw InvalidInput("relax", "initial guess has the wrong length");
    u[0] = 0.0;
    u[n - 1] = 0.0;

    const Eigen::VectorXd occupation = f.spin_summed();
    const double coupling = 2.0 * params.alpha / params.springK;
    std::vector<double> history;
    RelaxedGeometry out;
    bool converged = false;
    for (int iter = 1; iter <= opts.maxIter; ++iter) {
        const EigenDecomposition spectrum = eig_tridiagonal(build_hamiltonian(u, params));
        const Eigen::VectorXd b = bond_orders(spectrum, occupation);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
        for (int m = 1; m + 1 < n; ++m) rhs[m] = -coupling * (b[m - 1] - b[m]);
        const Eigen::VectorXd target = solve_clamped_laplacian(rhs);
        const Eigen::VectorXd du = opts.mixing * (target - u);
        u += du;
        const double residual = du.cwiseAbs().maxCoeff();
        history.push_back(residual);
        if (!std::isfinite(residual)) {
            throw NumericFailure("relax", "non-finite displacement at sweep " + std::to_string(iter));
        }
        if (residual < opts.tol) {
            out.iterations = iter;
            out.residual = residual;
            converged = true;
            break;
        }
    }
    if (!converged) {
        const std::string what = "geometry optimization did not converge in " + std::to_string(opts.maxIter) +
                                 " sweeps (last residual " + std::to_string(history.back()) + " A)";
        throw NonConvergence("relax", what, std::move(history));
    }
    out.u0 = u;
    out.spectrum = eig_tridiagonal(build_hamiltonian(u, params));
    const SiteDensityMatrix rho = occupied_density(out.spectrum, f);
    out.electronicEnergy = electronic_energy(build_hamiltonian(u, params), rho);
    out.energy = out.electronicEnergy + elastic_energy(u, params);
    return out;
}

}  // namespace polydecoh
