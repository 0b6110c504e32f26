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

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "polydecoh/eigensolve.hpp"
#include "polydecoh/model.hpp"
#include "polydecoh/wigner.hpp"

namespace polydecoh {

/// Basis in which level populations are measured at t > 0.
enum class PopulationBasis {
    Instantaneous,  ///< eigenorbitals of H_elec(u(t))
    Initial,        ///< eigenorbitals of H_elec(u(0)), fixed in time
};

/// Lattice plus the propagated orbitals. Column c of `orbitals` is
/// <n|e(t)> for the 0-based level `activeLevels[c]`; levels that carry no
/// occupation never influence the dynamics and may be left out.
struct TrajectoryState {
    LatticeState lattice;
    OrbitalMatrix orbitals;
    std::vector<int> activeLevels;
    double time = 0.0;
};

/// Time derivative of a TrajectoryState (same layout).
struct StateDerivative {
    Eigen::VectorXd du;
    Eigen::VectorXd dp;
    Eigen::MatrixXcd dorbitals;
};

struct RunOptions {
    double dt = 0.02;         ///< fs
    double tFinal = 300.0;    ///< fs
    int recordStride = 25;    ///< steps between records (0.5 fs at the default dt)
    std::vector<int> watchedLevels;  ///< 1-based
    PopulationBasis basis = PopulationBasis::Instantaneous;
    bool propagateAllOrbitals = false;  ///< include unoccupied levels in the state

    int step_count() const;
    void validate(int nSites) const;
};

struct TrajectoryRecord {
    std::vector<double> times;         ///< fs
    std::vector<double> polarization;  ///< |e| A
    std::vector<std::vector<double>> levelPopulations;  ///< [watched level][record]
    std::vector<double> totalEnergy;   ///< eV
    double maxGramDeviation = 0.0;     ///< max |<e|e'> - delta| over the records
    double maxTraceDeviation = 0.0;    ///< max |Tr rho(t) - Tr rho(0)|
};

/// Levels (0-based) with any non-zero entry of gamma in either spin.
std::vector<int> active_levels(const OccupationMatrix& gamma);

/// Gamma restricted to the given levels.
OccupationMatrix restrict_occupation(const OccupationMatrix& gamma, const std::vector<int>& levels);

/// Orbitals at t = 0 from diagonalizing H_elec at the lattice geometry.
TrajectoryState initial_trajectory_state(const LatticeState& lattice, const OccupationMatrix& gamma,
                                         const ModelParams& params, bool allOrbitals = false);

/// Equations of motion: u' = p/M, p' = -K(2u_n - u_{n+1} - u_{n-1}) +
/// 2 alpha Re{rho(n,n+1) - rho(n,n-1)} on interior sites and
/// i hbar <n|e>' = h_n <n+1|e> + h_{n-1} <n-1|e>. End derivatives are zero.
/// `gamma` is the full N x N occupation matrix.
StateDerivative derivative(const TrajectoryState& state, const OccupationMatrix& gamma, const ModelParams& params);

/// Spin-summed site density matrix of a trajectory state (N x N).
SiteDensityMatrix state_density(const TrajectoryState& state, const OccupationMatrix& gamma);

/// mu = sum_n (n a + u_n)(1 - rho(n,n)), n 1-based, in |e| A.
double compute_polarization(const LatticeState& lattice, const SiteDensityMatrix& rho, const ModelParams& params);

/// Spin-summed populations of the watched (1-based) levels of `basis`
/// (columns are orthonormal real orbitals), p_k = psi_k^T rho psi_k.
std::vector<double> level_populations(const TrajectoryState& state, const OccupationMatrix& gamma,
                                      const std::vector<int>& watchedLevels, const Eigen::MatrixXd& basis);

/// Same, in the instantaneous eigenbasis of H_elec(u(t)).
std::vector<double> level_populations(const TrajectoryState& state, const OccupationMatrix& gamma,
                                      const std::vector<int>& watchedLevels, const ModelParams& params);

/// Fixed-step eighth-order Runge-Kutta integrator (Cooper-Verner, 11
/// stages) for the coupled lattice/orbital equations. Owns its stage
/// buffers so repeated steps do not allocate.
class Propagator {
public:
    Propagator(const ModelParams& params, const OccupationMatrix& gamma, std::vector<int> activeLevels);

    /// Advances `state` by `steps` steps of size dt. Throws NumericFailure
    /// on non-finite values.
    void advance(TrajectoryState& state, double dt, int steps = 1);

    /// Right-hand side of the equations of motion at `state`.
    StateDerivative derivative(const TrajectoryState& state);

    const ModelParams& params() const { return params_; }
    const OccupationMatrix& active_gamma() const { return gamma_; }

    // Observables evaluated directly on a state with this propagator's
    // active set.
    double energy(const TrajectoryState& state) const;
    double polarization(const TrajectoryState& state) const;
    double density_trace(const TrajectoryState& state) const;
    double gram_deviation(const TrajectoryState& state) const;
    std::vector<double> populations(const TrajectoryState& state, const std::vector<int>& watchedLevels,
                                    const Eigen::MatrixXd& basis) const;

private:
    struct Entry {
        int a;
        int b;
        Complex g;
    };

    void pack(const TrajectoryState& state, Eigen::VectorXd& y) const;
    void unpack(const Eigen::VectorXd& y, TrajectoryState& state) const;
    void rhs(const double* y, double* dy);
    void step(double dt);

    ModelParams params_;
    OccupationMatrix gamma_;
    std::vector<int> levels_;
    std::vector<Entry> entries_;
    int n_;
    int k_;
    Eigen::VectorXd y_;
    Eigen::VectorXd stage_;
    std::array<Eigen::VectorXd, 11> k_stages_;
    Eigen::VectorXd hopping_;
    Eigen::VectorXd bonds_;
};

/// One RK8 step; convenience wrapper around Propagator.
TrajectoryState rk8_step(const TrajectoryState& state, const OccupationMatrix& gamma, double dt,
                         const ModelParams& params);

/// Diagonalizes H_elec at the sampled geometry, propagates to tFinal and
/// records observables every recordStride steps (including t = 0).
TrajectoryRecord propagate_trajectory(const SampledInitialCondition& init, const OccupationMatrix& gamma,
                                      const ModelParams& params, const RunOptions& run);

}  // namespace polydecoh
