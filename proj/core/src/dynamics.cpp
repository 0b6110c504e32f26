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

#include "polydecoh/dynamics.hpp"

#include <cmath>
#include <string>

#include "polydecoh/errors.hpp"

namespace polydecoh {

namespace {

// Cooper-Verner eighth-order explicit Runge-Kutta tableau (11 stages).
struct Tableau {
    struct Term {
        int j;
        double a;
    };
    std::array<std::vector<Term>, 11> rows;
    std::array<double, 11> b{};

    Tableau() {
        const double s = std::sqrt(21.0);
        rows[1] = {{0, 1.0 / 2.0}};
        rows[2] = {{0, 1.0 / 4.0}, {1, 1.0 / 4.0}};
        rows[3] = {{0, 1.0 / 7.0}, {1, (-7.0 - 3.0 * s) / 98.0}, {2, (21.0 + 5.0 * s) / 49.0}};
        rows[4] = {{0, (11.0 + s) / 84.0}, {2, (18.0 + 4.0 * s) / 63.0}, {3, (21.0 - s) / 252.0}};
        rows[5] = {{0, (5.0 + s) / 48.0},
                   {2, (9.0 + s) / 36.0},
                   {3, (-231.0 + 14.0 * s) / 360.0},
                   {4, (63.0 - 7.0 * s) / 80.0}};
        rows[6] = {{0, (10.0 - s) / 42.0},
                   {2, (-432.0 + 92.0 * s) / 315.0},
                   {3, (633.0 - 145.0 * s) / 90.0},
                   {4, (-504.0 + 115.0 * s) / 70.0},
                   {5, (63.0 - 13.0 * s) / 35.0}};
        rows[7] = {{0, 1.0 / 14.0}, {4, (14.0 - 3.0 * s) / 126.0}, {5, (13.0 - 3.0 * s) / 63.0}, {6, 1.0 / 9.0}};
        rows[8] = {{0, 1.0 / 32.0},
                   {4, (91.0 - 21.0 * s) / 576.0},
                   {5, 11.0 / 72.0},
                   {6, (-385.0 - 75.0 * s) / 1152.0},
                   {7, (63.0 + 13.0 * s) / 128.0}};
        rows[9] = {{0, 1.0 / 14.0},
                   {4, 1.0 / 9.0},
                   {5, (-733.0 - 147.0 * s) / 2205.0},
                   {6, (515.0 + 111.0 * s) / 504.0},
                   {7, (-51.0 - 11.0 * s) / 56.0},
                   {8, (132.0 + 28.0 * s) / 245.0}};
        rows[10] = {{4, (-42.0 + 7.0 * s) / 18.0},
                    {5, (-18.0 + 28.0 * s) / 45.0},
                    {6, (-273.0 - 53.0 * s) / 72.0},
                    {7, (301.0 + 53.0 * s) / 72.0},
                    {8, (28.0 - 28.0 * s) / 45.0},
                    {9, (49.0 - 7.0 * s) / 18.0}};
        b = {1.0 / 20.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 49.0 / 180.0, 16.0 / 45.0, 49.0 / 180.0, 1.0 / 20.0};
    }
};

const Tableau& tableau() {
    static const Tableau t;
    return t;
}

inline double re_g_conj_x_y(Complex g, Complex x, Complex y) {
    const double zr = x.real() * y.real() + x.imag() * y.imag();
    const double zi = x.real() * y.imag() - x.imag() * y.real();
    return g.real() * zr - g.imag() * zi;
}

}  // namespace

int RunOptions::step_count() const { return static_cast<int>(std::llround(tFinal / dt)); }

void RunOptions::validate(int nSites) const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("dynamics", "dt must be positive");
    if (!(tFinal > 0.0) || !std::isfinite(tFinal)) throw InvalidInput("dynamics", "tFinal must be positive");
    if (recordStride < 1) throw InvalidInput("dynamics", "recordStride must be >= 1");
    if (std::abs(step_count() * dt - tFinal) > 1e-9 * tFinal) {
        throw InvalidInput("dynamics", "tFinal must be an integer multiple of dt");
    }
    for (int level : watchedLevels) {
        if (level < 1 || level > nSites) {
            throw InvalidInput("dynamics", "watched level " + std::to_string(level) + " out of range");
        }
    }
}

std::vector<int> active_levels(const OccupationMatrix& gamma) {
    std::vector<int> levels;
    for (int e = 0; e < gamma.size(); ++e) {
        if (gamma.up.row(e).cwiseAbs().maxCoeff() > 0.0 || gamma.down.row(e).cwiseAbs().maxCoeff() > 0.0 ||
            gamma.up.col(e).cwiseAbs().maxCoeff() > 0.0 || gamma.down.col(e).cwiseAbs().maxCoeff() > 0.0) {
            levels.push_back(e);
        }
    }
    return levels;
}

OccupationMatrix restrict_occupation(const OccupationMatrix& gamma, const std::vector<int>& levels) {
    const int k = static_cast<int>(levels.size());
    OccupationMatrix out{Eigen::MatrixXcd(k, k), Eigen::MatrixXcd(k, k)};
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            out.up(i, j) = gamma.up(levels[i], levels[j]);
            out.down(i, j) = gamma.down(levels[i], levels[j]);
        }
    }
    return out;
}

TrajectoryState initial_trajectory_state(const LatticeState& lattice, const OccupationMatrix& gamma,
                                         const ModelParams& params, bool allOrbitals) {
    params.validate();
    if (lattice.u.size() != params.nSites || lattice.p.size() != params.nSites || gamma.size() != params.nSites) {
        throw InvalidInput("dynamics", "lattice, occupation and chain length disagree");
    }
    TrajectoryState state;
    state.lattice = lattice;
    if (allOrbitals) {
        for (int e = 0; e < params.nSites; ++e) state.activeLevels.push_back(e);
    } else {
        state.activeLevels = active_levels(gamma);
    }
    const EigenDecomposition eig = eig_tridiagonal(build_hamiltonian(lattice.u, params));
    state.orbitals = OrbitalMatrix(params.nSites, static_cast<Eigen::Index>(state.activeLevels.size()));
    for (std::size_t c = 0; c < state.activeLevels.size(); ++c) {
        state.orbitals.col(static_cast<Eigen::Index>(c)) = eig.vectors.col(state.activeLevels[c]).cast<Complex>();
    }
    return state;
}

Propagator::Propagator(const ModelParams& params, const OccupationMatrix& gamma, std::vector<int> activeLevels)
    : params_(params), levels_(std::move(activeLevels)), n_(params.nSites), k_(static_cast<int>(levels_.size())) {
    params_.validate();
    if (gamma.size() != n_) throw InvalidInput("dynamics", "occupation matrix must be N x N");
    for (int level : levels_) {
        if (level < 0 || level >= n_) throw InvalidInput("dynamics", "active level out of range");
    }
    gamma_ = restrict_occupation(gamma, levels_);
    if (std::abs(gamma_.trace() - gamma.trace()) > 1e-12) {
        throw InvalidInput("dynamics", "active levels do not cover the occupied space");
    }
    const Eigen::MatrixXcd g = gamma_.spin_summed();
    for (int a = 0; a < k_; ++a) {
        for (int b = 0; b < k_; ++b) {
            if (g(a, b) != Complex(0.0)) entries_.push_back({a, b, g(a, b)});
        }
    }
    const Eigen::Index size = 2 * n_ + 2 * static_cast<Eigen::Index>(n_) * k_;
    y_.resize(size);
    stage_.resize(size);
    for (auto& k : k_stages_) k.resize(size);
    hopping_.resize(n_ - 1);
    bonds_.resize(n_ - 1);
}

void Propagator::pack(const TrajectoryState& state, Eigen::VectorXd& y) const {
    if (state.lattice.u.size() != n_ || state.orbitals.rows() != n_ || state.orbitals.cols() != k_ ||
        state.activeLevels != levels_) {
        throw InvalidInput("dynamics", "trajectory state does not match the propagator layout");
    }
    y.head(n_) = state.lattice.u;
    y.segment(n_, n_) = state.lattice.p;
    std::copy_n(reinterpret_cast<const double*>(state.orbitals.data()), 2 * n_ * k_, y.data() + 2 * n_);
}

void Propagator::unpack(const Eigen::VectorXd& y, TrajectoryState& state) const {
    state.lattice.u = y.head(n_);
    state.lattice.p = y.segment(n_, n_);
    std::copy_n(y.data() + 2 * n_, 2 * n_ * k_, reinterpret_cast<double*>(state.orbitals.data()));
}

void Propagator::rhs(const double* y, double* dy) {
    const int n = n_;
    const double* u = y;
    const double* p = y + n;
    const Complex* phi = reinterpret_cast<const Complex*>(y + 2 * n);
    double* du = dy;
    double* dp = dy + n;
    Complex* dphi = reinterpret_cast<Complex*>(dy + 2 * n);

    const double t0 = params_.t0;
    const double alpha = params_.alpha;
    const double springK = params_.springK;
    for (int i = 0; i + 1 < n; ++i) hopping_[i] = -t0 + alpha * (u[i + 1] - u[i]);

    bonds_.setZero();
    for (const Entry& e : entries_) {
        const Complex* pa = phi + static_cast<std::ptrdiff_t>(e.a) * n;
        const Complex* pb = phi + static_cast<std::ptrdiff_t>(e.b) * n;
        for (int i = 0; i + 1 < n; ++i) bonds_[i] += re_g_conj_x_y(e.g, pa[i], pb[i + 1]);
    }

    const double invM = 1.0 / params_.massM;
    du[0] = du[n - 1] = 0.0;
    dp[0] = dp[n - 1] = 0.0;
    for (int i = 1; i + 1 < n; ++i) {
        du[i] = p[i] * invM;
        dp[i] = -springK * (2.0 * u[i] - u[i + 1] - u[i - 1]) + 2.0 * alpha * (bonds_[i] - bonds_[i - 1]);
    }

    // -i/hbar (h psi)
    const double w = 1.0 / params_.hbar;
    for (int c = 0; c < k_; ++c) {
        const Complex* x = phi + static_cast<std::ptrdiff_t>(c) * n;
        Complex* dx = dphi + static_cast<std::ptrdiff_t>(c) * n;
        for (int i = 0; i < n; ++i) {
            Complex hx = 0.0;
            if (i + 1 < n) hx += hopping_[i] * x[i + 1];
            if (i > 0) hx += hopping_[i - 1] * x[i - 1];
            dx[i] = Complex(w * hx.imag(), -w * hx.real());
        }
    }
}

void Propagator::step(double dt) {
    const Tableau& tab = tableau();
    rhs(y_.data(), k_stages_[0].data());
    for (int s = 1; s < 11; ++s) {
        stage_ = y_;
        for (const auto& term : tab.rows[s]) stage_.noalias() += (dt * term.a) * k_stages_[term.j];
        rhs(stage_.data(), k_stages_[s].data());
    }
    for (int s = 0; s < 11; ++s) {
        if (tab.b[s] != 0.0) y_.noalias() += (dt * tab.b[s]) * k_stages_[s];
    }
    y_[0] = y_[n_ - 1] = 0.0;
    y_[n_] = y_[2 * n_ - 1] = 0.0;
}

void Propagator::advance(TrajectoryState& state, double dt, int steps) {
    if (!(dt > 0.0)) throw InvalidInput("dynamics", "dt must be positive");
    pack(state, y_);
    for (int s = 0; s < steps; ++s) {
        step(dt);
        if (!y_.allFinite()) {
            throw NumericFailure("dynamics",
                                 "non-finite state at t = " + std::to_string(state.time + (s + 1) * dt) + " fs");
        }
    }
    unpack(y_, state);
    state.time += steps * dt;
}

double Propagator::energy(const TrajectoryState& state) const {
    const Eigen::VectorXd& u = state.lattice.u;
    double e = kinetic_energy(state.lattice.p, params_) + elastic_energy(u, params_);
    for (const Entry& en : entries_) {
        const auto a = state.orbitals.col(en.a);
        const auto b = state.orbitals.col(en.b);
        for (int i = 0; i + 1 < n_; ++i) {
            const double h = -params_.t0 + params_.alpha * (u[i + 1] - u[i]);
            e += 2.0 * h * re_g_conj_x_y(en.g, a[i], b[i + 1]);
        }
    }
    return e;
}

double Propagator::polarization(const TrajectoryState& state) const {
    Eigen::VectorXd charge = Eigen::VectorXd::Ones(n_);
    for (const Entry& en : entries_) {
        const auto a = state.orbitals.col(en.a);
        const auto b = state.orbitals.col(en.b);
        for (int i = 0; i < n_; ++i) charge[i] -= re_g_conj_x_y(en.g, a[i], b[i]);
    }
    double mu = 0.0;
    for (int i = 0; i < n_; ++i) mu += ((i + 1) * params_.latticeA + state.lattice.u[i]) * charge[i];
    return mu;
}

double Propagator::density_trace(const TrajectoryState& state) const {
    double tr = 0.0;
    for (const Entry& en : entries_) {
        tr += re_g_conj_x_y(en.g, 1.0, state.orbitals.col(en.a).dot(state.orbitals.col(en.b)));
    }
    return tr;
}

double Propagator::gram_deviation(const TrajectoryState& state) const {
    const Eigen::MatrixXcd gram = state.orbitals.adjoint() * state.orbitals;
    return (gram - Eigen::MatrixXcd::Identity(k_, k_)).cwiseAbs().maxCoeff();
}

std::vector<double> Propagator::populations(const TrajectoryState& state, const std::vector<int>& watchedLevels,
                                            const Eigen::MatrixXd& basis) const {
    std::vector<double> out;
    out.reserve(watchedLevels.size());
    for (int level : watchedLevels) {
        if (level < 1 || level > basis.cols()) throw InvalidInput("dynamics", "watched level out of range");
        // A_c = psi^T phi_c; p = Re sum g conj(A_a) A_b
        const Eigen::VectorXcd amp = state.orbitals.transpose() * basis.col(level - 1).cast<Complex>();
        double pop = 0.0;
        for (const Entry& en : entries_) pop += re_g_conj_x_y(en.g, amp[en.a], amp[en.b]);
        out.push_back(pop);
    }
    return out;
}

StateDerivative Propagator::derivative(const TrajectoryState& state) {
    TrajectoryState out = state;
    pack(state, y_);
    rhs(y_.data(), stage_.data());
    unpack(stage_, out);
    return StateDerivative{out.lattice.u, out.lattice.p, out.orbitals};
}

StateDerivative derivative(const TrajectoryState& state, const OccupationMatrix& gamma, const ModelParams& params) {
    Propagator prop(params, gamma, state.activeLevels);
    return prop.derivative(state);
}

SiteDensityMatrix state_density(const TrajectoryState& state, const OccupationMatrix& gamma) {
    return site_density_matrix(state.orbitals, restrict_occupation(gamma, state.activeLevels));
}

double compute_polarization(const LatticeState& lattice, const SiteDensityMatrix& rho, const ModelParams& params) {
    if (lattice.u.size() != rho.size()) throw InvalidInput("dynamics", "lattice and density sizes disagree");
    double mu = 0.0;
    for (int i = 0; i < rho.size(); ++i) {
        mu += ((i + 1) * params.latticeA + lattice.u[i]) * (1.0 - rho.rho(i, i).real());
    }
    return mu;
}

std::vector<double> level_populations(const TrajectoryState& state, const OccupationMatrix& gamma,
                                      const std::vector<int>& watchedLevels, const Eigen::MatrixXd& basis) {
    const SiteDensityMatrix rho = state_density(state, gamma);
    std::vector<double> out;
    for (int level : watchedLevels) {
        if (level < 1 || level > basis.cols()) throw InvalidInput("dynamics", "watched level out of range");
        const Eigen::VectorXcd psi = basis.col(level - 1).cast<Complex>();
        out.push_back((psi.transpose() * rho.rho * psi).value().real());
    }
    return out;
}

std::vector<double> level_populations(const TrajectoryState& state, const OccupationMatrix& gamma,
                                      const std::vector<int>& watchedLevels, const ModelParams& params) {
    const EigenDecomposition eig = eig_tridiagonal(build_hamiltonian(state.lattice.u, params));
    return level_populations(state, gamma, watchedLevels, eig.vectors);
}

TrajectoryState rk8_step(const TrajectoryState& state, const OccupationMatrix& gamma, double dt,
                         const ModelParams& params) {
    Propagator prop(params, gamma, state.activeLevels);
    TrajectoryState out = state;
    prop.advance(out, dt, 1);
    return out;
}

TrajectoryRecord propagate_trajectory(const SampledInitialCondition& init, const OccupationMatrix& gamma,
                                      const ModelParams& params, const RunOptions& run) {
    run.validate(params.nSites);
    TrajectoryState state = initial_trajectory_state(init.state, gamma, params, run.propagateAllOrbitals);
    Propagator prop(params, gamma, state.activeLevels);

    Eigen::MatrixXd fixedBasis;
    if (run.basis == PopulationBasis::Initial) {
        fixedBasis = eig_tridiagonal(build_hamiltonian(state.lattice.u, params)).vectors;
    }

    TrajectoryRecord rec;
    rec.levelPopulations.resize(run.watchedLevels.size());
    const double trace0 = prop.density_trace(state);
    const auto record = [&](int stepIndex) {
        rec.times.push_back(stepIndex * run.dt);
        rec.polarization.push_back(prop.polarization(state));
        rec.totalEnergy.push_back(prop.energy(state));
        if (!run.watchedLevels.empty()) {
            const std::vector<double> pops =
                run.basis == PopulationBasis::Initial
                    ? prop.populations(state, run.watchedLevels, fixedBasis)
                    : prop.populations(state, run.watchedLevels,
                                       eig_tridiagonal(build_hamiltonian(state.lattice.u, params)).vectors);
            for (std::size_t w = 0; w < pops.size(); ++w) rec.levelPopulations[w].push_back(pops[w]);
        }
        rec.maxGramDeviation = std::max(rec.maxGramDeviation, prop.gram_deviation(state));
        rec.maxTraceDeviation = std::max(rec.maxTraceDeviation, std::abs(prop.density_trace(state) - trace0));
    };

    record(0);
    const int total = run.step_count();
    for (int done = 0; done + run.recordStride <= total; done += run.recordStride) {
        prop.advance(state, run.dt, run.recordStride);
        record(done + run.recordStride);
    }
    return rec;
}

}  // namespace polydecoh
