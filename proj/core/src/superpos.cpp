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

#include "polydecoh/superpos.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>

#include "polydecoh/errors.hpp"

namespace polydecoh {

std::string to_string(SuperpositionKind kind) {
    switch (kind) {
    case SuperpositionKind::GroundExcited:
        return "ground-excited";
    case SuperpositionKind::PairGroundGeometry:
        return "pair-ground";
    case SuperpositionKind::PairExcitedGeometry:
        return "pair-excited";
    }
    return "unknown";
}

SuperpositionKind parse_superposition_kind(const std::string& text) {
    std::string t = text;
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "ground-excited" || t == "groundexcited") return SuperpositionKind::GroundExcited;
    if (t == "pair-ground" || t == "pairgroundgeometry") return SuperpositionKind::PairGroundGeometry;
    if (t == "pair-excited" || t == "pairexcitedgeometry") return SuperpositionKind::PairExcitedGeometry;
    throw InvalidInput("superpos", "unknown superposition kind '" + text + "'");
}

NuclearSurface SuperpositionSpec::nuclear_prep() const {
    return kind == SuperpositionKind::PairExcitedGeometry ? NuclearSurface::Excited : NuclearSurface::Ground;
}

void SuperpositionSpec::validate(const ModelParams& params) const {
    params.validate();
    if (kind == SuperpositionKind::GroundExcited) return;
    const int n = params.nSites;
    if (level < n / 2 + 1 || level > n - 1) {
        throw InvalidInput("superpos", "level " + std::to_string(level) + " outside [" + std::to_string(n / 2 + 1) +
                                           ", " + std::to_string(n - 1) + "] for " + to_string(kind));
    }
}

OccupationFunction SuperpositionSpec::preparation_occupation(const ModelParams& params) const {
    validate(params);
    return nuclear_prep() == NuclearSurface::Excited ? excited_occupation(level, params)
                                                     : ground_state_occupation(params);
}

std::vector<int> SuperpositionSpec::default_watched_levels(const ModelParams& params) const {
    if (kind == SuperpositionKind::GroundExcited) return {params.nSites / 2 + 1};
    return {level, level + 1};
}

OccupationMatrix diagonal_occupation(const OccupationFunction& f) {
    const int n = f.size();
    OccupationMatrix g{Eigen::MatrixXcd::Zero(n, n), Eigen::MatrixXcd::Zero(n, n)};
    for (int e = 0; e < n; ++e) {
        g.up(e, e) = static_cast<double>(f.up[e]);
        g.down(e, e) = static_cast<double>(f.down[e]);
    }
    return g;
}

OccupationMatrix build_superposition(const SuperpositionSpec& spec, const ModelParams& params) {
    spec.validate(params);
    const int n = params.nSites;
    const int homo = n / 2 - 1;  // 0-based
    OccupationMatrix g = diagonal_occupation(ground_state_occupation(params));
    int a = 0;
    int b = 0;
    if (spec.kind == SuperpositionKind::GroundExcited) {
        a = homo;
        b = homo + 1;
    } else {
        g.up(homo, homo) = 0.0;
        a = spec.level - 1;
        b = spec.level;
    }
    g.up(a, a) = 0.5;
    g.up(b, b) = 0.5;
    g.up(a, b) = 0.5;
    g.up(b, a) = 0.5;
    return g;
}

namespace fock {

ManyBodyState::ManyBodyState(int nLevels) : levels_(nLevels) {
    if (nLevels < 1 || nLevels > kMaxSites) {
        throw InvalidInput("superpos", "Fock-space oracle supports at most " + std::to_string(kMaxSites) + " sites");
    }
}

void ManyBodyState::add(std::uint64_t mask, Complex amplitude) {
    if (amplitude == Complex(0.0)) return;
    amps_[mask] += amplitude;
}

double ManyBodyState::norm() const {
    double s = 0.0;
    for (const auto& [mask, a] : amps_) s += std::norm(a);
    return std::sqrt(s);
}

namespace {

// Applies c_mode (create=false) or c^dag_mode (create=true). Returns false
// when the result vanishes; otherwise updates mask and sign.
bool apply(std::uint64_t& mask, int mode, bool create, double& sign) {
    const std::uint64_t bit = std::uint64_t{1} << mode;
    const bool occupied = (mask & bit) != 0;
    if (occupied == create) return false;
    if (std::popcount(mask & (bit - 1)) % 2 != 0) sign = -sign;
    mask ^= bit;
    return true;
}

}  // namespace

ManyBodyState ManyBodyState::excite(int toLevel0, int fromLevel0, int spin) const {
    ManyBodyState out(levels_);
    const int to = mode(toLevel0, spin, levels_);
    const int from = mode(fromLevel0, spin, levels_);
    for (const auto& [mask, a] : amps_) {
        std::uint64_t m = mask;
        double sign = 1.0;
        if (!apply(m, from, false, sign)) continue;
        if (!apply(m, to, true, sign)) continue;
        out.add(m, sign * a);
    }
    return out;
}

ManyBodyState operator+(const ManyBodyState& a, const ManyBodyState& b) {
    if (a.levels_ != b.levels_) throw InvalidInput("superpos", "adding states of different size");
    ManyBodyState out = a;
    for (const auto& [mask, amp] : b.amps_) out.add(mask, amp);
    return out;
}

ManyBodyState operator*(Complex c, const ManyBodyState& a) {
    ManyBodyState out(a.levels_);
    for (const auto& [mask, amp] : a.amps_) out.add(mask, c * amp);
    return out;
}

ManyBodyState slater_determinant(const OccupationFunction& f) {
    const int n = f.size();
    ManyBodyState state(n);
    std::uint64_t mask = 0;
    for (int e = 0; e < n; ++e) {
        if (f.up[e] != 0) mask |= std::uint64_t{1} << ManyBodyState::mode(e, 0, n);
        if (f.down[e] != 0) mask |= std::uint64_t{1} << ManyBodyState::mode(e, 1, n);
    }
    state.add(mask, 1.0);
    return state;
}

ManyBodyState explicit_superposition(const SuperpositionSpec& spec, int nSites, Complex w0, Complex w1) {
    ModelParams params;
    params.nSites = nSites;
    spec.validate(params);
    if (nSites > kMaxSites) {
        throw InvalidInput("superpos", "Fock-space oracle supports at most " + std::to_string(kMaxSites) + " sites");
    }
    const int homo = nSites / 2 - 1;
    const ManyBodyState ground = slater_determinant(ground_state_occupation(params));
    if (spec.kind == SuperpositionKind::GroundExcited) {
        return w0 * ground + w1 * ground.excite(homo + 1, homo, 0);
    }
    const int i = spec.level - 1;
    return w0 * ground.excite(i, homo, 0) + w1 * ground.excite(i + 1, homo, 0);
}

OccupationMatrix fock_oracle_1rdm(const ManyBodyState& state) {
    const int n = state.levels();
    OccupationMatrix g{Eigen::MatrixXcd::Zero(n, n), Eigen::MatrixXcd::Zero(n, n)};
    for (int spin = 0; spin < 2; ++spin) {
        Eigen::MatrixXcd& target = spin == 0 ? g.up : g.down;
        for (int e = 0; e < n; ++e) {
            for (int ep = 0; ep < n; ++ep) {
                const ManyBodyState moved = state.excite(e, ep, spin);
                Complex sum = 0.0;
                for (const auto& [mask, amp] : moved.amplitudes()) {
                    const auto it = state.amplitudes().find(mask);
                    if (it != state.amplitudes().end()) sum += std::conj(it->second) * amp;
                }
                target(e, ep) = sum;
            }
        }
    }
    return g;
}

}  // namespace fock

}  // namespace polydecoh
