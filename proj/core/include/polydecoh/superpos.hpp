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
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "polydecoh/model.hpp"
#include "polydecoh/relax.hpp"

namespace polydecoh {

enum class SuperpositionKind {
    GroundExcited,        ///< (|ground> + |HOMO->LUMO>)/sqrt2, lattice on the ground surface
    PairGroundGeometry,   ///< (|HOMO->i> + |HOMO->i+1>)/sqrt2, lattice on the ground surface
    PairExcitedGeometry,  ///< same electrons, lattice relaxed on the |HOMO->i> surface
};

enum class NuclearSurface { Ground, Excited };

std::string to_string(SuperpositionKind kind);
/// Accepts "ground-excited", "pair-ground", "pair-excited" (case-insensitive).
SuperpositionKind parse_superposition_kind(const std::string& text);

struct SuperpositionSpec {
    SuperpositionKind kind = SuperpositionKind::GroundExcited;
    int level = 0;  ///< 1-based level i for the pair kinds; unused for GroundExcited

    NuclearSurface nuclear_prep() const;
    /// Throws InvalidInput unless N/2+1 <= level <= N-1 for the pair kinds.
    void validate(const ModelParams& params) const;
    /// Determinant whose surface hosts the initial lattice distribution.
    OccupationFunction preparation_occupation(const ModelParams& params) const;
    /// Levels whose populations are tracked by default (1-based): the LUMO
    /// for GroundExcited, otherwise i and i+1.
    std::vector<int> default_watched_levels(const ModelParams& params) const;

    friend bool operator==(const SuperpositionSpec&, const SuperpositionSpec&) = default;
};

/// Initial per-spin occupation matrices, excitation in the spin-up channel.
OccupationMatrix build_superposition(const SuperpositionSpec& spec, const ModelParams& params);

/// Diagonal occupation matrix delta(e,e') f(e,s) of a single determinant.
OccupationMatrix diagonal_occupation(const OccupationFunction& f);

namespace fock {

inline constexpr int kMaxSites = 8;

/// Many-electron state over Slater determinants of N spatial levels and two
/// spins. Mode (level e, spin s) has index s*N + e with spin up = 0; a mask
/// bit set means the mode is occupied, and |mask> = c^dag_{j1} c^dag_{j2} ...
/// |vac> with j1 < j2 < ...
class ManyBodyState {
public:
    explicit ManyBodyState(int nLevels);

    int levels() const { return levels_; }
    const std::map<std::uint64_t, Complex>& amplitudes() const { return amps_; }
    void add(std::uint64_t mask, Complex amplitude);
    double norm() const;

    static int mode(int level0, int spin, int nLevels) { return spin * nLevels + level0; }

    /// c^dag_a c_b applied to this state; levels are 0-based.
    ManyBodyState excite(int toLevel0, int fromLevel0, int spin) const;

    friend ManyBodyState operator+(const ManyBodyState& a, const ManyBodyState& b);
    friend ManyBodyState operator*(Complex c, const ManyBodyState& a);

private:
    int levels_;
    std::map<std::uint64_t, Complex> amps_;
};

ManyBodyState slater_determinant(const OccupationFunction& f);

/// Explicit many-body state for a superposition class, N <= kMaxSites.
/// `weights` are the coefficients of the two components.
ManyBodyState explicit_superposition(const SuperpositionSpec& spec, int nSites, Complex w0 = std::numbers::sqrt2 / 2.0,
                                     Complex w1 = std::numbers::sqrt2 / 2.0);

/// Gamma^s(e, e') = <psi| c^dag_{e,s} c_{e',s} |psi> by direct operator
/// application. The state must be normalized.
OccupationMatrix fock_oracle_1rdm(const ManyBodyState& state);

}  // namespace fock

}  // namespace polydecoh
