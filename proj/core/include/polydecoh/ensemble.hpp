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
#include <string>
#include <vector>

#include "polydecoh/dynamics.hpp"
#include "polydecoh/phonons.hpp"
#include "polydecoh/relax.hpp"
#include "polydecoh/superpos.hpp"

namespace polydecoh {

struct EnsembleOptions {
    int trajectoryCount = 1000;
    std::uint64_t masterSeed = 20120901;
    int workers = 1;
    /// Degenerate ensemble: every trajectory starts at the relaxed geometry
    /// with zero momenta.
    bool zeroVariance = false;
    RelaxOptions relax;
    /// Checkpoint file; empty disables checkpointing. An existing,
    /// compatible checkpoint is resumed.
    std::string checkpointPath;
    int checkpointEvery = 50;  ///< folded trajectories between checkpoint writes
    /// Stop after this many trajectories have been completed in this call
    /// (negative: run to completion). Used for staged runs.
    int stopAfter = -1;
};

/// Everything that is shared by all trajectories of an ensemble.
struct EnsemblePreparation {
    RelaxedGeometry groundGeometry;
    OccupationFunction nuclearOccupation;  ///< determinant hosting the lattice distribution
    NormalModeBasis modes;                 ///< around the nuclear-preparation geometry
    OccupationMatrix gamma;
};

EnsemblePreparation prepare_ensemble(const SuperpositionSpec& spec, const ModelParams& params,
                                     const RelaxOptions& relax = {});

struct EnsembleResult {
    std::vector<double> times;
    std::vector<double> meanPolarization;
    std::vector<double> stderrPolarization;
    std::vector<int> watchedLevels;                      ///< 1-based
    std::vector<std::vector<double>> meanPopulations;    ///< [watched level][record]
    std::vector<double> meanEnergy;
    int trajectoriesCompleted = 0;
    std::uint64_t masterSeed = 0;
    bool complete = false;
    double maxRelativeEnergyDrift = 0.0;
    double maxGramDeviation = 0.0;
};

/// Runs `options.trajectoryCount` trajectories (Wigner sample, diagonalize,
/// propagate) and folds their records in trajectory-index order with
/// compensated summation, so the result does not depend on the worker
/// count or on checkpoint interruptions.
EnsembleResult run_ensemble(const SuperpositionSpec& spec, const ModelParams& params, const RunOptions& run,
                            const EnsembleOptions& options);

/// Same with a precomputed preparation.
EnsembleResult run_ensemble(const EnsemblePreparation& prep, const ModelParams& params, const RunOptions& run,
                            const EnsembleOptions& options, const std::string& fingerprint);

/// Canonical description of everything that determines an ensemble result;
/// its hash guards checkpoint resumption.
std::string ensemble_fingerprint(const SuperpositionSpec& spec, const ModelParams& params, const RunOptions& run,
                                 const EnsembleOptions& options);

std::uint64_t fnv1a64(const std::string& text);

struct DecoherenceMetrics {
    double decoherenceTime = 0.0;  ///< fs
    bool decohered = false;
    std::vector<double> recurrenceTimes;    ///< times of envelope maxima, the initial one included
    std::vector<double> recurrencePeriods;  ///< spacings of successive maxima
    std::vector<double> envelopeSeries;     ///< on the input time grid
    double envelopeMax = 0.0;  ///< initial envelope maximum (first envelope peak)
    double noiseFloor = 0.0;

    int visible_recurrences() const { return static_cast<int>(recurrencePeriods.size()); }
    double median_period() const;
};

/// Envelope through the local maxima of |mu(t)|, recurrence maxima of that
/// envelope above the noise floor (3x the mean stderr over the last fifth of
/// the run) and the 1/e decoherence time.
DecoherenceMetrics extract_metrics(const std::vector<double>& times, const std::vector<double>& signal,
                                   const std::vector<double>& stderrSeries);

DecoherenceMetrics extract_metrics(const EnsembleResult& result);

}  // namespace polydecoh
