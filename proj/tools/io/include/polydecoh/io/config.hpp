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
#include <utility>
#include <vector>

#include "polydecoh/dynamics.hpp"
#include "polydecoh/ensemble.hpp"
#include "polydecoh/model.hpp"
#include "polydecoh/relax.hpp"
#include "polydecoh/superpos.hpp"

namespace polydecoh::io {

/// Everything a command needs, resolved from defaults, a config file and
/// command-line overrides (in that order).
struct RunConfig {
    ModelParams model;
    SuperpositionSpec superposition;
    int trajectoryCount = 1000;
    double dt = 0.02;
    double tFinal = 300.0;
    int recordStride = 25;
    std::uint64_t masterSeed = 20120901;
    int workers = 1;
    std::string outputPath = "polarization.csv";
    std::vector<int> watchedLevels;  ///< empty: the superposition's default levels
    PopulationBasis basis = PopulationBasis::Instantaneous;
    bool propagateAllOrbitals = false;
    bool zeroVariance = false;
    std::string checkpointPath;
    int checkpointEvery = 50;
    RelaxOptions relax;

    /// Throws ConfigError naming the offending key.
    void validate() const;

    RunOptions run_options() const;
    EnsembleOptions ensemble_options() const;
    std::vector<int> resolved_watched_levels() const;
};

bool operator==(const RunConfig& a, const RunConfig& b);

/// Keys are "section.name", e.g. "model.nSites" or "run.dt".
std::vector<std::string> known_keys();

/// Sets one key from its text form. Throws ConfigError for unknown keys and
/// malformed values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Parses "section.key=value".
std::pair<std::string, std::string> split_assignment(const std::string& text);

/// INI text with [model], [superposition], [run] and [relax] sections.
/// Missing keys keep their defaults. Does not validate ranges.
RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig load_config_file(const std::string& path, RunConfig base = {});

/// Canonical INI form; parse_config_text(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);
void write_config_file(const std::string& path, const RunConfig& config);

/// "out/polarization.csv" -> "out/polarization.config.ini".
std::string companion_path(const std::string& outputPath, const std::string& suffix);

}  // namespace polydecoh::io
