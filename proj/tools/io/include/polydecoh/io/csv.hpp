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

#include <iosfwd>
#include <string>
#include <vector>

#include "polydecoh/ensemble.hpp"
#include "polydecoh/phonons.hpp"
#include "polydecoh/relax.hpp"
#include "polydecoh/wigner.hpp"

namespace polydecoh::io {

/// Columns: time_fs, mean_polarization_eA, stderr_eA, pop_<level>...
void write_timeseries_csv(std::ostream& out, const EnsembleResult& result);
void write_timeseries_csv(const std::string& path, const EnsembleResult& result);

struct Timeseries {
    std::vector<double> times;
    std::vector<double> meanPolarization;
    std::vector<double> stderrPolarization;
    std::vector<int> watchedLevels;
    std::vector<std::vector<double>> populations;  ///< [watched level][record]
};

/// Reads a file written by write_timeseries_csv. Lines starting with '#'
/// are skipped and a missing stderr column is read as zeros. Throws ConfigError on a malformed file.
Timeseries read_timeseries_csv(std::istream& in, const std::string& name = "<stream>");
Timeseries read_timeseries_csv(const std::string& path);

/// Columns: j, omega_fs_inv, omega_eV, participation.
void write_modes_csv(std::ostream& out, const NormalModeBasis& modes, const ModelParams& params);

/// Columns: site, u0_A.
void write_geometry_csv(std::ostream& out, const RelaxedGeometry& geometry);

/// Columns: level, energy_eV.
void write_spectrum_csv(std::ostream& out, const RelaxedGeometry& geometry);

/// Columns: trajectory, site, u_A, p_amu_A_per_fs.
void write_samples_csv(std::ostream& out, const std::vector<SampledInitialCondition>& samples);

/// Columns: time_fs, abs_polarization_eA, envelope_eA.
void write_envelope_csv(std::ostream& out, const std::vector<double>& times, const std::vector<double>& signal,
                        const DecoherenceMetrics& metrics);

/// Matplotlib script that plots a time-series CSV next to it.
std::string plot_script(const std::string& csvPath, const std::vector<int>& watchedLevels);
void write_plot_script(const std::string& scriptPath, const std::string& csvPath,
                       const std::vector<int>& watchedLevels);

}  // namespace polydecoh::io
