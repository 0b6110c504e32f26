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

#include "polydecoh/io/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "polydecoh/errors.hpp"

namespace polydecoh::io {

namespace {

std::string num(double v) {
    char buf[32];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(len));
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        if (!cell.empty() && cell.back() == '\r') cell.pop_back();
        cells.push_back(cell);
    }
    return cells;
}

double parse_cell(const std::string& cell, const std::string& name, int row) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
        throw ConfigError(name, "row " + std::to_string(row) + ": bad number '" + cell + "'");
    }
    return v;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError(path, "cannot open output file");
    return out;
}

}  // namespace

void write_timeseries_csv(std::ostream& out, const EnsembleResult& result) {
    out << "time_fs,mean_polarization_eA,stderr_eA";
    for (int level : result.watchedLevels) out << ",pop_" << level;
    out << '\n';
    for (std::size_t r = 0; r < result.times.size(); ++r) {
        out << num(result.times[r]) << ',' << num(result.meanPolarization[r]) << ','
            << num(result.stderrPolarization[r]);
        for (const auto& pops : result.meanPopulations) out << ',' << num(pops[r]);
        out << '\n';
    }
}

void write_timeseries_csv(const std::string& path, const EnsembleResult& result) {
    std::ofstream out = open_out(path);
    write_timeseries_csv(out, result);
}

Timeseries read_timeseries_csv(std::istream& in, const std::string& name) {
    std::string line;
    do {
        if (!std::getline(in, line)) throw ConfigError(name, "empty file");
    } while (line.empty() || line[0] == '#');
    const std::vector<std::string> header = split(line);
    int timeCol = -1;
    int meanCol = -1;
    int errCol = -1;
    std::vector<int> popCols;
    Timeseries ts;
    for (int c = 0; c < static_cast<int>(header.size()); ++c) {
        const std::string& h = header[c];
        if (h == "time_fs") {
            timeCol = c;
        } else if (h == "mean_polarization_eA") {
            meanCol = c;
        } else if (h == "stderr_eA") {
            errCol = c;
        } else if (h.rfind("pop_", 0) == 0) {
            popCols.push_back(c);
            ts.watchedLevels.push_back(static_cast<int>(parse_cell(h.substr(4), name, 0)));
        }
    }
    if (timeCol < 0 || meanCol < 0) {
        throw ConfigError(name, "header must contain time_fs and mean_polarization_eA");
    }
    ts.populations.resize(popCols.size());
    int row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r" || line[0] == '#') continue;
        const std::vector<std::string> cells = split(line);
        if (cells.size() != header.size()) {
            throw ConfigError(name, "row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                                        " columns, header has " + std::to_string(header.size()));
        }
        ts.times.push_back(parse_cell(cells[timeCol], name, row));
        ts.meanPolarization.push_back(parse_cell(cells[meanCol], name, row));
        ts.stderrPolarization.push_back(errCol >= 0 ? parse_cell(cells[errCol], name, row) : 0.0);
        for (std::size_t k = 0; k < popCols.size(); ++k) {
            ts.populations[k].push_back(parse_cell(cells[popCols[k]], name, row));
        }
    }
    return ts;
}

Timeseries read_timeseries_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open input file");
    return read_timeseries_csv(in, path);
}

void write_modes_csv(std::ostream& out, const NormalModeBasis& modes, const ModelParams& params) {
    out << "j,omega_fs_inv,omega_eV,participation\n";
    for (int j = 0; j < modes.count(); ++j) {
        out << j + 1 << ',' << num(modes.frequencies[j]) << ',' << num(params.hbar * modes.frequencies[j]) << ','
            << num(participation_ratio(modes.modes.col(j))) << '\n';
    }
}

void write_geometry_csv(std::ostream& out, const RelaxedGeometry& geometry) {
    out << "site,u0_A\n";
    for (Eigen::Index n = 0; n < geometry.u0.size(); ++n) out << n + 1 << ',' << num(geometry.u0[n]) << '\n';
}

void write_spectrum_csv(std::ostream& out, const RelaxedGeometry& geometry) {
    out << "level,energy_eV\n";
    const Eigen::VectorXd& e = geometry.spectrum.values;
    for (Eigen::Index k = 0; k < e.size(); ++k) out << k + 1 << ',' << num(e[k]) << '\n';
}

void write_samples_csv(std::ostream& out, const std::vector<SampledInitialCondition>& samples) {
    out << "trajectory,site,u_A,p_amu_A_per_fs\n";
    for (const auto& s : samples) {
        for (Eigen::Index n = 0; n < s.state.u.size(); ++n) {
            out << s.trajectoryIndex << ',' << n + 1 << ',' << num(s.state.u[n]) << ',' << num(s.state.p[n]) << '\n';
        }
    }
}

void write_envelope_csv(std::ostream& out, const std::vector<double>& times, const std::vector<double>& signal,
                        const DecoherenceMetrics& metrics) {
    out << "time_fs,abs_polarization_eA,envelope_eA\n";
    for (std::size_t r = 0; r < times.size(); ++r) {
        const double env = r < metrics.envelopeSeries.size() ? metrics.envelopeSeries[r] : std::nan("");
        out << num(times[r]) << ',' << num(std::abs(signal[r])) << ',' << num(env) << '\n';
    }
}

std::string plot_script(const std::string& csvPath, const std::vector<int>& watchedLevels) {
    std::ostringstream py;
    py << "#!/usr/bin/env python3\n"
       << "import csv\n"
       << "import os\n"
       << "import matplotlib\n"
       << "matplotlib.use(\"Agg\")\n"
       << "import matplotlib.pyplot as plt\n\n"
       << "here = os.path.dirname(os.path.abspath(__file__))\n"
       << "path = os.path.join(here, \"" << csvPath.substr(csvPath.find_last_of('/') + 1) << "\")\n"
       << "with open(path) as f:\n"
       << "    rows = list(csv.DictReader(f))\n"
       << "t = [float(r[\"time_fs\"]) for r in rows]\n"
       << "mu = [float(r[\"mean_polarization_eA\"]) for r in rows]\n"
       << "err = [float(r[\"stderr_eA\"]) for r in rows]\n"
       << "fig, axes = plt.subplots(2, 1, sharex=True, figsize=(7, 6))\n"
       << "axes[0].plot(t, mu, lw=0.8)\n"
       << "axes[0].fill_between(t, [m - e for m, e in zip(mu, err)], [m + e for m, e in zip(mu, err)], alpha=0.3)\n"
       << "axes[0].set_ylabel(\"polarization (e A)\")\n";
    for (int level : watchedLevels) {
        py << "axes[1].plot(t, [float(r[\"pop_" << level << "\"]) for r in rows], label=\"level " << level
           << "\")\n";
    }
    py << "axes[1].set_ylabel(\"population\")\n"
       << "axes[1].set_xlabel(\"time (fs)\")\n"
       << "if axes[1].lines:\n"
       << "    axes[1].legend()\n"
       << "fig.tight_layout()\n"
       << "fig.savefig(os.path.splitext(path)[0] + \".png\", dpi=150)\n";
    return py.str();
}

void write_plot_script(const std::string& scriptPath, const std::string& csvPath,
                       const std::vector<int>& watchedLevels) {
    std::ofstream out = open_out(scriptPath);
    out << plot_script(csvPath, watchedLevels);
}

}  // namespace polydecoh::io
