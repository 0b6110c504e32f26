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

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polydecoh/dynamics.hpp"
#include "polydecoh/eigensolve.hpp"
#include "polydecoh/ensemble.hpp"
#include "polydecoh/errors.hpp"
#include "polydecoh/io/config.hpp"
#include "polydecoh/io/csv.hpp"
#include "polydecoh/phonons.hpp"
#include "polydecoh/relax.hpp"
#include "polydecoh/wigner.hpp"

namespace {

using namespace polydecoh;

struct ConfigFlags {
    std::string configPath;
    std::vector<std::string> settings;
    std::optional<int> nSites;
    std::optional<std::string> kind;
    std::optional<int> level;
    std::optional<int> trajectories;
    std::optional<double> dt;
    std::optional<double> tFinal;
    std::optional<int> stride;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> output;
    std::optional<std::string> watch;
    std::optional<std::string> basis;
    std::optional<std::string> checkpoint;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f) {
    cmd->add_option("--config", f.configPath, "INI config file")->check(CLI::ExistingFile);
    cmd->add_option("--set", f.settings, "Override one key, e.g. --set model.alpha=0 (repeatable)");
    cmd->add_option("-N,--nsites", f.nSites, "Chain length (model.nSites)");
    cmd->add_option("--kind", f.kind, "ground-excited | pair-ground | pair-excited");
    cmd->add_option("--level", f.level, "Lower level i of a pair superposition (1-based)");
    cmd->add_option("--trajectories", f.trajectories, "Ensemble size");
    cmd->add_option("--dt", f.dt, "Time step (fs)");
    cmd->add_option("--tfinal", f.tFinal, "Propagation time (fs)");
    cmd->add_option("--stride", f.stride, "Steps between records");
    cmd->add_option("--seed", f.seed, "Master seed");
    cmd->add_option("--workers", f.workers, "Worker threads");
    cmd->add_option("-o,--output", f.output, "Output CSV path");
    cmd->add_option("--watch", f.watch, "Comma-separated levels whose populations are recorded");
    cmd->add_option("--basis", f.basis, "Population basis: instantaneous | initial");
    cmd->add_option("--checkpoint", f.checkpoint, "Checkpoint file (resumed when compatible)");
}

template <class T>
void set_if(io::RunConfig& c, const char* key, const std::optional<T>& v) {
    if (!v) return;
    if constexpr (std::is_same_v<T, std::string>) {
        io::apply_setting(c, key, *v);
    } else {
        io::apply_setting(c, key, std::to_string(*v));
    }
}

void set_double_if(io::RunConfig& c, const char* key, const std::optional<double>& v) {
    if (!v) return;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", *v);
    io::apply_setting(c, key, buf);
}

io::RunConfig resolve(const ConfigFlags& f) {
    io::RunConfig c;
    if (!f.configPath.empty()) c = io::load_config_file(f.configPath);
    for (const auto& s : f.settings) {
        const auto [key, value] = io::split_assignment(s);
        io::apply_setting(c, key, value);
    }
    set_if(c, "model.nSites", f.nSites);
    set_if(c, "superposition.kind", f.kind);
    set_if(c, "superposition.level", f.level);
    set_if(c, "run.trajectories", f.trajectories);
    set_double_if(c, "run.dt", f.dt);
    set_double_if(c, "run.tFinal", f.tFinal);
    set_if(c, "run.recordStride", f.stride);
    set_if(c, "run.seed", f.seed);
    set_if(c, "run.workers", f.workers);
    set_if(c, "run.output", f.output);
    set_if(c, "run.watchedLevels", f.watch);
    set_if(c, "run.basis", f.basis);
    set_if(c, "run.checkpoint", f.checkpoint);
    c.validate();
    return c;
}

void write_provenance(const io::RunConfig& c, const std::string& outputPath) {
    const std::string path = io::companion_path(outputPath, ".config.ini");
    io::write_config_file(path, c);
    std::cout << "resolved config: " << path << '\n';
}

int cmd_relax(const ConfigFlags& flags, int excitedLevel, const std::string& geometryPath,
              const std::string& spectrumPath) {
    const io::RunConfig c = resolve(flags);
    const ModelParams& p = c.model;
    const int n = p.nSites;
    RelaxedGeometry g = optimize_geometry(ground_state_occupation(p), p, c.relax);
    if (excitedLevel > 0) g = optimize_geometry(excited_occupation(excitedLevel, p), p, c.relax, g.u0);
    const Eigen::VectorXd& e = g.spectrum.values;
    double dimer = 0.0;
    for (int k = 1; k + 2 < n; ++k) dimer = std::max(dimer, std::abs(g.u0[k + 1] - g.u0[k]));
    std::printf("N = %d, %s\n", n,
                excitedLevel > 0 ? ("excited determinant HOMO -> " + std::to_string(excitedLevel)).c_str()
                                 : "ground state");
    std::printf("sweeps        %d (residual %.3e A)\n", g.iterations, g.residual);
    std::printf("energy        %.10f eV (electronic %.10f eV)\n", g.energy, g.electronicEnergy);
    std::printf("HOMO / LUMO   %.6f / %.6f eV\n", e[n / 2 - 1], e[n / 2]);
    std::printf("gap           %.6f eV\n", e[n / 2] - e[n / 2 - 1]);
    std::printf("band width    %.6f eV\n", e[n - 1] - e[0]);
    std::printf("max |u_n+1 - u_n| %.6f A\n", dimer);
    if (!geometryPath.empty()) {
        std::ofstream out(geometryPath);
        if (!out) throw ConfigError(geometryPath, "cannot open output file");
        io::write_geometry_csv(out, g);
        write_provenance(c, geometryPath);
    }
    if (!spectrumPath.empty()) {
        std::ofstream out(spectrumPath);
        if (!out) throw ConfigError(spectrumPath, "cannot open output file");
        io::write_spectrum_csv(out, g);
    }
    return 0;
}

int cmd_modes(const ConfigFlags& flags, const std::string& csvPath) {
    const io::RunConfig c = resolve(flags);
    const EnsemblePreparation prep = prepare_ensemble(c.superposition, c.model, c.relax);
    const NormalModeBasis& m = prep.modes;
    std::printf("N = %d, %d modes, nuclear preparation on the %s surface\n", c.model.nSites, m.count(),
                c.superposition.nuclear_prep() == NuclearSurface::Excited ? "excited" : "ground");
    std::printf("omega range   %.10f .. %.10f fs^-1\n", m.frequencies[0], m.frequencies[m.count() - 1]);
    std::printf("ZPE           %.10f eV\n", m.zeroPointEnergy);
    if (csvPath.empty() || csvPath == "-") {
        io::write_modes_csv(std::cout, m, c.model);
    } else {
        std::ofstream out(csvPath);
        if (!out) throw ConfigError(csvPath, "cannot open output file");
        io::write_modes_csv(out, m, c.model);
        write_provenance(c, csvPath);
    }
    return 0;
}

int cmd_sample_check(const ConfigFlags& flags, int samples, const std::string& dumpPath, int dumpCount) {
    const io::RunConfig c = resolve(flags);
    if (samples < 2) throw ConfigError("--samples", "must be >= 2");
    const ModelParams& p = c.model;
    const EnsemblePreparation prep = prepare_ensemble(c.superposition, p, c.relax);
    const NormalModeBasis& m = prep.modes;
    const int count = m.count();

    std::vector<double> q2(count, 0.0);
    std::vector<double> p2(count, 0.0);
    double harmonic = 0.0;
    double full = 0.0;
    std::vector<SampledInitialCondition> dump;
    for (int k = 0; k < samples; ++k) {
        SampledInitialCondition s = sample_initial_condition(m, p, c.masterSeed, k, false);
        for (int j = 0; j < count; ++j) {
            q2[j] += s.Q[j] * s.Q[j];
            p2[j] += s.P[j] * s.P[j];
        }
        harmonic += harmonic_energy(s, m, p);
        const SingleParticleHamiltonian h = build_hamiltonian(s.state.u, p);
        const SiteDensityMatrix rho = occupied_density(eig_tridiagonal(h), prep.nuclearOccupation);
        full += total_energy(s.state, rho, p) - m.baseGeometry.energy;
        if (k < dumpCount) dump.push_back(std::move(s));
    }
    harmonic /= samples;
    full /= samples;

    // Each variance estimate has relative spread sqrt(2/n).
    const double varTol = 5.0 * std::sqrt(2.0 / samples);
    double worstQ = 0.0;
    double worstP = 0.0;
    for (int j = 0; j < count; ++j) {
        const double w = m.frequencies[j];
        const double expectQ = p.hbar / (2.0 * p.massM * w);
        const double expectP = p.hbar * p.massM * w / 2.0;
        worstQ = std::max(worstQ, std::abs(q2[j] / samples / expectQ - 1.0));
        worstP = std::max(worstP, std::abs(p2[j] / samples / expectP - 1.0));
    }
    const double harmonicErr = std::abs(harmonic / m.zeroPointEnergy - 1.0);
    const double fullErr = std::abs(full / m.zeroPointEnergy - 1.0);
    const bool varOk = worstQ < varTol && worstP < varTol;
    const bool energyOk = harmonicErr < 0.02 && fullErr < 0.02;

    std::printf("N = %d, %d samples, %d modes\n", p.nSites, samples, count);
    std::printf("ZPE                      %.8f eV\n", m.zeroPointEnergy);
    std::printf("mean harmonic energy     %.8f eV (rel. dev %.2e)\n", harmonic, harmonicErr);
    std::printf("mean adiabatic energy    %.8f eV (rel. dev %.2e)\n", full, fullErr);
    std::printf("worst <Q^2> deviation    %.2e (tolerance %.2e)\n", worstQ, varTol);
    std::printf("worst <P^2> deviation    %.2e (tolerance %.2e)\n", worstP, varTol);
    std::printf("variances %s, energy %s\n", varOk ? "PASS" : "FAIL", energyOk ? "PASS" : "FAIL");
    if (!dumpPath.empty()) {
        std::ofstream out(dumpPath);
        if (!out) throw ConfigError(dumpPath, "cannot open output file");
        io::write_samples_csv(out, dump);
        write_provenance(c, dumpPath);
    }
    return varOk && energyOk ? 0 : 1;
}

void print_metrics(const DecoherenceMetrics& m) {
    std::printf("envelope maximum    %.6f eA\n", m.envelopeMax);
    std::printf("noise floor         %.6f eA\n", m.noiseFloor);
    if (m.decohered) {
        std::printf("decoherence time    %.3f fs\n", m.decoherenceTime);
    } else {
        std::printf("decoherence time    not reached\n");
    }
    std::printf("recurrence maxima  ");
    for (double t : m.recurrenceTimes) std::printf(" %.2f", t);
    std::printf("\nvisible recurrences %d\n", m.visible_recurrences());
    if (m.visible_recurrences() > 0) std::printf("median period       %.3f fs\n", m.median_period());
}

int cmd_run(const ConfigFlags& flags, bool emitPlot) {
    const io::RunConfig c = resolve(flags);
    const RunOptions run = c.run_options();
    const EnsembleOptions opts = c.ensemble_options();
    const auto start = std::chrono::steady_clock::now();
    const EnsembleResult r = run_ensemble(c.superposition, c.model, run, opts);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    io::write_timeseries_csv(c.outputPath, r);
    std::cout << "wrote " << c.outputPath << '\n';
    write_provenance(c, c.outputPath);
    if (emitPlot) {
        const std::string script = io::companion_path(c.outputPath, ".plot.py");
        io::write_plot_script(script, c.outputPath, r.watchedLevels);
        std::cout << "plot script: " << script << '\n';
    }
    std::printf("%d trajectories in %.1f s (%d workers)\n", r.trajectoriesCompleted, seconds, c.workers);
    std::printf("max relative energy drift %.3e, max Gram deviation %.3e\n", r.maxRelativeEnergyDrift,
                r.maxGramDeviation);
    print_metrics(extract_metrics(r));
    return 0;
}

int cmd_metrics(const std::string& input, const std::string& envelopePath) {
    const io::Timeseries ts = io::read_timeseries_csv(input);
    const DecoherenceMetrics m = extract_metrics(ts.times, ts.meanPolarization, ts.stderrPolarization);
    std::printf("%s: %zu records\n", input.c_str(), ts.times.size());
    print_metrics(m);
    if (!envelopePath.empty()) {
        std::ofstream out(envelopePath);
        if (!out) throw ConfigError(envelopePath, "cannot open output file");
        io::write_envelope_csv(out, ts.times, ts.meanPolarization, m);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ehrenfest decoherence simulations of SSH polyacetylene chains"};
    app.require_subcommand(1);

    ConfigFlags relaxFlags;
    int excitedLevel = 0;
    std::string geometryPath;
    std::string spectrumPath;
    auto* relax = app.add_subcommand("relax", "Relax the chain geometry and report the spectrum");
    add_config_flags(relax, relaxFlags);
    relax->add_option("--excited", excitedLevel, "Relax the HOMO -> LEVEL determinant instead");
    relax->add_option("--geometry", geometryPath, "Write site,u0_A CSV");
    relax->add_option("--spectrum", spectrumPath, "Write level,energy_eV CSV");

    ConfigFlags modesFlags;
    std::string modesCsv;
    auto* modes = app.add_subcommand("modes", "Normal modes and zero-point energy");
    add_config_flags(modes, modesFlags);
    modes->add_option("--csv", modesCsv, "Frequency table path (default: stdout)");

    ConfigFlags sampleFlags;
    int samples = 10000;
    std::string dumpPath;
    int dumpCount = 10;
    auto* sample = app.add_subcommand("sample-check", "Validate Wigner sampling moments");
    add_config_flags(sample, sampleFlags);
    sample->add_option("--samples", samples, "Number of samples")->capture_default_str();
    sample->add_option("--dump", dumpPath, "Write the first samples as CSV");
    sample->add_option("--dump-count", dumpCount, "Samples written by --dump")->capture_default_str();

    ConfigFlags runFlags;
    bool emitPlot = false;
    auto* run = app.add_subcommand("run", "Run an ensemble and write the polarization time series");
    add_config_flags(run, runFlags);
    run->add_flag("--emit-plot-script", emitPlot, "Write a matplotlib script next to the CSV");

    std::string metricsInput;
    std::string envelopePath;
    auto* metrics = app.add_subcommand("metrics", "Decoherence metrics of a time-series CSV");
    metrics->add_option("input", metricsInput, "Time-series CSV")->required()->check(CLI::ExistingFile);
    metrics->add_option("--envelope", envelopePath, "Write time_fs,abs_polarization_eA,envelope_eA CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*relax) return cmd_relax(relaxFlags, excitedLevel, geometryPath, spectrumPath);
        if (*modes) return cmd_modes(modesFlags, modesCsv);
        if (*sample) return cmd_sample_check(sampleFlags, samples, dumpPath, dumpCount);
        if (*run) return cmd_run(runFlags, emitPlot);
        if (*metrics) return cmd_metrics(metricsInput, envelopePath);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
