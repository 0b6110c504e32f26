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

#include "polydecoh/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "polydecoh/errors.hpp"
#include "polydecoh/wigner.hpp"

namespace polydecoh {

namespace {

constexpr int kCheckpointVersion = 1;
constexpr const char* kCheckpointFormat = "polydecoh-ensemble-checkpoint";

// Neumaier-compensated running sums, one per time point.
struct CompensatedSeries {
    std::vector<double> sum;
    std::vector<double> comp;

    void resize(std::size_t n) {
        sum.assign(n, 0.0);
        comp.assign(n, 0.0);
    }
    void add(std::size_t i, double x) {
        const double t = sum[i] + x;
        if (std::abs(sum[i]) >= std::abs(x)) {
            comp[i] += (sum[i] - t) + x;
        } else {
            comp[i] += (x - t) + sum[i];
        }
        sum[i] = t;
    }
    double value(std::size_t i) const { return sum[i] + comp[i]; }
};

struct TrajectorySummary {
    std::vector<double> polarization;
    std::vector<std::vector<double>> populations;
    std::vector<double> energy;
    double drift = 0.0;
    double gram = 0.0;
};

struct FoldState {
    int folded = 0;
    CompensatedSeries pol;
    CompensatedSeries pol2;
    CompensatedSeries energy;
    std::vector<CompensatedSeries> pops;
    double maxDrift = 0.0;
    double maxGram = 0.0;
    std::map<int, TrajectorySummary> pending;

    void init(std::size_t records, std::size_t watched) {
        folded = 0;
        pol.resize(records);
        pol2.resize(records);
        energy.resize(records);
        pops.assign(watched, CompensatedSeries{});
        for (auto& p : pops) p.resize(records);
        maxDrift = maxGram = 0.0;
        pending.clear();
    }

    void fold(const TrajectorySummary& t) {
        for (std::size_t i = 0; i < t.polarization.size(); ++i) {
            pol.add(i, t.polarization[i]);
            pol2.add(i, t.polarization[i] * t.polarization[i]);
            energy.add(i, t.energy[i]);
        }
        for (std::size_t w = 0; w < pops.size(); ++w) {
            for (std::size_t i = 0; i < t.populations[w].size(); ++i) pops[w].add(i, t.populations[w][i]);
        }
        maxDrift = std::max(maxDrift, t.drift);
        maxGram = std::max(maxGram, t.gram);
        ++folded;
    }

    // Folds pending records that extend the completed prefix. Returns the
    // number folded.
    int drain() {
        int count = 0;
        for (auto it = pending.find(folded); it != pending.end(); it = pending.find(folded)) {
            fold(it->second);
            pending.erase(it);
            ++count;
        }
        return count;
    }
};

nlohmann::json series_to_json(const CompensatedSeries& s) { return {{"sum", s.sum}, {"comp", s.comp}}; }

CompensatedSeries series_from_json(const nlohmann::json& j, std::size_t expected) {
    CompensatedSeries s;
    s.sum = j.at("sum").get<std::vector<double>>();
    s.comp = j.at("comp").get<std::vector<double>>();
    if (s.sum.size() != expected || s.comp.size() != expected) throw CheckpointError("series length mismatch");
    return s;
}

void write_checkpoint(const std::string& path, std::uint64_t hash, const FoldState& st) {
    nlohmann::json j;
    j["format"] = kCheckpointFormat;
    j["version"] = kCheckpointVersion;
    j["parameterHash"] = hash;
    j["folded"] = st.folded;
    j["pol"] = series_to_json(st.pol);
    j["pol2"] = series_to_json(st.pol2);
    j["energy"] = series_to_json(st.energy);
    j["pops"] = nlohmann::json::array();
    for (const auto& p : st.pops) j["pops"].push_back(series_to_json(p));
    j["maxDrift"] = st.maxDrift;
    j["maxGram"] = st.maxGram;
    j["pending"] = nlohmann::json::array();
    for (const auto& [index, t] : st.pending) {
        j["pending"].push_back({{"index", index},
                                {"polarization", t.polarization},
                                {"populations", t.populations},
                                {"energy", t.energy},
                                {"drift", t.drift},
                                {"gram", t.gram}});
    }
    const std::vector<std::uint8_t> bytes = nlohmann::json::to_cbor(j);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw CheckpointError("cannot write checkpoint '" + tmp + "'");
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw CheckpointError("short write to checkpoint '" + tmp + "'");
    }
    std::filesystem::rename(tmp, path);
}

// Returns false when there is nothing to resume (missing or empty file).
bool read_checkpoint(const std::string& path, std::uint64_t hash, std::size_t records, std::size_t watched,
                     FoldState& st) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0) return false;
    std::ifstream in(path, std::ios::binary);
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    nlohmann::json j;
    try {
        j = nlohmann::json::from_cbor(bytes);
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointError("corrupt checkpoint '" + path + "': " + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != kCheckpointFormat) throw CheckpointError("not an ensemble checkpoint");
        if (j.at("version").get<int>() != kCheckpointVersion) {
            throw CheckpointError("unsupported checkpoint version " + std::to_string(j.at("version").get<int>()));
        }
        if (j.at("parameterHash").get<std::uint64_t>() != hash) {
            throw CheckpointError("checkpoint '" + path + "' was written for different run parameters");
        }
        st.init(records, watched);
        st.folded = j.at("folded").get<int>();
        st.pol = series_from_json(j.at("pol"), records);
        st.pol2 = series_from_json(j.at("pol2"), records);
        st.energy = series_from_json(j.at("energy"), records);
        const auto& pops = j.at("pops");
        if (pops.size() != watched) throw CheckpointError("watched-level count mismatch");
        for (std::size_t w = 0; w < watched; ++w) st.pops[w] = series_from_json(pops[w], records);
        st.maxDrift = j.at("maxDrift").get<double>();
        st.maxGram = j.at("maxGram").get<double>();
        for (const auto& p : j.at("pending")) {
            TrajectorySummary t;
            t.polarization = p.at("polarization").get<std::vector<double>>();
            t.populations = p.at("populations").get<std::vector<std::vector<double>>>();
            t.energy = p.at("energy").get<std::vector<double>>();
            t.drift = p.at("drift").get<double>();
            t.gram = p.at("gram").get<double>();
            st.pending.emplace(p.at("index").get<int>(), std::move(t));
        }
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointError("corrupt checkpoint '" + path + "': " + e.what());
    }
    return true;
}

TrajectorySummary summarize(TrajectoryRecord&& rec) {
    TrajectorySummary t;
    const double e0 = rec.totalEnergy.front();
    for (double e : rec.totalEnergy) t.drift = std::max(t.drift, std::abs(e - e0) / std::max(std::abs(e0), 1e-300));
    t.polarization = std::move(rec.polarization);
    t.populations = std::move(rec.levelPopulations);
    t.energy = std::move(rec.totalEnergy);
    t.gram = rec.maxGramDeviation;
    return t;
}

std::string hex(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string ensemble_fingerprint(const SuperpositionSpec& spec, const ModelParams& params, const RunOptions& run,
                                 const EnsembleOptions& options) {
    std::ostringstream s;
    s << "t0=" << hex(params.t0) << "\nalpha=" << hex(params.alpha) << "\nK=" << hex(params.springK)
      << "\nM=" << hex(params.massM) << "\na=" << hex(params.latticeA) << "\nN=" << params.nSites
      << "\nhbar=" << hex(params.hbar) << "\nkind=" << to_string(spec.kind) << "\nlevel=" << spec.level
      << "\ndt=" << hex(run.dt) << "\ntFinal=" << hex(run.tFinal) << "\nstride=" << run.recordStride
      << "\nbasis=" << (run.basis == PopulationBasis::Instantaneous ? "instantaneous" : "initial")
      << "\nallOrbitals=" << run.propagateAllOrbitals << "\nwatched=";
    for (int w : run.watchedLevels) s << w << ',';
    s << "\ntrajectories=" << options.trajectoryCount << "\nseed=" << options.masterSeed
      << "\nzeroVariance=" << options.zeroVariance << "\nrelaxTol=" << hex(options.relax.tol)
      << "\nrelaxMixing=" << hex(options.relax.mixing) << "\nrelaxMaxIter=" << options.relax.maxIter << '\n';
    return s.str();
}

EnsemblePreparation prepare_ensemble(const SuperpositionSpec& spec, const ModelParams& params,
                                     const RelaxOptions& relax) {
    spec.validate(params);
    EnsemblePreparation prep;
    const OccupationFunction ground = ground_state_occupation(params);
    prep.groundGeometry = optimize_geometry(ground, params, relax);
    prep.nuclearOccupation = spec.preparation_occupation(params);
    RelaxedGeometry nuclear = prep.groundGeometry;
    if (spec.nuclear_prep() == NuclearSurface::Excited) {
        nuclear = optimize_geometry(prep.nuclearOccupation, params, relax, prep.groundGeometry.u0);
    }
    prep.modes = normal_modes(build_hessian(nuclear, prep.nuclearOccupation, params), nuclear, params);
    prep.gamma = build_superposition(spec, params);
    return prep;
}

EnsembleResult run_ensemble(const SuperpositionSpec& spec, const ModelParams& params, const RunOptions& run,
                            const EnsembleOptions& options) {
    const EnsemblePreparation prep = prepare_ensemble(spec, params, options.relax);
    return run_ensemble(prep, params, run, options, ensemble_fingerprint(spec, params, run, options));
}

EnsembleResult run_ensemble(const EnsemblePreparation& prep, const ModelParams& params, const RunOptions& run,
                            const EnsembleOptions& options, const std::string& fingerprint) {
    params.validate();
    run.validate(params.nSites);
    if (options.trajectoryCount < 1) throw InvalidInput("ensemble", "trajectoryCount must be >= 1");
    if (options.workers < 1) throw InvalidInput("ensemble", "workers must be >= 1");

    const int steps = run.step_count();
    const std::size_t records = static_cast<std::size_t>(steps / run.recordStride) + 1;
    const std::size_t watched = run.watchedLevels.size();
    const std::uint64_t hash = fnv1a64(fingerprint);

    FoldState st;
    st.init(records, watched);
    const bool checkpointing = !options.checkpointPath.empty();
    if (checkpointing) read_checkpoint(options.checkpointPath, hash, records, watched, st);

    std::vector<int> todo;
    for (int i = st.folded; i < options.trajectoryCount; ++i) {
        if (!st.pending.contains(i)) todo.push_back(i);
    }
    if (options.stopAfter >= 0 && static_cast<std::size_t>(options.stopAfter) < todo.size()) {
        todo.resize(static_cast<std::size_t>(options.stopAfter));
    }

    const auto runOne = [&](int index) {
        const SampledInitialCondition init =
            sample_initial_condition(prep.modes, params, options.masterSeed, index, options.zeroVariance);
        return summarize(propagate_trajectory(init, prep.gamma, params, run));
    };

    int sinceCheckpoint = 0;
    const auto afterInsert = [&] {
        sinceCheckpoint += st.drain();
        if (checkpointing && sinceCheckpoint >= options.checkpointEvery) {
            write_checkpoint(options.checkpointPath, hash, st);
            sinceCheckpoint = 0;
        }
    };

    int failedIndex = -1;
    std::exception_ptr failure;
    if (options.workers == 1 || todo.size() <= 1) {
        for (int index : todo) {
            try {
                st.pending.emplace(index, runOne(index));
            } catch (...) {
                failedIndex = index;
                failure = std::current_exception();
                break;
            }
            afterInsert();
        }
    } else {
        std::mutex mu;
        std::condition_variable cv;
        std::map<int, TrajectorySummary> done;
        std::atomic<std::size_t> next{0};
        std::atomic<bool> stop{false};
        std::size_t finished = 0;
        const auto worker = [&] {
            for (;;) {
                if (stop.load()) return;
                const std::size_t slot = next.fetch_add(1);
                if (slot >= todo.size()) return;
                const int index = todo[slot];
                try {
                    TrajectorySummary t = runOne(index);
                    std::lock_guard lock(mu);
                    done.emplace(index, std::move(t));
                    ++finished;
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!failure || index < failedIndex) {
                        failure = std::current_exception();
                        failedIndex = index;
                    }
                    stop.store(true);
                    ++finished;
                }
                cv.notify_one();
            }
        };
        const int nThreads = std::min<int>(options.workers, static_cast<int>(todo.size()));
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(nThreads));
        for (int w = 0; w < nThreads; ++w) pool.emplace_back(worker);

        std::size_t consumed = 0;
        for (;;) {
            std::unique_lock lock(mu);
            cv.wait(lock, [&] { return !done.empty() || finished == todo.size() || stop.load(); });
            std::map<int, TrajectorySummary> batch;
            batch.swap(done);
            const bool allDone = finished == todo.size();
            const bool stopped = stop.load();
            lock.unlock();
            for (auto& [index, t] : batch) st.pending.emplace(index, std::move(t));
            consumed += batch.size();
            afterInsert();
            if (allDone || stopped) break;
        }
        pool.clear();  // join
        std::lock_guard lock(mu);
        for (auto& [index, t] : done) st.pending.emplace(index, std::move(t));
        afterInsert();
    }

    if (checkpointing) write_checkpoint(options.checkpointPath, hash, st);
    if (failure) {
        try {
            std::rethrow_exception(failure);
        } catch (const Error& e) {
            throw Error(e.kind(), "ensemble", "trajectory " + std::to_string(failedIndex) + " failed: " + e.what());
        } catch (const std::exception& e) {
            throw NumericFailure("ensemble", "trajectory " + std::to_string(failedIndex) + " failed: " + e.what());
        }
    }

    EnsembleResult out;
    out.masterSeed = options.masterSeed;
    out.trajectoriesCompleted = st.folded;
    out.complete = st.folded == options.trajectoryCount;
    out.watchedLevels = run.watchedLevels;
    out.maxRelativeEnergyDrift = st.maxDrift;
    out.maxGramDeviation = st.maxGram;
    const double m = static_cast<double>(st.folded);
    out.times.resize(records);
    out.meanPolarization.assign(records, 0.0);
    out.stderrPolarization.assign(records, 0.0);
    out.meanEnergy.assign(records, 0.0);
    out.meanPopulations.assign(watched, std::vector<double>(records, 0.0));
    for (std::size_t i = 0; i < records; ++i) {
        out.times[i] = static_cast<double>(i) * run.recordStride * run.dt;
        if (st.folded == 0) continue;
        const double mean = st.pol.value(i) / m;
        out.meanPolarization[i] = mean;
        out.meanEnergy[i] = st.energy.value(i) / m;
        if (st.folded > 1) {
            const double var = std::max(0.0, (st.pol2.value(i) - m * mean * mean) / (m - 1.0));
            out.stderrPolarization[i] = std::sqrt(var / m);
        }
        for (std::size_t w = 0; w < watched; ++w) out.meanPopulations[w][i] = st.pops[w].value(i) / m;
    }
    return out;
}

double DecoherenceMetrics::median_period() const {
    if (recurrencePeriods.empty()) return 0.0;
    std::vector<double> p = recurrencePeriods;
    std::sort(p.begin(), p.end());
    const std::size_t mid = p.size() / 2;
    return p.size() % 2 == 1 ? p[mid] : 0.5 * (p[mid - 1] + p[mid]);
}

DecoherenceMetrics extract_metrics(const std::vector<double>& times, const std::vector<double>& signal,
                                   const std::vector<double>& stderrSeries) {
    const std::size_t n = times.size();
    if (n < 3 || signal.size() != n || stderrSeries.size() != n) {
        throw InvalidInput("ensemble", "metrics need at least three samples with matching series lengths");
    }
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = std::abs(signal[i]);

    // Local maxima of |mu|, refined by a parabola through the neighbours.
    std::vector<double> peakT;
    std::vector<double> peakA;
    if (a[0] >= a[1]) {
        peakT.push_back(times[0]);
        peakA.push_back(a[0]);
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (a[i] >= a[i - 1] && a[i] > a[i + 1]) {
            const double denom = a[i - 1] - 2.0 * a[i] + a[i + 1];
            double shift = denom < 0.0 ? 0.5 * (a[i - 1] - a[i + 1]) / denom : 0.0;
            shift = std::clamp(shift, -0.5, 0.5);
            const double h = 0.5 * (times[i + 1] - times[i - 1]);
            peakT.push_back(times[i] + shift * h);
            peakA.push_back(a[i] - 0.25 * (a[i - 1] - a[i + 1]) * shift);
        }
    }
    if (a[n - 1] > a[n - 2]) {
        peakT.push_back(times[n - 1]);
        peakA.push_back(a[n - 1]);
    }

    DecoherenceMetrics m;
    m.envelopeSeries.assign(n, 0.0);
    if (peakT.empty()) {
        m.decoherenceTime = times.back() - times.front();
        return m;
    }
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = times[i];
        while (k + 1 < peakT.size() && peakT[k + 1] <= t) ++k;
        if (t <= peakT.front()) {
            m.envelopeSeries[i] = peakA.front();
        } else if (k + 1 >= peakT.size()) {
            m.envelopeSeries[i] = peakA.back();
        } else {
            const double w = (t - peakT[k]) / (peakT[k + 1] - peakT[k]);
            m.envelopeSeries[i] = (1.0 - w) * peakA[k] + w * peakA[k + 1];
        }
    }
    // Initial envelope maximum: the first peak of the envelope.
    std::size_t first = 0;
    while (first + 1 < peakA.size() && peakA[first + 1] >= peakA[first]) ++first;
    m.envelopeMax = peakA[first];

    // Noise floor from the late-time standard error.
    const std::size_t lateStart = n - std::max<std::size_t>(1, n / 5);
    double lateErr = 0.0;
    for (std::size_t i = lateStart; i < n; ++i) lateErr += stderrSeries[i];
    m.noiseFloor = 3.0 * lateErr / static_cast<double>(n - lateStart);

    // Decoherence time: the envelope stays below envelopeMax / e afterwards.
    const double threshold = m.envelopeMax / std::exp(1.0);
    std::size_t last = n;
    for (std::size_t i = n; i-- > 0;) {
        if (m.envelopeSeries[i] >= threshold) {
            last = i;
            break;
        }
    }
    if (last == n - 1) {
        m.decohered = false;
        m.decoherenceTime = times.back() - times.front();
    } else {
        m.decohered = true;
        if (last == n) {
            m.decoherenceTime = 0.0;
        } else {
            const double e0 = m.envelopeSeries[last];
            const double e1 = m.envelopeSeries[last + 1];
            const double w = e0 > e1 ? (e0 - threshold) / (e0 - e1) : 0.0;
            m.decoherenceTime = times[last] + w * (times[last + 1] - times[last]) - times.front();
        }
    }

    // Recurrence maxima: peaks of the envelope whose prominence exceeds the
    // noise floor.
    const std::size_t np = peakA.size();
    for (std::size_t i = 0; i < np; ++i) {
        const bool leftOk = i == 0 || peakA[i] >= peakA[i - 1];
        const bool rightOk = i + 1 == np || peakA[i] > peakA[i + 1];
        if (!leftOk || !rightOk) continue;
        double leftMin = peakA[i];
        bool leftHigher = false;
        for (std::size_t j = i; j-- > 0;) {
            if (peakA[j] > peakA[i]) {
                leftHigher = true;
                break;
            }
            leftMin = std::min(leftMin, peakA[j]);
        }
        double rightMin = peakA[i];
        bool rightHigher = false;
        for (std::size_t j = i + 1; j < np; ++j) {
            if (peakA[j] > peakA[i]) {
                rightHigher = true;
                break;
            }
            rightMin = std::min(rightMin, peakA[j]);
        }
        // Prominence against the higher saddle; an edge without a higher
        // peak contributes its minimum.
        double base = 0.0;
        if (leftHigher && rightHigher) {
            base = std::max(leftMin, rightMin);
        } else if (leftHigher) {
            base = leftMin;
            if (i + 1 < np) base = std::max(base, rightMin);
        } else if (rightHigher) {
            base = rightMin;
            if (i > 0) base = std::max(base, leftMin);
        } else {
            base = i == 0 ? rightMin : (i + 1 == np ? leftMin : std::max(leftMin, rightMin));
        }
        const double prominence = peakA[i] - base;
        if (i + 1 == np && i != 0) continue;  // still rising at the end of the run
        if (i == 0 || prominence > m.noiseFloor) m.recurrenceTimes.push_back(peakT[i]);
    }
    for (std::size_t i = 1; i < m.recurrenceTimes.size(); ++i) {
        m.recurrencePeriods.push_back(m.recurrenceTimes[i] - m.recurrenceTimes[i - 1]);
    }
    return m;
}

DecoherenceMetrics extract_metrics(const EnsembleResult& result) {
    return extract_metrics(result.times, result.meanPolarization, result.stderrPolarization);
}

}  // namespace polydecoh
