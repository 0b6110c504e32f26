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

#include "polydecoh/io/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "polydecoh/errors.hpp"

namespace polydecoh::io {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

double to_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError(key, "expected a number, got '" + text + "'");
    }
    return v;
}

template <class Int>
Int to_integer(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    Int v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError(key, "expected an integer, got '" + text + "'");
    }
    return v;
}

bool to_bool(const std::string& key, const std::string& text) {
    const std::string t = lower(trim(text));
    if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
    if (t == "false" || t == "no" || t == "off" || t == "0") return false;
    throw ConfigError(key, "expected true or false, got '" + text + "'");
}

std::vector<int> to_level_list(const std::string& key, const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        out.push_back(to_integer<int>(key, item));
    }
    return out;
}

std::string format(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string format(bool v) { return v ? "true" : "false"; }

std::string format_levels(const std::vector<int>& levels) {
    std::string s;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(levels[i]);
    }
    return s;
}

struct Field {
    const char* key;
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define POLYDECOH_DOUBLE(k, member)                                                                      \
    Field {                                                                                            \
        k, [](RunConfig& c, const std::string& key, const std::string& v) { c.member = to_double(key, v); }, \
            [](const RunConfig& c) { return format(c.member); }                                        \
    }
#define POLYDECOH_INT(k, member, type)                                                                         \
    Field {                                                                                                  \
        k, [](RunConfig& c, const std::string& key, const std::string& v) { c.member = to_integer<type>(key, v); }, \
            [](const RunConfig& c) { return std::to_string(c.member); }                                      \
    }
#define POLYDECOH_BOOL(k, member)                                                                      \
    Field {                                                                                          \
        k, [](RunConfig& c, const std::string& key, const std::string& v) { c.member = to_bool(key, v); }, \
            [](const RunConfig& c) { return format(c.member); }                                      \
    }

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        POLYDECOH_DOUBLE("model.t0", model.t0),
        POLYDECOH_DOUBLE("model.alpha", model.alpha),
        POLYDECOH_DOUBLE("model.springK", model.springK),
        POLYDECOH_DOUBLE("model.massM", model.massM),
        POLYDECOH_DOUBLE("model.latticeA", model.latticeA),
        POLYDECOH_INT("model.nSites", model.nSites, int),
        POLYDECOH_DOUBLE("model.hbar", model.hbar),
        Field{"superposition.kind",
              [](RunConfig& c, const std::string& key, const std::string& v) {
                  try {
                      c.superposition.kind = parse_superposition_kind(trim(v));
                  } catch (const InvalidInput&) {
                      throw ConfigError(key, "unknown kind '" + v + "' (ground-excited, pair-ground, pair-excited)");
                  }
              },
              [](const RunConfig& c) { return to_string(c.superposition.kind); }},
        POLYDECOH_INT("superposition.level", superposition.level, int),
        POLYDECOH_INT("run.trajectories", trajectoryCount, int),
        POLYDECOH_DOUBLE("run.dt", dt),
        POLYDECOH_DOUBLE("run.tFinal", tFinal),
        POLYDECOH_INT("run.recordStride", recordStride, int),
        POLYDECOH_INT("run.seed", masterSeed, std::uint64_t),
        POLYDECOH_INT("run.workers", workers, int),
        Field{"run.output", [](RunConfig& c, const std::string&, const std::string& v) { c.outputPath = trim(v); },
              [](const RunConfig& c) { return c.outputPath; }},
        Field{"run.watchedLevels",
              [](RunConfig& c, const std::string& key, const std::string& v) { c.watchedLevels = to_level_list(key, v); },
              [](const RunConfig& c) { return format_levels(c.watchedLevels); }},
        Field{"run.basis",
              [](RunConfig& c, const std::string& key, const std::string& v) {
                  const std::string t = lower(trim(v));
                  if (t == "instantaneous") {
                      c.basis = PopulationBasis::Instantaneous;
                  } else if (t == "initial") {
                      c.basis = PopulationBasis::Initial;
                  } else {
                      throw ConfigError(key, "expected instantaneous or initial, got '" + v + "'");
                  }
              },
              [](const RunConfig& c) {
                  return std::string(c.basis == PopulationBasis::Instantaneous ? "instantaneous" : "initial");
              }},
        POLYDECOH_BOOL("run.allOrbitals", propagateAllOrbitals),
        POLYDECOH_BOOL("run.zeroVariance", zeroVariance),
        Field{"run.checkpoint", [](RunConfig& c, const std::string&, const std::string& v) { c.checkpointPath = trim(v); },
              [](const RunConfig& c) { return c.checkpointPath; }},
        POLYDECOH_INT("run.checkpointEvery", checkpointEvery, int),
        POLYDECOH_INT("relax.maxIter", relax.maxIter, int),
        POLYDECOH_DOUBLE("relax.tol", relax.tol),
        POLYDECOH_DOUBLE("relax.mixing", relax.mixing),
    };
    return table;
}

#undef POLYDECOH_DOUBLE
#undef POLYDECOH_INT
#undef POLYDECOH_BOOL

const Field& field(const std::string& key) {
    for (const auto& f : fields()) {
        if (key == f.key) return f;
    }
    throw ConfigError(key, "unknown key");
}

void require(bool ok, const char* key, const std::string& what) {
    if (!ok) throw ConfigError(key, what);
}

}  // namespace

void RunConfig::validate() const {
    const ModelParams& m = model;
    require(m.nSites >= 4 && m.nSites % 2 == 0, "model.nSites", "must be even and >= 4, got " + std::to_string(m.nSites));
    require(m.t0 > 0.0 && std::isfinite(m.t0), "model.t0", "must be positive");
    require(m.alpha >= 0.0 && std::isfinite(m.alpha), "model.alpha", "must be non-negative");
    require(m.springK > 0.0 && std::isfinite(m.springK), "model.springK", "must be positive");
    require(m.massM > 0.0 && std::isfinite(m.massM), "model.massM", "must be positive");
    require(m.latticeA > 0.0 && std::isfinite(m.latticeA), "model.latticeA", "must be positive");
    require(m.hbar > 0.0 && std::isfinite(m.hbar), "model.hbar", "must be positive");
    if (superposition.kind != SuperpositionKind::GroundExcited) {
        const int lo = m.nSites / 2 + 1;
        const int hi = m.nSites - 1;
        require(superposition.level >= lo && superposition.level <= hi, "superposition.level",
                "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "] for " +
                    to_string(superposition.kind) + ", got " + std::to_string(superposition.level));
    }
    require(trajectoryCount >= 1, "run.trajectories", "must be >= 1");
    require(dt > 0.0 && std::isfinite(dt), "run.dt", "must be positive");
    require(tFinal > 0.0 && std::isfinite(tFinal), "run.tFinal", "must be positive");
    require(std::abs(tFinal / dt - std::round(tFinal / dt)) < 1e-9 * (tFinal / dt), "run.tFinal",
            "must be an integer multiple of run.dt");
    require(recordStride >= 1, "run.recordStride", "must be >= 1");
    require(workers >= 1, "run.workers", "must be >= 1");
    require(checkpointEvery >= 1, "run.checkpointEvery", "must be >= 1");
    require(!outputPath.empty(), "run.output", "must not be empty");
    for (int level : watchedLevels) {
        require(level >= 1 && level <= m.nSites, "run.watchedLevels",
                "level " + std::to_string(level) + " outside [1, " + std::to_string(m.nSites) + "]");
    }
    require(relax.maxIter >= 1, "relax.maxIter", "must be >= 1");
    require(relax.tol > 0.0, "relax.tol", "must be positive");
    require(relax.mixing > 0.0 && relax.mixing <= 1.0, "relax.mixing", "must lie in (0, 1]");
}

RunOptions RunConfig::run_options() const {
    RunOptions run;
    run.dt = dt;
    run.tFinal = tFinal;
    run.recordStride = recordStride;
    run.watchedLevels = resolved_watched_levels();
    run.basis = basis;
    run.propagateAllOrbitals = propagateAllOrbitals;
    return run;
}

EnsembleOptions RunConfig::ensemble_options() const {
    EnsembleOptions opts;
    opts.trajectoryCount = trajectoryCount;
    opts.masterSeed = masterSeed;
    opts.workers = workers;
    opts.zeroVariance = zeroVariance;
    opts.relax = relax;
    opts.checkpointPath = checkpointPath;
    opts.checkpointEvery = checkpointEvery;
    return opts;
}

std::vector<int> RunConfig::resolved_watched_levels() const {
    return watchedLevels.empty() ? superposition.default_watched_levels(model) : watchedLevels;
}

bool operator==(const RunConfig& a, const RunConfig& b) {
    for (const auto& f : fields()) {
        if (f.get(a) != f.get(b)) return false;
    }
    return true;
}

std::vector<std::string> known_keys() {
    std::vector<std::string> keys;
    for (const auto& f : fields()) keys.emplace_back(f.key);
    return keys;
}

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
    field(key).set(config, key, value);
}

std::pair<std::string, std::string> split_assignment(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(text, "expected section.key=value");
    return {trim(text.substr(0, eq)), trim(text.substr(eq + 1))};
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    try {
        boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("line " + std::to_string(e.line()), e.message());
    }
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigError(section, "key outside of a section");
        for (const auto& [name, value] : body) {
            apply_setting(base, section + "." + name, value.data());
        }
    }
    return base;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), std::move(base));
}

std::string serialize_config(const RunConfig& config) {
    std::ostringstream out;
    std::string current;
    for (const auto& f : fields()) {
        const std::string key = f.key;
        const auto dot = key.find('.');
        const std::string section = key.substr(0, dot);
        if (section != current) {
            if (!current.empty()) out << '\n';
            out << '[' << section << "]\n";
            current = section;
        }
        out << key.substr(dot + 1) << " = " << f.get(config) << '\n';
    }
    return out.str();
}

void write_config_file(const std::string& path, const RunConfig& config) {
    std::ofstream out(path);
    if (!out) throw ConfigError(path, "cannot write resolved config");
    out << serialize_config(config);
}

std::string companion_path(const std::string& outputPath, const std::string& suffix) {
    const auto slash = outputPath.find_last_of('/');
    const auto dot = outputPath.find_last_of('.');
    const bool hasExt = dot != std::string::npos && (slash == std::string::npos || dot > slash);
    return (hasExt ? outputPath.substr(0, dot) : outputPath) + suffix;
}

}  // namespace polydecoh::io
