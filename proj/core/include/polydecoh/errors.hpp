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

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace polydecoh {

enum class ErrorKind {
    InvalidInput,
    Config,
    NonConvergence,
    NumericFailure,
    UnstableGeometry,
    Singularity,
    Checkpoint,
};

/// Base class of every error raised by the library. `module()` names the
/// component that raised it so the CLI can report provenance.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string module, const std::string& what)
        : std::runtime_error(module + ": " + what), kind_(kind), module_(std::move(module)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& module() const noexcept { return module_; }

private:
    ErrorKind kind_;
    std::string module_;
};

class InvalidInput : public Error {
public:
    InvalidInput(std::string module, const std::string& what)
        : Error(ErrorKind::InvalidInput, std::move(module), what) {}
};

class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& what)
        : Error(ErrorKind::Config, "config", "'" + key + "': " + what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class NonConvergence : public Error {
public:
    NonConvergence(std::string module, const std::string& what, std::vector<double> residuals)
        : Error(ErrorKind::NonConvergence, std::move(module), what), residuals_(std::move(residuals)) {}
    const std::vector<double>& residual_history() const noexcept { return residuals_; }

private:
    std::vector<double> residuals_;
};

class NumericFailure : public Error {
public:
    NumericFailure(std::string module, const std::string& what)
        : Error(ErrorKind::NumericFailure, std::move(module), what) {}
};

class UnstableGeometry : public Error {
public:
    UnstableGeometry(const std::string& what, std::vector<int> modes)
        : Error(ErrorKind::UnstableGeometry, "phonons", what), modes_(std::move(modes)) {}
    /// 1-based indices of the modes with non-positive curvature.
    const std::vector<int>& modes() const noexcept { return modes_; }

private:
    std::vector<int> modes_;
};

class SingularityError : public Error {
public:
    SingularityError(const std::string& what, int occupiedLevel, int emptyLevel)
        : Error(ErrorKind::Singularity, "phonons", what), occupied_(occupiedLevel), empty_(emptyLevel) {}
    int occupied_level() const noexcept { return occupied_; }
    int empty_level() const noexcept { return empty_; }

private:
    int occupied_;
    int empty_;
};

class CheckpointError : public Error {
public:
    explicit CheckpointError(const std::string& what)
        : Error(ErrorKind::Checkpoint, "ensemble", what) {}
};

/// Process exit code for an error: configuration problems 2, convergence
/// failures 3, numerical failures 4, anything else 1.
inline int exit_code(const Error& e) noexcept {
    switch (e.kind()) {
    case ErrorKind::InvalidInput:
    case ErrorKind::Config:
        return 2;
    case ErrorKind::NonConvergence:
        return 3;
    case ErrorKind::NumericFailure:
    case ErrorKind::UnstableGeometry:
    case ErrorKind::Singularity:
        return 4;
    case ErrorKind::Checkpoint:
        return 1;
    }
    return 1;
}

}  // namespace polydecoh
