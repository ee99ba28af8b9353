// Copyright 2026 The multibaker Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace multibaker::cli {

/// Bad command line or config file. Maps to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind { current_sweep, spectrum, level_stats, evolve };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& name);

struct D1Range {
    int first = 0;
    int last = 0;  // inclusive

    friend bool operator==(const D1Range&, const D1Range&) = default;
};

/// Everything a run needs. Unset optionals take per-experiment defaults in
/// resolve(); the file form stores only what was set.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::current_sweep;
    std::optional<int> D;
    std::vector<int> D1;  ///< explicit list; empty means "use range or default"
    std::optional<D1Range> D1_range;
    std::vector<int> delta_p;  ///< number of central momentum states
    std::optional<double> dp_width;  ///< momentum band width delta p in (0, 1]
    std::optional<int> n_k;
    std::optional<int> t_max;
    std::optional<std::int64_t> mc_samples;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    bool svg = false;
    bool full_range = false;  ///< current-sweep over D = 20, 30, ..., 290
    std::optional<int> panel_t;
    std::optional<int> husimi_resolution;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// `key = value` lines; `#` starts a comment; blank lines ignored.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);
std::string to_config_text(const ExperimentConfig& config);

/// One concrete job per cell dimension after defaults are applied.
struct ResolvedSweep {
    int D = 0;
    std::vector<int> D1;
    std::vector<int> delta_p;
};

struct ResolvedConfig {
    ExperimentKind kind = ExperimentKind::current_sweep;
    std::vector<ResolvedSweep> sweeps;  ///< one entry except for full-range current sweeps
    int n_k = 0;
    int t_max = 0;
    std::int64_t mc_samples = 0;
    std::uint64_t seed = 0;
    std::string out;
    bool svg = false;
    int panel_t = 0;
    std::vector<int> panel_cells;
    int husimi_resolution = 0;
};

/// Applies defaults and validates every constraint; throws ConfigError.
ResolvedConfig resolve(const ExperimentConfig& config);

/// Parses "lo:hi" (inclusive).
D1Range parse_d1_range(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

}  // namespace multibaker::cli
