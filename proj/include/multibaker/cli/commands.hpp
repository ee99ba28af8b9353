// Copyright 2026 The multibaker Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <multibaker/cli/config.hpp>

#include <json.hpp>

#include <string>
#include <vector>

namespace multibaker::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

struct OutputFile {
    std::string name;
    std::string contents;
};

/// Everything a command produced, held in memory until the run succeeds.
struct CommandResult {
    std::vector<OutputFile> files;
    nlohmann::json notes = nlohmann::json::object();  ///< copied into the manifest

    const OutputFile* find(const std::string& name) const;
};

CommandResult run_current_sweep(const ResolvedConfig& config, int threads);
CommandResult run_spectrum(const ResolvedConfig& config, int threads);
CommandResult run_level_stats(const ResolvedConfig& config, int threads);
CommandResult run_evolve(const ResolvedConfig& config, int threads);
CommandResult run_experiment(const ResolvedConfig& config, int threads);

/// Writes every file plus manifest.json (config snapshot, version, wall
/// clock, per-file SHA-256) into config.out. Returns the manifest.
nlohmann::json write_outputs(const ExperimentConfig& config, const ResolvedConfig& resolved,
                             const CommandResult& result, double wall_seconds, int threads);

/// Full command-line entry point; returns the process exit code.
int run_main(int argc, const char* const* argv);

}  // namespace multibaker::cli
