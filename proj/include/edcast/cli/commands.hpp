#pragma once

#include "edcast/cli/experiment.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

namespace edcast::cli {

enum ExitCode : int { exit_ok = 0, exit_runtime = 1, exit_usage = 2 };

/// Flags shared by every subcommand. Overrides take precedence over the
/// config file.
struct GlobalOptions {
    std::optional<std::filesystem::path> config;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> jobs;
    std::optional<std::filesystem::path> out;
    std::ostream* out_stream = nullptr;  // machine-readable summary; std::cout when null
    std::ostream* log_stream = nullptr;  // JSON event lines; std::cerr when null
};

/// Runs `body`, mapping exceptions to exit codes: ConfigError, SpecRejected
/// and ContractViolation give 2, every other failure 1. Errors are reported
/// as one JSON event on the log stream.
int guarded(const std::string& command, const GlobalOptions& g, const std::function<void(const EventSink&)>& body);

/// Loads the config named by --config and applies --seed/--jobs/--out.
ExperimentConfig effective_config(const GlobalOptions& g);

/// `spec` is a bundled name or a JSON file path. Writes attendance.csv,
/// covariates.csv and truth.json (plus raw/ ingest inputs with `raw`).
/// Nothing is written unless the spec is valid and generation succeeds.
int cmd_synth(const std::string& spec, std::optional<std::size_t> n_days, bool raw, const GlobalOptions& g);
/// Loads and validates the configured data and writes the aligned
/// attendance.csv, covariates.csv and ingest.json.
int cmd_ingest(const GlobalOptions& g);
/// matrix_h<h>.csv for every configured horizon.
int cmd_features(const GlobalOptions& g);
/// Ledgers and the selection each policy would make at the first test fold.
int cmd_tune(const GlobalOptions& g);
/// Full tuned backtest with stacking and scores.
int cmd_backtest(const GlobalOptions& g);
/// Refits the stackers from a backtest output directory's stack_train_h<h>.csv
/// and results.csv, then rewrites the stack rows, weights and scores.
int cmd_stack(const GlobalOptions& g);
/// importance_<model>_h<h>.json and .csv.
int cmd_importance(const std::string& model, bool identity_permutation, const GlobalOptions& g);

} // namespace edcast::cli
