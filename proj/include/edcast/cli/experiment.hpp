#pragma once

#include "edcast/backtest/engine.hpp"
#include "edcast/ensemble/importance.hpp"
#include "edcast/ensemble/stack.hpp"
#include "edcast/synth/synth.hpp"
#include "edcast/tuner/tuner.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace edcast::cli {

/// Receives structured progress events.
using EventSink = std::function<void(const nlohmann::json&)>;

struct SynthSource {
    nlohmann::json spec;  // resolved generator spec
    std::optional<std::size_t> n_days;
};

struct FileSource {
    std::filesystem::path attendance;
    std::filesystem::path covariates;
};

struct RawSource {
    std::filesystem::path attendance;
    std::filesystem::path calendar;
    std::filesystem::path weather;
    std::vector<std::filesystem::path> trends_daily;
    std::filesystem::path trends_monthly;
};

struct ImportanceSettings {
    int n_repeats = 10;
    int horizon = 1;
    bool decoy = false;
    std::map<std::string, ml::HyperParams> hyperparams;
};

struct ExperimentConfig {
    std::variant<SynthSource, FileSource, RawSource> data;
    std::vector<int> horizons{1, 3, 7};
    std::vector<std::string> models;
    std::map<std::string, std::vector<ml::HyperParams>> grids;
    std::optional<std::vector<ts::ArimaOrder>> arima_grid;
    tuner::TunerPolicy policy;
    std::size_t ts_refit_period = 1;
    std::size_t ledger_refit_period = 1;
    backtest::PlanOverrides geometry;
    bool stacking = false;
    std::vector<ensemble::StackVariant> stack_variants{ensemble::StackVariant::convex};
    std::vector<std::string> stack_models;  // empty: every configured model except snaive
    ImportanceSettings importance;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    std::filesystem::path output_dir = "edcast-out";

    /// Validates against the experiment schema, then resolves relative paths
    /// against `base_dir`. Throws ConfigError listing every schema violation.
    static ExperimentConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");
    static ExperimentConfig load(const std::filesystem::path& path);

    backtest::ForecasterOptions forecaster_options(const std::string& model) const;
    /// Models fed to the stacker.
    std::vector<std::string> stacked_models() const;
};

/// Parses a generator spec given as a bundled name, a path to a JSON file or
/// inline JSON, after checking it against the spec schema. Throws
/// ConfigError with the schema diagnostics.
synth::DgpSpec resolve_spec(const nlohmann::json& spec, const std::filesystem::path& base_dir = ".");

struct Dataset {
    DailySeries series;
    ingest::CovariateTable covariates;
    std::vector<Date> imputed;  // attendance days filled by interpolation
};

/// Loads or generates the configured data; covariates are cut to the
/// series' date range and must cover it.
Dataset load_dataset(const ExperimentConfig& config);

/// Validation-slice predictions of the stacked models for one horizon.
/// Only target dates no later than the first test origin are kept, so the
/// stacker never sees an actual observed after a test fold's origin.
struct StackTrainingSet {
    int horizon = 1;
    std::vector<std::string> models;
    std::vector<Date> dates;
    std::vector<double> actual;
    std::vector<std::vector<double>> predictions;  // [model][date]
    std::vector<std::string> candidates;           // hyperparameters used per model

    std::string csv() const;
    static StackTrainingSet parse_csv(std::string_view text, int horizon);
};

struct StackFit {
    int horizon = 1;
    std::size_t train_rows = 0;
    ensemble::StackWeights weights;
};

struct StackOutcome {
    std::vector<StackFit> fits;
    std::vector<backtest::FoldResult> results;  // model "stack_<variant>"
    std::vector<backtest::Failure> failures;
    std::vector<std::string> warnings;
};

/// Fits each variant per horizon and applies it to the base models' test
/// predictions.
StackOutcome apply_stacking(const std::vector<StackTrainingSet>& training,
                            const std::vector<backtest::FoldResult>& base_results,
                            const std::vector<ensemble::StackVariant>& variants);

using LedgerMap = std::map<std::pair<std::string, int>, tuner::ValidationLedger>;

/// Ledgers for every model that is tuned (more than one candidate) or
/// stacked. Extended into the test slice when the policy needs it.
LedgerMap build_ledgers(const ExperimentConfig& config, const backtest::Context& ctx, const EventSink& events = {});

/// Selection for each ledger as of the first test fold of its horizon.
nlohmann::json selections_json(const ExperimentConfig& config, const backtest::Context& ctx, const LedgerMap& ledgers);

struct ExperimentResult {
    backtest::Plan plan;
    std::vector<backtest::FoldResult> results;  // base models, then stacks
    std::vector<backtest::Failure> failures;
    std::map<std::pair<std::string, int>, std::size_t> fit_counts;
    std::vector<std::string> warnings;
    LedgerMap ledgers;
    std::vector<StackTrainingSet> stack_training;
    std::vector<StackFit> stacks;
    std::vector<backtest::Score> scores;
    std::vector<backtest::Score> intersection;
};

backtest::Context make_context(const ExperimentConfig& config, const Dataset& data);

/// Ledgers, tuned rolling-origin runs, stacking and scores.
ExperimentResult run_experiment(const ExperimentConfig& config, const Dataset& data, const EventSink& events = {});

nlohmann::json scores_report(const ExperimentResult& result);
nlohmann::json stacks_json(const std::vector<StackFit>& fits);

/// results.csv, scores.json, run.json, ledgers/ledger_<model>_h<h>.csv and,
/// when stacking ran, stack_weights.json and stack_train_h<h>.csv.
void write_experiment(const ExperimentResult& result, const std::filesystem::path& dir);

/// Fits `model` on the training window ending at the first test origin of
/// the importance horizon and permutes features on the test slice.
ensemble::ImportanceReport compute_importance(const ExperimentConfig& config, const Dataset& data,
                                              const std::string& model, bool identity_permutation = false,
                                              const EventSink& events = {});

} // namespace edcast::cli
