#pragma once

#include "edcast/backtest/forecaster.hpp"
#include "edcast/core/metrics.hpp"

#include <json.hpp>

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace edcast::backtest {

struct FoldResult {
    Date target_date;
    int horizon = 1;
    std::string model;
    std::string hyperparams;  // compact JSON of the set used
    double prediction = 0.0;
    double actual = 0.0;
};

struct Failure {
    Date target_date;
    int horizon = 1;
    std::string model;
    std::string message;
};

/// Hyperparameters chosen at a refit boundary.
struct Selection {
    ml::HyperParams hp;
    std::size_t candidate = 0;  // index into the forecaster's grid
    bool fallback = false;
};

/// Called once per refit boundary with the fold origin; may only consult
/// information dated at or before the origin.
using Selector = std::function<Selection(int horizon, std::size_t origin)>;

struct ModelRun {
    std::shared_ptr<const Forecaster> forecaster;
    std::size_t refit_period = 1;
    Selector selector;  // empty: first grid candidate
};

struct Prediction {
    std::size_t target = 0;
    bool ok = false;
    double value = 0.0;
    std::string error;
};

/// Fits once at origin first - h and predicts every target in [first, last].
/// Fit failures (other than contract violations) mark every day of the block
/// as failed.
std::vector<Prediction> fit_block(const Context& ctx, const Forecaster& f, int horizon, std::size_t first,
                                  std::size_t last, const Selection& selection);

/// Start offsets of refit blocks over `count` days.
std::vector<std::size_t> block_starts(std::size_t count, std::size_t period);

struct BacktestResult {
    std::vector<FoldResult> results;  // ordered by (model, horizon, date)
    std::vector<Failure> failures;
    std::map<std::pair<std::string, int>, std::size_t> fit_counts;
    std::vector<std::string> warnings;
};

/// Runs every model over the plan's test slice for every plan horizon.
BacktestResult run_backtest(const Context& ctx, const std::vector<ModelRun>& models);

struct Score {
    std::string model;
    int horizon = 1;
    ErrorSummary summary;
};

/// MAE/MAPE per (model, horizon), ordered by horizon then model.
std::vector<Score> score(const std::vector<FoldResult>& results);
/// Same, restricted per horizon to dates on which every model succeeded.
std::vector<Score> score_intersection(const std::vector<FoldResult>& results);

std::string results_csv(const std::vector<FoldResult>& results);
std::vector<FoldResult> parse_results_csv(std::string_view text);
nlohmann::json scores_json(const std::vector<Score>& scores, const std::vector<Score>& intersection,
                           std::size_t failures);

} // namespace edcast::backtest
