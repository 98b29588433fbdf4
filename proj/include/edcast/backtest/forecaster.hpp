#pragma once

#include "edcast/backtest/plan.hpp"
#include "edcast/core/series.hpp"
#include "edcast/features/matrix.hpp"
#include "edcast/ingest/covariates.hpp"
#include "edcast/ml/hyperparams.hpp"
#include "edcast/ts/arima.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace edcast::backtest {

/// Everything a fold may read: the series, covariates, plan and one model
/// matrix per horizon. Forecasters only touch indices up to the fold origin.
class Context {
public:
    Context(DailySeries series, ingest::CovariateTable cov, Plan plan, std::uint64_t seed = 0, unsigned jobs = 1);

    const DailySeries& series() const { return series_; }
    const ingest::CovariateTable& covariates() const { return cov_; }
    const Plan& plan() const { return plan_; }
    std::uint64_t seed() const { return seed_; }
    unsigned jobs() const { return jobs_; }

    const features::ModelMatrix& matrix(int horizon) const;
    /// The train_len days ending at `origin`.
    DailySeries window(std::size_t origin) const;

private:
    DailySeries series_;
    ingest::CovariateTable cov_;
    Plan plan_;
    std::uint64_t seed_;
    unsigned jobs_;
    std::map<int, features::ModelMatrix> matrices_;
};

/// A model fitted for one horizon on the window ending at `origin()`.
class Fitted {
public:
    Fitted(int horizon, std::size_t origin, ml::HyperParams hp) : horizon_(horizon), origin_(origin), hp_(std::move(hp)) {}
    virtual ~Fitted() = default;

    int horizon() const { return horizon_; }
    std::size_t origin() const { return origin_; }
    const ml::HyperParams& hyperparams() const { return hp_; }

    /// Prediction for target index t >= origin + horizon; the state may roll
    /// forward to t - horizon but parameters stay as fitted.
    virtual double predict(const Context& ctx, std::size_t target) const = 0;

private:
    int horizon_;
    std::size_t origin_;
    ml::HyperParams hp_;
};

class Forecaster {
public:
    virtual ~Forecaster() = default;
    virtual std::string id() const = 0;
    /// Candidate hyperparameters; untuned models have the single empty set.
    virtual std::vector<ml::HyperParams> grid(const Context& ctx, int horizon) const;
    /// Complexity key used by the default selection rule (smaller = simpler).
    virtual std::vector<double> simplicity(const ml::HyperParams& hp) const;
    /// Fits on the train_len days ending at `origin`.
    virtual std::shared_ptr<const Fitted> fit(const Context& ctx, int horizon, std::size_t origin,
                                              const ml::HyperParams& hp, std::uint64_t seed) const = 0;
};

struct ForecasterOptions {
    std::optional<std::vector<ml::HyperParams>> grid;  // replaces the default grid
    std::optional<std::vector<ts::ArimaOrder>> arima_grid;
};

/// Known ids: arima, ets, stlm, structts, lm, glmnet, gbm, rf, knn, snaive.
std::shared_ptr<const Forecaster> make_forecaster(const std::string& id, const ForecasterOptions& options = {});
const std::vector<std::string>& model_ids();
bool is_ts_model(const std::string& id);
bool is_ml_model(const std::string& id);

/// Sub-seed for the fit of candidate `candidate` at `origin`.
std::uint64_t fit_seed(std::uint64_t seed, const std::string& model, int horizon, std::size_t origin,
                       std::size_t candidate);

} // namespace edcast::backtest
