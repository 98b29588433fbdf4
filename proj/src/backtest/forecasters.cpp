#include "edcast/backtest/forecaster.hpp"

#include "edcast/core/errors.hpp"
#include "edcast/core/random.hpp"
#include "edcast/ml/linear.hpp"
#include "edcast/ml/model.hpp"
#include "edcast/ts/ets.hpp"
#include "edcast/ts/stlm.hpp"
#include "edcast/ts/structts.hpp"

#include <algorithm>

namespace edcast::backtest {

Context::Context(DailySeries series, ingest::CovariateTable cov, Plan plan, std::uint64_t seed, unsigned jobs)
    : series_(std::move(series)), cov_(std::move(cov)), plan_(std::move(plan)), seed_(seed), jobs_(std::max(1u, jobs)) {
    if (plan_.total_len != series_.size()) {
        throw ContractViolation("plan covers " + std::to_string(plan_.total_len) + " days but the series has " +
                                std::to_string(series_.size()));
    }
    for (int h : plan_.horizons) {
        if (features::warmup_days(h) >= plan_.train_len) {
            throw ContractViolation("train_len " + std::to_string(plan_.train_len) + " leaves no training rows at horizon " +
                                    std::to_string(h));
        }
        matrices_.emplace(h, features::build_matrix(series_, cov_, h));
    }
}

const features::ModelMatrix& Context::matrix(int horizon) const {
    auto it = matrices_.find(horizon);
    if (it == matrices_.end()) throw ContractViolation("horizon " + std::to_string(horizon) + " is not in the plan");
    return it->second;
}

DailySeries Context::window(std::size_t origin) const {
    if (origin >= series_.size() || origin + 1 < plan_.train_len) {
        throw ContractViolation("no full training window ends at index " + std::to_string(origin));
    }
    return series_.slice(plan_.window_start(origin), plan_.train_len);
}

std::vector<ml::HyperParams> Forecaster::grid(const Context&, int) const { return {ml::HyperParams{}}; }
std::vector<double> Forecaster::simplicity(const ml::HyperParams&) const { return {}; }

std::uint64_t fit_seed(std::uint64_t seed, const std::string& model, int horizon, std::size_t origin,
                       std::size_t candidate) {
    return derive_seed(seed, {hash_name(model), static_cast<std::uint64_t>(horizon), origin, candidate});
}

namespace {

void check_target(const Fitted& f, std::size_t target) {
    if (target < f.origin() + static_cast<std::size_t>(f.horizon())) {
        throw ContractViolation("target index " + std::to_string(target) + " is less than " +
                                std::to_string(f.horizon()) + " days after the fit origin " + std::to_string(f.origin()));
    }
}

class SeasonalNaiveFit final : public Fitted {
public:
    using Fitted::Fitted;
    double predict(const Context& ctx, std::size_t target) const override {
        check_target(*this, target);
        const std::size_t lag = 7 * static_cast<std::size_t>((horizon() + 6) / 7);
        return ctx.series()[target - lag];
    }
};

class SeasonalNaive final : public Forecaster {
public:
    std::string id() const override { return "snaive"; }
    std::shared_ptr<const Fitted> fit(const Context&, int horizon, std::size_t origin, const ml::HyperParams& hp,
                                      std::uint64_t) const override {
        return std::make_shared<SeasonalNaiveFit>(horizon, origin, hp);
    }
};

class TsFit final : public Fitted {
public:
    TsFit(int horizon, std::size_t origin, ml::HyperParams hp, std::shared_ptr<const ts::TsModel> model)
        : Fitted(horizon, origin, std::move(hp)), model_(std::move(model)) {}

    double predict(const Context& ctx, std::size_t target) const override {
        check_target(*this, target);
        const std::size_t o = target - static_cast<std::size_t>(horizon());
        const int max_h = std::max(7, horizon());
        if (o == origin()) return model_->forecast(horizon(), max_h);
        return model_->refilter(ctx.window(o))->forecast(horizon(), max_h);
    }

private:
    std::shared_ptr<const ts::TsModel> model_;
};

class TsForecaster final : public Forecaster {
public:
    TsForecaster(std::string id, std::optional<std::vector<ts::ArimaOrder>> arima_grid)
        : id_(std::move(id)), arima_grid_(std::move(arima_grid)) {}

    std::string id() const override { return id_; }

    std::shared_ptr<const Fitted> fit(const Context& ctx, int horizon, std::size_t origin, const ml::HyperParams& hp,
                                      std::uint64_t) const override {
        if (!hp.values().empty()) throw ContractViolation(id_ + " takes no hyperparameters");
        const DailySeries w = ctx.window(origin);
        std::shared_ptr<const ts::TsModel> model;
        if (id_ == "arima") {
            model = std::make_shared<ts::ArimaModel>(arima_grid_ ? ts::fit_arima(w, *arima_grid_) : ts::fit_arima(w));
        } else if (id_ == "ets") {
            model = std::make_shared<ts::EtsModel>(ts::fit_ets(w));
        } else if (id_ == "stlm") {
            model = std::make_shared<ts::StlmModel>(ts::fit_stlm(w));
        } else {
            model = std::make_shared<ts::StructModel>(ts::fit_structts(w));
        }
        return std::make_shared<TsFit>(horizon, origin, hp, std::move(model));
    }

private:
    std::string id_;
    std::optional<std::vector<ts::ArimaOrder>> arima_grid_;
};

class MlFit final : public Fitted {
public:
    MlFit(int horizon, std::size_t origin, ml::HyperParams hp, std::shared_ptr<const ml::MlModel> model)
        : Fitted(horizon, origin, std::move(hp)), model_(std::move(model)) {}

    double predict(const Context& ctx, std::size_t target) const override {
        check_target(*this, target);
        const auto& m = ctx.matrix(horizon());
        const std::size_t row = target - features::warmup_days(horizon());
        return model_->predict(m.row(row));
    }

private:
    std::shared_ptr<const ml::MlModel> model_;
};

// Rows whose targets and lagged inputs all lie in the window ending at origin.
features::ModelMatrix training_rows(const Context& ctx, int horizon, std::size_t origin) {
    const auto& m = ctx.matrix(horizon);
    const std::size_t warmup = features::warmup_days(horizon);
    const std::size_t first = ctx.plan().window_start(origin);
    const std::size_t count = ctx.plan().train_len - warmup;
    auto rows = m.slice(first, count);
    if (rows.dates().back() != ctx.series().date_at(origin) ||
        add_days(rows.dates().front(), -static_cast<long>(warmup)) != ctx.series().date_at(first)) {
        throw ContractViolation("training rows escape the window ending at index " + std::to_string(origin));
    }
    return rows;
}

class MlForecaster final : public Forecaster {
public:
    MlForecaster(ml::ModelKind kind, std::optional<std::vector<ml::HyperParams>> grid)
        : kind_(kind), grid_(std::move(grid)) {}

    std::string id() const override { return ml::to_string(kind_); }

    std::vector<ml::HyperParams> grid(const Context& ctx, int horizon) const override {
        if (grid_) return *grid_;
        const auto& m = ctx.matrix(horizon);
        std::map<double, double> lambda_max;
        if (kind_ == ml::ModelKind::glmnet) {
            // fixed from the earliest window the experiment ever fits
            const auto rows = training_rows(ctx, horizon, ctx.plan().valid_start() - static_cast<std::size_t>(horizon));
            for (double alpha : {0.0, 0.5, 1.0}) lambda_max[alpha] = ml::glmnet_lambda_max(rows, alpha);
        }
        return ml::default_grid(kind_, m.cols(), lambda_max);
    }

    std::vector<double> simplicity(const ml::HyperParams& hp) const override { return ml::simplicity_key(kind_, hp); }

    std::shared_ptr<const Fitted> fit(const Context& ctx, int horizon, std::size_t origin, const ml::HyperParams& hp,
                                      std::uint64_t seed) const override {
        ml::FitOptions options;
        options.seed = seed;
        auto model = ml::fit_model(kind_, training_rows(ctx, horizon, origin), hp, options);
        return std::make_shared<MlFit>(horizon, origin, hp, std::move(model));
    }

private:
    ml::ModelKind kind_;
    std::optional<std::vector<ml::HyperParams>> grid_;
};

} // namespace

const std::vector<std::string>& model_ids() {
    static const std::vector<std::string> ids{"arima", "ets", "stlm", "structts", "lm",
                                              "glmnet", "gbm", "rf", "knn", "snaive"};
    return ids;
}

bool is_ts_model(const std::string& id) {
    return id == "arima" || id == "ets" || id == "stlm" || id == "structts";
}

bool is_ml_model(const std::string& id) {
    return id == "lm" || id == "glmnet" || id == "gbm" || id == "rf" || id == "knn";
}

std::shared_ptr<const Forecaster> make_forecaster(const std::string& id, const ForecasterOptions& options) {
    if (is_ml_model(id)) {
        if (options.grid) {
            if (options.grid->empty()) throw ContractViolation("empty grid for " + id);
            for (const auto& hp : *options.grid) ml::validate(ml::parse_model_kind(id), hp);
        }
        return std::make_shared<MlForecaster>(ml::parse_model_kind(id), options.grid);
    }
    if (options.grid) throw ContractViolation(id + " has no hyperparameter grid");
    if (is_ts_model(id)) return std::make_shared<TsForecaster>(id, options.arima_grid);
    if (id == "snaive") return std::make_shared<SeasonalNaive>();
    throw ContractViolation("unknown model '" + id + "'");
}

} // namespace edcast::backtest
