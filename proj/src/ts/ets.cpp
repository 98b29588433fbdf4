#include "edcast/ts/ets.hpp"

#include "edcast/core/errors.hpp"
#include "edcast/core/optim.hpp"

#include <numeric>

namespace edcast::ts {

namespace {

constexpr std::size_t kPeriod = 7;

struct HwRun {
    double level = 0.0, trend = 0.0;
    std::array<double, kPeriod> slots{};  // slot (t-1) % 7 holds the latest seasonal of that phase
    double sse = 0.0;
};

void initial_level_trend(std::span<const double> y, double& level, double& trend) {
    const double m1 = std::accumulate(y.begin(), y.begin() + 7, 0.0) / 7.0;
    const double m2 = std::accumulate(y.begin() + 7, y.begin() + 14, 0.0) / 7.0;
    trend = (m2 - m1) / 7.0;
    level = m1 - 4.0 * trend;  // the first week's mean sits at t = 4
}

HwRun run_hw(std::span<const double> y, double alpha, double beta, double gamma) {
    HwRun s;
    initial_level_trend(y, s.level, s.trend);
    const std::size_t cycles = std::min<std::size_t>(4, y.size() / kPeriod);
    for (std::size_t t = 1; t <= cycles * kPeriod; ++t) {
        s.slots[(t - 1) % kPeriod] += (y[t - 1] - (s.level + s.trend * static_cast<double>(t))) /
                                      static_cast<double>(cycles);
    }
    double mean = std::accumulate(s.slots.begin(), s.slots.end(), 0.0) / kPeriod;
    for (double& v : s.slots) v -= mean;

    for (std::size_t t = 1; t <= y.size(); ++t) {
        double& seas = s.slots[(t - 1) % kPeriod];
        const double obs = y[t - 1];
        const double e = obs - (s.level + s.trend + seas);
        s.sse += e * e;
        const double level = alpha * (obs - seas) + (1.0 - alpha) * (s.level + s.trend);
        const double trend = beta * (level - s.level) + (1.0 - beta) * s.trend;
        seas = gamma * (obs - s.level - s.trend) + (1.0 - gamma) * seas;
        s.level = level;
        s.trend = trend;
        // Keep the seasonal states centred; the offset moves into the level so
        // forecasts are unchanged.
        mean = std::accumulate(s.slots.begin(), s.slots.end(), 0.0) / kPeriod;
        for (double& v : s.slots) v -= mean;
        s.level += mean;
    }
    return s;
}

void check_length(const DailySeries& series) {
    if (series.size() < 3 * kPeriod) throw InsufficientData("Holt-Winters needs at least 21 observations");
}

} // namespace

double ets_sse(std::span<const double> y, double alpha, double beta, double gamma) {
    if (y.size() < 3 * kPeriod) throw InsufficientData("Holt-Winters needs at least 21 observations");
    return run_hw(y, alpha, beta, gamma).sse;
}

EtsModel::EtsModel(const DailySeries& series, double alpha, double beta, double gamma) {
    check_length(series);
    for (double w : {alpha, beta, gamma}) {
        if (!(w >= 0.0 && w <= 1.0)) throw ContractViolation("smoothing weights must lie in [0,1]");
    }
    HwRun run = run_hw(series.values(), alpha, beta, gamma);
    state_.level = run.level;
    state_.trend = run.trend;
    const std::size_t n = series.size();
    for (std::size_t k = 0; k < kPeriod; ++k) state_.seasonals[k] = run.slots[(n + k) % kPeriod];
    state_.alpha = alpha;
    state_.beta = beta;
    state_.gamma = gamma;
    state_.sse = run.sse;
}

double EtsModel::forecast_impl(int h) const {
    return state_.level + h * state_.trend + state_.seasonals[static_cast<std::size_t>(h - 1) % kPeriod];
}

std::shared_ptr<const TsModel> EtsModel::refilter(const DailySeries& series) const {
    return std::make_shared<EtsModel>(series, state_.alpha, state_.beta, state_.gamma);
}

nlohmann::json EtsModel::snapshot() const {
    return {{"kind", "ets"},
            {"alpha", state_.alpha},
            {"beta", state_.beta},
            {"gamma", state_.gamma},
            {"level", state_.level},
            {"trend", state_.trend},
            {"seasonals", state_.seasonals},
            {"sse", state_.sse}};
}

EtsModel fit_ets(const DailySeries& series) {
    check_length(series);
    const auto y = series.values();
    auto objective = [&](const std::vector<double>& x) { return run_hw(y, x[0], x[1], x[2]).sse; };
    Bounds box{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}};
    NelderMeadOptions opt;
    auto res = nelder_mead(objective, {0.3, 0.1, 0.1}, opt, &box);
    if (!res.converged) {
        throw FitFailure("Holt-Winters weights did not converge within " + std::to_string(opt.max_evals) +
                             " evaluations",
                         res.x);
    }
    return EtsModel(series, res.x[0], res.x[1], res.x[2]);
}

} // namespace edcast::ts
