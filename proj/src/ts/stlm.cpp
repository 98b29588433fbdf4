#include "edcast/ts/stlm.hpp"

#include "edcast/core/errors.hpp"
#include "edcast/core/optim.hpp"
#include "edcast/core/stl.hpp"

#include <numeric>

namespace edcast::ts {

namespace {

constexpr std::size_t kPeriod = 7;

struct HoltRun {
    double level = 0.0, trend = 0.0, sse = 0.0;
};

HoltRun run_holt(std::span<const double> y, double alpha, double beta) {
    HoltRun s;
    const double m1 = std::accumulate(y.begin(), y.begin() + 7, 0.0) / 7.0;
    const double m2 = std::accumulate(y.begin() + 7, y.begin() + 14, 0.0) / 7.0;
    s.trend = (m2 - m1) / 7.0;
    s.level = m1 - 4.0 * s.trend;
    for (double obs : y) {
        const double e = obs - (s.level + s.trend);
        s.sse += e * e;
        const double level = alpha * obs + (1.0 - alpha) * (s.level + s.trend);
        s.trend = beta * (level - s.level) + (1.0 - beta) * s.trend;
        s.level = level;
    }
    return s;
}

std::vector<double> seasonally_adjusted(const DailySeries& series, std::array<double, 7>& cycle) {
    if (series.size() < 3 * kPeriod) throw InsufficientData("STL + Holt needs at least 21 observations");
    auto dec = decompose_stl(series, kPeriod);
    const std::size_t n = series.size();
    std::vector<double> adj(n);
    for (std::size_t i = 0; i < n; ++i) adj[i] = series[i] - dec.seasonal[i];
    for (std::size_t k = 0; k < kPeriod; ++k) cycle[k] = dec.seasonal[n - kPeriod + k];
    return adj;
}

} // namespace

double holt_sse(std::span<const double> y, double alpha, double beta) {
    if (y.size() < 14) throw InsufficientData("Holt needs at least 14 observations");
    return run_holt(y, alpha, beta).sse;
}

StlmModel::StlmModel(const DailySeries& series, double alpha, double beta) : alpha_(alpha), beta_(beta) {
    if (!(alpha >= 0.0 && alpha <= 1.0 && beta >= 0.0 && beta <= 1.0)) {
        throw ContractViolation("smoothing weights must lie in [0,1]");
    }
    auto adj = seasonally_adjusted(series, cycle_);
    auto run = run_holt(adj, alpha, beta);
    level_ = run.level;
    trend_ = run.trend;
}

double StlmModel::forecast_impl(int h) const {
    return level_ + h * trend_ + cycle_[static_cast<std::size_t>(h - 1) % kPeriod];
}

std::shared_ptr<const TsModel> StlmModel::refilter(const DailySeries& series) const {
    return std::make_shared<StlmModel>(series, alpha_, beta_);
}

nlohmann::json StlmModel::snapshot() const {
    return {{"kind", "stlm"}, {"alpha", alpha_}, {"beta", beta_},
            {"level", level_}, {"trend", trend_}, {"last_cycle", cycle_}};
}

StlmModel fit_stlm(const DailySeries& series) {
    std::array<double, 7> cycle{};
    auto adj = seasonally_adjusted(series, cycle);
    auto objective = [&](const std::vector<double>& x) { return run_holt(adj, x[0], x[1]).sse; };
    Bounds box{{0.0, 0.0}, {1.0, 1.0}};
    NelderMeadOptions opt;
    auto res = nelder_mead(objective, {0.3, 0.1}, opt, &box);
    if (!res.converged) {
        throw FitFailure("Holt weights did not converge within " + std::to_string(opt.max_evals) +
                             " evaluations",
                         res.x);
    }
    return StlmModel(series, res.x[0], res.x[1]);
}

} // namespace edcast::ts
