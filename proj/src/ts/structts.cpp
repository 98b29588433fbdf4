#include "edcast/ts/structts.hpp"

#include "edcast/core/errors.hpp"
#include "edcast/core/optim.hpp"

#include <cmath>
#include <numeric>

namespace edcast::ts {

namespace {

constexpr int kDim = 8;
constexpr std::size_t kBurnIn = kDim;

double sample_variance(std::span<const double> y) {
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    double s = 0.0;
    for (double v : y) s += (v - mean) * (v - mean);
    return y.size() > 1 ? s / static_cast<double>(y.size() - 1) : 0.0;
}

KalmanResult run_bsm(std::span<const double> y, const StructVariances& v, bool track) {
    const double scale = 1e6 * sample_variance(y);
    Eigen::VectorXd a0 = Eigen::VectorXd::Zero(kDim);
    a0(0) = y[0];
    Eigen::MatrixXd P0 = scale * Eigen::MatrixXd::Identity(kDim, kDim);
    KalmanOptions opt;
    opt.burn_in = kBurnIn;
    opt.track_min_eigenvalue = track;
    return kalman_filter(bsm_state_space(v), y, a0, P0, opt);
}

} // namespace

StateSpace bsm_state_space(const StructVariances& v) {
    StateSpace m;
    m.T = Eigen::MatrixXd::Zero(kDim, kDim);
    m.T(0, 0) = 1.0;
    m.T(0, 1) = 1.0;
    m.T(1, 1) = 1.0;
    for (int j = 2; j < kDim; ++j) m.T(2, j) = -1.0;
    for (int i = 3; i < kDim; ++i) m.T(i, i - 1) = 1.0;
    m.Z = Eigen::RowVectorXd::Zero(kDim);
    m.Z(0) = 1.0;
    m.Z(2) = 1.0;
    m.Q = Eigen::MatrixXd::Zero(kDim, kDim);
    m.Q(0, 0) = v.level;
    m.Q(1, 1) = v.slope;
    m.Q(2, 2) = v.seasonal;
    m.H = v.obs;
    return m;
}

StructModel::StructModel(const DailySeries& series, const StructVariances& v) {
    if (series.size() < 21) throw InsufficientData("structural model needs at least 21 observations");
    for (double x : {v.level, v.slope, v.seasonal, v.obs}) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw ContractViolation("variances must be finite and >= 0");
    }
    auto res = run_bsm(series.values(), v, true);
    params_.variances = v;
    params_.state = res.filtered_mean;
    params_.cov = res.filtered_cov;
    params_.loglik = res.loglik;
    params_.min_eigenvalue = res.min_eigenvalue;
}

double StructModel::forecast_impl(int h) const {
    return kalman_forecast(bsm_state_space(params_.variances), params_.state, h);
}

std::shared_ptr<const TsModel> StructModel::refilter(const DailySeries& series) const {
    return std::make_shared<StructModel>(series, params_.variances);
}

nlohmann::json StructModel::snapshot() const {
    const auto& v = params_.variances;
    std::vector<double> state(params_.state.data(), params_.state.data() + params_.state.size());
    return {{"kind", "structts"},  {"level_var", v.level}, {"slope_var", v.slope},
            {"seasonal_var", v.seasonal}, {"obs_var", v.obs}, {"state", state},
            {"loglik", params_.loglik}};
}

StructModel fit_structts(const DailySeries& series) {
    if (series.size() < 21) throw InsufficientData("structural model needs at least 21 observations");
    const auto y = series.values();
    const double var = sample_variance(y);
    if (var == 0.0) return StructModel(series, {});
    auto unpack = [&](const std::vector<double>& x) {
        return StructVariances{var * std::exp(x[0]), var * std::exp(x[1]), var * std::exp(x[2]),
                               var * std::exp(x[3])};
    };
    auto objective = [&](const std::vector<double>& x) { return -run_bsm(y, unpack(x), false).loglik; };
    Bounds box{std::vector<double>(4, -20.0), std::vector<double>(4, 2.0)};
    NelderMeadOptions opt;
    opt.initial_step = 1.0;
    const std::vector<std::vector<double>> starts = {{-4.6, -9.2, -6.9, -1.0}, {-2.3, -6.9, -4.6, -2.3}};
    OptimResult best;
    for (const auto& s : starts) {
        auto r = nelder_mead(objective, s, opt, &box);
        if (r.value < best.value) best = r;
    }
    if (!std::isfinite(best.value)) throw FitFailure("structural model likelihood is not finite");
    return StructModel(series, unpack(best.x));
}

} // namespace edcast::ts
