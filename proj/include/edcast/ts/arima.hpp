#pragma once

#include "edcast/ts/model.hpp"

#include <compare>
#include <string>
#include <span>
#include <vector>

namespace edcast::ts {

struct ArimaOrder {
    int p = 0, d = 0, q = 0;
    int P = 0, D = 0, Q = 0;

    auto operator<=>(const ArimaOrder&) const = default;
    std::string label() const;
};

/// p,q in {0,1,2}, d in {0,1}, P,Q in {0,1}, D in {0,1}.
std::vector<ArimaOrder> default_arima_grid();

struct ArimaSpec {
    ArimaOrder order;
    int season = 7;
    std::vector<double> ar, ma, sar, sma;  // w_t = sum ar_i w_{t-i} + e_t + sum ma_j e_{t-j}
    bool include_mean = false;            // only without differencing
    double intercept = 0.0;               // mean of the differenced series
    double sigma2 = 0.0;
    double loglik = 0.0;
    double aicc = 0.0;
    std::size_t n_used = 0;               // observations after differencing

    /// Multiplied-out AR and MA lag polynomials (coefficients of lags 1..r).
    std::vector<double> full_ar() const;
    std::vector<double> full_ma() const;
};

/// Smallest modulus among the roots of 1 - sum c_i z^i (ar=true) or
/// 1 + sum c_i z^i (ar=false). Infinity for an empty polynomial.
double min_root_modulus(const std::vector<double>& coefficients, bool ar);

class ArimaModel final : public TsModel {
public:
    ArimaModel(ArimaSpec spec, const DailySeries& series);

    std::string kind() const override { return "arima"; }
    const ArimaSpec& spec() const { return spec_; }
    std::shared_ptr<const TsModel> refilter(const DailySeries& series) const override;
    nlohmann::json snapshot() const override;
    static ArimaSpec spec_from_json(const nlohmann::json& j);

protected:
    double forecast_impl(int h) const override;

private:
    ArimaSpec spec_;
    std::vector<double> tail_;    // last d + 7D observations of the undifferenced series
    std::vector<double> a_next_;  // predicted ARMA state for the first day after the window
    std::vector<double> phi_;     // expanded AR coefficients padded to the state dimension
};

struct Differencing {
    int d = 0;
    int D = 0;
};

/// Orders of differencing chosen before the order search: D = 1 when the STL
/// seasonal strength 1 - var(R) / var(S + R) exceeds 0.64, then d = 1 when a
/// level-stationarity KPSS test on the (seasonally differenced) series
/// rejects at 5%.
Differencing choose_differencing(std::span<const double> values);
double kpss_statistic(std::span<const double> values);
double seasonal_strength(std::span<const double> values);

/// Fits every grid order sharing the chosen differencing (all orders if none
/// does), each by CSS then exact Gaussian likelihood via the Kalman filter,
/// and keeps the smallest AICc. Candidates whose AR or MA
/// roots fall within 1e-6 of the unit circle are discarded. A constant series
/// yields the (0,0,0) model with intercept equal to the constant and zero
/// variance. Throws FitFailure when no candidate survives.
ArimaModel fit_arima(const DailySeries& series, const std::vector<ArimaOrder>& grid = default_arima_grid());

/// Fits a single order; throws FitFailure if it is unusable.
ArimaSpec fit_arima_order(const DailySeries& series, const ArimaOrder& order);

} // namespace edcast::ts
