#pragma once

#include "edcast/ts/model.hpp"

#include <array>
#include <span>

namespace edcast::ts {

/// Seasonal decomposition (period 7) followed by Holt's linear trend on the
/// seasonally adjusted series; forecasts add back the last seasonal cycle.
class StlmModel final : public TsModel {
public:
    StlmModel(const DailySeries& series, double alpha, double beta);

    std::string kind() const override { return "stlm"; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double level() const { return level_; }
    double trend() const { return trend_; }
    const std::array<double, 7>& last_cycle() const { return cycle_; }

    std::shared_ptr<const TsModel> refilter(const DailySeries& series) const override;
    nlohmann::json snapshot() const override;

protected:
    double forecast_impl(int h) const override;

private:
    double alpha_, beta_;
    double level_ = 0.0, trend_ = 0.0;
    std::array<double, 7> cycle_{};  // seasonal term for day k+1 after the window
};

double holt_sse(std::span<const double> y, double alpha, double beta);

StlmModel fit_stlm(const DailySeries& series);

} // namespace edcast::ts
