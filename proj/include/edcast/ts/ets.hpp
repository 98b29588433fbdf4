#pragma once

#include "edcast/ts/model.hpp"

#include <array>
#include <span>

namespace edcast::ts {

/// End-of-window state of additive Holt-Winters with period 7.
/// `seasonals[k]` is the seasonal term for the (k+1)-th day after the window.
struct EtsState {
    double level = 0.0;
    double trend = 0.0;
    std::array<double, 7> seasonals{};
    double alpha = 0.0, beta = 0.0, gamma = 0.0;
    double sse = 0.0;
};

class EtsModel final : public TsModel {
public:
    /// Runs the recursions over `series` with fixed smoothing weights.
    EtsModel(const DailySeries& series, double alpha, double beta, double gamma);

    std::string kind() const override { return "ets"; }
    const EtsState& state() const { return state_; }
    std::shared_ptr<const TsModel> refilter(const DailySeries& series) const override;
    nlohmann::json snapshot() const override;

protected:
    double forecast_impl(int h) const override;

private:
    EtsState state_;
};

/// One-step in-sample SSE of the additive Holt-Winters recursions.
double ets_sse(std::span<const double> y, double alpha, double beta, double gamma);

/// Chooses (alpha, beta, gamma) in [0,1]^3 minimizing one-step SSE with a
/// bounded simplex search (start 0.3, 0.1, 0.1; 500 evaluations). Throws
/// FitFailure carrying the best weights if the search does not converge.
EtsModel fit_ets(const DailySeries& series);

} // namespace edcast::ts
