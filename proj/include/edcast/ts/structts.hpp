#pragma once

#include "edcast/ts/kalman.hpp"
#include "edcast/ts/model.hpp"

namespace edcast::ts {

/// Variances of the basic structural model: local linear trend plus
/// dummy-variable seasonal of period 7 plus observation noise.
struct StructVariances {
    double level = 0.0;
    double slope = 0.0;
    double seasonal = 0.0;
    double obs = 0.0;
};

/// State: (level, slope, gamma_t, gamma_{t-1}, ..., gamma_{t-5}).
StateSpace bsm_state_space(const StructVariances& v);

struct StructParams {
    StructVariances variances;
    Eigen::VectorXd state;  // filtered mean at the window end
    Eigen::MatrixXd cov;    // filtered covariance at the window end
    double loglik = 0.0;
    double min_eigenvalue = 0.0;  // smallest covariance eigenvalue seen while filtering
};

class StructModel final : public TsModel {
public:
    /// Filters `series` with the given variances from the diffuse-like prior
    /// a0 = (y_1, 0, ...), P0 = 1e6 var(y) I.
    StructModel(const DailySeries& series, const StructVariances& variances);

    std::string kind() const override { return "structts"; }
    const StructParams& params() const { return params_; }
    std::shared_ptr<const TsModel> refilter(const DailySeries& series) const override;
    nlohmann::json snapshot() const override;

protected:
    double forecast_impl(int h) const override;

private:
    StructParams params_;
};

/// Maximizes the prediction-error likelihood (first 8 innovations excluded)
/// over log-variances scaled by var(y), from two fixed starts.
StructModel fit_structts(const DailySeries& series);

} // namespace edcast::ts
