#pragma once

#include "edcast/core/series.hpp"

#include <json.hpp>

#include <memory>
#include <string>

namespace edcast::ts {

/// A fitted univariate forecaster. Immutable; safe to share across threads.
class TsModel {
public:
    virtual ~TsModel() = default;

    virtual std::string kind() const = 0;

    /// Point forecast h days after the end of the fitted window. Throws
    /// ContractViolation unless 1 <= h <= max_horizon.
    double forecast(int h, int max_horizon = 7) const;

    /// Same parameters, state re-estimated by filtering `series`. Used when
    /// parameters stay frozen between refits but the window keeps rolling.
    virtual std::shared_ptr<const TsModel> refilter(const DailySeries& series) const = 0;

    /// Kind tag plus parameter arrays.
    virtual nlohmann::json snapshot() const = 0;

protected:
    virtual double forecast_impl(int h) const = 0;
};

/// Rebuilds a model from its snapshot parameters and filters `series`.
std::shared_ptr<const TsModel> restore(const nlohmann::json& snapshot, const DailySeries& series);

} // namespace edcast::ts
