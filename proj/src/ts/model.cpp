#include "edcast/ts/model.hpp"

#include "edcast/core/errors.hpp"
#include "edcast/ts/arima.hpp"
#include "edcast/ts/ets.hpp"
#include "edcast/ts/stlm.hpp"
#include "edcast/ts/structts.hpp"

namespace edcast::ts {

double TsModel::forecast(int h, int max_horizon) const {
    if (h < 1 || h > max_horizon) {
        throw ContractViolation("forecast horizon " + std::to_string(h) + " outside 1.." +
                                std::to_string(max_horizon));
    }
    return forecast_impl(h);
}

std::shared_ptr<const TsModel> restore(const nlohmann::json& j, const DailySeries& series) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "arima") {
        return std::make_shared<ArimaModel>(ArimaModel::spec_from_json(j), series);
    }
    if (kind == "ets") {
        return std::make_shared<EtsModel>(series, j.at("alpha").get<double>(), j.at("beta").get<double>(),
                                          j.at("gamma").get<double>());
    }
    if (kind == "stlm") {
        return std::make_shared<StlmModel>(series, j.at("alpha").get<double>(), j.at("beta").get<double>());
    }
    if (kind == "structts") {
        StructVariances v;
        v.level = j.at("level_var").get<double>();
        v.slope = j.at("slope_var").get<double>();
        v.seasonal = j.at("seasonal_var").get<double>();
        v.obs = j.at("obs_var").get<double>();
        return std::make_shared<StructModel>(series, v);
    }
    throw ContractViolation("unknown time-series snapshot kind '" + kind + "'");
}

} // namespace edcast::ts
