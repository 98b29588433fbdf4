#pragma once

#include "edcast/core/date.hpp"
#include "edcast/core/series.hpp"
#include "edcast/ingest/covariates.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace edcast::features {

enum class FeatureKind { numeric, flag, categorical };

struct FeatureSpec {
    std::string name;
    FeatureKind kind = FeatureKind::numeric;
    int levels = 0;  // categorical: codes 1..levels

    friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

struct Schema {
    std::vector<FeatureSpec> features;

    std::size_t size() const { return features.size(); }
    std::optional<std::size_t> index_of(const std::string& name) const;
    friend bool operator==(const Schema&, const Schema&) = default;
};

/// Describes how `other` differs from `expected` ("missing: a, b; extra: c").
/// Empty when both list the same features with the same kinds, in order.
std::string schema_difference(const Schema& expected, const Schema& other);

nlohmann::json schema_to_json(const Schema& schema);
Schema schema_from_json(const nlohmann::json& j);

/// One feature record; values follow the schema order.
struct FeatureRow {
    std::shared_ptr<const Schema> schema;
    std::vector<double> values;
};

/// Per-target-date design for one horizon. Columns are stored contiguously;
/// categorical columns hold integer codes and flags hold 0/1.
class ModelMatrix {
public:
    ModelMatrix(int horizon, std::shared_ptr<const Schema> schema, std::vector<Date> dates,
                std::vector<double> target, std::vector<std::vector<double>> columns);

    int horizon() const { return horizon_; }
    const Schema& schema() const { return *schema_; }
    const std::shared_ptr<const Schema>& schema_ptr() const { return schema_; }
    std::size_t rows() const { return target_.size(); }
    std::size_t cols() const { return columns_.size(); }

    const std::vector<Date>& dates() const { return dates_; }
    const std::vector<double>& target() const { return target_; }
    const std::vector<double>& column(std::size_t c) const { return columns_[c]; }
    double value(std::size_t r, std::size_t c) const { return columns_[c][r]; }

    FeatureRow row(std::size_t r) const;
    std::optional<std::size_t> row_of(Date target_date) const;

    ModelMatrix slice(std::size_t first, std::size_t count) const;
    ModelMatrix select(const std::vector<std::size_t>& row_indices) const;
    /// Copy with column `c` replaced.
    ModelMatrix with_values(std::size_t c, std::vector<double> values) const;
    /// Copy with an extra trailing feature.
    ModelMatrix with_column(FeatureSpec spec, std::vector<double> values) const;

private:
    int horizon_;
    std::shared_ptr<const Schema> schema_;
    std::vector<Date> dates_;
    std::vector<double> target_;
    std::vector<std::vector<double>> columns_;
};

/// Offset between a target date and its lag-same-weekday source.
inline int same_weekday_lag(int horizon) { return horizon <= 7 ? 7 : 14; }
/// Number of leading series days that cannot be targets.
inline std::size_t warmup_days(int horizon) {
    return static_cast<std::size_t>(std::max(horizon + 6, same_weekday_lag(horizon)));
}

/// Builds the model matrix for target dates t in the series such that every
/// lag exists. Calendar features are taken at t, weather and search volume
/// at t - h, lagged demand at or before t - h.
ModelMatrix build_matrix(const DailySeries& series, const ingest::CovariateTable& cov, int horizon);

/// Time-series models see only the univariate demand history.
inline DailySeries ts_feature_view(const DailySeries& series) { return series; }

/// Audit export: header row then one row per target date; real values with
/// exactly six fractional digits, flags and categorical codes as integers.
std::string matrix_csv(const ModelMatrix& m);

} // namespace edcast::features
