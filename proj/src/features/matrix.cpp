#include "edcast/features/matrix.hpp"

#include "edcast/core/errors.hpp"
#include "edcast/core/text.hpp"

#include <algorithm>

namespace edcast::features {

std::optional<std::size_t> Schema::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i].name == name) return i;
    }
    return std::nullopt;
}

nlohmann::json schema_to_json(const Schema& schema) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& f : schema.features) {
        nlohmann::json j = {{"name", f.name}};
        switch (f.kind) {
        case FeatureKind::numeric: j["kind"] = "numeric"; break;
        case FeatureKind::flag: j["kind"] = "flag"; break;
        case FeatureKind::categorical:
            j["kind"] = "categorical";
            j["levels"] = f.levels;
            break;
        }
        arr.push_back(std::move(j));
    }
    return arr;
}

Schema schema_from_json(const nlohmann::json& j) {
    Schema s;
    for (const auto& f : j) {
        FeatureSpec spec;
        spec.name = f.at("name").get<std::string>();
        const auto kind = f.at("kind").get<std::string>();
        if (kind == "numeric") {
            spec.kind = FeatureKind::numeric;
        } else if (kind == "flag") {
            spec.kind = FeatureKind::flag;
        } else if (kind == "categorical") {
            spec.kind = FeatureKind::categorical;
            spec.levels = f.at("levels").get<int>();
            if (spec.levels < 1 || spec.levels > 64) throw ContractViolation("categorical levels must be in 1..64");
        } else {
            throw ContractViolation("unknown feature kind '" + kind + "'");
        }
        s.features.push_back(std::move(spec));
    }
    return s;
}

std::string schema_difference(const Schema& expected, const Schema& other) {
    if (expected == other) return {};
    std::string missing, extra, changed;
    auto append = [](std::string& list, const std::string& name) {
        list += (list.empty() ? "" : ", ") + name;
    };
    for (const auto& f : expected.features) {
        auto j = other.index_of(f.name);
        if (!j) {
            append(missing, f.name);
        } else if (!(other.features[*j] == f)) {
            append(changed, f.name);
        }
    }
    for (const auto& f : other.features) {
        if (!expected.index_of(f.name)) append(extra, f.name);
    }
    std::string out;
    if (!missing.empty()) out += "missing: " + missing;
    if (!extra.empty()) out += std::string(out.empty() ? "" : "; ") + "extra: " + extra;
    if (!changed.empty()) out += std::string(out.empty() ? "" : "; ") + "changed: " + changed;
    if (out.empty()) out = "feature order differs";
    return out;
}

ModelMatrix::ModelMatrix(int horizon, std::shared_ptr<const Schema> schema, std::vector<Date> dates,
                         std::vector<double> target, std::vector<std::vector<double>> columns)
    : horizon_(horizon), schema_(std::move(schema)), dates_(std::move(dates)),
      target_(std::move(target)), columns_(std::move(columns)) {
    if (!schema_) throw ContractViolation("model matrix needs a schema");
    if (columns_.size() != schema_->size()) {
        throw ContractViolation("model matrix column count does not match its schema");
    }
    if (dates_.size() != target_.size()) throw ContractViolation("model matrix dates/target mismatch");
    for (const auto& c : columns_) {
        if (c.size() != target_.size()) throw ContractViolation("model matrix column length mismatch");
    }
}

FeatureRow ModelMatrix::row(std::size_t r) const {
    FeatureRow out{schema_, std::vector<double>(columns_.size())};
    for (std::size_t c = 0; c < columns_.size(); ++c) out.values[c] = columns_[c][r];
    return out;
}

std::optional<std::size_t> ModelMatrix::row_of(Date target_date) const {
    auto it = std::lower_bound(dates_.begin(), dates_.end(), target_date);
    if (it == dates_.end() || *it != target_date) return std::nullopt;
    return static_cast<std::size_t>(it - dates_.begin());
}

ModelMatrix ModelMatrix::slice(std::size_t first, std::size_t count) const {
    if (first + count > rows()) throw ContractViolation("model matrix slice out of range");
    std::vector<std::size_t> idx(count);
    for (std::size_t i = 0; i < count; ++i) idx[i] = first + i;
    return select(idx);
}

ModelMatrix ModelMatrix::select(const std::vector<std::size_t>& row_indices) const {
    std::vector<Date> d;
    std::vector<double> y;
    std::vector<std::vector<double>> cols(columns_.size());
    d.reserve(row_indices.size());
    y.reserve(row_indices.size());
    for (auto& c : cols) c.reserve(row_indices.size());
    for (std::size_t r : row_indices) {
        if (r >= rows()) throw ContractViolation("model matrix row out of range");
        d.push_back(dates_[r]);
        y.push_back(target_[r]);
        for (std::size_t c = 0; c < columns_.size(); ++c) cols[c].push_back(columns_[c][r]);
    }
    return ModelMatrix(horizon_, schema_, std::move(d), std::move(y), std::move(cols));
}

ModelMatrix ModelMatrix::with_values(std::size_t c, std::vector<double> values) const {
    if (c >= cols() || values.size() != rows()) throw ContractViolation("bad column replacement");
    auto cols = columns_;
    cols[c] = std::move(values);
    return ModelMatrix(horizon_, schema_, dates_, target_, std::move(cols));
}

ModelMatrix ModelMatrix::with_column(FeatureSpec spec, std::vector<double> values) const {
    if (values.size() != rows()) throw ContractViolation("new column has wrong length");
    if (schema_->index_of(spec.name)) throw ContractViolation("duplicate feature '" + spec.name + "'");
    auto schema = std::make_shared<Schema>(*schema_);
    schema->features.push_back(std::move(spec));
    auto cols = columns_;
    cols.push_back(std::move(values));
    return ModelMatrix(horizon_, std::move(schema), dates_, target_, std::move(cols));
}

namespace {

std::shared_ptr<const Schema> make_schema(const std::vector<std::string>& events) {
    auto s = std::make_shared<Schema>();
    s->features = {
        {"month", FeatureKind::categorical, 12},
        {"day_of_week", FeatureKind::categorical, 7},
        {"lag_origin", FeatureKind::numeric, 0},
        {"lag_same_weekday", FeatureKind::numeric, 0},
        {"rollmean_prev_week", FeatureKind::numeric, 0},
        {"time_index", FeatureKind::numeric, 0},
        {"bank_holiday", FeatureKind::flag, 0},
        {"school_holiday", FeatureKind::flag, 0},
        {"precip_prev", FeatureKind::numeric, 0},
        {"tmax_prev", FeatureKind::numeric, 0},
        {"tmin_prev", FeatureKind::numeric, 0},
        {"flu_prev", FeatureKind::numeric, 0},
    };
    for (const auto& e : events) s->features.push_back({"event:" + e, FeatureKind::flag, 0});
    return s;
}

} // namespace

ModelMatrix build_matrix(const DailySeries& series, const ingest::CovariateTable& cov, int horizon) {
    if (horizon < 1) throw ContractViolation("horizon must be >= 1");
    const std::size_t n = series.size();
    const std::size_t warmup = warmup_days(horizon);
    if (n < 14 + static_cast<std::size_t>(horizon) || n <= warmup) {
        throw InsufficientData("series of " + std::to_string(n) + " days is too short for horizon " +
                               std::to_string(horizon));
    }
    if (cov.start != series.start() || cov.size() != n) {
        throw ContractViolation("covariates cover " + format_date(cov.start) + ".." +
                                format_date(cov.end()) + " but the series covers " +
                                format_date(series.start()) + ".." + format_date(series.end()));
    }
    auto schema = make_schema(cov.event_names);
    const std::size_t rows = n - warmup;
    const auto h = static_cast<std::size_t>(horizon);
    const auto sw = static_cast<std::size_t>(same_weekday_lag(horizon));
    const double mid = 0.5 * static_cast<double>(n - 1);
    const double range = static_cast<double>(n - 1);

    std::vector<Date> dates(rows);
    std::vector<double> y(rows);
    std::vector<std::vector<double>> cols(schema->size(), std::vector<double>(rows));
    const auto v = series.values();
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = r + warmup;
        const std::size_t origin = t - h;
        // Every demand or observed-covariate index read below must be <= origin.
        for (std::size_t k : {origin, t - sw, origin - 6}) {
            if (k > origin) throw Error("feature construction reads beyond the forecast origin");
        }
        const Date d = series.date_at(t);
        dates[r] = d;
        y[r] = v[t];
        double sum = 0.0;
        for (std::size_t k = origin - 6; k <= origin; ++k) sum += v[k];
        std::size_t c = 0;
        cols[c++][r] = month_of(d);
        cols[c++][r] = iso_weekday(d);
        cols[c++][r] = v[origin];
        cols[c++][r] = v[t - sw];
        cols[c++][r] = sum / 7.0;
        cols[c++][r] = (static_cast<double>(t) - mid) / range;
        cols[c++][r] = cov.bank_holiday[t];
        cols[c++][r] = cov.school_holiday[t];
        cols[c++][r] = cov.precip_mm[origin];
        cols[c++][r] = cov.temp_max_c[origin];
        cols[c++][r] = cov.temp_min_c[origin];
        cols[c++][r] = cov.flu_searches[origin];
        for (const auto& e : cov.events) cols[c++][r] = e[t];
    }
    return ModelMatrix(horizon, std::move(schema), std::move(dates), std::move(y), std::move(cols));
}

std::string matrix_csv(const ModelMatrix& m) {
    std::string out = "date,target";
    for (const auto& f : m.schema().features) out += "," + csv_quote(f.name);
    out += '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        out += format_date(m.dates()[r]);
        out += ',';
        out += format_fixed(m.target()[r], 6);
        for (std::size_t c = 0; c < m.cols(); ++c) {
            out += ',';
            if (m.schema().features[c].kind == FeatureKind::numeric) {
                out += format_fixed(m.value(r, c), 6);
            } else {
                out += std::to_string(static_cast<long long>(m.value(r, c)));
            }
        }
        out += '\n';
    }
    return out;
}

} // namespace edcast::features
