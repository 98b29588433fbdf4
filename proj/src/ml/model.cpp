#include "edcast/ml/model.hpp"

#include "edcast/core/errors.hpp"
#include "edcast/core/text.hpp"
#include "edcast/ml/knn.hpp"
#include "edcast/ml/linear.hpp"
#include "edcast/ml/trees.hpp"

#include <algorithm>
#include <numeric>

namespace edcast::ml {

namespace detail {
std::shared_ptr<const MlModel> load_gbm(const nlohmann::json& j, std::shared_ptr<const features::Schema> schema);
std::shared_ptr<const MlModel> load_rf(const nlohmann::json& j, std::shared_ptr<const features::Schema> schema);
std::shared_ptr<const MlModel> load_knn(const nlohmann::json& j, std::shared_ptr<const features::Schema> schema);
} // namespace detail

void MlModel::check_schema(const features::Schema& other) const {
    if (&other == schema_.get()) return;
    const auto diff = features::schema_difference(*schema_, other);
    if (!diff.empty()) throw ContractViolation("feature schema mismatch: " + diff);
}

double MlModel::predict(const features::FeatureRow& row) const {
    if (!row.schema) throw ContractViolation("feature row has no schema");
    check_schema(*row.schema);
    if (row.values.size() != schema_->size()) throw ContractViolation("feature row length does not match its schema");
    return predict_raw(row.values.data());
}

std::vector<double> MlModel::predict(const features::ModelMatrix& m) const {
    check_schema(m.schema());
    std::vector<double> raw(m.cols());
    std::vector<double> out(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) raw[c] = m.value(r, c);
        out[r] = predict_raw(raw.data());
    }
    return out;
}

nlohmann::json LinearModel::snapshot() const {
    std::vector<std::string> coef, means, sds;
    for (double v : fit_.coefficients) coef.push_back(format_roundtrip(v));
    for (double v : fit_.means) means.push_back(format_roundtrip(v));
    for (double v : fit_.sds) sds.push_back(format_roundtrip(v));
    return {{"kind", to_string(kind_)},
            {"schema", features::schema_to_json(schema())},
            {"hyperparams", hp_.to_json()},
            {"names", fit_.names},
            {"intercept", format_roundtrip(fit_.intercept)},
            {"coefficients", coef},
            {"means", means},
            {"sds", sds},
            {"dropped", fit_.dropped},
            {"sweeps", fit_.sweeps}};
}

namespace {

std::vector<double> numbers(const nlohmann::json& arr) {
    std::vector<double> out;
    for (const auto& v : arr) {
        double x = 0.0;
        if (!parse_double(v.get<std::string>(), x)) throw ContractViolation("bad number in model snapshot");
        out.push_back(x);
    }
    return out;
}

std::shared_ptr<const MlModel> load_linear(ModelKind kind, const nlohmann::json& j,
                                           std::shared_ptr<const features::Schema> schema) {
    LinearFit fit;
    fit.names = j.at("names").get<std::vector<std::string>>();
    double intercept = 0.0;
    if (!parse_double(j.at("intercept").get<std::string>(), intercept)) {
        throw ContractViolation("bad intercept in model snapshot");
    }
    fit.intercept = intercept;
    fit.coefficients = numbers(j.at("coefficients"));
    fit.means = numbers(j.at("means"));
    fit.sds = numbers(j.at("sds"));
    fit.dropped = j.at("dropped").get<std::vector<std::string>>();
    fit.sweeps = j.value("sweeps", 0);
    auto hp = HyperParams::from_json(j.at("hyperparams"));
    validate(kind, hp);
    return std::make_shared<LinearModel>(kind, std::move(schema), std::move(fit), std::move(hp));
}

} // namespace

std::shared_ptr<const MlModel> fit_model(ModelKind kind, const features::ModelMatrix& m, const HyperParams& hp,
                                         const FitOptions& options) {
    validate(kind, hp);
    switch (kind) {
    case ModelKind::lm: return std::make_shared<LinearModel>(fit_lm(m));
    case ModelKind::glmnet:
        return std::make_shared<LinearModel>(fit_glmnet(m, hp.get("lambda"), hp.get("alpha")));
    case ModelKind::gbm: return std::make_shared<GbmModel>(fit_gbm(m, hp));
    case ModelKind::rf: return std::make_shared<RfModel>(fit_rf(m, hp, options));
    case ModelKind::knn: return std::make_shared<KnnModel>(fit_knn(m, hp));
    }
    throw ContractViolation("unknown model kind");
}

std::shared_ptr<const MlModel> load_snapshot(const nlohmann::json& j) {
    const ModelKind kind = parse_model_kind(j.at("kind").get<std::string>());
    auto schema = std::make_shared<const features::Schema>(features::schema_from_json(j.at("schema")));
    switch (kind) {
    case ModelKind::lm:
    case ModelKind::glmnet: return load_linear(kind, j, std::move(schema));
    case ModelKind::gbm: return detail::load_gbm(j, std::move(schema));
    case ModelKind::rf: return detail::load_rf(j, std::move(schema));
    case ModelKind::knn: return detail::load_knn(j, std::move(schema));
    }
    throw ContractViolation("unknown model kind");
}

std::vector<std::size_t> canonical_row_order(const features::ModelMatrix& m) {
    std::vector<std::size_t> idx(m.rows());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const double x = m.value(a, c), y = m.value(b, c);
            if (x != y) return x < y;
        }
        if (m.target()[a] != m.target()[b]) return m.target()[a] < m.target()[b];
        return m.dates()[a] < m.dates()[b];
    });
    return idx;
}

} // namespace edcast::ml
