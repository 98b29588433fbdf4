#include "edcast/ml/knn.hpp"

#include "edcast/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace edcast::ml {

KnnModel::KnnModel(const features::ModelMatrix& m, int k)
    : MlModel(m.schema_ptr()), k_(k), encoder_(m.schema(), CategoricalEncoding::one_hot_full) {
    const std::size_t n = m.rows();
    if (k < 1 || static_cast<std::size_t>(k) > n) throw ContractViolation("knn needs 1 <= k <= rows");
    const std::size_t q = encoder_.size();
    points_ = encoder_.encode(m);
    means_.assign(q, 0.0);
    sds_.assign(q, 1.0);
    for (std::size_t j = 0; j < q; ++j) {
        const auto& col = encoder_.columns()[j];
        if (m.schema().features[col.source].kind != features::FeatureKind::numeric) continue;
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += points_(static_cast<long>(i), static_cast<long>(j));
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = points_(static_cast<long>(i), static_cast<long>(j)) - mean;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / static_cast<double>(n));
        means_[j] = mean;
        sds_[j] = sd > 0.0 ? sd : 1.0;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < q; ++j) {
            auto& v = points_(static_cast<long>(i), static_cast<long>(j));
            v = (v - means_[j]) / sds_[j];
        }
    }
    targets_ = m.target();
}

KnnModel::KnnModel(std::shared_ptr<const features::Schema> schema, int k, std::vector<double> means,
                   std::vector<double> sds, Eigen::MatrixXd points, std::vector<double> targets)
    : MlModel(schema), k_(k), encoder_(*schema, CategoricalEncoding::one_hot_full), means_(std::move(means)),
      sds_(std::move(sds)), points_(std::move(points)), targets_(std::move(targets)) {
    const std::size_t q = encoder_.size();
    if (means_.size() != q || sds_.size() != q || static_cast<std::size_t>(points_.cols()) != q ||
        static_cast<std::size_t>(points_.rows()) != targets_.size()) {
        throw ContractViolation("knn parts do not match the encoded schema");
    }
    if (k_ < 1 || static_cast<std::size_t>(k_) > targets_.size()) throw ContractViolation("knn needs 1 <= k <= rows");
}

Eigen::VectorXd KnnModel::embed(const double* values) const {
    const std::size_t q = encoder_.size();
    Eigen::VectorXd out(static_cast<long>(q));
    encoder_.encode_row(values, out.data());
    for (std::size_t j = 0; j < q; ++j) out(static_cast<long>(j)) = (out(static_cast<long>(j)) - means_[j]) / sds_[j];
    return out;
}

double KnnModel::predict_raw(const double* values) const {
    const Eigen::VectorXd x = embed(values);
    const auto n = static_cast<std::size_t>(points_.rows());
    const auto q = static_cast<long>(points_.cols());
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d = 0.0;
        for (long j = 0; j < q; ++j) {
            const double diff = points_(static_cast<long>(i), j) - x(j);
            d += diff * diff;
        }
        dist[i] = d;
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    const auto k = static_cast<std::size_t>(k_);
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                      [&](std::size_t a, std::size_t b) { return dist[a] < dist[b] || (dist[a] == dist[b] && a < b); });
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += targets_[idx[i]];
    return sum / static_cast<double>(k);
}

nlohmann::json KnnModel::snapshot() const {
    nlohmann::json pts = nlohmann::json::array();
    for (long i = 0; i < points_.rows(); ++i) {
        std::vector<double> row(static_cast<std::size_t>(points_.cols()));
        for (long j = 0; j < points_.cols(); ++j) row[static_cast<std::size_t>(j)] = points_(i, j);
        pts.push_back(row);
    }
    return {{"kind", "knn"},
            {"schema", features::schema_to_json(schema())},
            {"hyperparams", {{"k", k_}}},
            {"means", means_},
            {"sds", sds_},
            {"points", pts},
            {"targets", targets_}};
}

KnnModel fit_knn(const features::ModelMatrix& m, const HyperParams& hp) {
    validate(ModelKind::knn, hp);
    return KnnModel(m, static_cast<int>(hp.get_or("k", 5)));
}

namespace detail {

std::shared_ptr<const MlModel> load_knn(const nlohmann::json& j, std::shared_ptr<const features::Schema> schema) {
    const auto& pts = j.at("points");
    const auto targets = j.at("targets").get<std::vector<double>>();
    const long cols = pts.empty() ? 0 : static_cast<long>(pts.front().size());
    Eigen::MatrixXd points(static_cast<long>(pts.size()), cols);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto row = pts[i].get<std::vector<double>>();
        if (static_cast<long>(row.size()) != cols) throw ContractViolation("ragged knn snapshot");
        for (long c = 0; c < cols; ++c) points(static_cast<long>(i), c) = row[static_cast<std::size_t>(c)];
    }
    return std::make_shared<KnnModel>(std::move(schema), j.at("hyperparams").at("k").get<int>(),
                                      j.at("means").get<std::vector<double>>(),
                                      j.at("sds").get<std::vector<double>>(), std::move(points), targets);
}

} // namespace detail

} // namespace edcast::ml
