#pragma once

#include "edcast/ml/encoding.hpp"
#include "edcast/ml/model.hpp"

#include <vector>

namespace edcast::ml {

/// k nearest neighbours under Euclidean distance on standardized numeric
/// features, 0/1 flags and full one-hot categoricals. Ties at equal distance
/// go to the earlier training row.
class KnnModel final : public MlModel {
public:
    KnnModel(const features::ModelMatrix& m, int k);
    KnnModel(std::shared_ptr<const features::Schema> schema, int k, std::vector<double> means,
             std::vector<double> sds, Eigen::MatrixXd points, std::vector<double> targets);

    ModelKind kind() const override { return ModelKind::knn; }
    int k() const { return k_; }
    const Eigen::MatrixXd& points() const { return points_; }
    /// Encodes and standardizes a raw feature row the way training rows were.
    Eigen::VectorXd embed(const double* values) const;
    nlohmann::json snapshot() const override;

protected:
    double predict_raw(const double* values) const override;

private:
    int k_;
    Encoder encoder_;
    std::vector<double> means_, sds_;  // per encoded column; sd 1 for indicators
    Eigen::MatrixXd points_;           // rows x encoded columns, standardized
    std::vector<double> targets_;
};

KnnModel fit_knn(const features::ModelMatrix& m, const HyperParams& hp);

} // namespace edcast::ml
