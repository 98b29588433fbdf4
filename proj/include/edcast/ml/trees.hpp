#pragma once

#include "edcast/ml/model.hpp"
#include "edcast/ml/tree.hpp"

#include <vector>

namespace edcast::ml {

/// Gradient boosting (squared error): F_0 = mean(y), then each tree fits the
/// current residuals and is added with the learning rate.
class GbmModel final : public MlModel {
public:
    GbmModel(std::shared_ptr<const features::Schema> schema, HyperParams hp, double f0,
             std::vector<Tree> trees, std::vector<double> loss_curve);

    ModelKind kind() const override { return ModelKind::gbm; }
    const HyperParams& hyperparams() const { return hp_; }
    double initial() const { return f0_; }
    double learning_rate() const { return lr_; }
    const std::vector<Tree>& trees() const { return trees_; }
    /// Training MSE after 0, 1, ..., n_trees rounds.
    const std::vector<double>& loss_curve() const { return loss_; }

    /// The same fit stopped after the first n trees (identical to fitting
    /// with n_trees = n because boosting is deterministic).
    GbmModel truncated(std::size_t n) const;
    nlohmann::json snapshot() const override;

protected:
    double predict_raw(const double* values) const override;

private:
    HyperParams hp_;
    double f0_;
    double lr_;
    std::vector<Tree> trees_;
    std::vector<double> loss_;
};

/// Random forest: each tree on a bootstrap resample (multiplicity weights)
/// with `mtry` candidate features drawn per split; tree t is seeded with
/// derive_seed(seed, {t}). Prediction is the mean over trees.
class RfModel final : public MlModel {
public:
    RfModel(std::shared_ptr<const features::Schema> schema, HyperParams hp, std::vector<Tree> trees);

    ModelKind kind() const override { return ModelKind::rf; }
    const HyperParams& hyperparams() const { return hp_; }
    const std::vector<Tree>& trees() const { return trees_; }
    nlohmann::json snapshot() const override;

protected:
    double predict_raw(const double* values) const override;

private:
    HyperParams hp_;
    std::vector<Tree> trees_;
};

GbmModel fit_gbm(const features::ModelMatrix& m, const HyperParams& hp);
RfModel fit_rf(const features::ModelMatrix& m, const HyperParams& hp, const FitOptions& options = {});

/// Resolved mtry: the hyperparameter if present, otherwise max(1, p / 3).
std::size_t resolve_mtry(const HyperParams& hp, std::size_t p);

} // namespace edcast::ml
