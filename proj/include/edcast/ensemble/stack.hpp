#pragma once

#include "edcast/ml/hyperparams.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace edcast::ensemble {

enum class StackVariant { convex, glm, penalized };

std::string to_string(StackVariant v);
StackVariant parse_stack_variant(const std::string& name);

struct StackWeights {
    StackVariant variant = StackVariant::convex;
    std::vector<std::string> models;
    std::vector<double> weights;
    double intercept = 0.0;
    bool converged = true;       // convex: duality-gap target reached
    double gap = 0.0;            // convex: final duality gap of the mean squared error
    int iterations = 0;
    ml::HyperParams hyperparams;  // penalized: chosen alpha and lambda

    nlohmann::json to_json() const;
    static StackWeights from_json(const nlohmann::json& j);
};

struct ConvexOptions {
    int max_iterations = 200000;
    double tolerance = 1e-8;  // on the gap, relative to max(1, mean squared error)
};

/// Minimizes sum (actual - P w)^2 over the simplex by exponentiated gradient
/// with a backtracking step, starting from equal weights. Every iterate stays
/// on the simplex. Returns the best iterate with converged = false when the
/// budget runs out.
StackWeights fit_stack_convex(const Eigen::MatrixXd& preds, const std::vector<double>& actual,
                              const std::vector<std::string>& names, const ConvexOptions& options = {});

/// Unconstrained least squares with intercept.
StackWeights fit_stack_glm(const Eigen::MatrixXd& preds, const std::vector<double>& actual,
                           const std::vector<std::string>& names);

struct PenalizedOptions {
    std::size_t folds = 5;  // contiguous blocks for cross-validation
    std::optional<ml::HyperParams> fixed;  // skip tuning and use this alpha/lambda
};

/// Elastic net over the base predictions. The default glmnet grid is tuned by
/// blocked cross-validated MAE with ties going to the larger lambda.
StackWeights fit_stack_penalized(const Eigen::MatrixXd& preds, const std::vector<double>& actual,
                                 const std::vector<std::string>& names, const PenalizedOptions& options = {});

/// intercept + sum w_i * pred_i. Every model with a non-zero weight must be
/// present in `row`.
double predict_stack(const StackWeights& w, const std::map<std::string, double>& row);

} // namespace edcast::ensemble
