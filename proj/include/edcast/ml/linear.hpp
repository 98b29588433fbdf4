#pragma once

#include "edcast/ml/encoding.hpp"
#include "edcast/ml/model.hpp"

#include <string>
#include <vector>

namespace edcast::ml {

/// Linear predictor on the drop-first one-hot encoding. Coefficients are on
/// the original (unstandardized) scale; dropped columns carry coefficient 0.
struct LinearFit {
    std::vector<std::string> names;
    std::vector<double> coefficients;
    double intercept = 0.0;
    std::vector<double> means;   // per encoded column (glmnet; zeros for lm)
    std::vector<double> sds;     // per encoded column (glmnet; ones for lm)
    std::vector<std::string> dropped;  // rank-deficient or zero-variance columns
    int sweeps = 0;              // coordinate-descent sweeps (glmnet)
};

class LinearModel final : public MlModel {
public:
    LinearModel(ModelKind kind, std::shared_ptr<const features::Schema> schema, LinearFit fit,
                HyperParams hp);

    ModelKind kind() const override { return kind_; }
    const LinearFit& fit() const { return fit_; }
    const HyperParams& hyperparams() const { return hp_; }
    nlohmann::json snapshot() const override;

protected:
    double predict_raw(const double* values) const override;

private:
    ModelKind kind_;
    LinearFit fit_;
    HyperParams hp_;
    Encoder encoder_;
};

/// Ordinary least squares with an intercept. Columns that are (numerically)
/// linear combinations of earlier columns are dropped and listed.
LinearModel fit_lm(const features::ModelMatrix& m);
LinearFit fit_lm(const Eigen::MatrixXd& X, const std::vector<double>& y,
                 const std::vector<std::string>& names);

/// Elastic net by cyclic (covariance) coordinate descent on standardized
/// columns (1/n variance); stops when no coefficient moves by 1e-7 or more.
/// Throws ConvergenceError after 10,000 sweeps.
LinearModel fit_glmnet(const features::ModelMatrix& m, double lambda, double alpha);
LinearFit fit_glmnet(const Eigen::MatrixXd& X, const std::vector<double>& y,
                     const std::vector<std::string>& names, double lambda, double alpha);

/// Smallest lambda that zeroes every coefficient; alpha below 1e-3 uses 1e-3.
double glmnet_lambda_max(const features::ModelMatrix& m, double alpha);
double glmnet_lambda_max(const Eigen::MatrixXd& X, const std::vector<double>& y, double alpha);

/// 20 values from lambda_max down four decades, log-spaced, descending.
std::vector<double> lambda_path(double lambda_max, std::size_t count = 20, double decades = 4.0);

} // namespace edcast::ml
