#include "edcast/ml/linear.hpp"

#include "edcast/core/errors.hpp"

#include <cmath>
#include <numeric>

namespace edcast::ml {

namespace {

constexpr double kRankTol = 1e-7;
constexpr double kCdTol = 1e-7;
constexpr int kMaxSweeps = 10000;

double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

struct Standardized {
    std::vector<double> means, sds;
    std::vector<long> kept;  // columns with positive spread
    Eigen::MatrixXd Z;       // rows x kept, centred and scaled
    double y_mean = 0.0;
    Eigen::VectorXd yc;
};

Standardized standardize(const Eigen::MatrixXd& X, const std::vector<double>& y) {
    const long n = X.rows();
    Standardized s;
    s.means.resize(static_cast<std::size_t>(X.cols()));
    s.sds.resize(static_cast<std::size_t>(X.cols()));
    for (long j = 0; j < X.cols(); ++j) {
        const double mean = X.col(j).mean();
        const double sd = std::sqrt((X.col(j).array() - mean).square().sum() / static_cast<double>(n));
        s.means[static_cast<std::size_t>(j)] = mean;
        s.sds[static_cast<std::size_t>(j)] = sd;
        if (sd > 1e-12 * std::max(1.0, std::abs(mean))) s.kept.push_back(j);
    }
    s.Z.resize(n, static_cast<long>(s.kept.size()));
    for (std::size_t k = 0; k < s.kept.size(); ++k) {
        const long j = s.kept[k];
        s.Z.col(static_cast<long>(k)) =
            (X.col(j).array() - s.means[static_cast<std::size_t>(j)]) / s.sds[static_cast<std::size_t>(j)];
    }
    s.y_mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    s.yc.resize(n);
    for (long i = 0; i < n; ++i) s.yc(i) = y[static_cast<std::size_t>(i)] - s.y_mean;
    return s;
}

void check_inputs(const Eigen::MatrixXd& X, const std::vector<double>& y, const std::vector<std::string>& names) {
    if (X.rows() == 0) throw ContractViolation("cannot fit a linear model on zero rows");
    if (static_cast<std::size_t>(X.rows()) != y.size()) throw ContractViolation("design/target length mismatch");
    if (static_cast<std::size_t>(X.cols()) != names.size()) throw ContractViolation("design/name count mismatch");
    if (!X.allFinite()) throw ContractViolation("design matrix contains non-finite values");
    for (double v : y) {
        if (!std::isfinite(v)) throw ContractViolation("target contains non-finite values");
    }
}

} // namespace

LinearFit fit_lm(const Eigen::MatrixXd& X, const std::vector<double>& y, const std::vector<std::string>& names) {
    check_inputs(X, y, names);
    const long n = X.rows();
    const long p = X.cols();
    Eigen::MatrixXd D(n, p + 1);
    D.col(0).setOnes();
    D.rightCols(p) = X;

    // Ordered Gram-Schmidt: a column is kept only if it adds a direction not
    // spanned by the columns kept before it.
    std::vector<long> kept;
    Eigen::MatrixXd Q(n, 0);
    for (long j = 0; j <= p; ++j) {
        Eigen::VectorXd v = D.col(j);
        const double norm0 = v.norm();
        if (norm0 == 0.0) continue;
        for (int pass = 0; pass < 2; ++pass) {
            if (Q.cols() > 0) v -= Q * (Q.transpose() * v);
        }
        const double norm = v.norm();
        if (norm <= kRankTol * norm0) continue;
        Q.conservativeResize(Eigen::NoChange, Q.cols() + 1);
        Q.col(Q.cols() - 1) = v / norm;
        kept.push_back(j);
    }

    LinearFit fit;
    fit.names = names;
    fit.coefficients.assign(static_cast<std::size_t>(p), 0.0);
    fit.means.assign(static_cast<std::size_t>(p), 0.0);
    fit.sds.assign(static_cast<std::size_t>(p), 1.0);
    Eigen::MatrixXd A(n, static_cast<long>(kept.size()));
    for (std::size_t k = 0; k < kept.size(); ++k) A.col(static_cast<long>(k)) = D.col(kept[k]);
    Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);
    Eigen::VectorXd beta = A.householderQr().solve(yv);
    for (std::size_t k = 0; k < kept.size(); ++k) {
        if (kept[k] == 0) {
            fit.intercept = beta(static_cast<long>(k));
        } else {
            fit.coefficients[static_cast<std::size_t>(kept[k] - 1)] = beta(static_cast<long>(k));
        }
    }
    std::size_t k = 0;
    for (long j = 1; j <= p; ++j) {
        while (k < kept.size() && kept[k] < j) ++k;
        if (k == kept.size() || kept[k] != j) fit.dropped.push_back(names[static_cast<std::size_t>(j - 1)]);
    }
    return fit;
}

LinearFit fit_glmnet(const Eigen::MatrixXd& X, const std::vector<double>& y, const std::vector<std::string>& names,
                     double lambda, double alpha) {
    check_inputs(X, y, names);
    if (!(lambda >= 0.0) || !(alpha >= 0.0 && alpha <= 1.0)) {
        throw ContractViolation("glmnet needs lambda >= 0 and alpha in [0,1]");
    }
    const auto n = static_cast<double>(X.rows());
    Standardized s = standardize(X, y);
    const long q = static_cast<long>(s.kept.size());
    const Eigen::MatrixXd G = (s.Z.transpose() * s.Z) / n;
    const Eigen::VectorXd c = (s.Z.transpose() * s.yc) / n;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(q);
    Eigen::VectorXd Gb = Eigen::VectorXd::Zero(q);
    const double l1 = lambda * alpha;
    const double l2 = lambda * (1.0 - alpha);

    int sweep = 0;
    double max_delta = 0.0;
    for (; sweep < kMaxSweeps; ++sweep) {
        max_delta = 0.0;
        for (long j = 0; j < q; ++j) {
            const double gjj = G(j, j);
            const double z = c(j) - Gb(j) + gjj * beta(j);
            const double next = soft_threshold(z, l1) / (gjj + l2);
            const double delta = next - beta(j);
            if (delta != 0.0) {
                Gb += G.col(j) * delta;
                beta(j) = next;
                max_delta = std::max(max_delta, std::abs(delta));
            }
        }
        if (max_delta < kCdTol) break;
    }
    if (sweep == kMaxSweeps) {
        throw ConvergenceError("glmnet coordinate descent did not converge in " + std::to_string(kMaxSweeps) +
                                   " sweeps",
                               max_delta);
    }

    LinearFit fit;
    fit.names = names;
    fit.means = s.means;
    fit.sds = s.sds;
    fit.coefficients.assign(names.size(), 0.0);
    fit.sweeps = sweep + 1;
    fit.intercept = s.y_mean;
    for (long k = 0; k < q; ++k) {
        const auto j = static_cast<std::size_t>(s.kept[static_cast<std::size_t>(k)]);
        fit.coefficients[j] = beta(k) / s.sds[j];
        fit.intercept -= fit.coefficients[j] * s.means[j];
    }
    std::size_t k = 0;
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (k < s.kept.size() && static_cast<std::size_t>(s.kept[k]) == j) {
            ++k;
        } else {
            fit.dropped.push_back(names[j]);
        }
    }
    return fit;
}

double glmnet_lambda_max(const Eigen::MatrixXd& X, const std::vector<double>& y, double alpha) {
    if (X.rows() == 0) throw ContractViolation("cannot compute lambda_max on zero rows");
    Standardized s = standardize(X, y);
    double m = 0.0;
    if (s.Z.cols() > 0) m = ((s.Z.transpose() * s.yc) / static_cast<double>(X.rows())).cwiseAbs().maxCoeff();
    return m / std::max(alpha, 1e-3);
}

std::vector<double> lambda_path(double lambda_max, std::size_t count, double decades) {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double frac = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        out[i] = lambda_max * std::pow(10.0, -decades * frac);
    }
    return out;
}

namespace {

std::vector<std::string> encoded_names(const Encoder& e) {
    std::vector<std::string> names;
    for (const auto& c : e.columns()) names.push_back(c.name);
    return names;
}

} // namespace

LinearModel::LinearModel(ModelKind kind, std::shared_ptr<const features::Schema> schema, LinearFit fit,
                         HyperParams hp)
    : MlModel(schema), kind_(kind), fit_(std::move(fit)), hp_(std::move(hp)),
      encoder_(*schema, CategoricalEncoding::one_hot_drop_first) {
    if (fit_.coefficients.size() != encoder_.size()) {
        throw ContractViolation("linear coefficients do not match the encoded schema");
    }
}

double LinearModel::predict_raw(const double* values) const {
    std::vector<double> x(encoder_.size());
    encoder_.encode_row(values, x.data());
    double out = fit_.intercept;
    for (std::size_t j = 0; j < x.size(); ++j) out += fit_.coefficients[j] * x[j];
    return out;
}

LinearModel fit_lm(const features::ModelMatrix& m) {
    Encoder enc(m.schema(), CategoricalEncoding::one_hot_drop_first);
    auto fit = fit_lm(enc.encode(m), m.target(), encoded_names(enc));
    return LinearModel(ModelKind::lm, m.schema_ptr(), std::move(fit), {});
}

LinearModel fit_glmnet(const features::ModelMatrix& m, double lambda, double alpha) {
    Encoder enc(m.schema(), CategoricalEncoding::one_hot_drop_first);
    auto fit = fit_glmnet(enc.encode(m), m.target(), encoded_names(enc), lambda, alpha);
    return LinearModel(ModelKind::glmnet, m.schema_ptr(), std::move(fit), {{"alpha", alpha}, {"lambda", lambda}});
}

double glmnet_lambda_max(const features::ModelMatrix& m, double alpha) {
    Encoder enc(m.schema(), CategoricalEncoding::one_hot_drop_first);
    return glmnet_lambda_max(enc.encode(m), m.target(), alpha);
}

} // namespace edcast::ml
