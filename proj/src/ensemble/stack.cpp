#include "edcast/ensemble/stack.hpp"

#include "edcast/core/errors.hpp"
#include "edcast/core/text.hpp"
#include "edcast/ml/linear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace edcast::ensemble {

std::string to_string(StackVariant v) {
    switch (v) {
    case StackVariant::convex: return "convex";
    case StackVariant::glm: return "glm";
    case StackVariant::penalized: return "penalized";
    }
    return "?";
}

StackVariant parse_stack_variant(const std::string& name) {
    for (auto v : {StackVariant::convex, StackVariant::glm, StackVariant::penalized}) {
        if (to_string(v) == name) return v;
    }
    throw ContractViolation("unknown stack variant '" + name + "'");
}

nlohmann::json StackWeights::to_json() const {
    nlohmann::json w = nlohmann::json::object();
    for (std::size_t i = 0; i < models.size(); ++i) w[models[i]] = weights[i];
    return {{"variant", to_string(variant)}, {"weights", w}, {"models", models}, {"intercept", intercept},
            {"converged", converged}, {"gap", gap}, {"iterations", iterations},
            {"hyperparams", hyperparams.to_json()}};
}

StackWeights StackWeights::from_json(const nlohmann::json& j) {
    StackWeights s;
    s.variant = parse_stack_variant(j.at("variant").get<std::string>());
    s.models = j.at("models").get<std::vector<std::string>>();
    for (const auto& m : s.models) s.weights.push_back(j.at("weights").at(m).get<double>());
    s.intercept = j.at("intercept").get<double>();
    s.converged = j.value("converged", true);
    s.gap = j.value("gap", 0.0);
    s.iterations = j.value("iterations", 0);
    if (j.contains("hyperparams")) s.hyperparams = ml::HyperParams::from_json(j.at("hyperparams"));
    return s;
}

namespace {

void check_inputs(const Eigen::MatrixXd& P, const std::vector<double>& y, const std::vector<std::string>& names,
                  std::size_t min_models) {
    if (static_cast<std::size_t>(P.cols()) != names.size()) throw ContractViolation("one name per base model needed");
    if (names.size() < min_models) {
        throw ContractViolation("stacking needs at least " + std::to_string(min_models) + " base models");
    }
    if (static_cast<std::size_t>(P.rows()) != y.size() || y.empty()) {
        throw ContractViolation("prediction rows and actual values differ in length");
    }
    if (!P.allFinite()) throw ContractViolation("base predictions must be finite");
}

} // namespace

StackWeights fit_stack_convex(const Eigen::MatrixXd& P, const std::vector<double>& actual,
                              const std::vector<std::string>& names, const ConvexOptions& options) {
    check_inputs(P, actual, names, 2);
    const Eigen::Index m = P.cols();
    const double n = static_cast<double>(P.rows());
    // on the simplex y - P w = -E w with E = P - y 1', so the objective is a
    // quadratic form in the error covariance, free of cancellation against y'y
    Eigen::MatrixXd E = P;
    for (Eigen::Index i = 0; i < P.rows(); ++i) E.row(i).array() -= actual[static_cast<std::size_t>(i)];
    const Eigen::MatrixXd Q = E.transpose() * E / n;
    auto objective = [&](const Eigen::VectorXd& w) { return w.dot(Q * w); };

    Eigen::VectorXd w = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
    double f = objective(w);
    Eigen::VectorXd g = 2.0 * Q * w;
    double eta = 0.0;
    StackWeights out;
    out.variant = StackVariant::convex;
    out.models = names;
    out.converged = false;
    int it = 0;
    double gap = std::numeric_limits<double>::infinity();
    for (; it < options.max_iterations; ++it) {
        const double gmin = g.minCoeff();
        gap = g.dot(w) - gmin;
        if (gap <= options.tolerance * std::max(1.0, f)) {
            out.converged = true;
            break;
        }
        if (eta == 0.0) eta = 1.0 / std::max(g.maxCoeff() - gmin, 1e-300);
        bool moved = false;
        for (int tries = 0; tries < 200; ++tries) {
            Eigen::VectorXd next(m);
            for (Eigen::Index i = 0; i < m; ++i) next[i] = w[i] * std::exp(-eta * (g[i] - gmin));
            next /= next.sum();
            const Eigen::VectorXd d = next - w;
            const double change = d.dot(Q * d) + (g.array() - gmin).matrix().dot(d);
            if (change <= 0.0 && d.cwiseAbs().maxCoeff() > 0.0) {
                w = next;
                f = objective(w);
                eta *= 2.0;
                moved = true;
                break;
            }
            eta *= 0.5;
        }
        if (!moved) break;
        g = 2.0 * Q * w;
    }
    // a vertex is also feasible; keep it if it is strictly better
    for (Eigen::Index j = 0; j < m; ++j) {
        if (Q(j, j) < f) {
            w.setZero();
            w[j] = 1.0;
            f = Q(j, j);
            g = 2.0 * Q * w;
            gap = g.dot(w) - g.minCoeff();
            out.converged = out.converged || gap <= options.tolerance * std::max(1.0, f);
        }
    }
    out.weights.assign(w.data(), w.data() + m);
    out.gap = gap;
    out.iterations = it;
    return out;
}

StackWeights fit_stack_glm(const Eigen::MatrixXd& P, const std::vector<double>& actual,
                           const std::vector<std::string>& names) {
    check_inputs(P, actual, names, 1);
    auto fit = ml::fit_lm(P, actual, names);
    StackWeights out;
    out.variant = StackVariant::glm;
    out.models = names;
    out.weights = fit.coefficients;
    out.intercept = fit.intercept;
    return out;
}

StackWeights fit_stack_penalized(const Eigen::MatrixXd& P, const std::vector<double>& actual,
                                 const std::vector<std::string>& names, const PenalizedOptions& options) {
    check_inputs(P, actual, names, 1);
    const std::size_t n = actual.size();
    ml::HyperParams chosen;
    if (options.fixed) {
        ml::validate(ml::ModelKind::glmnet, *options.fixed);
        chosen = *options.fixed;
    } else {
        if (options.folds < 2 || options.folds > n) throw ContractViolation("penalized stacking needs 2..rows folds");
        std::map<double, double> lambda_max;
        for (double alpha : {0.0, 0.5, 1.0}) lambda_max[alpha] = ml::glmnet_lambda_max(P, actual, alpha);
        const auto grid = ml::default_grid(ml::ModelKind::glmnet, names.size(), lambda_max);
        double best_score = std::numeric_limits<double>::infinity();
        std::vector<double> best_key;
        for (const auto& hp : grid) {
            double total = 0.0;
            bool ok = true;
            for (std::size_t k = 0; k < options.folds && ok; ++k) {
                const std::size_t lo = k * n / options.folds, hi = (k + 1) * n / options.folds;
                Eigen::MatrixXd X(static_cast<Eigen::Index>(n - (hi - lo)), P.cols());
                std::vector<double> yt;
                for (std::size_t i = 0; i < n; ++i) {
                    if (i >= lo && i < hi) continue;
                    X.row(static_cast<Eigen::Index>(yt.size())) = P.row(static_cast<Eigen::Index>(i));
                    yt.push_back(actual[i]);
                }
                try {
                    auto fit = ml::fit_glmnet(X, yt, names, hp.get("lambda"), hp.get("alpha"));
                    for (std::size_t i = lo; i < hi; ++i) {
                        double pred = fit.intercept;
                        for (std::size_t j = 0; j < names.size(); ++j) {
                            pred += fit.coefficients[j] * P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                        }
                        total += std::abs(pred - actual[i]);
                    }
                } catch (const ConvergenceError&) {
                    ok = false;
                }
            }
            if (!ok) continue;
            const double score = total / static_cast<double>(n);
            const auto key = ml::simplicity_key(ml::ModelKind::glmnet, hp);
            if (score < best_score || (score == best_score && key < best_key)) {
                best_score = score;
                best_key = key;
                chosen = hp;
            }
        }
        if (!chosen.has("lambda")) throw FitFailure("no penalized stacking candidate converged");
    }
    auto fit = ml::fit_glmnet(P, actual, names, chosen.get("lambda"), chosen.get("alpha"));
    StackWeights out;
    out.variant = StackVariant::penalized;
    out.models = names;
    out.weights = fit.coefficients;
    out.intercept = fit.intercept;
    out.hyperparams = chosen;
    return out;
}

double predict_stack(const StackWeights& w, const std::map<std::string, double>& row) {
    double s = w.intercept;
    for (std::size_t i = 0; i < w.models.size(); ++i) {
        if (w.weights[i] == 0.0) continue;
        auto it = row.find(w.models[i]);
        if (it == row.end()) throw ContractViolation("missing base prediction for '" + w.models[i] + "'");
        s += w.weights[i] * it->second;
    }
    return s;
}

} // namespace edcast::ensemble
