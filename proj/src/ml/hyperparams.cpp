#include "edcast/ml/hyperparams.hpp"

#include "edcast/core/errors.hpp"
#include "edcast/ml/linear.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace edcast::ml {

std::string to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::lm: return "lm";
    case ModelKind::glmnet: return "glmnet";
    case ModelKind::gbm: return "gbm";
    case ModelKind::rf: return "rf";
    case ModelKind::knn: return "knn";
    }
    return "lm";
}

ModelKind parse_model_kind(const std::string& name) {
    for (auto k : {ModelKind::lm, ModelKind::glmnet, ModelKind::gbm, ModelKind::rf, ModelKind::knn}) {
        if (to_string(k) == name) return k;
    }
    throw ContractViolation("unknown machine-learning model '" + name + "'");
}

double HyperParams::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ContractViolation("missing hyperparameter '" + key + "'");
    return it->second;
}

double HyperParams::get_or(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

nlohmann::json HyperParams::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : values_) {
        if (v == std::floor(v) && std::abs(v) < 1e15) {
            j[k] = static_cast<long long>(v);
        } else {
            j[k] = v;
        }
    }
    return j;
}

HyperParams HyperParams::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ContractViolation("hyperparameters must be a JSON object");
    HyperParams hp;
    for (const auto& [k, v] : j.items()) {
        if (!v.is_number()) throw ContractViolation("hyperparameter '" + k + "' must be a number");
        hp.set(k, v.get<double>());
    }
    return hp;
}

void validate(ModelKind kind, const HyperParams& hp) {
    struct Rule {
        const char* key;
        double lo, hi;
        bool integer;
        bool lo_open;
    };
    std::vector<Rule> rules;
    const double inf = HUGE_VAL;
    switch (kind) {
    case ModelKind::lm: break;
    case ModelKind::glmnet:
        rules = {{"lambda", 0, inf, false, false}, {"alpha", 0, 1, false, false}};
        break;
    case ModelKind::gbm:
        rules = {{"n_trees", 1, inf, true, false},
                 {"depth", 1, inf, true, false},
                 {"learning_rate", 0, 1, false, false},
                 {"min_node", 1, inf, true, false}};
        break;
    case ModelKind::rf:
        rules = {{"n_trees", 1, inf, true, false}, {"mtry", 1, inf, true, false}, {"min_node", 1, inf, true, false}};
        break;
    case ModelKind::knn: rules = {{"k", 1, inf, true, false}}; break;
    }
    for (const auto& [key, value] : hp.values()) {
        auto it = std::find_if(rules.begin(), rules.end(), [&](const Rule& r) { return key == r.key; });
        if (it == rules.end()) {
            throw ContractViolation("unknown hyperparameter '" + key + "' for " + to_string(kind));
        }
        if (!std::isfinite(value) || value < it->lo || value > it->hi || (it->lo_open && value == it->lo)) {
            throw ContractViolation("hyperparameter '" + key + "' out of range for " + to_string(kind));
        }
        if (it->integer && value != std::floor(value)) {
            throw ContractViolation("hyperparameter '" + key + "' must be an integer");
        }
    }
}

std::vector<HyperParams> default_grid(ModelKind kind, std::size_t p,
                                      const std::map<double, double>& lambda_max) {
    std::vector<HyperParams> grid;
    switch (kind) {
    case ModelKind::lm: grid.push_back({}); break;
    case ModelKind::glmnet:
        for (double alpha : {0.0, 0.5, 1.0}) {
            auto it = lambda_max.find(alpha);
            if (it == lambda_max.end()) throw ContractViolation("glmnet grid needs lambda_max per alpha");
            for (double lambda : lambda_path(it->second)) grid.push_back({{"alpha", alpha}, {"lambda", lambda}});
        }
        break;
    case ModelKind::gbm:
        for (double n : {50.0, 150.0, 300.0})
            for (double depth : {1.0, 2.0, 3.0})
                for (double lr : {0.05, 0.1})
                    grid.push_back({{"n_trees", n}, {"depth", depth}, {"learning_rate", lr}, {"min_node", 10}});
        break;
    case ModelKind::rf: {
        std::set<std::size_t> seen;
        for (std::size_t mtry : {p / 3, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(p)))), p}) {
            mtry = std::max<std::size_t>(1, mtry);
            if (!seen.insert(mtry).second) continue;
            for (double min_node : {5.0, 10.0}) {
                grid.push_back({{"n_trees", 300}, {"mtry", static_cast<double>(mtry)}, {"min_node", min_node}});
            }
        }
        break;
    }
    case ModelKind::knn:
        for (double k : {3, 5, 7, 9, 15, 25}) grid.push_back({{"k", k}});
        break;
    }
    return grid;
}

std::vector<double> simplicity_key(ModelKind kind, const HyperParams& hp) {
    switch (kind) {
    case ModelKind::lm: return {};
    case ModelKind::glmnet: return {-hp.get_or("lambda", 0.0), hp.get_or("alpha", 1.0)};
    case ModelKind::gbm:
        return {hp.get_or("n_trees", 0.0), hp.get_or("depth", 0.0), hp.get_or("learning_rate", 0.0)};
    case ModelKind::rf:
        return {hp.get_or("n_trees", 0.0), -hp.get_or("min_node", 0.0), hp.get_or("mtry", 0.0)};
    case ModelKind::knn: return {hp.get_or("k", 0.0)};
    }
    return {};
}

} // namespace edcast::ml
