#pragma once

#include <json.hpp>

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace edcast::ml {

enum class ModelKind { lm, glmnet, gbm, rf, knn };

std::string to_string(ModelKind kind);
/// Throws ContractViolation for unknown names.
ModelKind parse_model_kind(const std::string& name);

/// Named numeric hyperparameters. Keys are kept sorted, so equal maps compare
/// and serialize identically.
class HyperParams {
public:
    HyperParams() = default;
    HyperParams(std::initializer_list<std::pair<const std::string, double>> init) : values_(init) {}

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    double get(const std::string& key) const;
    double get_or(const std::string& key, double fallback) const;
    void set(const std::string& key, double value) { values_[key] = value; }
    const std::map<std::string, double>& values() const { return values_; }

    nlohmann::json to_json() const;
    static HyperParams from_json(const nlohmann::json& j);
    /// Compact JSON text, e.g. {"alpha":0.5,"lambda":0.01}.
    std::string dump() const { return to_json().dump(); }

    friend bool operator==(const HyperParams&, const HyperParams&) = default;

private:
    std::map<std::string, double> values_;
};

/// Checks keys and ranges for the model kind:
///   lm {}; glmnet {lambda >= 0, alpha in [0,1]};
///   gbm {n_trees >= 1, depth >= 1, learning_rate in [0,1], min_node >= 1};
///   rf {n_trees >= 1, mtry >= 1, min_node >= 1}; knn {k >= 1}.
/// Unknown keys are rejected. Integer-valued keys must be whole numbers.
void validate(ModelKind kind, const HyperParams& hp);

/// Candidate grid for a model given the number of raw features p.
/// glmnet needs the per-alpha lambda_max values (alpha 0, 0.5, 1).
std::vector<HyperParams> default_grid(ModelKind kind, std::size_t p,
                                      const std::map<double, double>& glmnet_lambda_max = {});

/// Lexicographic simplicity key: smaller is simpler (fewer trees, shallower
/// trees, larger lambda, smaller k).
std::vector<double> simplicity_key(ModelKind kind, const HyperParams& hp);

} // namespace edcast::ml
