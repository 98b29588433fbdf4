#pragma once

#include "edcast/features/matrix.hpp"
#include "edcast/ml/hyperparams.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <vector>

namespace edcast::ml {

/// A fitted covariate model. Immutable; prediction is a pure function.
class MlModel {
public:
    explicit MlModel(std::shared_ptr<const features::Schema> schema) : schema_(std::move(schema)) {}
    virtual ~MlModel() = default;

    virtual ModelKind kind() const = 0;
    const features::Schema& schema() const { return *schema_; }

    /// Throws ContractViolation naming missing/extra features if the row
    /// schema differs from the training schema.
    double predict(const features::FeatureRow& row) const;
    std::vector<double> predict(const features::ModelMatrix& m) const;

    virtual nlohmann::json snapshot() const = 0;

protected:
    virtual double predict_raw(const double* values) const = 0;
    void check_schema(const features::Schema& other) const;

private:
    std::shared_ptr<const features::Schema> schema_;
};

struct FitOptions {
    std::uint64_t seed = 0;
    unsigned jobs = 1;          // worker threads for tree ensembles
    bool bootstrap = true;      // rf only; false grows every tree on the full sample
};

/// Validates `hp` for `kind` and fits on every row of `m`.
std::shared_ptr<const MlModel> fit_model(ModelKind kind, const features::ModelMatrix& m,
                                         const HyperParams& hp, const FitOptions& options = {});

/// Rebuilds a model from `snapshot()` output.
std::shared_ptr<const MlModel> load_snapshot(const nlohmann::json& j);

/// Rows of `m` reordered canonically (lexicographic on features, then target,
/// then date). Tree ensembles train on this order so their fits do not depend
/// on how rows were supplied.
std::vector<std::size_t> canonical_row_order(const features::ModelMatrix& m);

} // namespace edcast::ml
