#pragma once

#include "edcast/features/matrix.hpp"
#include "edcast/ml/model.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace edcast::ensemble {

struct ImportanceReport {
    std::vector<std::string> features;
    std::vector<double> importance;  // mean MAE increase, may be negative
    std::vector<double> share;       // clipped at 0 and normalized
    double baseline_mae = 0.0;
    int n_repeats = 0;
    std::uint64_t seed = 0;

    nlohmann::json to_json() const;
    /// `feature,importance,share`
    std::string csv() const;
};

struct ImportanceOptions {
    int n_repeats = 10;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    bool identity_permutation = false;  // test hook: permute nothing
};

/// Permutes one feature column at a time on a held-out matrix and records
/// the mean increase in MAE. A categorical column holds the level code, so
/// its one-hot block moves as a unit.
ImportanceReport permutation_importance(const ml::MlModel& model, const features::ModelMatrix& heldout,
                                        const ImportanceOptions& options = {});

} // namespace edcast::ensemble
