#include "edcast/ensemble/importance.hpp"

#include "edcast/core/errors.hpp"
#include "edcast/core/metrics.hpp"
#include "edcast/core/parallel.hpp"
#include "edcast/core/random.hpp"
#include "edcast/core/text.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace edcast::ensemble {

nlohmann::json ImportanceReport::to_json() const {
    nlohmann::json list = nlohmann::json::array();
    for (std::size_t j = 0; j < features.size(); ++j) {
        list.push_back({{"feature", features[j]}, {"importance", importance[j]}, {"share", share[j]}});
    }
    return {{"schema_version", 1}, {"baseline_mae", baseline_mae}, {"n_repeats", n_repeats},
            {"seed", seed},        {"features", list}};
}

std::string ImportanceReport::csv() const {
    std::string out = "feature,importance,share\n";
    for (std::size_t j = 0; j < features.size(); ++j) {
        out += csv_quote(features[j]) + ',' + format_roundtrip(importance[j]) + ',' + format_roundtrip(share[j]) + '\n';
    }
    return out;
}

ImportanceReport permutation_importance(const ml::MlModel& model, const features::ModelMatrix& heldout,
                                        const ImportanceOptions& options) {
    if (options.n_repeats < 1) throw ContractViolation("n_repeats must be at least 1");
    if (heldout.rows() < 2) throw ContractViolation("importance needs at least two held-out rows");
    const std::size_t p = heldout.cols();
    const std::size_t rows = heldout.rows();
    ImportanceReport r;
    r.n_repeats = options.n_repeats;
    r.seed = options.seed;
    r.baseline_mae = mae(heldout.target(), model.predict(heldout));
    const std::size_t reps = static_cast<std::size_t>(options.n_repeats);
    std::vector<double> delta(p * reps);
    parallel_for(delta.size(), options.jobs, [&](std::size_t task) {
        const std::size_t j = task / reps, rep = task % reps;
        std::vector<std::size_t> perm(rows);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        if (!options.identity_permutation) {
            std::mt19937_64 rng(derive_seed(options.seed, {j, rep}));
            for (std::size_t i = rows - 1; i > 0; --i) {
                std::swap(perm[i], perm[std::uniform_int_distribution<std::size_t>(0, i)(rng)]);
            }
        }
        const auto& col = heldout.column(j);
        std::vector<double> shuffled(rows);
        for (std::size_t i = 0; i < rows; ++i) shuffled[i] = col[perm[i]];
        const auto m = heldout.with_values(j, std::move(shuffled));
        delta[task] = mae(m.target(), model.predict(m)) - r.baseline_mae;
    });
    double total = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        double s = 0.0;
        for (std::size_t rep = 0; rep < reps; ++rep) s += delta[j * reps + rep];
        r.features.push_back(heldout.schema().features[j].name);
        r.importance.push_back(s / static_cast<double>(reps));
        total += std::max(0.0, r.importance.back());
    }
    for (double imp : r.importance) r.share.push_back(total > 0.0 ? std::max(0.0, imp) / total : 0.0);
    return r;
}

} // namespace edcast::ensemble
