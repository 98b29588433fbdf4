#include "edcast/backtest/plan.hpp"

#include "edcast/core/errors.hpp"

#include <algorithm>
#include <string>

namespace edcast::backtest {

int Plan::max_horizon() const { return *std::max_element(horizons.begin(), horizons.end()); }

std::size_t minimum_length(std::size_t train_len, std::size_t valid_len, std::size_t test_len, int max_horizon) {
    return train_len + valid_len + test_len + static_cast<std::size_t>(max_horizon) - 1;
}

Plan make_plan(std::size_t total_len, std::vector<int> horizons, const PlanOverrides& overrides) {
    if (horizons.empty()) throw ContractViolation("a plan needs at least one horizon");
    std::sort(horizons.begin(), horizons.end());
    horizons.erase(std::unique(horizons.begin(), horizons.end()), horizons.end());
    if (horizons.front() < 1) throw ContractViolation("horizons must be positive");
    Plan p;
    p.total_len = total_len;
    p.horizons = horizons;
    p.train_len = overrides.train_len.value_or(kDefaultTrainLen);
    p.valid_len = overrides.valid_len.value_or(kDefaultValidLen);
    if (p.train_len < 1) throw ContractViolation("train_len must be positive");
    const std::size_t fixed = minimum_length(p.train_len, p.valid_len, 0, p.max_horizon());
    if (overrides.test_len) {
        p.test_len = *overrides.test_len;
    } else {
        p.test_len = total_len > fixed ? std::min(kDefaultTestLen, total_len - fixed) : 0;
    }
    const std::size_t needed = minimum_length(p.train_len, p.valid_len, std::max<std::size_t>(p.test_len, 1),
                                              p.max_horizon());
    if (p.test_len < 1 || total_len < needed) {
        throw ContractViolation("infeasible backtest geometry: train " + std::to_string(p.train_len) + " + valid " +
                                std::to_string(p.valid_len) + " + test " + std::to_string(std::max<std::size_t>(p.test_len, 1)) +
                                " + max horizon - 1 needs at least " + std::to_string(needed) + " days, have " +
                                std::to_string(total_len));
    }
    return p;
}

} // namespace edcast::backtest
