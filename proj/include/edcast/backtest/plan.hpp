#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace edcast::backtest {

inline constexpr std::size_t kDefaultTrainLen = 1460;
inline constexpr std::size_t kDefaultValidLen = 730;
inline constexpr std::size_t kDefaultTestLen = 730;

struct PlanOverrides {
    std::optional<std::size_t> train_len;
    std::optional<std::size_t> valid_len;
    std::optional<std::size_t> test_len;
};

/// Rolling-origin geometry over a series of `total_len` days (indices
/// 0..total_len-1). The test slice is the last `test_len` days and the
/// validation slice the `valid_len` days before it. A forecast for target
/// index t at horizon h is fitted on the `train_len` days ending at t - h.
struct Plan {
    std::size_t total_len = 0;
    std::size_t train_len = kDefaultTrainLen;
    std::size_t valid_len = kDefaultValidLen;
    std::size_t test_len = kDefaultTestLen;
    std::vector<int> horizons{1, 3, 7};

    std::size_t test_start() const { return total_len - test_len; }
    std::size_t valid_start() const { return test_start() - valid_len; }
    int max_horizon() const;
    /// First index of the fit window for origin o.
    std::size_t window_start(std::size_t origin) const { return origin + 1 - train_len; }
};

/// Days needed for a geometry: every validation and test target must have a
/// full training window ending h days earlier.
std::size_t minimum_length(std::size_t train_len, std::size_t valid_len, std::size_t test_len, int max_horizon);

/// Validated plan. Without an explicit test length the default 730 days are
/// shortened to what the series allows; an explicit geometry that does not
/// fit throws ContractViolation stating the required minimum.
Plan make_plan(std::size_t total_len, std::vector<int> horizons = {1, 3, 7}, const PlanOverrides& overrides = {});

} // namespace edcast::backtest
