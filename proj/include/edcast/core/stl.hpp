#pragma once

#include "edcast/core/series.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace edcast {

struct Decomposition {
    std::vector<double> trend;
    std::vector<double> seasonal;
    std::vector<double> remainder;
};

/// Seasonal-trend decomposition by LOESS with local-linear tricube smoothers.
///
/// Window lengths default to the classic choices: 7-point cycle-subseries
/// smoother, trend window = next odd >= 1.5 p / (1 - 1.5 / seasonal_span),
/// low-pass window = next odd >= p. Two inner passes, one robustness pass.
struct StlOptions {
    std::size_t seasonal_span = 7;
    std::size_t trend_span = 0;    // 0 = derived from period and seasonal_span
    std::size_t lowpass_span = 0;  // 0 = next odd >= period
    int inner_iterations = 2;
    int outer_iterations = 1;
};

Decomposition decompose_stl(std::span<const double> values, std::size_t period,
                            const StlOptions& options = {});
Decomposition decompose_stl(const DailySeries& series, std::size_t period,
                            const StlOptions& options = {});

std::size_t stl_trend_span(std::size_t period, std::size_t seasonal_span);

} // namespace edcast
