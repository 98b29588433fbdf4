#pragma once

#include <cstddef>
#include <span>

namespace edcast {

struct ErrorSummary {
    double mae = 0.0;   // patients/day
    double mape = 0.0;  // percent
    std::size_t n = 0;
};

double mae(std::span<const double> actual, std::span<const double> predicted);

/// Per-day absolute percentage errors averaged, times 100. A zero actual is an
/// error (ZeroDenominator carries its index), never silently skipped.
double mape(std::span<const double> actual, std::span<const double> predicted);

ErrorSummary summarize(std::span<const double> actual, std::span<const double> predicted);

} // namespace edcast
