#include "edcast/core/metrics.hpp"

#include "edcast/core/errors.hpp"

#include <cmath>
#include <string>

namespace edcast {

namespace {

void check_pair(std::span<const double> a, std::span<const double> p) {
    if (a.size() != p.size()) {
        throw ContractViolation("length mismatch: " + std::to_string(a.size()) + " actual vs " +
                                std::to_string(p.size()) + " predicted");
    }
    if (a.empty()) throw ContractViolation("metrics need at least one value");
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!std::isfinite(a[i]) || !std::isfinite(p[i])) {
            throw ContractViolation("non-finite value at index " + std::to_string(i));
        }
    }
}

} // namespace

double mae(std::span<const double> actual, std::span<const double> predicted) {
    check_pair(actual, predicted);
    double s = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) s += std::abs(actual[i] - predicted[i]);
    return s / static_cast<double>(actual.size());
}

double mape(std::span<const double> actual, std::span<const double> predicted) {
    check_pair(actual, predicted);
    double s = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] == 0.0) throw ZeroDenominator(i);
        s += std::abs(actual[i] - predicted[i]) / std::abs(actual[i]);
    }
    return 100.0 * s / static_cast<double>(actual.size());
}

ErrorSummary summarize(std::span<const double> actual, std::span<const double> predicted) {
    return {mae(actual, predicted), mape(actual, predicted), actual.size()};
}

} // namespace edcast
