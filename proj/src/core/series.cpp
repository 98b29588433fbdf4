#include "edcast/core/series.hpp"

#include "edcast/core/errors.hpp"

#include <cmath>

namespace edcast {

DailySeries::DailySeries(Date start, std::vector<double> values, SeriesKind kind)
    : start_(start), values_(std::move(values)), kind_(kind) {
    if (values_.empty()) throw ContractViolation("daily series must be non-empty");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        double v = values_[i];
        if (!std::isfinite(v)) {
            throw ContractViolation("non-finite value at " + format_date(date_at(i)));
        }
        if (kind_ == SeriesKind::raw && v < 0.0) {
            throw ContractViolation("negative attendance at " + format_date(date_at(i)));
        }
    }
}

std::optional<std::size_t> DailySeries::index_of(Date d) const {
    long off = days_between(start_, d);
    if (off < 0 || off >= static_cast<long>(values_.size())) return std::nullopt;
    return static_cast<std::size_t>(off);
}

DailySeries DailySeries::slice(std::size_t first, std::size_t count) const {
    if (count == 0 || first + count > values_.size()) {
        throw ContractViolation("series slice out of range");
    }
    return DailySeries(date_at(first),
                       std::vector<double>(values_.begin() + static_cast<long>(first),
                                           values_.begin() + static_cast<long>(first + count)),
                       kind_);
}

DailySeries DailySeries::with_value(std::size_t i, double v) const {
    if (i >= values_.size()) throw ContractViolation("series index out of range");
    std::vector<double> copy = values_;
    copy[i] = v;
    return DailySeries(start_, std::move(copy), kind_);
}

} // namespace edcast
