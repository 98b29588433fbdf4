#pragma once

#include "edcast/core/date.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace edcast {

enum class SeriesKind { raw, transformed };

/// Gap-free daily sequence starting at `start()`. Raw series hold attendance
/// counts and must be non-negative; transformed series (residuals,
/// deseasonalized values) may be negative.
class DailySeries {
public:
    DailySeries(Date start, std::vector<double> values, SeriesKind kind = SeriesKind::raw);

    Date start() const { return start_; }
    Date end() const { return add_days(start_, static_cast<long>(values_.size()) - 1); }
    std::size_t size() const { return values_.size(); }
    SeriesKind kind() const { return kind_; }

    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    Date date_at(std::size_t i) const { return add_days(start_, static_cast<long>(i)); }
    std::optional<std::size_t> index_of(Date d) const;

    DailySeries slice(std::size_t first, std::size_t count) const;
    /// Copy with one value replaced; used by mutation tests and what-if runs.
    DailySeries with_value(std::size_t i, double v) const;

    friend bool operator==(const DailySeries&, const DailySeries&) = default;

private:
    Date start_;
    std::vector<double> values_;
    SeriesKind kind_;
};

} // namespace edcast
