#pragma once

#include "edcast/core/date.hpp"
#include "edcast/ingest/calendar.hpp"
#include "edcast/ingest/trends.hpp"
#include "edcast/ingest/weather.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace edcast::ingest {

/// Per-day covariates on a contiguous axis starting at `start`.
struct CovariateTable {
    Date start;
    std::vector<std::uint8_t> bank_holiday;
    std::vector<std::uint8_t> school_holiday;
    std::vector<double> precip_mm;
    std::vector<double> temp_max_c;
    std::vector<double> temp_min_c;
    std::vector<double> flu_searches;
    std::vector<std::string> event_names;
    std::vector<std::vector<std::uint8_t>> events;  // [event][day]
    FillCounts weather_filled;

    std::size_t size() const { return bank_holiday.size(); }
    Date date_at(std::size_t i) const { return add_days(start, static_cast<long>(i)); }
    Date end() const { return date_at(size() - 1); }

    /// Throws ContractViolation on ragged columns, DataQualityError when
    /// temp_max < temp_min or flu volume is negative.
    void validate() const;
    CovariateTable slice(std::size_t first, std::size_t count) const;
};

/// Resolves calendar flags, aligns weather and the adjusted search volume
/// onto [start, start + days).
CovariateTable build_covariate_table(Date start, std::size_t days, const Calendar& calendar,
                                     const WeatherRecords& weather, const AdjustedTrends& flu);

/// CSV with header `date,bank_holiday,school_holiday,precip_mm,temp_max_c,
/// temp_min_c,flu_searches` followed by one `event:<name>` column per event.
std::string covariate_csv(const CovariateTable& table);
CovariateTable parse_covariate_csv(std::string_view text);
CovariateTable load_covariate_csv(const std::filesystem::path& path);

} // namespace edcast::ingest
