#pragma once

#include "edcast/core/date.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace edcast::ingest {

/// Raw weather observations as read from disk. Empty fields are NaN; dates
/// need not be contiguous.
struct WeatherRecords {
    std::vector<Date> dates;
    std::vector<double> precip_mm;
    std::vector<double> temp_max_c;
    std::vector<double> temp_min_c;
};

WeatherRecords parse_weather_csv(std::string_view text);
WeatherRecords load_weather_csv(const std::filesystem::path& path);
/// `date,precip_mm,temp_max_c,temp_min_c`; NaN fields are written empty.
std::string weather_csv(const WeatherRecords& records);

struct FillCounts {
    std::size_t precip = 0;
    std::size_t temp_max = 0;
    std::size_t temp_min = 0;
};

/// Weather on a contiguous daily axis, missing values carried forward.
struct AlignedWeather {
    std::vector<double> precip_mm;
    std::vector<double> temp_max_c;
    std::vector<double> temp_min_c;
    FillCounts filled;
};

/// Aligns records onto [start, start + days). Each field is filled by last
/// observation carried forward. A field missing on the first day or for more
/// than 7 consecutive days raises DataQualityError.
AlignedWeather align_weather(const WeatherRecords& records, Date start, std::size_t days);

} // namespace edcast::ingest
