#pragma once

#include "edcast/core/series.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace edcast::ingest {

/// Parses `date,attendances` CSV text. Rows may come in any order. A single
/// missing day is filled with the mean of its two neighbours and its date is
/// appended to `imputed`; longer gaps and duplicates are DataQualityErrors.
DailySeries parse_attendance_csv(std::string_view text, std::vector<Date>* imputed = nullptr);
DailySeries load_attendance_csv(const std::filesystem::path& path,
                                std::vector<Date>* imputed = nullptr);

std::string attendance_csv(const DailySeries& series);

} // namespace edcast::ingest
