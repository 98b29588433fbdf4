#pragma once

#include "edcast/core/date.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace edcast::ingest {

/// One downloaded window of daily relative search volume.
struct DailyFrame {
    Date start;
    std::vector<double> values;
};

struct TrendsFrames {
    std::vector<DailyFrame> daily_frames;  // download order; later frames win overlaps
    std::map<YearMonth, double> monthly;
};

struct AdjustedTrends {
    Date start;
    std::vector<double> values;
};

/// Stitches the daily frames and rescales each calendar month so that its
/// mean equals the monthly value. A month whose daily values are all zero but
/// whose monthly value is positive becomes flat at the monthly value.
/// Throws CoverageError if a day between the first and last covered day has
/// no frame, or a covered month has no monthly value.
AdjustedTrends adjust_trends(const TrendsFrames& frames);

DailyFrame parse_daily_frame_csv(std::string_view text);
std::map<YearMonth, double> parse_monthly_csv(std::string_view text);
std::string daily_frame_csv(const DailyFrame& frame);
std::string monthly_csv(const std::map<YearMonth, double>& monthly);
TrendsFrames load_trends(const std::vector<std::filesystem::path>& daily_paths,
                         const std::filesystem::path& monthly_path);

} // namespace edcast::ingest
