#include "edcast/ingest/trends.hpp"

#include "csv_table.hpp"

#include <algorithm>
#include <cmath>

namespace edcast::ingest {

AdjustedTrends adjust_trends(const TrendsFrames& frames) {
    if (frames.daily_frames.empty()) throw CoverageError("no daily search-volume frames");
    Date first = frames.daily_frames.front().start;
    Date last = first;
    for (const auto& f : frames.daily_frames) {
        if (f.values.empty()) throw CoverageError("empty daily frame at " + format_date(f.start));
        first = std::min(first, f.start);
        last = std::max(last, add_days(f.start, static_cast<long>(f.values.size()) - 1));
    }
    const auto n = static_cast<std::size_t>(days_between(first, last) + 1);
    std::vector<double> stitched(n, 0.0);
    std::vector<char> covered(n, 0);
    for (const auto& f : frames.daily_frames) {
        auto off = static_cast<std::size_t>(days_between(first, f.start));
        for (std::size_t i = 0; i < f.values.size(); ++i) {
            if (!(f.values[i] >= 0.0)) {
                throw ContractViolation("negative search volume at " +
                                        format_date(add_days(f.start, static_cast<long>(i))));
            }
            stitched[off + i] = f.values[i];
            covered[off + i] = 1;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!covered[i]) {
            throw CoverageError("no daily frame covers " +
                                format_date(add_days(first, static_cast<long>(i))));
        }
    }

    std::vector<double> out(n);
    std::size_t i = 0;
    while (i < n) {
        YearMonth ym = year_month_of(add_days(first, static_cast<long>(i)));
        std::size_t j = i;
        double sum = 0.0;
        while (j < n && year_month_of(add_days(first, static_cast<long>(j))) == ym) sum += stitched[j++];
        auto it = frames.monthly.find(ym);
        if (it == frames.monthly.end()) {
            throw CoverageError("no monthly search volume for " + format_year_month(ym));
        }
        const double target = it->second;
        const double mean = sum / static_cast<double>(j - i);
        for (std::size_t k = i; k < j; ++k) {
            if (target == 0.0) {
                out[k] = 0.0;
            } else if (mean == 0.0) {
                out[k] = target;
            } else {
                out[k] = stitched[k] * (target / mean);
            }
        }
        i = j;
    }
    return {first, std::move(out)};
}

DailyFrame parse_daily_frame_csv(std::string_view text) {
    auto rows = detail::read_csv(text, {"date", "score"});
    if (rows.empty()) throw ParseError("daily frame has no data rows", 2);
    DailyFrame f{detail::field_date(rows.front(), 0), {}};
    for (const auto& row : rows) {
        Date d = detail::field_date(row, 0);
        if (days_between(f.start, d) != static_cast<long>(f.values.size())) {
            throw ParseError("daily frame dates must be consecutive", row.line);
        }
        f.values.push_back(detail::field_number(row, 1, "score"));
    }
    return f;
}

std::map<YearMonth, double> parse_monthly_csv(std::string_view text) {
    auto rows = detail::read_csv(text, {"month", "score"});
    std::map<YearMonth, double> out;
    for (const auto& row : rows) {
        YearMonth ym;
        try {
            ym = parse_year_month(trim(row.fields[0]));
        } catch (const Error&) {
            throw ParseError("invalid month '" + row.fields[0] + "'", row.line);
        }
        if (!out.emplace(ym, detail::field_number(row, 1, "score")).second) {
            throw DataQualityError("duplicate monthly search volume for " + format_year_month(ym));
        }
    }
    return out;
}

TrendsFrames load_trends(const std::vector<std::filesystem::path>& daily_paths,
                         const std::filesystem::path& monthly_path) {
    TrendsFrames t;
    for (const auto& p : daily_paths) t.daily_frames.push_back(parse_daily_frame_csv(read_file(p)));
    t.monthly = parse_monthly_csv(read_file(monthly_path));
    return t;
}

} // namespace edcast::ingest

namespace edcast::ingest {

std::string daily_frame_csv(const DailyFrame& frame) {
    std::string out = "date,score\n";
    for (std::size_t i = 0; i < frame.values.size(); ++i) {
        out += format_date(add_days(frame.start, static_cast<long>(i))) + ',' + format_roundtrip(frame.values[i]) + '\n';
    }
    return out;
}

std::string monthly_csv(const std::map<YearMonth, double>& monthly) {
    std::string out = "month,score\n";
    for (const auto& [ym, v] : monthly) out += format_year_month(ym) + ',' + format_roundtrip(v) + '\n';
    return out;
}

} // namespace edcast::ingest
