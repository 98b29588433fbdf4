#include "edcast/ingest/attendance.hpp"

#include "csv_table.hpp"

#include <algorithm>

namespace edcast::ingest {

DailySeries parse_attendance_csv(std::string_view text, std::vector<Date>* imputed) {
    auto rows = detail::read_csv(text, {"date", "attendances"});
    if (rows.empty()) throw ParseError("attendance file has no data rows", 2);
    std::vector<std::pair<Date, double>> obs;
    obs.reserve(rows.size());
    for (const auto& row : rows) {
        double v = detail::field_number(row, 1, "attendance count");
        if (v < 0) throw ParseError("negative attendance count", row.line);
        obs.emplace_back(detail::field_date(row, 0), v);
    }
    std::stable_sort(obs.begin(), obs.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<double> values{obs.front().second};
    for (std::size_t i = 1; i < obs.size(); ++i) {
        long gap = days_between(obs[i - 1].first, obs[i].first);
        if (gap == 0) {
            throw DataQualityError("duplicate attendance date " + format_date(obs[i].first));
        }
        if (gap == 2) {
            values.push_back(0.5 * (obs[i - 1].second + obs[i].second));
            if (imputed) imputed->push_back(add_days(obs[i - 1].first, 1));
        } else if (gap > 2) {
            throw DataQualityError("attendance gap of " + std::to_string(gap - 1) +
                                   " days after " + format_date(obs[i - 1].first));
        }
        values.push_back(obs[i].second);
    }
    return DailySeries(obs.front().first, std::move(values));
}

DailySeries load_attendance_csv(const std::filesystem::path& path, std::vector<Date>* imputed) {
    return parse_attendance_csv(read_file(path), imputed);
}

std::string attendance_csv(const DailySeries& series) {
    std::string out = "date,attendances\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out += format_date(series.date_at(i));
        out += ',';
        out += format_roundtrip(series[i]);
        out += '\n';
    }
    return out;
}

} // namespace edcast::ingest
