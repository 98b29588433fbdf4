#include "edcast/ingest/weather.hpp"

#include "csv_table.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace edcast::ingest {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kMaxFillRun = 7;

double optional_number(const detail::CsvRow& row, std::size_t i, const char* what) {
    if (trim(row.fields[i]).empty() || trim(row.fields[i]) == "NA") return kMissing;
    return detail::field_number(row, i, what);
}

std::vector<double> fill_field(const std::vector<double>& raw, Date start, const char* name,
                               std::size_t& filled) {
    std::vector<double> out(raw.size());
    std::size_t run = 0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!std::isnan(raw[i])) {
            out[i] = raw[i];
            run = 0;
            continue;
        }
        if (i == 0) {
            throw DataQualityError(std::string("weather field ") + name + " missing on first day " +
                                   format_date(start));
        }
        if (++run > kMaxFillRun) {
            throw DataQualityError(std::string("weather field ") + name + " missing for more than " +
                                   std::to_string(kMaxFillRun) + " consecutive days ending " +
                                   format_date(add_days(start, static_cast<long>(i))));
        }
        out[i] = out[i - 1];
        ++filled;
    }
    return out;
}

} // namespace

WeatherRecords parse_weather_csv(std::string_view text) {
    auto rows = detail::read_csv(text, {"date", "precip_mm", "temp_max_c", "temp_min_c"});
    WeatherRecords w;
    for (const auto& row : rows) {
        w.dates.push_back(detail::field_date(row, 0));
        w.precip_mm.push_back(optional_number(row, 1, "precipitation"));
        w.temp_max_c.push_back(optional_number(row, 2, "temp_max"));
        w.temp_min_c.push_back(optional_number(row, 3, "temp_min"));
    }
    return w;
}

WeatherRecords load_weather_csv(const std::filesystem::path& path) {
    return parse_weather_csv(read_file(path));
}

AlignedWeather align_weather(const WeatherRecords& records, Date start, std::size_t days) {
    std::vector<double> precip(days, kMissing), tmax(days, kMissing), tmin(days, kMissing);
    std::map<Date, std::size_t> seen;
    for (std::size_t r = 0; r < records.dates.size(); ++r) {
        Date d = records.dates[r];
        if (!seen.emplace(d, r).second) {
            throw DataQualityError("duplicate weather date " + format_date(d));
        }
        long off = days_between(start, d);
        if (off < 0 || off >= static_cast<long>(days)) continue;
        auto i = static_cast<std::size_t>(off);
        precip[i] = records.precip_mm[r];
        tmax[i] = records.temp_max_c[r];
        tmin[i] = records.temp_min_c[r];
    }
    AlignedWeather out;
    out.precip_mm = fill_field(precip, start, "precip_mm", out.filled.precip);
    out.temp_max_c = fill_field(tmax, start, "temp_max_c", out.filled.temp_max);
    out.temp_min_c = fill_field(tmin, start, "temp_min_c", out.filled.temp_min);
    return out;
}

} // namespace edcast::ingest

namespace edcast::ingest {

std::string weather_csv(const WeatherRecords& records) {
    auto field = [](double v) { return std::isnan(v) ? std::string() : format_roundtrip(v); };
    std::string out = "date,precip_mm,temp_max_c,temp_min_c\n";
    for (std::size_t i = 0; i < records.dates.size(); ++i) {
        out += format_date(records.dates[i]) + ',' + field(records.precip_mm[i]) + ',' + field(records.temp_max_c[i]) +
               ',' + field(records.temp_min_c[i]) + '\n';
    }
    return out;
}

} // namespace edcast::ingest
