#include "edcast/ingest/covariates.hpp"

#include "csv_table.hpp"

#include <cmath>

namespace edcast::ingest {

void CovariateTable::validate() const {
    const std::size_t n = bank_holiday.size();
    if (n == 0) throw ContractViolation("covariate table is empty");
    if (school_holiday.size() != n || precip_mm.size() != n || temp_max_c.size() != n ||
        temp_min_c.size() != n || flu_searches.size() != n || events.size() != event_names.size()) {
        throw ContractViolation("covariate table columns have different lengths");
    }
    for (const auto& e : events) {
        if (e.size() != n) throw ContractViolation("covariate event column has wrong length");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(precip_mm[i]) || !std::isfinite(temp_max_c[i]) ||
            !std::isfinite(temp_min_c[i]) || !std::isfinite(flu_searches[i])) {
            throw DataQualityError("non-finite covariate on " + format_date(date_at(i)));
        }
        if (temp_max_c[i] < temp_min_c[i]) {
            throw DataQualityError("temp_max below temp_min on " + format_date(date_at(i)));
        }
        if (flu_searches[i] < 0) {
            throw DataQualityError("negative search volume on " + format_date(date_at(i)));
        }
    }
}

CovariateTable CovariateTable::slice(std::size_t first, std::size_t count) const {
    if (count == 0 || first + count > size()) throw ContractViolation("covariate slice out of range");
    auto cut = [&](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        return V(v.begin() + static_cast<long>(first), v.begin() + static_cast<long>(first + count));
    };
    CovariateTable t;
    t.start = date_at(first);
    t.bank_holiday = cut(bank_holiday);
    t.school_holiday = cut(school_holiday);
    t.precip_mm = cut(precip_mm);
    t.temp_max_c = cut(temp_max_c);
    t.temp_min_c = cut(temp_min_c);
    t.flu_searches = cut(flu_searches);
    t.event_names = event_names;
    for (const auto& e : events) t.events.push_back(cut(e));
    t.weather_filled = weather_filled;
    return t;
}

CovariateTable build_covariate_table(Date start, std::size_t days, const Calendar& calendar,
                                     const WeatherRecords& weather, const AdjustedTrends& flu) {
    if (days == 0) throw ContractViolation("covariate window is empty");
    CovariateTable t;
    t.start = start;
    auto resolved = calendar.resolve(start, days);
    t.event_names = calendar.event_names();
    t.events.assign(t.event_names.size(), std::vector<std::uint8_t>(days, 0));
    for (std::size_t i = 0; i < days; ++i) {
        t.bank_holiday.push_back(resolved[i].bank_holiday);
        t.school_holiday.push_back(resolved[i].school_holiday);
        for (const auto& name : resolved[i].events) {
            for (std::size_t e = 0; e < t.event_names.size(); ++e) {
                if (t.event_names[e] == name) t.events[e][i] = 1;
            }
        }
    }
    auto w = align_weather(weather, start, days);
    t.precip_mm = std::move(w.precip_mm);
    t.temp_max_c = std::move(w.temp_max_c);
    t.temp_min_c = std::move(w.temp_min_c);
    t.weather_filled = w.filled;

    long off = days_between(flu.start, start);
    if (off < 0 || off + static_cast<long>(days) > static_cast<long>(flu.values.size())) {
        throw CoverageError("search volume does not cover " + format_date(start) + ".." +
                            format_date(add_days(start, static_cast<long>(days) - 1)));
    }
    t.flu_searches.assign(flu.values.begin() + off, flu.values.begin() + off + static_cast<long>(days));
    t.validate();
    return t;
}

std::string covariate_csv(const CovariateTable& t) {
    std::string out = "date,bank_holiday,school_holiday,precip_mm,temp_max_c,temp_min_c,flu_searches";
    for (const auto& name : t.event_names) out += "," + csv_quote("event:" + name);
    out += '\n';
    for (std::size_t i = 0; i < t.size(); ++i) {
        out += format_date(t.date_at(i));
        out += t.bank_holiday[i] ? ",1" : ",0";
        out += t.school_holiday[i] ? ",1" : ",0";
        for (double v : {t.precip_mm[i], t.temp_max_c[i], t.temp_min_c[i], t.flu_searches[i]}) {
            out += ',';
            out += format_roundtrip(v);
        }
        for (const auto& e : t.events) out += e[i] ? ",1" : ",0";
        out += '\n';
    }
    return out;
}

CovariateTable parse_covariate_csv(std::string_view text) {
    const std::vector<std::string> fixed = {"date",       "bank_holiday", "school_holiday", "precip_mm",
                                            "temp_max_c", "temp_min_c",   "flu_searches"};
    std::vector<std::string> header;
    auto rows = detail::read_csv(text, fixed, &header, true);
    if (rows.empty()) throw ParseError("covariate file has no data rows", 2);
    CovariateTable t;
    for (std::size_t c = fixed.size(); c < header.size(); ++c) {
        if (header[c].rfind("event:", 0) != 0 || header[c].size() == 6) {
            throw ParseError("unexpected column '" + header[c] + "'", 1);
        }
        t.event_names.push_back(header[c].substr(6));
    }
    t.events.resize(t.event_names.size());
    t.start = detail::field_date(rows.front(), 0);
    for (const auto& row : rows) {
        Date d = detail::field_date(row, 0);
        if (days_between(t.start, d) != static_cast<long>(t.bank_holiday.size())) {
            throw DataQualityError("covariate dates must be consecutive and sorted (at " +
                                   format_date(d) + ")");
        }
        t.bank_holiday.push_back(detail::field_flag(row, 1));
        t.school_holiday.push_back(detail::field_flag(row, 2));
        t.precip_mm.push_back(detail::field_number(row, 3, "precip_mm"));
        t.temp_max_c.push_back(detail::field_number(row, 4, "temp_max_c"));
        t.temp_min_c.push_back(detail::field_number(row, 5, "temp_min_c"));
        t.flu_searches.push_back(detail::field_number(row, 6, "flu_searches"));
        for (std::size_t e = 0; e < t.events.size(); ++e) {
            t.events[e].push_back(detail::field_flag(row, fixed.size() + e));
        }
    }
    t.validate();
    return t;
}

CovariateTable load_covariate_csv(const std::filesystem::path& path) {
    return parse_covariate_csv(read_file(path));
}

} // namespace edcast::ingest
