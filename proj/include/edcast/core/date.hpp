#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace edcast {

using Date = std::chrono::sys_days;

/// Parses a strict ISO-8601 calendar date `YYYY-MM-DD`. Throws ContractViolation.
Date parse_date(std::string_view text);
bool try_parse_date(std::string_view text, Date& out);
std::string format_date(Date d);

/// 1 = Monday ... 7 = Sunday.
int iso_weekday(Date d);
/// 1..12
int month_of(Date d);
int year_of(Date d);
/// 1..366
int day_of_year(Date d);

inline long days_between(Date from, Date to) { return (to - from).count(); }
inline Date add_days(Date d, long n) { return d + std::chrono::days{n}; }

Date make_date(int year, int month, int day);

/// Western (Gregorian) Easter Sunday.
Date easter_sunday(int year);

/// Last day of the given month.
Date last_day_of_month(int year, int month);

/// n-th weekday (1-based) of a month; n = -1 selects the last one.
Date nth_weekday_of_month(int year, int month, int iso_wd, int n);

/// Month key `YYYY-MM`.
struct YearMonth {
    int year = 0;
    int month = 0;
    auto operator<=>(const YearMonth&) const = default;
};

YearMonth year_month_of(Date d);
YearMonth parse_year_month(std::string_view text);
std::string format_year_month(YearMonth ym);

} // namespace edcast
