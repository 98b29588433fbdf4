#include "edcast/core/date.hpp"

#include "edcast/core/errors.hpp"

#include <charconv>
#include <cstdio>

namespace edcast {

using namespace std::chrono;

namespace {

bool parse_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

} // namespace

bool try_parse_date(std::string_view text, Date& out) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return false;
    int y = 0, m = 0, d = 0;
    if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
        !parse_int(text.substr(8, 2), d)) {
        return false;
    }
    year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return false;
    out = sys_days{ymd};
    return true;
}

Date parse_date(std::string_view text) {
    Date d;
    if (!try_parse_date(text, d)) {
        throw ContractViolation("invalid ISO date '" + std::string(text) + "'");
    }
    return d;
}

std::string format_date(Date d) {
    year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

int iso_weekday(Date d) { return static_cast<int>(weekday{d}.iso_encoding()); }

int month_of(Date d) { return static_cast<int>(static_cast<unsigned>(year_month_day{d}.month())); }

int year_of(Date d) { return static_cast<int>(year_month_day{d}.year()); }

int day_of_year(Date d) {
    year_month_day ymd{d};
    sys_days jan1{ymd.year() / January / 1};
    return static_cast<int>((d - jan1).count()) + 1;
}

Date make_date(int y, int m, int d) {
    year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) throw ContractViolation("invalid calendar date");
    return sys_days{ymd};
}

Date easter_sunday(int y) {
    // Anonymous Gregorian algorithm (Meeus/Jones/Butcher).
    int a = y % 19;
    int b = y / 100;
    int c = y % 100;
    int d = b / 4;
    int e = b % 4;
    int f = (b + 8) / 25;
    int g = (b - f + 1) / 3;
    int h = (19 * a + b - d - g + 15) % 30;
    int i = c / 4;
    int k = c % 4;
    int l = (32 + 2 * e + 2 * i - h - k) % 7;
    int m = (a + 11 * h + 22 * l) / 451;
    int month = (h + l - 7 * m + 114) / 31;
    int day = ((h + l - 7 * m + 114) % 31) + 1;
    return make_date(y, month, day);
}

Date last_day_of_month(int y, int m) {
    return sys_days{year{y} / month{static_cast<unsigned>(m)} / last};
}

Date nth_weekday_of_month(int y, int m, int iso_wd, int n) {
    if (iso_wd < 1 || iso_wd > 7 || n == 0) throw ContractViolation("invalid weekday rule");
    if (n > 0) {
        Date first = make_date(y, m, 1);
        int offset = (iso_wd - iso_weekday(first) + 7) % 7;
        Date d = add_days(first, offset + 7 * (n - 1));
        if (month_of(d) != m) throw ContractViolation("weekday rule overflows month");
        return d;
    }
    Date lastd = last_day_of_month(y, m);
    int offset = (iso_weekday(lastd) - iso_wd + 7) % 7;
    Date d = add_days(lastd, -offset - 7 * (-n - 1));
    if (month_of(d) != m) throw ContractViolation("weekday rule overflows month");
    return d;
}

YearMonth year_month_of(Date d) { return {year_of(d), month_of(d)}; }

YearMonth parse_year_month(std::string_view text) {
    int y = 0, m = 0;
    if (text.size() != 7 || text[4] != '-' || !parse_int(text.substr(0, 4), y) ||
        !parse_int(text.substr(5, 2), m) || m < 1 || m > 12) {
        throw ContractViolation("invalid month '" + std::string(text) + "' (expected YYYY-MM)");
    }
    return {y, m};
}

std::string format_year_month(YearMonth ym) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", ym.year, ym.month);
    return buf;
}

} // namespace edcast
