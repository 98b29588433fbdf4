#include "edcast/ingest/calendar.hpp"

#include "edcast/core/errors.hpp"
#include "edcast/core/text.hpp"

#include <algorithm>
#include <set>

namespace edcast::ingest {

using nlohmann::json;

namespace {

RecurrenceRule::Kind parse_kind(const std::string& s) {
    if (s == "fixed") return RecurrenceRule::Kind::fixed;
    if (s == "fixed_range") return RecurrenceRule::Kind::fixed_range;
    if (s == "nth_weekday") return RecurrenceRule::Kind::nth_weekday;
    if (s == "easter") return RecurrenceRule::Kind::easter;
    throw ContractViolation("unknown calendar rule kind '" + s + "'");
}

const char* kind_name(RecurrenceRule::Kind k) {
    switch (k) {
    case RecurrenceRule::Kind::fixed: return "fixed";
    case RecurrenceRule::Kind::fixed_range: return "fixed_range";
    case RecurrenceRule::Kind::nth_weekday: return "nth_weekday";
    case RecurrenceRule::Kind::easter: return "easter";
    }
    return "fixed";
}

void parse_month_day(const std::string& s, int& m, int& d) {
    auto parts = split(s, '-');
    double mm = 0, dd = 0;
    if (parts.size() != 2 || !parse_double(parts[0], mm) || !parse_double(parts[1], dd)) {
        throw ContractViolation("invalid month-day '" + s + "' (expected MM-DD)");
    }
    m = static_cast<int>(mm);
    d = static_cast<int>(dd);
    if (m < 1 || m > 12 || d < 1 || d > 31) throw ContractViolation("invalid month-day '" + s + "'");
}

std::string month_day(int m, int d) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02d-%02d", m, d);
    return buf;
}

CalendarEntry parse_entry(const json& j) {
    if (!j.is_object()) throw ContractViolation("calendar entry must be an object");
    CalendarEntry e;
    if (j.contains("name")) e.name = j.at("name").get<std::string>();
    if (j.contains("rule")) {
        const json& r = j.at("rule");
        RecurrenceRule rule;
        rule.kind = parse_kind(r.at("kind").get<std::string>());
        switch (rule.kind) {
        case RecurrenceRule::Kind::fixed:
            rule.month = r.at("month").get<int>();
            rule.day = r.at("day").get<int>();
            rule.weekend_substitute = r.value("weekend_substitute", false);
            break;
        case RecurrenceRule::Kind::fixed_range:
            parse_month_day(r.at("start").get<std::string>(), rule.month, rule.day);
            parse_month_day(r.at("end").get<std::string>(), rule.end_month, rule.end_day);
            break;
        case RecurrenceRule::Kind::nth_weekday:
            rule.month = r.at("month").get<int>();
            rule.weekday = r.at("weekday").get<int>();
            rule.n = r.at("n").get<int>();
            break;
        case RecurrenceRule::Kind::easter:
            break;
        }
        rule.offset = r.value("offset", 0);
        rule.length = r.value("length", 1);
        if (rule.length < 1) throw ContractViolation("calendar rule length must be >= 1");
        if (r.contains("from_year")) rule.from_year = r.at("from_year").get<int>();
        if (r.contains("to_year")) rule.to_year = r.at("to_year").get<int>();
        e.rule = rule;
    } else if (j.contains("start")) {
        e.start = parse_date(j.at("start").get<std::string>());
        e.end = parse_date(j.value("end", j.at("start").get<std::string>()));
        if (*e.end < *e.start) throw ContractViolation("calendar range ends before it starts");
    } else {
        throw ContractViolation("calendar entry needs either 'rule' or 'start'");
    }
    return e;
}

json entry_json(const CalendarEntry& e) {
    json j = json::object();
    if (!e.name.empty()) j["name"] = e.name;
    if (e.rule) {
        const auto& r = *e.rule;
        json rj = {{"kind", kind_name(r.kind)}};
        switch (r.kind) {
        case RecurrenceRule::Kind::fixed:
            rj["month"] = r.month;
            rj["day"] = r.day;
            if (r.weekend_substitute) rj["weekend_substitute"] = true;
            break;
        case RecurrenceRule::Kind::fixed_range:
            rj["start"] = month_day(r.month, r.day);
            rj["end"] = month_day(r.end_month, r.end_day);
            break;
        case RecurrenceRule::Kind::nth_weekday:
            rj["month"] = r.month;
            rj["weekday"] = r.weekday;
            rj["n"] = r.n;
            break;
        case RecurrenceRule::Kind::easter: break;
        }
        if (r.offset != 0) rj["offset"] = r.offset;
        if (r.length != 1) rj["length"] = r.length;
        if (r.from_year) rj["from_year"] = *r.from_year;
        if (r.to_year) rj["to_year"] = *r.to_year;
        j["rule"] = rj;
    } else {
        j["start"] = format_date(*e.start);
        j["end"] = format_date(*e.end);
    }
    return j;
}

// Dates of one entry within [year_lo, year_hi]; substitutes are resolved by
// the caller because they depend on the other entries of the same list.
void expand(const CalendarEntry& e, int year_lo, int year_hi, std::vector<Date>& out,
            std::vector<Date>& needs_substitute) {
    if (!e.rule) {
        for (Date d = *e.start; d <= *e.end; d = add_days(d, 1)) out.push_back(d);
        return;
    }
    const auto& r = *e.rule;
    for (int y = year_lo; y <= year_hi; ++y) {
        if (r.from_year && y < *r.from_year) continue;
        if (r.to_year && y > *r.to_year) continue;
        switch (r.kind) {
        case RecurrenceRule::Kind::fixed: {
            Date d = add_days(make_date(y, r.month, r.day), r.offset);
            for (int k = 0; k < r.length; ++k) {
                Date dk = add_days(d, k);
                if (r.weekend_substitute && iso_weekday(dk) >= 6) {
                    needs_substitute.push_back(dk);
                } else {
                    out.push_back(dk);
                }
            }
            break;
        }
        case RecurrenceRule::Kind::fixed_range: {
            Date a = make_date(y, r.month, r.day);
            Date b = make_date(y, r.end_month, r.end_day);
            if (b < a) b = make_date(y + 1, r.end_month, r.end_day);
            for (Date d = add_days(a, r.offset); d <= add_days(b, r.offset); d = add_days(d, 1)) {
                out.push_back(d);
            }
            break;
        }
        case RecurrenceRule::Kind::nth_weekday: {
            Date d = add_days(nth_weekday_of_month(y, r.month, r.weekday, r.n), r.offset);
            for (int k = 0; k < r.length; ++k) out.push_back(add_days(d, k));
            break;
        }
        case RecurrenceRule::Kind::easter: {
            Date d = add_days(easter_sunday(y), r.offset);
            for (int k = 0; k < r.length; ++k) out.push_back(add_days(d, k));
            break;
        }
        }
    }
}

std::set<Date> expand_list(const std::vector<CalendarEntry>& list, int year_lo, int year_hi) {
    std::vector<Date> dates, subs;
    for (const auto& e : list) expand(e, year_lo, year_hi, dates, subs);
    std::set<Date> taken(dates.begin(), dates.end());
    std::sort(subs.begin(), subs.end());
    for (Date d : subs) {
        Date s = add_days(d, 1);
        while (iso_weekday(s) >= 6 || taken.count(s)) s = add_days(s, 1);
        taken.insert(s);
    }
    return taken;
}

} // namespace

void Calendar::add_event(CalendarEntry e) {
    if (e.name.empty()) throw ContractViolation("events must be named");
    if (std::find(event_names_.begin(), event_names_.end(), e.name) == event_names_.end()) {
        event_names_.push_back(e.name);
    }
    events_.push_back(std::move(e));
}

Calendar Calendar::from_json(const json& j) {
    if (!j.is_object()) throw ContractViolation("calendar must be a JSON object");
    Calendar c;
    if (j.contains("bank_holidays")) {
        for (const auto& e : j.at("bank_holidays")) c.add_bank_holiday(parse_entry(e));
    }
    if (j.contains("school_holidays")) {
        for (const auto& e : j.at("school_holidays")) c.add_school_holiday(parse_entry(e));
    }
    if (j.contains("events")) {
        for (const auto& e : j.at("events")) c.add_event(parse_entry(e));
    }
    return c;
}

Calendar Calendar::load(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& ex) {
        throw ContractViolation("calendar '" + path.string() + "': " + ex.what());
    }
    try {
        return from_json(j);
    } catch (const json::exception& ex) {
        throw ContractViolation("calendar '" + path.string() + "': " + ex.what());
    }
}

json Calendar::to_json() const {
    json j = {{"schema_version", 1}};
    j["bank_holidays"] = json::array();
    j["school_holidays"] = json::array();
    j["events"] = json::array();
    for (const auto& e : bank_) j["bank_holidays"].push_back(entry_json(e));
    for (const auto& e : school_) j["school_holidays"].push_back(entry_json(e));
    for (const auto& e : events_) j["events"].push_back(entry_json(e));
    return j;
}

std::vector<ResolvedDay> Calendar::resolve(Date first, std::size_t days) const {
    std::vector<ResolvedDay> out(days);
    if (days == 0) return out;
    Date last = add_days(first, static_cast<long>(days) - 1);
    const int lo = year_of(first) - 1;
    const int hi = year_of(last) + 1;
    auto mark = [&](const std::set<Date>& set, auto&& apply) {
        for (Date d : set) {
            long off = days_between(first, d);
            if (off >= 0 && off < static_cast<long>(days)) apply(out[static_cast<std::size_t>(off)]);
        }
    };
    mark(expand_list(bank_, lo, hi), [](ResolvedDay& r) { r.bank_holiday = true; });
    mark(expand_list(school_, lo, hi), [](ResolvedDay& r) { r.school_holiday = true; });
    for (const auto& name : event_names_) {
        std::vector<CalendarEntry> same;
        for (const auto& e : events_) {
            if (e.name == name) same.push_back(e);
        }
        mark(expand_list(same, lo, hi), [&](ResolvedDay& r) { r.events.push_back(name); });
    }
    return out;
}

Calendar london_calendar() {
    Calendar c;
    auto rule = [](RecurrenceRule r) {
        CalendarEntry e;
        e.rule = r;
        return e;
    };
    auto named = [](std::string name, CalendarEntry e) {
        e.name = std::move(name);
        return e;
    };
    RecurrenceRule r;

    r = {};
    r.kind = RecurrenceRule::Kind::fixed;
    r.month = 1, r.day = 1, r.weekend_substitute = true;
    c.add_bank_holiday(named("new_year", rule(r)));
    r = {};
    r.kind = RecurrenceRule::Kind::easter;
    r.offset = -2;
    c.add_bank_holiday(named("good_friday", rule(r)));
    r.offset = 1;
    c.add_bank_holiday(named("easter_monday", rule(r)));
    r = {};
    r.kind = RecurrenceRule::Kind::nth_weekday;
    r.month = 5, r.weekday = 1, r.n = 1;
    c.add_bank_holiday(named("early_may", rule(r)));
    r.n = -1;
    c.add_bank_holiday(named("spring", rule(r)));
    r.month = 8;
    c.add_bank_holiday(named("summer", rule(r)));
    r = {};
    r.kind = RecurrenceRule::Kind::fixed;
    r.month = 12, r.day = 25, r.weekend_substitute = true;
    c.add_bank_holiday(named("christmas_day", rule(r)));
    r.day = 26;
    c.add_bank_holiday(named("boxing_day", rule(r)));

    auto range = [&](const char* name, int m0, int d0, int m1, int d1) {
        RecurrenceRule rr;
        rr.kind = RecurrenceRule::Kind::fixed_range;
        rr.month = m0, rr.day = d0, rr.end_month = m1, rr.end_day = d1;
        c.add_school_holiday(named(name, rule(rr)));
    };
    range("winter", 12, 20, 1, 3);
    range("february_half_term", 2, 14, 2, 22);
    RecurrenceRule easter;
    easter.kind = RecurrenceRule::Kind::easter;
    easter.offset = -8;
    easter.length = 16;
    c.add_school_holiday(named("easter", rule(easter)));
    range("may_half_term", 5, 27, 6, 2);
    range("summer", 7, 22, 9, 3);
    range("october_half_term", 10, 23, 10, 31);

    RecurrenceRule carnival;
    carnival.kind = RecurrenceRule::Kind::nth_weekday;
    carnival.month = 8, carnival.weekday = 1, carnival.n = -1, carnival.offset = -1, carnival.length = 2;
    c.add_event(named("notting_hill_carnival", rule(carnival)));
    RecurrenceRule xmas;
    xmas.kind = RecurrenceRule::Kind::fixed_range;
    xmas.month = 12, xmas.day = 24, xmas.end_month = 12, xmas.end_day = 26;
    c.add_event(named("christmas", rule(xmas)));
    return c;
}

} // namespace edcast::ingest
