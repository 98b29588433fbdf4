#pragma once

#include "edcast/core/date.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace edcast::ingest {

/// Annual recurrence rule for a named calendar entry.
struct RecurrenceRule {
    enum class Kind { fixed, fixed_range, nth_weekday, easter };
    Kind kind = Kind::fixed;
    int month = 1;
    int day = 1;
    int end_month = 1;  // fixed_range only
    int end_day = 1;
    int weekday = 1;    // ISO 1 = Monday
    int n = 1;          // nth_weekday; -1 = last
    int offset = 0;     // days added to the anchor date
    int length = 1;     // consecutive days starting at the anchor (+offset)
    bool weekend_substitute = false;
    std::optional<int> from_year;
    std::optional<int> to_year;
};

struct CalendarEntry {
    std::string name;
    std::optional<Date> start;  // explicit inclusive range ...
    std::optional<Date> end;
    std::optional<RecurrenceRule> rule;  // ... or an annual rule
};

/// Per-date flags resolved over a contiguous window.
struct ResolvedDay {
    bool bank_holiday = false;
    bool school_holiday = false;
    std::vector<std::string> events;  // subset of Calendar::event_names(), in that order
};

/// Bank holidays, school holidays and named local events. Loaded from the
/// JSON calendar format described in docs/file-formats.md.
class Calendar {
public:
    Calendar() = default;

    static Calendar from_json(const nlohmann::json& j);
    static Calendar load(const std::filesystem::path& path);
    nlohmann::json to_json() const;

    void add_bank_holiday(CalendarEntry e) { bank_.push_back(std::move(e)); }
    void add_school_holiday(CalendarEntry e) { school_.push_back(std::move(e)); }
    void add_event(CalendarEntry e);

    /// Distinct event names in declaration order.
    const std::vector<std::string>& event_names() const { return event_names_; }

    std::vector<ResolvedDay> resolve(Date first, std::size_t days) const;

private:
    std::vector<CalendarEntry> bank_;
    std::vector<CalendarEntry> school_;
    std::vector<CalendarEntry> events_;
    std::vector<std::string> event_names_;
};

/// The London calendar bundled with the synthetic generator: England & Wales
/// bank holidays, typical London school terms, carnival and Christmas.
Calendar london_calendar();

} // namespace edcast::ingest
