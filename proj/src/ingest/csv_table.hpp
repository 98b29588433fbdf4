#pragma once

#include "edcast/core/date.hpp"
#include "edcast/core/errors.hpp"
#include "edcast/core/text.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace edcast::ingest::detail {

struct CsvRow {
    std::size_t line = 0;  // 1-based
    std::vector<std::string> fields;
};

/// Splits CSV text into a header and data rows, skipping blank lines. The
/// header must start with `expected` (extra trailing columns are allowed when
/// `allow_extra` is set).
inline std::vector<CsvRow> read_csv(std::string_view text, const std::vector<std::string>& expected,
                                    std::vector<std::string>* header_out = nullptr,
                                    bool allow_extra = false) {
    auto lines = split_lines(text);
    std::size_t first = 0;
    while (first < lines.size() && trim(lines[first]).empty()) ++first;
    if (first == lines.size()) throw ParseError("empty file, expected a header row", 1);
    auto header = split_csv_record(lines[first]);
    for (auto& h : header) h = std::string(trim(h));
    if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);
    bool ok = allow_extra ? header.size() >= expected.size() : header.size() == expected.size();
    for (std::size_t i = 0; ok && i < expected.size(); ++i) ok = header[i] == expected[i];
    if (!ok) {
        std::string want;
        for (const auto& e : expected) want += (want.empty() ? "" : ",") + e;
        throw ParseError("unexpected header, expected '" + want + "'", first + 1);
    }
    std::vector<CsvRow> rows;
    for (std::size_t i = first + 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        CsvRow row{i + 1, split_csv_record(lines[i])};
        if (row.fields.size() != header.size()) {
            throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(row.fields.size()),
                             row.line);
        }
        rows.push_back(std::move(row));
    }
    if (header_out) *header_out = std::move(header);
    return rows;
}

inline Date field_date(const CsvRow& row, std::size_t i) {
    Date d;
    if (!try_parse_date(trim(row.fields[i]), d)) {
        throw ParseError("invalid date '" + row.fields[i] + "'", row.line);
    }
    return d;
}

inline double field_number(const CsvRow& row, std::size_t i, const char* what) {
    double v = 0;
    if (!parse_double(row.fields[i], v)) {
        throw ParseError(std::string("invalid ") + what + " '" + row.fields[i] + "'", row.line);
    }
    return v;
}

inline bool field_flag(const CsvRow& row, std::size_t i) {
    auto f = trim(row.fields[i]);
    if (f == "1" || f == "true" || f == "TRUE") return true;
    if (f == "0" || f == "false" || f == "FALSE") return false;
    throw ParseError("invalid flag '" + row.fields[i] + "'", row.line);
}

} // namespace edcast::ingest::detail
