#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace rnntc {

/// One parsed CSV row and the 1-based physical line it started on.
struct CsvRow {
    std::vector<std::string> fields;
    std::size_t line = 0;
};

/// RFC 4180 reader: comma separated, double-quote quoting with "" escapes,
/// quoted fields may span lines. A leading UTF-8 BOM is skipped and CRLF is
/// accepted. Throws InputError on an unterminated quote or stray quote.
std::vector<CsvRow> parse_csv(std::string_view text);

/// Quotes a field when it contains a comma, quote, or line break.
std::string csv_escape(std::string_view field);

}  // namespace rnntc
