#include "rnntc/csv.hpp"

#include "rnntc/errors.hpp"

namespace rnntc {

std::vector<CsvRow> parse_csv(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF")) {
        text.remove_prefix(3);
    }

    std::vector<CsvRow> rows;
    CsvRow row;
    std::string field;
    std::size_t line = 1;
    row.line = line;
    bool in_quotes = false;
    bool field_was_quoted = false;

    auto end_field = [&] {
        row.fields.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
    };
    auto end_row = [&] {
        end_field();
        // A bare blank line is not a record.
        if (!(row.fields.size() == 1 && row.fields[0].empty())) {
            rows.push_back(std::move(row));
        }
        row = CsvRow{};
        row.line = line;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') {
                    ++line;
                }
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!field.empty() || field_was_quoted) {
                    throw InputError("malformed CSV: stray quote on line " + std::to_string(line));
                }
                in_quotes = true;
                field_was_quoted = true;
                break;
            case ',':
                end_field();
                break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') {
                    break;
                }
                ++line;
                end_row();
                break;
            case '\n':
                ++line;
                end_row();
                break;
            default:
                if (field_was_quoted) {
                    throw InputError("malformed CSV: text after closing quote on line " + std::to_string(line));
                }
                field.push_back(c);
        }
    }
    if (in_quotes) {
        throw InputError("malformed CSV: unterminated quoted field starting in row beginning on line " +
                         std::to_string(row.line));
    }
    if (!field.empty() || field_was_quoted || !row.fields.empty()) {
        end_row();
    }
    return rows;
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') {
            out.push_back('"');
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace rnntc
