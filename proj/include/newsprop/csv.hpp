#pragma once

// Minimal RFC-4180 CSV reading/writing: quoted fields, "" escapes, CR/LF or
// LF record separators, embedded newlines inside quoted fields.

#include <filesystem>
#include <string>
#include <vector>

namespace newsprop::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// Parses a CSV file whose first record is the header. Throws
// std::runtime_error with file/line context on structural violations
// (unterminated quote, bare quote inside an unquoted field, ragged rows).
Table read_file(const std::filesystem::path& path);

// Same, from an in-memory buffer; `name` is used in error messages.
Table parse(const std::string& text, const std::string& name);

// Quotes a field if it contains a comma, quote, CR or LF.
std::string escape(const std::string& field);

// Escapes each field and joins with commas (no trailing newline).
std::string format_row(const std::vector<std::string>& fields);

}  // namespace newsprop::csv
