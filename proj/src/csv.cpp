#include "newsprop/csv.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace newsprop::csv {
namespace {

[[noreturn]] void fail(const std::string& name, std::size_t line, const std::string& what) {
    std::ostringstream os;
    os << name << ":" << line << ": " << what;
    throw std::runtime_error(os.str());
}

}  // namespace

Table parse(const std::string& text, const std::string& name) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;
    std::size_t line = 1;

    auto end_field = [&] {
        record.push_back(field);
        field.clear();
        field_was_quoted = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };

    for (std::size_t pos = 0; pos < text.size(); ++pos) {
        char c = text[pos];
        if (in_quotes) {
            if (c == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    field.push_back('"');
                    ++pos;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!field.empty() || field_was_quoted) {
                    fail(name, line, "quote inside unquoted field");
                }
                in_quotes = true;
                field_was_quoted = true;
                break;
            case ',':
                end_field();
                break;
            case '\r':
                if (pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
                end_record();
                ++line;
                break;
            case '\n':
                end_record();
                ++line;
                break;
            default:
                field.push_back(c);
                break;
        }
    }
    if (in_quotes) fail(name, line, "unterminated quoted field");
    // Final record without a trailing newline.
    if (!field.empty() || field_was_quoted || !record.empty()) end_record();

    // Blank lines are not meaningful records; tolerate them anywhere.
    std::erase_if(records, [](const std::vector<std::string>& r) {
        return r.size() == 1 && r[0].empty();
    });

    if (records.empty()) fail(name, 1, "empty CSV");

    Table t;
    t.header = std::move(records.front());
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != t.header.size()) {
            // Report with the data-record index; precise source lines are lost
            // once quoted fields may span lines, so count records instead.
            fail(name, r + 1, "expected " + std::to_string(t.header.size()) + " fields, got " +
                                  std::to_string(records[r].size()));
        }
        t.rows.push_back(std::move(records[r]));
    }
    return t;
}

Table read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open CSV file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.string());
}

std::string escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string format_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += escape(fields[i]);
    }
    return out;
}

}  // namespace newsprop::csv
