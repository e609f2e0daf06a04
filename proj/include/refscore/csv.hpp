#pragma once
// Minimal RFC4180-style CSV reader/writer. Handles quoted fields with
// embedded commas, quotes and newlines, and CRLF line endings.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace refscore::csv {

using Row = std::vector<std::string>;

inline std::vector<Row> parse(const std::string& text) {
    std::vector<Row> rows;
    Row row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    size_t i = 0;
    const size_t n = text.size();
    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
    };
    while (i < n) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < n && text[i + 1] == '"') {
                    field += '"';
                    i += 2;
                } else {
                    in_quotes = false;
                    ++i;
                }
            } else {
                field += c;
                ++i;
            }
        } else {
            if (c == '"' && !field_started && field.empty()) {
                in_quotes = true;
                field_started = true;
                ++i;
            } else if (c == ',') {
                end_field();
                ++i;
            } else if (c == '\r' && i + 1 < n && text[i + 1] == '\n') {
                end_row();
                i += 2;
            } else if (c == '\n' || c == '\r') {
                end_row();
                ++i;
            } else {
                field += c;
                field_started = true;
                ++i;
            }
        }
    }
    if (in_quotes)
        throw std::runtime_error("csv: unterminated quoted field");
    if (field_started || !field.empty() || !row.empty())
        end_row();
    return rows;
}

inline std::vector<Row> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("csv: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

inline std::string escape(const std::string& field) {
    bool needs_quotes = field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quotes)
        return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += "\"\"";
        else
            out += c;
    }
    out += '"';
    return out;
}

inline std::string join(const Row& row) {
    std::string out;
    for (size_t i = 0; i < row.size(); ++i) {
        if (i)
            out += ',';
        out += escape(row[i]);
    }
    return out;
}

class Writer {
public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_)
            throw std::runtime_error("csv: cannot write " + path);
    }
    void write_row(const Row& row) { out_ << join(row) << '\n'; }

private:
    std::ofstream out_;
};

} // namespace refscore::csv
