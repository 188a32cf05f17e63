#include "tidp/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "tidp/errors.hpp"

namespace tidp::csv {

std::optional<std::size_t> Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    return std::nullopt;
}

namespace {

std::vector<std::vector<std::string>> parse_records(std::istream& in) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool any_data = false;

    auto end_field = [&] {
        fields.push_back(std::move(field));
        field.clear();
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(fields));
        fields.clear();
        any_data = false;
    };

    int c;
    while ((c = in.get()) != EOF) {
        const char ch = static_cast<char>(c);
        if (in_quotes) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(ch);
            }
            continue;
        }
        switch (ch) {
            case '"':
                in_quotes = true;
                any_data = true;
                break;
            case ',':
                end_field();
                any_data = true;
                break;
            case '\r':
                if (in.peek() == '\n') in.get();
                end_record();
                break;
            case '\n':
                end_record();
                break;
            default:
                field.push_back(ch);
                any_data = true;
        }
    }
    if (in_quotes) throw SchemaError("csv: unterminated quoted field");
    if (any_data || !field.empty() || !fields.empty()) end_record();
    return records;
}

}  // namespace

Table read_csv(std::istream& in) {
    Table table;
    auto records = parse_records(in);
    if (records.empty()) throw SchemaError("csv: missing header row");
    table.header = std::move(records.front());
    table.rows.assign(std::make_move_iterator(records.begin() + 1),
                      std::make_move_iterator(records.end()));
    return table;
}

Table read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifactError("cannot open " + path);
    return read_csv(in);
}

std::string escape_field(const std::string& field) {
    const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += "\"\"";
        else out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.put(',');
        out << escape_field(fields[i]);
    }
    out.put('\n');
}

void write_csv(std::ostream& out, const Table& table) {
    write_row(out, table.header);
    for (const auto& row : table.rows) write_row(out, row);
}

void write_csv_file(const std::string& path, const Table& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_csv(out, table);
}

std::string format_double(double v) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

double parse_double(const std::string& s) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || (end && *end != '\0')) {
        throw SchemaError("csv: not a number: '" + s + "'");
    }
    return v;
}

}  // namespace tidp::csv
