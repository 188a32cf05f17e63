#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tidp::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index for a header name, if present.
    std::optional<std::size_t> column(const std::string& name) const;
};

/// Parses RFC-4180-style CSV: quoted fields, "" escapes, CRLF or LF endings.
/// The first record is the header.
Table read_csv(std::istream& in);
Table read_csv_file(const std::string& path);

std::string escape_field(const std::string& field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);
void write_csv(std::ostream& out, const Table& table);
void write_csv_file(const std::string& path, const Table& table);

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

double parse_double(const std::string& s);

}  // namespace tidp::csv
