#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mnemo {

using CsvRow = std::vector<std::string>;

// RFC 4180: quoted fields may contain commas, quotes ("") and newlines.
std::vector<CsvRow> parse_csv(std::string_view text);
std::vector<CsvRow> read_csv(const std::filesystem::path& path);

std::string csv_field(std::string_view value);
void write_csv_row(std::ostream& out, const CsvRow& row);

// Shortest round-trippable decimal form.
std::string format_double(double v);

}  // namespace mnemo
