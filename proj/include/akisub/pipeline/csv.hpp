#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace akisub::pipeline {

/// Comma-separated table with a header row. Fields holding a comma, quote or
/// newline are double-quoted.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Throws SchemaError when the column is absent.
    std::size_t column(const std::string& name) const;
};

void write_csv(const CsvTable& table, const std::filesystem::path& path);
/// Throws IoError when unreadable, ParseError on a ragged row.
CsvTable read_csv(const std::filesystem::path& path);

/// Shortest text that reads back to the same double; NaN becomes "".
std::string format_double(double value);
/// "" reads as NaN. Throws ParseError on anything else non-numeric.
double parse_double(const std::string& text);

}  // namespace akisub::pipeline
