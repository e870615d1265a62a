#pragma once

// Minimal CSV and file helpers shared by the dataset, profile and report writers.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace secd {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);
std::vector<std::string> split_csv_line(std::string_view line);

double parse_double(std::string_view text);

/// Shortest representation that round-trips through parse_double.
std::string format_double(double value);

/// Writes to `<path>.tmp` and renames over `path`. Throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace secd
