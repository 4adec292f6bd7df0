#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace manyiv::csv {

using Row = std::vector<std::string>;

// RFC-4180 parsing: quoted fields, doubled quotes, embedded separators.
std::vector<Row> read_file(const std::filesystem::path& path);
Row parse_line(const std::string& line);

std::string format_row(const Row& row);

// Writes atomically: temp file in the same directory, then rename.
void write_file(const std::filesystem::path& path,
                const std::vector<Row>& rows);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace manyiv::csv
