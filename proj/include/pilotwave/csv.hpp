#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

namespace pilotwave {

using CsvCell = std::variant<std::int64_t, double, std::string>;

/// Doubles as %.16e (17 significant digits), integers in decimal.
[[nodiscard]] std::string format_cell(const CsvCell& cell);

/// Comma-separated file with a header line.  Rows must match the header width.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

    void row(const std::vector<CsvCell>& cells);
    void close();

private:
    std::filesystem::path path_;
    std::size_t width_;
    std::ofstream out_;
};

}  // namespace pilotwave
