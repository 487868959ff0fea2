#include "pilotwave/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace pilotwave {

std::string format_cell(const CsvCell& cell) {
    if (const auto* i = std::get_if<std::int64_t>(&cell)) {
        return std::to_string(*i);
    }
    if (const auto* d = std::get_if<double>(&cell)) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.16e", *d);
        return buf;
    }
    return std::get<std::string>(cell);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : path_(path), width_(header.size()), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    std::vector<CsvCell> cells(header.begin(), header.end());
    row(cells);
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
    if (cells.size() != width_) {
        throw std::logic_error("row width does not match the header of " + path_.string());
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) {
            out_ << ',';
        }
        out_ << format_cell(cells[i]);
    }
    out_ << '\n';
    if (!out_) {
        throw std::runtime_error("write failed for " + path_.string());
    }
}

void CsvWriter::close() {
    out_.close();
    if (out_.fail()) {
        throw std::runtime_error("closing " + path_.string() + " failed");
    }
}

}  // namespace pilotwave
