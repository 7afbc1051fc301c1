#include "msd/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "msd/errors.hpp"

namespace msd {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_cell(const std::string& cell, int line_no, int col_no) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    errno = 0;
    const double value = std::strtod(begin, &end);
    // Allow surrounding whitespace, nothing else.
    while (end != nullptr && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
    if (end == begin || end == nullptr || *end != '\0' || errno == ERANGE) {
        throw ParseError("non-numeric cell '" + cell + "' at line " +
                             std::to_string(line_no) + ", column " + std::to_string(col_no),
                         line_no, col_no);
    }
    if (!std::isfinite(value)) {
        throw ParseError("non-finite value at line " + std::to_string(line_no) +
                             ", column " + std::to_string(col_no),
                         line_no, col_no);
    }
    return value;
}

}  // namespace

DataMatrix load_matrix(const std::string& path, bool has_header, bool transpose) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open file: " + path);

    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (has_header && line_no == 1) continue;
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (width == 0) {
            width = cells.size();
        } else if (cells.size() != width) {
            throw ParseError("ragged row at line " + std::to_string(line_no) +
                                 " (expected " + std::to_string(width) + " cells, got " +
                                 std::to_string(cells.size()) + ")",
                             line_no);
        }
        std::vector<double> parsed;
        parsed.reserve(cells.size());
        for (size_t c = 0; c < cells.size(); ++c) {
            parsed.push_back(parse_cell(cells[c], line_no, static_cast<int>(c) + 1));
        }
        rows.push_back(std::move(parsed));
    }
    if (rows.empty() || width == 0) {
        throw ParseError("file contains no data rows: " + path, line_no);
    }

    DataMatrix m(static_cast<Index>(rows.size()), static_cast<Index>(width));
    for (size_t i = 0; i < rows.size(); ++i) {
        for (size_t j = 0; j < width; ++j) {
            m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
        }
    }
    if (transpose) return m.transpose();
    return m;
}

void save_matrix(const DataMatrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot open file for writing: " + path);
    char buf[64];
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
            out << buf;
            if (j + 1 < m.cols()) out << ',';
        }
        out << '\n';
    }
    if (!out) throw InvalidInput("write failed: " + path);
}

}  // namespace msd
