#include "heave/csv.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "heave/error.hpp"

namespace heave::csv {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trimmed(const std::string& s) {
    auto begin = s.begin();
    auto end = s.end();
    while (begin != end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
    while (end != begin && std::isspace(static_cast<unsigned char>(*(end - 1)))) --end;
    return std::string(begin, end);
}

bool is_timestamp_header(const std::string& name) {
    std::string lower = trimmed(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return lower == "timestamp" || lower == "time" || lower == "date";
}

double parse_cell(const std::string& cell, std::size_t line_no, std::size_t col_no) {
    const std::string value = trimmed(cell);
    if (value.empty()) {
        throw ValidationError("csv line " + std::to_string(line_no) + ", column " +
                              std::to_string(col_no) + ": missing value");
    }
    double out = 0.0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) {
        throw ValidationError("csv line " + std::to_string(line_no) + ", column " +
                              std::to_string(col_no) + ": '" + value + "' is not numeric");
    }
    if (!std::isfinite(out)) {
        throw ValidationError("csv line " + std::to_string(line_no) + ", column " +
                              std::to_string(col_no) + ": non-finite value");
    }
    return out;
}

}  // namespace

std::string format_double(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    assert(ec == std::errc());
    return std::string(buf, ptr);
}

var::TimeSeriesPanel read_panel(const std::filesystem::path& path, bool as_log_returns) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open panel file: " + path.string());

    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ValidationError("panel csv is empty: " + path.string());
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> header = split_line(line);
    if (header.empty()) throw ValidationError("panel csv has an empty header");
    const bool skip_first = is_timestamp_header(header.front());
    const std::size_t first_col = skip_first ? 1 : 0;
    if (header.size() <= first_col) {
        throw ValidationError("panel csv has no series columns");
    }

    std::vector<std::string> names;
    for (std::size_t c = first_col; c < header.size(); ++c) {
        const std::string name = trimmed(header[c]);
        if (name.empty()) {
            throw ValidationError("panel csv header column " + std::to_string(c + 1) +
                                  " is empty");
        }
        names.push_back(name);
    }

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size()) {
            throw ValidationError("csv line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(header.size()) + " cells, got " +
                                  std::to_string(cells.size()));
        }
        std::vector<double> row;
        row.reserve(names.size());
        for (std::size_t c = first_col; c < cells.size(); ++c) {
            row.push_back(parse_cell(cells[c], line_no, c + 1));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ValidationError("panel csv has no data rows");

    if (as_log_returns) {
        for (std::size_t r = 0; r < rows.size(); ++r) {
            for (std::size_t c = 0; c < names.size(); ++c) {
                if (!(rows[r][c] > 0.0)) {
                    throw ValidationError("price panel line " + std::to_string(r + 2) +
                                          ", series '" + names[c] +
                                          "': non-positive price; cannot take log returns");
                }
            }
        }
        std::vector<std::vector<double>> returns;
        returns.reserve(rows.size() - 1);
        for (std::size_t r = 1; r < rows.size(); ++r) {
            std::vector<double> row(names.size());
            for (std::size_t c = 0; c < names.size(); ++c) {
                row[c] = std::log(rows[r][c] / rows[r - 1][c]);
            }
            returns.push_back(std::move(row));
        }
        rows = std::move(returns);
        if (rows.empty()) throw ValidationError("price panel needs at least 2 rows");
    }

    var::TimeSeriesPanel panel;
    panel.node_names = std::move(names);
    panel.data = Matrix(static_cast<int>(rows.size()), static_cast<int>(panel.node_names.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < panel.node_names.size(); ++c) {
            panel.data(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
        }
    }
    return panel;
}

void write_panel(const std::filesystem::path& path, const var::TimeSeriesPanel& panel) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write panel file: " + path.string());
    for (std::size_t c = 0; c < panel.node_names.size(); ++c) {
        if (c > 0) out << ',';
        out << panel.node_names[c];
    }
    out << '\n';
    for (int r = 0; r < panel.data.rows(); ++r) {
        for (int c = 0; c < panel.data.cols(); ++c) {
            if (c > 0) out << ',';
            out << format_double(panel.data(r, c));
        }
        out << '\n';
    }
    if (!out) throw IoError("failed while writing panel file: " + path.string());
}

}  // namespace heave::csv
