#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cptseg/types.hpp"

namespace cptseg::csv {

inline std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            cells.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell += c;
        }
    }
    cells.push_back(cell);
    return cells;
}

inline std::string format_number(double v) {
    if (std::isnan(v)) return "NA";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string quote_if_needed(const std::string& s) {
    if (s.find(',') == std::string::npos && s.find('"') == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

/// Read a time series from a headered CSV.  The time column is optional;
/// when present its values become the series labels and must be strictly
/// increasing.  NaN, missing, or non-numeric values are rejected.
inline TimeSeries read_series(const std::string& path, const std::string& time_col = "time",
                              const std::string& value_col = "value") {
    std::ifstream in(path);
    if (!in) throw invalid_input("cannot open input file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw invalid_input("empty CSV: " + path);
    const auto header = split_row(line);
    int time_idx = -1, value_idx = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == time_col) time_idx = static_cast<int>(i);
        if (header[i] == value_col) value_idx = static_cast<int>(i);
    }
    if (value_idx < 0) throw invalid_input("value column '" + value_col + "' not found in " + path);

    std::vector<double> values;
    std::vector<std::string> labels;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_row(line);
        if (static_cast<int>(cells.size()) <= value_idx)
            throw invalid_input("row " + std::to_string(lineno) + " is missing the value column");
        const std::string& raw = cells[static_cast<std::size_t>(value_idx)];
        if (raw.empty() || raw == "NA" || raw == "NaN" || raw == "nan")
            throw invalid_input("missing value at row " + std::to_string(lineno));
        double v = 0.0;
        try {
            std::size_t pos = 0;
            v = std::stod(raw, &pos);
            if (pos != raw.size()) throw std::invalid_argument(raw);
        } catch (...) {
            throw invalid_input("non-numeric value at row " + std::to_string(lineno) + ": " + raw);
        }
        if (!std::isfinite(v)) throw invalid_input("non-finite value at row " + std::to_string(lineno));
        values.push_back(v);
        if (time_idx >= 0) {
            if (static_cast<int>(cells.size()) <= time_idx)
                throw invalid_input("row " + std::to_string(lineno) + " is missing the time column");
            labels.push_back(cells[static_cast<std::size_t>(time_idx)]);
        }
    }
    return TimeSeries(std::move(values), std::move(labels));
}

/// Write rows atomically (temp file + rename).
inline void write_file(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw io_error("cannot write file: " + path);
        out << content;
        if (!out) throw io_error("write failed: " + path);
    }
    fs::rename(tmp, target);
}

class Table {
public:
    explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

    std::string to_csv() const {
        std::ostringstream os;
        for (std::size_t i = 0; i < header_.size(); ++i) {
            if (i) os << ",";
            os << quote_if_needed(header_[i]);
        }
        os << "\n";
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) os << ",";
                os << quote_if_needed(row[i]);
            }
            os << "\n";
        }
        return os.str();
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

} // namespace cptseg::csv
