#include "csv.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mfa::cli {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    if (line.find(',') != std::string::npos) {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) fields.push_back(cell);
    } else {
        std::stringstream ss(line);
        std::string cell;
        while (ss >> cell) fields.push_back(cell);
    }
    return fields;
}

bool parse_double(const std::string& cell, double& out) {
    std::string trimmed;
    for (char c : cell)
        if (!std::isspace(static_cast<unsigned char>(c))) trimmed += c;
    if (trimmed.empty()) return false;
    try {
        std::size_t pos = 0;
        out = std::stod(trimmed, &pos);
        return pos == trimmed.size();
    } catch (...) {
        return false;
    }
}

} // namespace

IngestResult ingest_csv(const std::string& path, const IngestOptions& opts) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file: " + path);

    IngestResult result;
    std::vector<double> values;
    std::string line;
    std::size_t row = 0;
    bool first_content_row = true;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) {
            if (opts.drop_nan) {
                ++result.dropped_rows;
                continue;
            }
            if (!values.empty() || !first_content_row)
                throw std::runtime_error("blank row " + std::to_string(row) +
                                         " (use --drop-nan to skip)");
            continue;
        }
        auto fields = split_fields(line);
        if (opts.column == 0 || opts.column > fields.size()) {
            if (opts.drop_nan) {
                ++result.dropped_rows;
                continue;
            }
            throw std::runtime_error("row " + std::to_string(row) + ": no column " +
                                     std::to_string(opts.column));
        }
        double v;
        if (!parse_double(fields[opts.column - 1], v)) {
            if (first_content_row) { // header
                first_content_row = false;
                continue;
            }
            if (opts.drop_nan) {
                ++result.dropped_rows;
                continue;
            }
            throw std::runtime_error("row " + std::to_string(row) + ": non-numeric cell '" +
                                     fields[opts.column - 1] + "'");
        }
        if (!std::isfinite(v)) {
            if (opts.drop_nan) {
                ++result.dropped_rows;
                continue;
            }
            throw std::runtime_error("row " + std::to_string(row) + ": non-finite value");
        }
        first_content_row = false;
        values.push_back(v);
    }
    if (result.dropped_rows > 0)
        result.warnings.push_back(std::to_string(result.dropped_rows) + " rows dropped");

    Role role = opts.role;
    if (opts.log_returns) {
        std::vector<double> returns;
        returns.reserve(values.size());
        for (std::size_t i = 1; i < values.size(); ++i) {
            if (!(values[i] > 0.0) || !(values[i - 1] > 0.0))
                throw std::runtime_error("--log-returns requires positive levels (row " +
                                         std::to_string(i + 1) + ")");
            returns.push_back(std::log(values[i]) - std::log(values[i - 1]));
        }
        values = std::move(returns);
        role = Role::increments;
    }
    if (opts.as_volatility) {
        double total = 0.0;
        for (auto& v : values) {
            v = std::abs(v);
            total += v;
        }
        if (!(total > 0.0)) throw std::runtime_error("--as-volatility: zero total mass");
        for (auto& v : values) v /= total;
        role = Role::measure;
    }
    result.series = make_series(std::move(values), role, path);
    return result;
}

void write_csv(const std::string& path, const std::vector<double>& values) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    char buf[64];
    for (double v : values) {
        std::snprintf(buf, sizeof buf, "%.17g\n", v);
        out << buf;
    }
}

void write_csv_pair(const std::string& path, const std::vector<double>& a,
                    const std::vector<double>& b) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    char buf[160];
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", a[i], i < b.size() ? b[i] : 0.0);
        out << buf;
    }
}

} // namespace mfa::cli
