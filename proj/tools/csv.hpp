#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mfa/series.hpp"

namespace mfa::cli {

struct IngestOptions {
    std::size_t column = 1; // 1-based
    Role role = Role::increments;
    bool log_returns = false;   // derive r(t) = ln I(t) - ln I(t-1) from levels
    bool as_volatility = false; // |values| normalized to unit mass, role=measure
    bool drop_nan = false;
};

struct IngestResult {
    Series series;
    std::size_t dropped_rows = 0;
    std::vector<std::string> warnings;
};

// Reads a UTF-8 CSV (comma or whitespace delimited). A non-numeric first row
// is treated as a header. Non-numeric cells raise with the row number unless
// drop_nan is set.
IngestResult ingest_csv(const std::string& path, const IngestOptions& opts);

void write_csv(const std::string& path, const std::vector<double>& values);
void write_csv_pair(const std::string& path, const std::vector<double>& a,
                    const std::vector<double>& b);

} // namespace mfa::cli
