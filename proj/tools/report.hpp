#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mfa/legendre.hpp"
#include "mfa/regression.hpp"

namespace mfa::cli {

// Round to 12 significant digits so report bytes are stable and readable.
double sig12(double v);
nlohmann::json num(double v);
nlohmann::json num_vector(const std::vector<double>& v);

nlohmann::json spectrum_json(const MfSpectrum& spec);
nlohmann::json fit_json(const ScalingFit& fit);

// Writes the document with a trailing newline; one report per run.
void write_report(const std::string& path, const nlohmann::json& body);

// Report skeleton with schema version and the echoed configuration.
nlohmann::json report_root(const std::string& command, const nlohmann::json& config);

} // namespace mfa::cli
