#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace mfa::cli {

double sig12(double v) {
    if (!std::isfinite(v)) return v;
    if (v == 0.0) return 0.0;
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

nlohmann::json num(double v) {
    if (std::isnan(v)) return nullptr;
    return sig12(v);
}

nlohmann::json num_vector(const std::vector<double>& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (double x : v) arr.push_back(num(x));
    return arr;
}

nlohmann::json fit_json(const ScalingFit& fit) {
    return {{"exponent", num(fit.exponent)},
            {"intercept", num(fit.intercept)},
            {"r_squared", num(fit.r_squared)},
            {"s_lo", num(fit.s_lo)},
            {"s_hi", num(fit.s_hi)},
            {"n_points", fit.n_points}};
}

nlohmann::json spectrum_json(const MfSpectrum& spec) {
    nlohmann::json j;
    j["method"] = spec.method;
    j["q"] = num_vector(spec.q);
    j["tau"] = num_vector(spec.tau);
    j["h"] = num_vector(spec.h);
    j["alpha"] = num_vector(spec.alpha);
    j["f_alpha"] = num_vector(spec.f_alpha);
    j["d_q"] = num_vector(spec.d_q);
    j["widths"] = {{"delta_alpha", num(spec.widths.delta_alpha)},
                   {"delta_h", num(spec.widths.delta_h)},
                   {"delta_h12", num(spec.widths.delta_h12)},
                   {"d_inefficiency", num(spec.widths.d_ineff)},
                   {"c1", num(spec.widths.c1)},
                   {"skew", num(spec.widths.skew)}};
    if (!spec.fits.empty()) {
        nlohmann::json fits = nlohmann::json::array();
        for (const auto& f : spec.fits) fits.push_back(fit_json(f));
        j["fits"] = fits;
    }
    if (!spec.warnings.empty()) j["warnings"] = spec.warnings;
    return j;
}

void write_report(const std::string& path, const nlohmann::json& body) {
    std::string text = body.dump(2);
    text += '\n';
    if (path.empty() || path == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open report file: " + path);
    out << text;
}

nlohmann::json report_root(const std::string& command, const nlohmann::json& config) {
    nlohmann::json j;
    j["schema"] = "mfa-report/1";
    j["command"] = command;
    j["config"] = config;
    j["warnings"] = nlohmann::json::array();
    return j;
}

} // namespace mfa::cli
