#include "mfa/series.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mfa {

Series make_series(std::vector<double> values, Role role, std::string name) {
    if (values.size() < 2)
        throw std::invalid_argument("series '" + name + "': need at least 2 samples, got " +
                                    std::to_string(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]))
            throw std::invalid_argument("series '" + name + "': non-finite value at index " +
                                        std::to_string(i));
    }
    if (role == Role::measure) {
        double total = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (values[i] < 0.0)
                throw std::invalid_argument("series '" + name + "': measure value < 0 at index " +
                                            std::to_string(i));
            total += values[i];
        }
        if (!(total > 0.0))
            throw std::invalid_argument("series '" + name + "': measure has zero total mass");
    }
    return Series{std::move(values), role, std::move(name)};
}

Profile build_profile(const Series& s) {
    if (s.role != Role::increments)
        throw std::invalid_argument("build_profile: series role must be 'increments'");
    if (s.size() < 2)
        throw std::invalid_argument("build_profile: need at least 2 increments");

    const auto& x = s.values;
    double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    Profile p;
    p.values.resize(x.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        acc += x[i] - mean;
        p.values[i] = acc;
    }
    return p;
}

std::vector<double> cumulative_sum(const std::vector<double>& v) {
    std::vector<double> out(v.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        acc += v[i];
        out[i] = acc;
    }
    return out;
}

const char* role_name(Role r) {
    switch (r) {
    case Role::increments: return "increments";
    case Role::levels: return "levels";
    case Role::measure: return "measure";
    }
    return "?";
}

Role role_from_name(const std::string& name) {
    if (name == "increments") return Role::increments;
    if (name == "levels") return Role::levels;
    if (name == "measure") return Role::measure;
    throw std::invalid_argument("unknown series role '" + name + "'");
}

} // namespace mfa
