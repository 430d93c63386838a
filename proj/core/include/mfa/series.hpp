#pragma once

#include <string>
#include <vector>

namespace mfa {

// What the sample values represent. Several estimators are only defined for
// one of these; constructors and entry points validate the tag.
enum class Role { increments, levels, measure };

struct Series {
    std::vector<double> values;
    Role role = Role::increments;
    std::string name;

    std::size_t size() const { return values.size(); }
};

// Validating constructor: length >= 2, all finite; role==measure additionally
// requires nonnegative values with positive total mass. Throws
// std::invalid_argument naming the first offending index.
Series make_series(std::vector<double> values, Role role, std::string name = "");

// Cumulative sum of mean-removed increments, x(i) = sum_{j<=i} (dX_j - <dX>).
struct Profile {
    std::vector<double> values;
    std::size_t size() const { return values.size(); }
};

Profile build_profile(const Series& s);

// Raw cumulative sum, no mean removal. Used where a constant shift must stay
// visible (moving-average detrending, wavelet leaders).
std::vector<double> cumulative_sum(const std::vector<double>& v);

const char* role_name(Role r);
Role role_from_name(const std::string& name);

} // namespace mfa
