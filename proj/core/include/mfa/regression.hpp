#pragma once

#include <cstddef>
#include <vector>

namespace mfa {

struct ScalingFit {
    double exponent = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double s_lo = 0.0;
    double s_hi = 0.0;
    std::vector<double> residuals;
    std::size_t n_points = 0;
};

struct FitRange {
    double s_lo = 0.0; // 0 means open end
    double s_hi = 0.0;
};

// Ordinary least squares of ln y against ln x restricted to xs in
// [range.s_lo, range.s_hi]. Requires >= 3 in-range points and positive data;
// throws std::invalid_argument / std::domain_error otherwise. If `weights` is
// nonempty it must match xs and a weighted fit is performed.
ScalingFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys,
                      FitRange range = {}, const std::vector<double>& weights = {});

// Same regression with ln y supplied directly (log-domain pipelines).
ScalingFit fit_logx_liny(const std::vector<double>& xs, const std::vector<double>& log_ys,
                         FitRange range = {}, const std::vector<double>& weights = {});

// Plain OLS on already-transformed coordinates.
ScalingFit fit_linear(const std::vector<double>& x, const std::vector<double>& y,
                      const std::vector<double>& weights = {});

// Local log-log slopes in a sliding window of `window` consecutive scales
// moved by `step`; returns the window-center abscissas and the slopes.
struct LocalSlopes {
    std::vector<double> center_x;
    std::vector<double> slope;
};
LocalSlopes local_log_slopes(const std::vector<double>& xs, const std::vector<double>& log_ys,
                             std::size_t window, std::size_t step = 1);

} // namespace mfa
