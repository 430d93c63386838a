#include "mfa/regression.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mfa {

namespace {

ScalingFit weighted_ols(const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<double>& w, double s_lo, double s_hi) {
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        swx += w[i] * x[i];
        swy += w[i] * y[i];
        swxx += w[i] * x[i] * x[i];
        swxy += w[i] * x[i] * y[i];
    }
    double denom = sw * swxx - swx * swx;
    if (!(std::abs(denom) > 0.0))
        throw std::domain_error("regression: degenerate abscissa (identical x values)");
    ScalingFit fit;
    fit.exponent = (sw * swxy - swx * swy) / denom;
    fit.intercept = (swy - fit.exponent * swx) / sw;
    fit.s_lo = s_lo;
    fit.s_hi = s_hi;
    fit.n_points = x.size();

    double ybar = swy / sw;
    double ss_res = 0, ss_tot = 0;
    fit.residuals.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (fit.intercept + fit.exponent * x[i]);
        fit.residuals[i] = r;
        ss_res += w[i] * r * r;
        ss_tot += w[i] * (y[i] - ybar) * (y[i] - ybar);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    if (fit.r_squared < 0.0) fit.r_squared = 0.0;
    if (fit.r_squared > 1.0) fit.r_squared = 1.0;
    if (!std::isfinite(fit.exponent))
        throw std::domain_error("regression: non-finite slope");
    return fit;
}

} // namespace

ScalingFit fit_linear(const std::vector<double>& x, const std::vector<double>& y,
                      const std::vector<double>& weights) {
    if (x.size() != y.size())
        throw std::invalid_argument("fit_linear: size mismatch");
    if (x.size() < 2) throw std::invalid_argument("fit_linear: need at least 2 points");
    std::vector<double> w = weights;
    if (w.empty()) w.assign(x.size(), 1.0);
    if (w.size() != x.size()) throw std::invalid_argument("fit_linear: weights size mismatch");
    return weighted_ols(x, y, w, x.front(), x.back());
}

ScalingFit fit_logx_liny(const std::vector<double>& xs, const std::vector<double>& log_ys,
                         FitRange range, const std::vector<double>& weights) {
    if (xs.size() != log_ys.size())
        throw std::invalid_argument("fit_loglog: xs/ys size mismatch");
    std::vector<double> lx, ly, w;
    double used_lo = 0, used_hi = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0))
            throw std::domain_error("fit_loglog: non-positive x at index " + std::to_string(i));
        if (range.s_lo > 0 && xs[i] < range.s_lo) continue;
        if (range.s_hi > 0 && xs[i] > range.s_hi) continue;
        if (!std::isfinite(log_ys[i]))
            throw std::domain_error("fit_loglog: non-finite log y at x=" + std::to_string(xs[i]));
        if (lx.empty()) used_lo = xs[i];
        used_hi = xs[i];
        lx.push_back(std::log(xs[i]));
        ly.push_back(log_ys[i]);
        if (!weights.empty()) w.push_back(weights[i]);
    }
    if (lx.size() < 3)
        throw std::invalid_argument("fit_loglog: fewer than 3 points in range [" +
                                    std::to_string(range.s_lo) + ", " + std::to_string(range.s_hi) +
                                    "]");
    if (w.empty()) w.assign(lx.size(), 1.0);
    return weighted_ols(lx, ly, w, used_lo, used_hi);
}

ScalingFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys,
                      FitRange range, const std::vector<double>& weights) {
    std::vector<double> log_ys(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) {
        if (!(ys[i] > 0.0))
            throw std::domain_error("fit_loglog: non-positive y at index " + std::to_string(i) +
                                    " (x=" + (i < xs.size() ? std::to_string(xs[i]) : "?") + ")");
        log_ys[i] = std::log(ys[i]);
    }
    return fit_logx_liny(xs, log_ys, range, weights);
}

LocalSlopes local_log_slopes(const std::vector<double>& xs, const std::vector<double>& log_ys,
                             std::size_t window, std::size_t step) {
    if (window < 3) throw std::invalid_argument("local_log_slopes: window must cover >= 3 scales");
    if (xs.size() != log_ys.size())
        throw std::invalid_argument("local_log_slopes: size mismatch");
    if (xs.size() < window)
        throw std::invalid_argument("local_log_slopes: fewer scales than window");
    if (step == 0) step = 1;

    LocalSlopes out;
    for (std::size_t start = 0; start + window <= xs.size(); start += step) {
        std::vector<double> lx(window), ly(window);
        for (std::size_t k = 0; k < window; ++k) {
            lx[k] = std::log(xs[start + k]);
            ly[k] = log_ys[start + k];
        }
        ScalingFit f = fit_linear(lx, ly);
        out.slope.push_back(f.exponent);
        out.center_x.push_back(std::exp(0.5 * (lx.front() + lx.back())));
    }
    return out;
}

} // namespace mfa
