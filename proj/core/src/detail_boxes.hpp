#pragma once

// Shared internals of the box/detrending estimators. Not installed.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfa/fluctmethods.hpp"

namespace mfa::detail {

inline double logsumexp(const std::vector<double>& v) {
    if (v.empty()) return -std::numeric_limits<double>::infinity();
    double vmax = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(vmax)) return vmax;
    double acc = 0.0;
    for (double x : v) acc += std::exp(x - vmax);
    return vmax + std::log(acc);
}

// Box starts covering [0, len): single covering needs s | len; otherwise the
// series is covered from both ends with 2*int(len/s) boxes.
inline std::vector<std::size_t> box_starts(std::size_t len, std::size_t s, Covering covering) {
    std::size_t ns = len / s;
    if (ns == 0) throw std::invalid_argument("scale larger than series");
    std::vector<std::size_t> starts;
    if (len % s == 0) {
        starts.reserve(ns);
        for (std::size_t v = 0; v < ns; ++v) starts.push_back(v * s);
        return starts;
    }
    if (covering == Covering::single)
        throw std::invalid_argument("single covering requires the scale to divide the length; "
                                    "scale " +
                                    std::to_string(s) + " vs length " + std::to_string(len));
    starts.reserve(2 * ns);
    for (std::size_t v = 0; v < ns; ++v) starts.push_back(v * s);
    for (std::size_t v = 0; v < ns; ++v) starts.push_back(len - (v + 1) * s);
    return starts;
}

// Discrete orthonormal polynomial basis on t = 0..s-1. Projection is stable
// at any order; the basis is computed once per scale.
struct PolyBasis {
    std::size_t s = 0;
    int order = 0;
    std::vector<std::vector<double>> basis;

    PolyBasis(std::size_t s_, int order_) : s(s_), order(order_) {
        std::vector<double> t(s);
        for (std::size_t i = 0; i < s; ++i) t[i] = static_cast<double>(i);
        basis.assign(static_cast<std::size_t>(order) + 1, std::vector<double>(s, 0.0));
        std::vector<double> prev(s, 0.0), cur(s, 1.0 / std::sqrt(double(s)));
        basis[0] = cur;
        for (int k = 1; k <= order; ++k) {
            std::vector<double> next(s);
            double a = 0.0;
            for (std::size_t i = 0; i < s; ++i) a += t[i] * cur[i] * cur[i];
            for (std::size_t i = 0; i < s; ++i) next[i] = (t[i] - a) * cur[i];
            if (k >= 2) {
                double b = 0.0;
                for (std::size_t i = 0; i < s; ++i) b += t[i] * cur[i] * prev[i];
                for (std::size_t i = 0; i < s; ++i) next[i] -= b * prev[i];
            }
            double norm = 0.0;
            for (double v : next) norm += v * v;
            norm = std::sqrt(norm);
            if (norm > 0)
                for (auto& v : next) v /= norm;
            prev = cur;
            cur = next;
            basis[static_cast<std::size_t>(k)] = cur;
        }
    }

    // Residual sum of squares; optionally the sign-carrying linear component.
    double ssr(const double* y, double* linear_coeff = nullptr) const {
        double total = 0.0;
        for (std::size_t i = 0; i < s; ++i) total += y[i] * y[i];
        for (int k = 0; k <= order; ++k) {
            const auto& b = basis[static_cast<std::size_t>(k)];
            double c = 0.0;
            for (std::size_t i = 0; i < s; ++i) c += y[i] * b[i];
            total -= c * c;
            if (k == 1 && linear_coeff) *linear_coeff = c * (b[s - 1] - b[0]);
        }
        return std::max(total, 0.0);
    }

    void residual(const double* y, std::vector<double>& out) const {
        out.assign(y, y + s);
        for (const auto& b : basis) {
            double c = 0.0;
            for (std::size_t i = 0; i < s; ++i) c += y[i] * b[i];
            for (std::size_t i = 0; i < s; ++i) out[i] -= c * b[i];
        }
    }
};

// Moving-average residuals for window size s and position parameter theta;
// boundary points without a full window are dropped. For theta = 0.5 with
// even s the two window edges carry half weight so the window is exactly
// centered (otherwise a constant shift would leak into the residuals).
inline std::vector<double> dma_residuals(const std::vector<double>& path, std::size_t s,
                                         double theta) {
    const std::size_t n = path.size();
    if (s < 3) throw std::invalid_argument("dma: scale must be >= 3");
    if (s > n) throw std::invalid_argument("dma: scale larger than series");

    std::vector<double> cum(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) cum[i + 1] = cum[i] + path[i];

    std::vector<double> res;
    if (theta == 0.5 && s % 2 == 0) {
        std::size_t half = s / 2;
        res.reserve(n - s + 1);
        for (std::size_t i = half; i + half < n; ++i) {
            double inner = cum[i + half] - cum[i - half + 1];
            double edges = 0.5 * (path[i - half] + path[i + half]);
            res.push_back(path[i] - (inner + edges) / static_cast<double>(s));
        }
        return res;
    }

    auto past = static_cast<std::size_t>(std::ceil((double(s) - 1.0) * (1.0 - theta) - 1e-12));
    auto future = static_cast<std::size_t>(std::floor((double(s) - 1.0) * theta + 1e-12));
    res.reserve(n - s + 1);
    for (std::size_t i = past; i + future < n; ++i)
        res.push_back(path[i] - (cum[i + future + 1] - cum[i - past]) / static_cast<double>(s));
    return res;
}

} // namespace mfa::detail
