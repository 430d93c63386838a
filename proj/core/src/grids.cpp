#include "mfa/grids.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mfa {

ScaleGrid make_scales(std::size_t n, ScaleSpacing spacing, std::size_t floor_scale,
                      std::size_t ceiling, double lambda) {
    if (n < 8) throw std::invalid_argument("make_scales: series too short (n < 8)");
    if (ceiling == 0) ceiling = n / 4;
    if (floor_scale < 1) floor_scale = 1;

    ScaleGrid g;
    g.spacing = spacing;

    switch (spacing) {
    case ScaleSpacing::dyadic: {
        std::size_t s = 1;
        while (s < floor_scale) s *= 2;
        for (; s <= ceiling; s *= 2) g.scales.push_back(s);
        break;
    }
    case ScaleSpacing::divisors: {
        for (std::size_t s = floor_scale; s <= ceiling; ++s)
            if (n % s == 0) g.scales.push_back(s);
        break;
    }
    case ScaleSpacing::geometric: {
        if (lambda <= 1.0)
            throw std::invalid_argument("make_scales: geometric spacing needs lambda > 1");
        double x = static_cast<double>(floor_scale);
        while (true) {
            auto s = static_cast<std::size_t>(std::llround(x));
            if (s > ceiling) break;
            if (g.scales.empty() || s != g.scales.back()) g.scales.push_back(s);
            x *= lambda;
        }
        break;
    }
    }

    if (g.scales.empty())
        throw std::invalid_argument(
            "make_scales: empty grid for n=" + std::to_string(n) + ", floor=" +
            std::to_string(floor_scale) + ", ceiling=" + std::to_string(ceiling) +
            "; try floor=4, ceiling=n/4");
    return g;
}

MomentGrid make_moments(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo))
        throw std::invalid_argument("make_moments: need step > 0 and hi >= lo");
    std::vector<double> qs;
    auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    qs.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        double q = lo + static_cast<double>(k) * step;
        if (std::abs(q) < 1e-12) q = 0.0;
        qs.push_back(q);
    }
    return make_moments(std::move(qs));
}

MomentGrid make_moments(std::vector<double> qs) {
    if (qs.empty()) throw std::invalid_argument("make_moments: empty grid");
    for (std::size_t i = 0; i < qs.size(); ++i) {
        if (!std::isfinite(qs[i]))
            throw std::invalid_argument("make_moments: non-finite q at index " + std::to_string(i));
        if (i > 0 && qs[i] <= qs[i - 1])
            throw std::invalid_argument("make_moments: qs must be strictly increasing");
    }
    MomentGrid g;
    g.contains_zero = std::any_of(qs.begin(), qs.end(), [](double q) { return q == 0.0; });
    g.qs = std::move(qs);
    return g;
}

MomentGrid default_moments() { return make_moments(-4.0, 4.0, 0.25); }

} // namespace mfa
