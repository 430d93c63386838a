#pragma once

#include <cstddef>
#include <vector>

namespace mfa {

enum class ScaleSpacing { dyadic, geometric, divisors };

struct ScaleGrid {
    std::vector<std::size_t> scales; // strictly increasing
    ScaleSpacing spacing = ScaleSpacing::dyadic;

    std::size_t size() const { return scales.size(); }
    bool empty() const { return scales.empty(); }
};

// Builds the scale lattice for a series of length n.
//   dyadic    : powers of two in [floor, ceiling]
//   divisors  : divisors of n in [floor, ceiling]
//   geometric : round(floor * lambda^k), deduplicated keeping the smaller scale
// ceiling == 0 selects the default n/4. Throws if the grid comes out empty,
// suggesting usable bounds in the message.
ScaleGrid make_scales(std::size_t n, ScaleSpacing spacing, std::size_t floor_scale,
                      std::size_t ceiling = 0, double lambda = 2.0);

struct MomentGrid {
    std::vector<double> qs; // strictly increasing
    bool contains_zero = false;
};

// Regular grid lo, lo+step, ..., hi (inclusive up to rounding).
MomentGrid make_moments(double lo, double hi, double step);
MomentGrid make_moments(std::vector<double> qs);

// Default q in [-4,4] step 0.25; larger |q| moments are not trustworthy on
// desk-scale series.
MomentGrid default_moments();

} // namespace mfa
