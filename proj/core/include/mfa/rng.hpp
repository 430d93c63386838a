#pragma once

#include <cstdint>
#include <vector>

namespace mfa {

// Deterministic, implementation-independent random stream. Distributions are
// implemented here rather than taken from <random> so that a (config, seed)
// pair replays bit-identically on any platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) { seed_state(seed); }

    // Private stream derived from (seed, stream id).
    Rng(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t next_u64();

    // Uniform in [0,1) with 53 random bits.
    double uniform01();
    // Uniform in (0,1], safe as log() argument.
    double uniform_pos();
    double uniform(double lo, double hi);
    std::uint64_t uniform_index(std::uint64_t n); // [0, n)

    double gaussian(); // standard normal (Box-Muller, cached pair)
    double exponential(); // rate 1
    // Symmetric alpha-stable via the Chambers-Mallows-Stuckey transformation.
    double stable_symmetric(double gamma);
    // Gamma(shape,1) by Marsaglia-Tsang; shape > 0.
    double gamma(double shape);
    // Poisson(mean) by inversion of the product of uniforms; mean <= ~60.
    unsigned poisson(double mean);
    // Student t with gamma degrees of freedom.
    double student_t(double dof);

    std::vector<double> gaussian_vector(std::size_t n);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_index(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    void seed_state(std::uint64_t seed);
    std::uint64_t s_[4];
    double cached_gauss_ = 0.0;
    bool has_cached_gauss_ = false;
};

} // namespace mfa
