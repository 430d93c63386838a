#include "mfa/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace mfa {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

} // namespace

void Rng::seed_state(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& s : s_) s = splitmix64(sm);
    has_cached_gauss_ = false;
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream_id) {
    std::uint64_t sm = seed;
    std::uint64_t mixed = splitmix64(sm) ^ (0x9e3779b97f4a7c15ULL * (stream_id + 1));
    seed_state(mixed);
}

// xoshiro256**
std::uint64_t Rng::next_u64() {
    std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform_pos() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

std::uint64_t Rng::uniform_index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n == 0");
    // rejection to avoid modulo bias
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

double Rng::gaussian() {
    if (has_cached_gauss_) {
        has_cached_gauss_ = false;
        return cached_gauss_;
    }
    double u1 = uniform_pos();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    cached_gauss_ = r * std::sin(theta);
    has_cached_gauss_ = true;
    return r * std::cos(theta);
}

double Rng::exponential() { return -std::log(uniform_pos()); }

double Rng::stable_symmetric(double gamma) {
    if (!(gamma > 0.0) || gamma > 2.0)
        throw std::invalid_argument("stable_symmetric: gamma must be in (0, 2]");
    double v = M_PI * (uniform01() - 0.5);
    double w = exponential();
    if (gamma == 1.0) return std::tan(v);
    double t = std::sin(gamma * v) / std::pow(std::cos(v), 1.0 / gamma);
    double s = std::pow(std::cos((1.0 - gamma) * v) / w, (1.0 - gamma) / gamma);
    return t * s;
}

double Rng::gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be > 0");
    if (shape < 1.0) {
        // Boost to shape+1 and scale back.
        double u = uniform_pos();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        double x = gaussian();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        double u = uniform_pos();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

unsigned Rng::poisson(double mean) {
    if (!(mean > 0.0) || mean > 60.0)
        throw std::invalid_argument("poisson: mean must be in (0, 60]");
    double limit = std::exp(-mean);
    double prod = 1.0;
    unsigned k = 0;
    while (true) {
        prod *= uniform_pos();
        if (prod <= limit) return k;
        ++k;
    }
}

double Rng::student_t(double dof) {
    if (!(dof > 0.0)) throw std::invalid_argument("student_t: dof must be > 0");
    double z = gaussian();
    double chi2 = 2.0 * gamma(dof / 2.0);
    return z / std::sqrt(chi2 / dof);
}

std::vector<double> Rng::gaussian_vector(std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = gaussian();
    return v;
}

} // namespace mfa
