#include "mfa/surrogates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mfa/fft.hpp"
#include "mfa/rng.hpp"

namespace mfa {

namespace {

// argsort: ranks[i] = position of x[i] in the sorted order
std::vector<std::size_t> sort_order(const std::vector<double>& x) {
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return x[a] < x[b];
    });
    return idx;
}

// Rearrange `sorted_values` so the output has the same rank ordering as `like`.
std::vector<double> remap_by_rank(const std::vector<double>& like,
                                  std::vector<double> sorted_values) {
    auto order = sort_order(like);
    std::vector<double> out(like.size());
    for (std::size_t r = 0; r < order.size(); ++r) out[order[r]] = sorted_values[r];
    return out;
}

// Replace the spectrum amplitudes of x with `target_amp`, keeping phases.
std::vector<double> impose_amplitudes(const std::vector<double>& x,
                                      const std::vector<double>& target_amp) {
    auto spec = rfft(x);
    for (std::size_t k = 0; k < spec.size(); ++k) {
        double mag = std::abs(spec[k]);
        spec[k] = mag > 0.0 ? spec[k] * (target_amp[k] / mag)
                            : std::complex<double>(target_amp[k], 0.0);
    }
    return irfft(spec, x.size());
}

double periodogram_rel_rms(const std::vector<double>& a_amp, const std::vector<double>& b_amp) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 1; k < a_amp.size(); ++k) { // skip DC
        double d = a_amp[k] * a_amp[k] - b_amp[k] * b_amp[k];
        num += d * d;
        den += a_amp[k] * a_amp[k] * a_amp[k] * a_amp[k];
    }
    return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

std::vector<double> amplitudes(const std::vector<double>& x) {
    auto spec = rfft(x);
    std::vector<double> amp(spec.size());
    for (std::size_t k = 0; k < spec.size(); ++k) amp[k] = std::abs(spec[k]);
    return amp;
}

} // namespace

Series shuffle_surrogate(const Series& x, std::uint64_t seed) {
    if (x.size() < 2) throw std::invalid_argument("shuffle: need at least 2 samples");
    Rng rng(seed, 0x5F5FULL);
    std::vector<double> v(x.values);
    rng.shuffle(v);
    Series out = x;
    out.values = std::move(v);
    out.name = x.name + ":shuffle";
    return out;
}

Series ft_phase_surrogate(const Series& x, std::uint64_t seed) {
    const std::size_t n = x.size();
    if (n < 8) throw std::invalid_argument("ft_phase: need at least 8 samples");
    Rng rng(seed, 0xF7ULL);

    auto spec = rfft(x.values);
    const std::size_t nb = spec.size();
    // randomize phases of the interior bins; DC and (even-n) Nyquist stay
    // real so the output is real with the periodogram preserved exactly
    for (std::size_t k = 1; k < nb; ++k) {
        bool nyquist = (n % 2 == 0) && (k == nb - 1);
        if (nyquist) continue;
        double mag = std::abs(spec[k]);
        double phi = rng.uniform(0.0, 2.0 * M_PI);
        spec[k] = std::polar(mag, phi);
    }
    Series out = x;
    out.values = irfft(spec, n);
    out.name = x.name + ":ft";
    return out;
}

Series aaft_surrogate(const Series& x, std::uint64_t seed) {
    const std::size_t n = x.size();
    if (n < 8) throw std::invalid_argument("aaft: need at least 8 samples");
    Rng rng(seed, 0xAAF7ULL);

    // gaussianize by rank, phase-randomize, map the original values back
    std::vector<double> gauss(n);
    for (auto& g : gauss) g = rng.gaussian();
    std::sort(gauss.begin(), gauss.end());
    auto gaussianized = remap_by_rank(x.values, gauss);

    Series tmp = x;
    tmp.values = std::move(gaussianized);
    Series phase = ft_phase_surrogate(tmp, seed ^ 0x51ULL);

    std::vector<double> sorted_x(x.values);
    std::sort(sorted_x.begin(), sorted_x.end());
    Series out = x;
    out.values = remap_by_rank(phase.values, std::move(sorted_x));
    out.name = x.name + ":aaft";
    return out;
}

IaaftResult iaaft_surrogate(const Series& x, std::uint64_t seed, std::size_t max_iter,
                            double tol) {
    const std::size_t n = x.size();
    if (n < 8) throw std::invalid_argument("iaaft: need at least 8 samples");
    if (max_iter < 1) throw std::invalid_argument("iaaft: max_iter must be >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("iaaft: tol must be > 0");

    auto target_amp = amplitudes(x.values);
    std::vector<double> sorted_x(x.values);
    std::sort(sorted_x.begin(), sorted_x.end());

    // start from a random shuffle
    Rng rng(seed, 0x1AAF7ULL);
    std::vector<double> cur(x.values);
    rng.shuffle(cur);

    IaaftResult out;
    double best_err = std::numeric_limits<double>::infinity();
    std::vector<double> best = cur;
    for (std::size_t it = 0; it < max_iter; ++it) {
        auto spectral = impose_amplitudes(cur, target_amp);
        cur = remap_by_rank(spectral, sorted_x);
        double err = periodogram_rel_rms(amplitudes(cur), target_amp);
        out.iterations = it + 1;
        if (err >= best_err) {
            // the iteration stalled; keep the best iterate so the reported
            // error is non-increasing
            cur = best;
            break;
        }
        best_err = err;
        best = cur;
        if (err <= tol) {
            out.converged = true;
            break;
        }
    }
    out.periodogram_rel_rms = best_err;
    if (best_err <= tol) out.converged = true;
    out.series = x;
    out.series.values = std::move(best);
    out.series.name = x.name + ":iaaft";
    return out;
}

Series rank_remap_surrogate(const Series& x, const RankRemapSpec& spec, std::uint64_t seed) {
    const std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("rank_remap: need at least 2 samples");
    Rng rng(seed, 0x4E3AULL);

    std::vector<double> draws(n);
    switch (spec.law) {
    case TargetLaw::gaussian:
        for (auto& d : draws) d = rng.gaussian();
        break;
    case TargetLaw::weibull: {
        if (!(spec.beta > 0.0)) throw std::invalid_argument("rank_remap: beta must be > 0");
        // symmetric double Weibull: |z|^beta ~ Exp(1), random sign
        for (auto& d : draws) {
            double mag = std::pow(rng.exponential(), 1.0 / spec.beta);
            d = rng.uniform01() < 0.5 ? -mag : mag;
        }
        break;
    }
    case TargetLaw::student:
        if (!(spec.dof > 0.0)) throw std::invalid_argument("rank_remap: dof must be > 0");
        for (auto& d : draws) d = rng.student_t(spec.dof);
        break;
    }
    std::sort(draws.begin(), draws.end());
    auto z = remap_by_rank(x.values, std::move(draws));

    // rescale to the source standard deviation and mean
    double mx = std::accumulate(x.values.begin(), x.values.end(), 0.0) / double(n);
    double mz = std::accumulate(z.begin(), z.end(), 0.0) / double(n);
    double vx = 0, vz = 0;
    for (std::size_t i = 0; i < n; ++i) {
        vx += (x.values[i] - mx) * (x.values[i] - mx);
        vz += (z[i] - mz) * (z[i] - mz);
    }
    double scale = vz > 0.0 ? std::sqrt(vx / vz) : 1.0;
    for (auto& v : z) v = (v - mz) * scale + mx;

    Series out = x;
    out.values = std::move(z);
    out.name = x.name + ":remap";
    return out;
}

Series make_surrogate(const Series& x, const SurrogateMethod& method, std::uint64_t seed) {
    switch (method.kind) {
    case SurrogateMethod::Kind::shuffle: return shuffle_surrogate(x, seed);
    case SurrogateMethod::Kind::ft_phase: return ft_phase_surrogate(x, seed);
    case SurrogateMethod::Kind::aaft: return aaft_surrogate(x, seed);
    case SurrogateMethod::Kind::iaaft:
        return iaaft_surrogate(x, seed, method.iaaft_max_iter, method.iaaft_tol).series;
    case SurrogateMethod::Kind::rank_remap: return rank_remap_surrogate(x, method.remap, seed);
    }
    throw std::logic_error("make_surrogate: unknown kind");
}

SurrogateEnsemble make_ensemble(const Series& x, const SurrogateMethod& method, std::size_t n,
                                std::uint64_t base_seed) {
    if (n < 1) throw std::invalid_argument("make_ensemble: n must be >= 1");
    SurrogateEnsemble out;
    out.method = method;
    out.base_seed = base_seed;
    out.replicates.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.replicates.push_back(make_surrogate(x, method, base_seed + i));
    return out;
}

const char* surrogate_kind_name(SurrogateMethod::Kind k) {
    switch (k) {
    case SurrogateMethod::Kind::shuffle: return "shuffle";
    case SurrogateMethod::Kind::ft_phase: return "ft";
    case SurrogateMethod::Kind::aaft: return "aaft";
    case SurrogateMethod::Kind::iaaft: return "iaaft";
    case SurrogateMethod::Kind::rank_remap: return "rank-remap";
    }
    return "?";
}

} // namespace mfa
