#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfa/series.hpp"

namespace mfa {

// Null-model constructions. Every surrogate is length-preserving and
// deterministic given its seed.

// Uniform permutation (Fisher-Yates): exact multiset preservation, all
// correlations destroyed.
Series shuffle_surrogate(const Series& x, std::uint64_t seed);

// Phase randomization: periodogram preserved exactly, marginal Gaussianized.
Series ft_phase_surrogate(const Series& x, std::uint64_t seed);

// Amplitude-adjusted Fourier transform (classic, non-iterative).
Series aaft_surrogate(const Series& x, std::uint64_t seed);

struct IaaftResult {
    Series series;
    std::size_t iterations = 0;
    double periodogram_rel_rms = 0.0;
    bool converged = false;
};

// Iterative AAFT. Ends on the rank-ordering step so the value multiset is
// exact; the periodogram error is reported. Non-convergence is a flag.
IaaftResult iaaft_surrogate(const Series& x, std::uint64_t seed, std::size_t max_iter = 1000,
                            double tol = 1e-8);

enum class TargetLaw { gaussian, weibull, student };

struct RankRemapSpec {
    TargetLaw law = TargetLaw::gaussian;
    double beta = 0.7;  // double-Weibull shape (heavy tails for beta < 1)
    double dof = 3.0;   // Student t degrees of freedom
};

// Rank-ordered remapping to a prescribed law, rescaled to the source mean and
// standard deviation. Preserves the rank ordering exactly.
Series rank_remap_surrogate(const Series& x, const RankRemapSpec& spec, std::uint64_t seed);

struct SurrogateMethod {
    enum class Kind { shuffle, ft_phase, aaft, iaaft, rank_remap } kind = Kind::iaaft;
    std::size_t iaaft_max_iter = 1000;
    double iaaft_tol = 1e-8;
    RankRemapSpec remap = {};
};

Series make_surrogate(const Series& x, const SurrogateMethod& method, std::uint64_t seed);

struct SurrogateEnsemble {
    SurrogateMethod method;
    std::vector<Series> replicates;
    std::uint64_t base_seed = 0;
};

// n replicates with seeds base_seed .. base_seed+n-1.
SurrogateEnsemble make_ensemble(const Series& x, const SurrogateMethod& method, std::size_t n,
                                std::uint64_t base_seed);

const char* surrogate_kind_name(SurrogateMethod::Kind k);

} // namespace mfa
