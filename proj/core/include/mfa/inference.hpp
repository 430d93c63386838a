#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfa/fluctmethods.hpp"
#include "mfa/grids.hpp"
#include "mfa/legendre.hpp"
#include "mfa/regression.hpp"
#include "mfa/series.hpp"
#include "mfa/surrogates.hpp"

namespace mfa {

// ---------------------------------------------------------------------------
// Scaling-range selection
// ---------------------------------------------------------------------------

struct RangePolicy {
    enum class Kind { fixed, brute_r2, slope_flatness } kind = Kind::brute_r2;
    double s_lo = 0.0, s_hi = 0.0; // fixed
    double min_decades = 1.0;      // brute_r2 minimum span in decades
    std::size_t window = 3;        // slope_flatness local-slope window
    double tol = 0.1;              // slope_flatness |dh/dln s| bound
};

struct RangeSelection {
    FitRange range;
    double mean_r2 = 0.0;
    std::string diagnostics;
};

// Selects a scaling range for one or several ln-moment rows sampled on a
// common scale grid (rows = q values). brute_r2 scans all pairs with span at
// least min_decades and maximizes the mean R^2 over rows.
RangeSelection select_range(const std::vector<double>& xs,
                            const std::vector<std::vector<double>>& log_rows,
                            const RangePolicy& policy);

// ---------------------------------------------------------------------------
// Crossover fit: two power laws with a continuity constraint
// ---------------------------------------------------------------------------

struct CrossoverFit {
    double s_cross = 0.0;
    double h1 = 0.0, h2 = 0.0;
    double c1 = 0.0, c2 = 0.0;
    double objective = 0.0;
    bool stable = true; // false when H1 ~ H2, the crossover location is noise
};

CrossoverFit fit_crossover(const std::vector<double>& xs, const std::vector<double>& log_ys);

// ---------------------------------------------------------------------------
// Default estimator used by the statistical tests (MF-DFA pipeline)
// ---------------------------------------------------------------------------

struct EstimatorConfig {
    DetrendConfig detrend = {};
    double q_lo = -4.0, q_hi = 4.0, q_step = 0.25;
    std::size_t s_min = 16;
    std::size_t s_max = 0; // 0 -> n/8
    ScaleSpacing spacing = ScaleSpacing::geometric;
    double lambda = 1.4142135623730951; // 2^(1/2)
    FitRange fit = {};
};

MfSpectrum run_estimator(const Series& x, const EstimatorConfig& cfg);

// ---------------------------------------------------------------------------
// Surrogate-ensemble significance test
// ---------------------------------------------------------------------------

enum class TestStatistic { delta_alpha, delta_h, f_endpoint };

double spectrum_statistic(const MfSpectrum& spec, TestStatistic stat);

struct TestReport {
    TestStatistic statistic = TestStatistic::delta_alpha;
    double observed = 0.0;
    std::vector<double> null_values;
    double p_value = 1.0; // (1/n) sum 1(observed <= null)
    double null_mean = 0.0;
    double null_std = 0.0;
    SurrogateMethod method;
    std::size_t replicate_failures = 0;
    std::vector<std::string> warnings;
};

// Runs the estimator identically on the source and on n surrogate replicates;
// aborts when more than 10% of the replicates fail.
TestReport significance_test(const Series& x, TestStatistic stat, const SurrogateMethod& method,
                             std::size_t n, const EstimatorConfig& cfg, std::uint64_t seed,
                             std::size_t threads = 0);

// ---------------------------------------------------------------------------
// Three-component decomposition of the apparent singularity width
// ---------------------------------------------------------------------------

struct ComponentDecomposition {
    double total = 0.0; // = nl + lm + pdf by construction
    double nl = 0.0;    // nonlinearity
    double lm = 0.0;    // linear-memory finite-size component
    double pdf = 0.0;   // fat-tail component
};

ComponentDecomposition decompose_components(const Series& x, const EstimatorConfig& cfg,
                                            std::size_t n, std::uint64_t seed,
                                            std::size_t threads = 0);

} // namespace mfa
