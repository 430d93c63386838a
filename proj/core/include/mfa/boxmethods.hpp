#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mfa/grids.hpp"
#include "mfa/legendre.hpp"
#include "mfa/regression.hpp"
#include "mfa/series.hpp"

namespace mfa {

enum class ZeroBoxPolicy { exclude, error };

struct PartitionOptions {
    ZeroBoxPolicy zero_policy = ZeroBoxPolicy::exclude;
    // Allow scales that do not divide N by covering the interpolated
    // continuous measure with int[N/s] equal boxes.
    bool continuous_covering = false;
    // Disable the max-rescaled log-domain accumulation (then chi is summed
    // directly; only safe when the dynamic range fits a double).
    bool max_rescaling = true;
};

// chi(q,s) of a normalized measure, kept in the log domain.
struct PartitionSurface {
    std::vector<double> qs;
    std::vector<std::size_t> scales;
    std::vector<std::vector<double>> log_chi; // [iq][is]
    std::vector<double> info_sum;             // sum_t m ln m per scale (q=1 information sum)
    std::vector<std::string> warnings;
};

PartitionSurface partition_function(const Series& measure, const ScaleGrid& scales,
                                    const MomentGrid& qs, const PartitionOptions& opts = {});

// tau(q) slopes of ln chi vs ln s plus the Legendre pair; D_1 from the
// information-sum scaling.
MfSpectrum mass_exponents(const PartitionSurface& ps, FitRange range = {});

// Chhabra-Jensen direct determination through canonical measures.
struct DirectSpectrum {
    std::vector<double> q;
    std::vector<double> alpha;
    std::vector<double> f;
    std::vector<double> tau; // q*alpha - f
    std::vector<ScalingFit> alpha_fits;
    std::vector<ScalingFit> f_fits;
    std::vector<std::string> warnings;
};

DirectSpectrum direct_spectrum(const Series& measure, const ScaleGrid& scales,
                               const MomentGrid& qs, FitRange range = {},
                               const PartitionOptions& opts = {});

// Inverse partition function built from exit sizes of the cumulative measure.
// Thresholds are mu = 1/J for the given integers J.
struct InverseSurface {
    std::vector<double> mus;
    std::vector<double> ps;
    std::vector<std::vector<double>> log_chi_dag; // [ip][imu]
    std::size_t plateau_skips = 0;                // zero-length exits dropped
    std::vector<std::string> warnings;
};

InverseSurface inverse_partition(const Series& measure, const std::vector<std::size_t>& js,
                                 const std::vector<double>& ps);

// Per-p slopes of ln chi^dag vs ln mu.
std::vector<ScalingFit> tau_dagger(const InverseSurface& inv, FitRange range = {});

// Max over q in [q_lo, q_hi] of |tau(q) + p*| where tau^dag(p*) = -q, with
// monotone piecewise-linear interpolation of the sampled tau^dag.
double invert_check(const std::vector<double>& q_grid, const std::vector<double>& tau,
                    const std::vector<double>& p_grid, const std::vector<double>& tau_dag,
                    double q_lo, double q_hi);

// Multiplier (daughter/mother mass ratio) estimator; q > -1 required.
struct MultiplierResult {
    MfSpectrum spectrum;
    std::vector<double> multipliers;
    std::size_t base = 2;
    std::size_t mother_scale = 0;
    std::size_t zero_mothers = 0;
};

MultiplierResult multiplier_spectrum(const Series& measure, std::size_t base,
                                     const MomentGrid& qs, std::size_t mother_scale = 0);

// Scale-invariance check of the multiplier distribution: max_q of
// |tau_a(q) - tau_b(q)| between two bases.
double multiplier_base_gap(const Series& measure, std::size_t base_a, std::size_t base_b,
                           const MomentGrid& qs);

// Quenched (<ln chi>) and annealed (ln <chi>) ensemble exponents.
struct EnsembleTau {
    MfSpectrum quenched;
    MfSpectrum annealed;
};

EnsembleTau ensemble_tau(const std::vector<Series>& measures, const ScaleGrid& scales,
                         const MomentGrid& qs, FitRange range = {},
                         const PartitionOptions& opts = {});

} // namespace mfa
