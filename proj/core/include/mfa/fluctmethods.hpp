#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mfa/grids.hpp"
#include "mfa/legendre.hpp"
#include "mfa/regression.hpp"
#include "mfa/series.hpp"

namespace mfa {

// ---------------------------------------------------------------------------
// Detrending configuration shared by the MF-DFA / MF-DMA family
// ---------------------------------------------------------------------------

enum class Detrender { dfa, dma };
enum class Covering { single, both_ends };

struct DetrendConfig {
    Detrender method = Detrender::dfa;
    int order = 1;      // dfa polynomial order, >= 1
    double theta = 0.0; // dma position parameter: 0 backward, 0.5 centered, 1 forward
    Covering covering = Covering::both_ends;
};

// How the surface's log-log slope maps to exponents: box_rms surfaces
// (detrended family) scale as s^{h(q)}; moment surfaces (K, Z, M) scale as
// s^{zeta(q)} with zeta = q H(q) = tau + 1.
enum class SurfaceKind { box_rms, moment };

// F(q,s) (or K(q,s), Z(q,s), M(q,j)) kept as ln F.
struct FluctuationSurface {
    std::vector<double> qs;
    std::vector<std::size_t> scales;
    std::vector<std::vector<double>> log_f; // [iq][is]
    SurfaceKind kind = SurfaceKind::box_rms;
    std::string method;
    std::vector<std::string> warnings;
    // cells dropped because every box fluctuation vanished etc.
    std::vector<std::pair<double, std::size_t>> excluded_cells; // (q, s)
};

// Slopes of ln F(q,s) vs ln s -> exponent(q); tau(q) = q*exp(q) - 1.
MfSpectrum surface_exponents(const FluctuationSurface& surface, FitRange range = {},
                             const std::string& method = "");

// ---------------------------------------------------------------------------
// Structure functions (q >= 0 only; zero increments break negative moments)
// ---------------------------------------------------------------------------

// K(q,s) = <|X(i) - X(i-s)|^q> / <|X|^q> on a levels series.
FluctuationSurface structure_function(const Series& levels, const ScaleGrid& scales,
                                      const MomentGrid& qs);

// Extended self-similarity: slope of ln K(q,.) against ln K(q0,.).
ScalingFit ess(const FluctuationSurface& surface, double q, double q0);

// ---------------------------------------------------------------------------
// Exit times / inverse structure functions
// ---------------------------------------------------------------------------

enum class ExitDirection { gain, loss };

struct ExitTimeSet {
    std::vector<double> thresholds;
    std::vector<std::vector<std::size_t>> times; // per threshold
    std::vector<std::size_t> unreached;          // starts dropped per threshold
    ExitDirection direction = ExitDirection::gain;
};

ExitTimeSet exit_times(const Series& levels, const std::vector<double>& thresholds,
                       ExitDirection direction);

struct InverseSf {
    std::vector<double> ps;
    std::vector<double> thresholds;
    std::vector<std::vector<double>> log_tp; // [ip][ithr], ln T_p
    std::vector<ScalingFit> phi;             // slope of ln T_p vs ln threshold
};

InverseSf inverse_sf(const ExitTimeSet& set, const std::vector<double>& ps);

// Most probable exit time per threshold (log-binned histogram mode).
std::vector<double> most_probable_exit(const ExitTimeSet& set, double bin_ratio = 1.25);

// ---------------------------------------------------------------------------
// Multifractal fluctuation analysis: Z(q,s) = <|dX(i,s) - <dX>|^q>
// ---------------------------------------------------------------------------
FluctuationSurface mf_fa(const Series& levels, const ScaleGrid& scales, const MomentGrid& qs);

// ---------------------------------------------------------------------------
// MF-DFA / MF-DMA
// ---------------------------------------------------------------------------

// Profile is built internally: mean-removed cumulative sum for DFA, raw
// cumulative sum for DMA (moving-average detrending must keep constant
// shifts visible; the centered variant then cancels them, the backward and
// forward variants do not).
FluctuationSurface detrended_fluctuation(const Series& increments, const ScaleGrid& scales,
                                         const MomentGrid& qs, const DetrendConfig& cfg = {});

// Direct determination of alpha(q), f(q) from canonical measures of the box
// fluctuations.
struct DetrendedDirect {
    std::vector<double> q;
    std::vector<double> alpha;
    std::vector<double> f;
    std::vector<double> tau;
    std::vector<ScalingFit> alpha_fits;
    std::vector<ScalingFit> f_fits;
};

DetrendedDirect detrended_direct_spectrum(const Series& increments, const ScaleGrid& scales,
                                          const MomentGrid& qs, const DetrendConfig& cfg = {},
                                          FitRange range = {});

// Asymmetric MF-DFA (dfa order 1 only): boxes split by the sign of the local
// linear slope of the raw cumulative path. Box fluctuations are r.m.s.
// throughout (the original formulation used mean absolute residuals).
struct AsymDetrended {
    FluctuationSurface plus;
    FluctuationSurface minus;
    std::vector<std::size_t> plus_count;  // boxes per scale
    std::vector<std::size_t> minus_count;
};

AsymDetrended asym_detrended(const Series& increments, const ScaleGrid& scales,
                             const MomentGrid& qs);

// Multiscale multifractal analysis: local slopes h(q, s) of a surface in
// moving windows of `window` scales moved by `step`.
struct LocalHurst {
    std::vector<double> qs;
    std::vector<double> scale_centers;
    std::vector<std::vector<double>> h; // [iq][iwindow]
};

LocalHurst local_hurst(const FluctuationSurface& surface, std::size_t window,
                       std::size_t step = 1);

// ---------------------------------------------------------------------------
// Wavelet leaders (Haar basis), dyadic scales s = 2^j
// ---------------------------------------------------------------------------

struct WaveletLeaderResult {
    FluctuationSurface surface; // M(q, j) with scales = 2^j
    MfSpectrum spectrum;        // zeta(q) fits; tau = zeta - 1
    std::size_t truncated_to = 0;
};

// j-range defaults to [2, log2(n) - 3].
WaveletLeaderResult wavelet_leaders(const Series& increments, const MomentGrid& qs,
                                    std::size_t j_min = 2, std::size_t j_drop_top = 3);

} // namespace mfa
