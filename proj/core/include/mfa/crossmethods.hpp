#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mfa/fluctmethods.hpp"
#include "mfa/grids.hpp"
#include "mfa/legendre.hpp"
#include "mfa/regression.hpp"
#include "mfa/series.hpp"

namespace mfa {

// ---------------------------------------------------------------------------
// Joint partition function MF-X-PF(p,q)
// ---------------------------------------------------------------------------

struct JointSurface {
    std::vector<double> ps;
    std::vector<double> qs;
    std::vector<std::size_t> scales;
    // log chi_xy indexed [ip][iq][is]
    std::vector<std::vector<std::vector<double>>> log_chi;
    std::vector<std::string> warnings;
};

struct JointSpectrum {
    std::vector<double> ps;
    std::vector<double> qs;
    std::vector<std::vector<double>> tau;     // [ip][iq]
    std::vector<std::vector<double>> alpha_x; // direct determination
    std::vector<std::vector<double>> alpha_y;
    std::vector<std::vector<double>> f_xy;
    std::vector<std::string> warnings;
};

JointSurface mfx_pf_surface(const Series& mx, const Series& my, const std::vector<double>& ps,
                            const std::vector<double>& qs, const ScaleGrid& scales);

JointSpectrum mfx_pf(const Series& mx, const Series& my, const std::vector<double>& ps,
                     const std::vector<double>& qs, const ScaleGrid& scales, FitRange range = {});

// Closed forms for position-aligned binomial measures with left weights px, py.
struct MfxBinomialOracle {
    double beta = 0.0;
    double gamma = 0.0;
    double tau = 0.0;
    double alpha_x = 0.0;
    double alpha_y = 0.0;
    double f = 0.0;
};
MfxBinomialOracle oracle_mfx_binomial(double px, double py, double p, double q);

// ---------------------------------------------------------------------------
// Joint structure functions MF-X-SF(q), q >= 0
// ---------------------------------------------------------------------------

// K_xy(q,s) = <|dX dY|^{q/2}> ~ s^{q H_xy(q)}; returns a moment surface whose
// exponents give tau_xy = q H_xy - 1.
FluctuationSurface mfx_sf(const Series& x, const Series& y, const ScaleGrid& scales,
                          const MomentGrid& qs);

// ---------------------------------------------------------------------------
// MF-DCCA (absolute-value convention) and MF-CCA (signed convention)
// ---------------------------------------------------------------------------

FluctuationSurface mf_dcca(const Series& x, const Series& y, const ScaleGrid& scales,
                           const MomentGrid& qs, const DetrendConfig& cfg = {});

enum class CcaVerdict { positive, negative_branch, no_scaling };

struct MfCcaResult {
    FluctuationSurface surface;            // ln |F_xy(q,s)| for fit-able (q,s)
    std::vector<CcaVerdict> verdict;       // per q
    std::vector<std::vector<int>> sign;    // [iq][is] of F_xy(q,s)
    MfSpectrum spectrum;                   // fits on the consistent-sign branch
};

MfCcaResult mf_cca(const Series& x, const Series& y, const ScaleGrid& scales,
                   const MomentGrid& qs, const DetrendConfig& cfg = {}, FitRange range = {});

// ---------------------------------------------------------------------------
// MF-DPXA: detrended partial cross-correlations with external drivers
// ---------------------------------------------------------------------------

struct DpxaOptions {
    DetrendConfig detrend = {};
    bool intercept = true; // include a constant column in the window regressions
};

struct DpxaResult {
    FluctuationSurface surface;
    std::size_t dropped_windows = 0; // rank-deficient regressions
};

DpxaResult mf_dpxa(const Series& x, const Series& y, const std::vector<Series>& drivers,
                   const ScaleGrid& scales, const MomentGrid& qs, const DpxaOptions& opts = {});

// ---------------------------------------------------------------------------
// Scale-dependent cross-correlation coefficients
// ---------------------------------------------------------------------------

struct RhoCurve {
    std::vector<std::size_t> scales;
    std::vector<double> qs;               // {2} for plain DCCA
    std::vector<std::vector<double>> rho; // [iq][is]; NaN where undefined
    std::string method;
    std::vector<std::string> warnings;
};

// rho_DCCA(s) = F2_xy / (F_xx F_yy).
RhoCurve rho_dcca(const Series& x, const Series& y, const ScaleGrid& scales,
                  const DetrendConfig& cfg = {});

// q-dependent coefficient rho(q,s); bounded by [-1,1] for q > 0.
RhoCurve rho_qdcca(const Series& x, const Series& y, const ScaleGrid& scales,
                   const MomentGrid& qs, const DetrendConfig& cfg = {});

// DPXA coefficient: partial cross-correlation coefficient at q = 2.
RhoCurve rho_dpxa(const Series& x, const Series& y, const std::vector<Series>& drivers,
                  const ScaleGrid& scales, const DpxaOptions& opts = {});

} // namespace mfa
