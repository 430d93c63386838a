#pragma once

#include <string>
#include <vector>

#include "mfa/regression.hpp"

namespace mfa {

// alpha(q) = dtau/dq by central finite differences (one-sided at the ends),
// f(alpha) = q*alpha - tau. q must be strictly increasing with >= 3 points.
void legendre(const std::vector<double>& q, const std::vector<double>& tau,
              std::vector<double>& alpha, std::vector<double>& f_alpha);

struct SpectrumWidths {
    double delta_alpha = 0.0; // max(alpha) - min(alpha)
    double delta_h = 0.0;     // H(q_min) - H(q_max)
    double delta_h12 = 0.0;   // H(1) - H(2)
    double d_ineff = 0.0;     // (|H(q_min)-1/2| + |H(q_max)-1/2|)/2
    double c1 = 0.0;          // intermittency
    double skew = 0.0;        // (alpha_max - alpha_0) / (alpha_0 - alpha_min)
};

struct MfSpectrum {
    std::vector<double> q;
    std::vector<double> tau;
    std::vector<double> h;       // generalized Hurst, (tau+1)/q
    std::vector<double> alpha;
    std::vector<double> f_alpha;
    std::vector<double> d_q;     // tau/(q-1); information dimension at q=1
    SpectrumWidths widths;
    std::vector<ScalingFit> fits; // per-q scaling fits when applicable
    std::string method;
    std::vector<std::string> warnings;
};

// Assembles the full spectrum record from a sampled tau(q), including the
// Legendre pair, D_q, H(q) and the width measures.
MfSpectrum spectrum_from_tau(std::vector<double> q, std::vector<double> tau,
                             std::string method = "");

// Width/strength measures of a spectrum. Requires the grid to contain
// q = 0, 1, 2. The skew measure additionally wants a symmetric q-grid and is
// set to NaN (with a warning on the spectrum) otherwise.
//
// The intermittency C1 = 1 - D1 is a measure-formalism quantity; it is
// evaluated as 1 - alpha(1) when tau(1) ~ 0 (measure-normalized spectra) and
// as alpha(0) - alpha(1) for time-series spectra, which vanishes for
// monofractals in both conventions.
SpectrumWidths strength_measures(const MfSpectrum& spec);

} // namespace mfa
