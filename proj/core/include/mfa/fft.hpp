#pragma once

#include <complex>
#include <vector>

namespace mfa {

// Thin FFTW wrappers. Plans are created under a global mutex (the FFTW
// planner is not thread-safe); execution is safe from multiple threads.

// Real-to-complex transform, returns n/2+1 bins, no normalization.
std::vector<std::complex<double>> rfft(const std::vector<double>& x);

// Inverse of rfft, returns n real samples scaled by 1/n.
std::vector<double> irfft(const std::vector<std::complex<double>>& spec, std::size_t n);

// Periodogram |X_k|^2 of the real series (n/2+1 bins).
std::vector<double> periodogram(const std::vector<double>& x);

} // namespace mfa
