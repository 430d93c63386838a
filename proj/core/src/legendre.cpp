#include "mfa/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mfa {

void legendre(const std::vector<double>& q, const std::vector<double>& tau,
              std::vector<double>& alpha, std::vector<double>& f_alpha) {
    const std::size_t n = q.size();
    if (n < 3) throw std::invalid_argument("legendre: need at least 3 grid points");
    if (tau.size() != n) throw std::invalid_argument("legendre: q/tau size mismatch");
    for (std::size_t i = 1; i < n; ++i)
        if (!(q[i] > q[i - 1]))
            throw std::invalid_argument("legendre: q must be strictly increasing");

    alpha.resize(n);
    f_alpha.resize(n);
    alpha[0] = (tau[1] - tau[0]) / (q[1] - q[0]);
    alpha[n - 1] = (tau[n - 1] - tau[n - 2]) / (q[n - 1] - q[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i)
        alpha[i] = (tau[i + 1] - tau[i - 1]) / (q[i + 1] - q[i - 1]);
    for (std::size_t i = 0; i < n; ++i)
        f_alpha[i] = q[i] * alpha[i] - tau[i];
}

namespace {

// Index of the grid point equal to q0 (grid is exact for regular grids).
long find_q(const std::vector<double>& q, double q0) {
    for (std::size_t i = 0; i < q.size(); ++i)
        if (std::abs(q[i] - q0) < 1e-9) return static_cast<long>(i);
    return -1;
}

} // namespace

MfSpectrum spectrum_from_tau(std::vector<double> q, std::vector<double> tau, std::string method) {
    MfSpectrum s;
    s.method = std::move(method);
    legendre(q, tau, s.alpha, s.f_alpha);
    s.q = std::move(q);
    s.tau = std::move(tau);

    const std::size_t n = s.q.size();
    s.h.resize(n);
    s.d_q.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (s.q[i] != 0.0) {
            s.h[i] = (s.tau[i] + 1.0) / s.q[i];
        } else {
            s.h[i] = s.alpha[i]; // H(0) limit: d tau/dq at 0 when tau(0) = -1
        }
        if (std::abs(s.q[i] - 1.0) < 1e-9) {
            s.d_q[i] = s.alpha[i]; // information dimension (l'Hospital)
        } else {
            s.d_q[i] = s.tau[i] / (s.q[i] - 1.0);
        }
    }
    try {
        s.widths = strength_measures(s);
    } catch (const std::exception& e) {
        s.warnings.push_back(std::string("widths unavailable: ") + e.what());
    }
    return s;
}

SpectrumWidths strength_measures(const MfSpectrum& spec) {
    const auto& q = spec.q;
    const auto& h = spec.h;
    const auto& alpha = spec.alpha;
    if (q.size() < 3 || alpha.size() != q.size() || h.size() != q.size())
        throw std::invalid_argument("strength_measures: malformed spectrum");

    long i0 = find_q(q, 0.0);
    long i1 = find_q(q, 1.0);
    long i2 = find_q(q, 2.0);
    if (i0 < 0 || i1 < 0 || i2 < 0)
        throw std::invalid_argument("strength_measures: grid must contain q = 0, 1, 2");

    SpectrumWidths w;
    auto [amin_it, amax_it] = std::minmax_element(alpha.begin(), alpha.end());
    w.delta_alpha = *amax_it - *amin_it;
    w.delta_h = h.front() - h.back();
    w.delta_h12 = h[static_cast<std::size_t>(i1)] - h[static_cast<std::size_t>(i2)];
    w.d_ineff = 0.5 * (std::abs(h.front() - 0.5) + std::abs(h.back() - 0.5));

    double alpha1 = alpha[static_cast<std::size_t>(i1)];
    double alpha0 = alpha[static_cast<std::size_t>(i0)];
    double tau1 = spec.tau[static_cast<std::size_t>(i1)];
    // Intermittency: 1 - D1 in the measure formalism (tau(1)=0), the
    // equivalent alpha(0)-alpha(1) gap for time-series spectra.
    w.c1 = std::abs(tau1) < 0.05 ? 1.0 - alpha1 : alpha0 - alpha1;

    if (std::abs(q.front() + q.back()) < 1e-9) {
        double denom = alpha0 - *amin_it;
        w.skew = denom != 0.0 ? (*amax_it - alpha0) / denom
                              : std::numeric_limits<double>::quiet_NaN();
    } else {
        w.skew = std::numeric_limits<double>::quiet_NaN();
    }
    return w;
}

} // namespace mfa
