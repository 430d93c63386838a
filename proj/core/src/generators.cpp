#include "mfa/generators.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mfa/fft.hpp"

namespace mfa {

namespace {

constexpr double kLn2 = 0.6931471805599453;

void check_levels(int levels, int max_levels = 26) {
    if (levels < 1 || levels > max_levels)
        throw std::invalid_argument("cascade levels must be in [1, " + std::to_string(max_levels) +
                                    "]");
}

void normalize_mass(std::vector<double>& v) {
    double total = std::accumulate(v.begin(), v.end(), 0.0);
    if (!(total > 0.0)) throw std::domain_error("cascade produced zero total mass");
    for (auto& x : v) x /= total;
}

} // namespace

// ---------------------------------------------------------------------------
// Cascades
// ---------------------------------------------------------------------------

Series gen_binomial(double m, int levels) {
    if (!(m > 0.0 && m < 1.0)) throw std::invalid_argument("gen_binomial: m must be in (0,1)");
    check_levels(levels);
    std::vector<double> z{1.0};
    for (int l = 0; l < levels; ++l) {
        std::vector<double> next(z.size() * 2);
        for (std::size_t i = 0; i < z.size(); ++i) {
            next[2 * i] = m * z[i];
            next[2 * i + 1] = (1.0 - m) * z[i];
        }
        z.swap(next);
    }
    return make_series(std::move(z), Role::measure, "binomial");
}

std::pair<Series, Series> gen_binomial_pair(double mx, double my, int levels) {
    return {gen_binomial(mx, levels), gen_binomial(my, levels)};
}

Series gen_multinomial(const std::vector<double>& ms, int levels) {
    if (ms.size() < 2) throw std::invalid_argument("gen_multinomial: need b >= 2 weights");
    double sum = std::accumulate(ms.begin(), ms.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("gen_multinomial: weights must sum to 1");
    for (double m : ms)
        if (!(m > 0.0)) throw std::invalid_argument("gen_multinomial: weights must be positive");
    check_levels(levels, static_cast<int>(26.0 / std::log2(double(ms.size()))));

    std::vector<double> z{1.0};
    for (int l = 0; l < levels; ++l) {
        std::vector<double> next(z.size() * ms.size());
        for (std::size_t i = 0; i < z.size(); ++i)
            for (std::size_t j = 0; j < ms.size(); ++j)
                next[i * ms.size() + j] = ms[j] * z[i];
        z.swap(next);
    }
    return make_series(std::move(z), Role::measure, "multinomial");
}

double oracle_binomial_tau(double m, double q) {
    return -std::log(std::pow(m, q) + std::pow(1.0 - m, q)) / kLn2;
}

double oracle_binomial_alpha(double m, double q) {
    double a = std::pow(m, q), b = std::pow(1.0 - m, q);
    return -(a * std::log(m) + b * std::log(1.0 - m)) / ((a + b) * kLn2);
}

double oracle_binomial_f(double m, double q) {
    return q * oracle_binomial_alpha(m, q) - oracle_binomial_tau(m, q);
}

double oracle_binomial_alpha_min(double m) {
    return -std::log(std::max(m, 1.0 - m)) / kLn2;
}

double oracle_binomial_alpha_max(double m) {
    return -std::log(std::min(m, 1.0 - m)) / kLn2;
}

double oracle_multinomial_tau(const std::vector<double>& ms, double q) {
    double sum = 0.0;
    for (double m : ms) sum += std::pow(m, q);
    return -std::log(sum) / std::log(static_cast<double>(ms.size()));
}

void validate_crm(const Crm& crm) {
    if (crm.rows.empty()) throw std::invalid_argument("CRM: no rows");
    std::size_t b = crm.rows.front().size();
    if (b < 2) throw std::invalid_argument("CRM: branching must be >= 2");
    if (crm.probs.size() != crm.rows.size())
        throw std::invalid_argument("CRM: need one probability per row");
    double psum = 0.0;
    for (std::size_t i = 0; i < crm.rows.size(); ++i) {
        if (crm.rows[i].size() != b)
            throw std::invalid_argument("CRM: row " + std::to_string(i) + " has wrong length");
        for (double m : crm.rows[i])
            if (!(m > 0.0))
                throw std::invalid_argument("CRM: row " + std::to_string(i) +
                                            " has a non-positive multiplier");
        if (!(crm.probs[i] > 0.0))
            throw std::invalid_argument("CRM: row " + std::to_string(i) +
                                        " has non-positive probability");
        psum += crm.probs[i];
    }
    if (std::abs(psum - 1.0) > 1e-9)
        throw std::invalid_argument("CRM: row probabilities must sum to 1 (flattened sum p_i = b)");
    // Mass conservation in expectation keeps tau(1) = 0.
    double emass = 0.0;
    for (std::size_t i = 0; i < crm.rows.size(); ++i)
        emass += crm.probs[i] * std::accumulate(crm.rows[i].begin(), crm.rows[i].end(), 0.0);
    if (std::abs(emass - 1.0) > 1e-9)
        throw std::invalid_argument("CRM: expected child mass per node is " +
                                    std::to_string(emass) + ", must be 1");
}

Series gen_stochastic_multinomial(const Crm& crm, int levels, std::uint64_t seed) {
    validate_crm(crm);
    std::size_t b = crm.branching();
    check_levels(levels, static_cast<int>(26.0 / std::log2(double(b))));
    Rng rng(seed, 0xC45CADEULL);

    std::vector<double> z{1.0};
    for (int l = 0; l < levels; ++l) {
        std::vector<double> next(z.size() * b);
        for (std::size_t i = 0; i < z.size(); ++i) {
            double u = rng.uniform01();
            std::size_t row = 0;
            double acc = 0.0;
            for (; row + 1 < crm.probs.size(); ++row) {
                acc += crm.probs[row];
                if (u < acc) break;
            }
            for (std::size_t j = 0; j < b; ++j) next[i * b + j] = crm.rows[row][j] * z[i];
        }
        z.swap(next);
    }
    normalize_mass(z);
    return make_series(std::move(z), Role::measure, "stochastic-multinomial");
}

double oracle_crm_tau(const Crm& crm, double q) {
    double sum = 0.0;
    for (std::size_t i = 0; i < crm.rows.size(); ++i)
        for (double m : crm.rows[i]) sum += crm.probs[i] * std::pow(m, q);
    return -std::log(sum) / std::log(static_cast<double>(crm.branching()));
}

Series gen_lognormal_cascade(double mu, double sigma, int levels, std::uint64_t seed) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gen_lognormal_cascade: sigma must be > 0");
    check_levels(levels);
    Rng rng(seed, 0x10C45CADEULL);

    std::vector<double> z{1.0};
    for (int l = 0; l < levels; ++l) {
        std::vector<double> next(z.size() * 2);
        for (std::size_t i = 0; i < z.size(); ++i) {
            next[2 * i] = z[i] * std::exp(mu + sigma * rng.gaussian());
            next[2 * i + 1] = z[i] * std::exp(mu + sigma * rng.gaussian());
        }
        z.swap(next);
    }
    normalize_mass(z);
    return make_series(std::move(z), Role::measure, "lognormal-cascade");
}

double oracle_lognormal_tau(double mu, double sigma, double q) {
    return -sigma * sigma * q * q / (2.0 * kLn2) - mu * q / kLn2 - 1.0;
}

Series gen_logpoisson_cascade(double mean, double delta, double gamma, int levels,
                              std::uint64_t seed) {
    if (!(delta > 0.0) || delta >= 1.0)
        throw std::invalid_argument("gen_logpoisson_cascade: delta must be in (0,1)");
    check_levels(levels);
    Rng rng(seed, 0x10B90ULL);
    double ln_delta = std::log(delta);
    std::vector<double> z{1.0};
    for (int l = 0; l < levels; ++l) {
        std::vector<double> next(z.size() * 2);
        for (std::size_t i = 0; i < z.size(); ++i) {
            next[2 * i] = z[i] * std::exp(double(rng.poisson(mean)) * ln_delta + gamma);
            next[2 * i + 1] = z[i] * std::exp(double(rng.poisson(mean)) * ln_delta + gamma);
        }
        z.swap(next);
    }
    normalize_mass(z);
    return make_series(std::move(z), Role::measure, "logpoisson-cascade");
}

double oracle_logpoisson_tau(double mean, double delta, double gamma, double q) {
    return (mean * (1.0 - std::pow(delta, q)) - gamma * q) / kLn2 - 1.0;
}

std::pair<double, double> oracle_lognormal_alpha_range(double mu, double sigma) {
    double half_width = std::sqrt(2.0) * sigma / std::sqrt(kLn2);
    double center = -mu / kLn2;
    return {center - half_width, center + half_width};
}

// ---------------------------------------------------------------------------
// Stationary Gaussian synthesis
// ---------------------------------------------------------------------------

std::vector<double> gaussian_from_autocov(const std::vector<double>& cov, std::size_t n, Rng& rng) {
    if (n == 0) throw std::invalid_argument("gaussian_from_autocov: n == 0");
    const std::size_t m = 2 * n;
    std::vector<double> circ(m, 0.0);
    for (std::size_t k = 0; k < n && k < cov.size(); ++k) {
        circ[k] = cov[k];
        if (k > 0) circ[m - k] = cov[k];
    }
    auto spec = rfft(circ); // real, symmetric input -> real eigenvalues
    const std::size_t nb = spec.size();

    std::vector<std::complex<double>> v(nb);
    for (std::size_t k = 0; k < nb; ++k) {
        double lam = spec[k].real();
        if (lam < 0.0) lam = 0.0; // clip slightly negative embedding eigenvalues
        double amp = std::sqrt(lam * static_cast<double>(m));
        if (k == 0 || (m % 2 == 0 && k == nb - 1)) {
            v[k] = amp * rng.gaussian();
        } else {
            v[k] = std::complex<double>(rng.gaussian(), rng.gaussian()) * (amp / std::sqrt(2.0));
        }
    }
    auto x = irfft(v, m);
    x.resize(n);
    return x;
}

Series gen_fgn(double hurst, std::size_t n, std::uint64_t seed) {
    if (!(hurst > 0.0 && hurst < 1.0))
        throw std::invalid_argument("gen_fgn: H must be in (0,1)");
    if (n < 8) throw std::invalid_argument("gen_fgn: n too small");
    Rng rng(seed, 0xF61ULL);

    std::vector<double> cov(n);
    double h2 = 2.0 * hurst;
    for (std::size_t k = 0; k < n; ++k) {
        double kk = static_cast<double>(k);
        cov[k] = 0.5 * (std::pow(kk + 1.0, h2) - 2.0 * std::pow(kk, h2) +
                        std::pow(std::abs(kk - 1.0), h2));
    }
    auto x = gaussian_from_autocov(cov, n, rng);

    double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    double sd = std::sqrt(var);
    if (!(sd > 0.0)) throw std::domain_error("gen_fgn: degenerate sample");
    for (auto& v : x) v = (v - mean) / sd;
    return make_series(std::move(x), Role::increments, "fgn");
}

// ---------------------------------------------------------------------------
// MRW
// ---------------------------------------------------------------------------

Series gen_mrw(const MrwSpec& spec) {
    if (!(spec.lambda2 > 0.0 && spec.lambda2 < 0.5))
        throw std::invalid_argument("gen_mrw: lambda2 must be in (0, 0.5)");
    if (!(spec.sigma > 0.0)) throw std::invalid_argument("gen_mrw: sigma must be > 0");
    if (spec.n < 8) throw std::invalid_argument("gen_mrw: n too small");
    std::size_t T = spec.integral_scale ? spec.integral_scale : spec.n;

    Rng rng(spec.seed, 0x3A57ULL);
    double lnT = std::log(static_cast<double>(T));

    std::vector<double> cov(spec.n, 0.0);
    for (std::size_t s = 0; s < spec.n; ++s) {
        if (s + 1 <= T) cov[s] = spec.lambda2 * std::log(static_cast<double>(T) / double(s + 1));
        if (cov[s] < 0.0) cov[s] = 0.0;
    }
    auto omega = gaussian_from_autocov(cov, spec.n, rng);
    double mean_shift = -spec.lambda2 * lnT;

    std::vector<double> dx(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i)
        dx[i] = spec.sigma * rng.gaussian() * std::exp(omega[i] + mean_shift);
    return make_series(std::move(dx), Role::increments, "mrw");
}

double oracle_mrw_zeta(double lambda2, double q) {
    return -lambda2 * q * q / 2.0 + (0.5 + lambda2) * q;
}

// ---------------------------------------------------------------------------
// MSM
// ---------------------------------------------------------------------------

Series gen_msm(const MsmSpec& spec) {
    if (spec.kbar < 1) throw std::invalid_argument("gen_msm: kbar must be >= 1");
    if (!(spec.b > 1.0)) throw std::invalid_argument("gen_msm: b must be > 1");
    if (!(spec.gamma_kbar > 0.0 && spec.gamma_kbar < 1.0))
        throw std::invalid_argument("gen_msm: gamma_kbar must be in (0,1)");
    if (!(spec.sigma > 0.0)) throw std::invalid_argument("gen_msm: sigma must be > 0");
    if (spec.n < 2) throw std::invalid_argument("gen_msm: n too small");
    if (spec.law == MsmLaw::binomial && !(spec.m0 >= 1.0 && spec.m0 <= 2.0))
        throw std::invalid_argument("gen_msm: binomial law needs m0 in [1,2]");
    if (spec.law == MsmLaw::lognormal && !(spec.lambda >= 1.0))
        throw std::invalid_argument("gen_msm: lognormal law needs lambda >= 1");

    Rng rng(spec.seed, 0x5A5AULL);
    // Lognormal multipliers in the base-2 parametrization,
    // ln M ~ N(-(lambda-1) ln 2, 2 (lambda-1) ln 2), so E[M] = 1 and the
    // structure-function exponents follow the closed form
    // tau(q) = -(lambda-1) q^2/4 + lambda q/2 - 1; lambda = 1 is exactly
    // monofractal.
    double mean_lnm = -(spec.lambda - 1.0) * std::log(2.0);
    double sd_lnm = std::sqrt(std::max(0.0, 2.0 * (spec.lambda - 1.0) * std::log(2.0)));
    auto draw_multiplier = [&]() -> double {
        if (spec.law == MsmLaw::binomial)
            return rng.uniform01() < 0.5 ? spec.m0 : 2.0 - spec.m0;
        return std::exp(mean_lnm + sd_lnm * rng.gaussian());
    };

    std::vector<double> gam(static_cast<std::size_t>(spec.kbar));
    for (int k = 1; k <= spec.kbar; ++k)
        gam[static_cast<std::size_t>(k - 1)] =
            1.0 - std::pow(1.0 - spec.gamma_kbar, std::pow(spec.b, double(k - spec.kbar)));

    std::vector<double> mult(static_cast<std::size_t>(spec.kbar));
    for (auto& m : mult) m = draw_multiplier();

    std::vector<double> r(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        if (i > 0) {
            for (std::size_t k = 0; k < mult.size(); ++k)
                if (rng.uniform01() < gam[k]) mult[k] = draw_multiplier();
        }
        double prod = 1.0;
        for (double m : mult) prod *= m;
        r[i] = spec.sigma * std::sqrt(prod) * rng.gaussian();
    }
    return make_series(std::move(r), Role::increments, "msm");
}

double oracle_msm_lognormal_tau(double lambda, double q) {
    return -(lambda - 1.0) * q * q / 4.0 + lambda * q / 2.0 - 1.0;
}

// ---------------------------------------------------------------------------
// SEMF
// ---------------------------------------------------------------------------

Series gen_semf(const SemfSpec& spec) {
    if (!(spec.sigma > 0.0)) throw std::invalid_argument("gen_semf: sigma must be > 0");
    if (spec.phi < 0.0) throw std::invalid_argument("gen_semf: phi must be >= 0");
    if (spec.h0 < 0.0) throw std::invalid_argument("gen_semf: h0 must be >= 0");
    if (spec.n < 2) throw std::invalid_argument("gen_semf: n too small");

    Rng rng(spec.seed, 0x5EAFULL);
    std::vector<double> kernel(spec.n);
    for (std::size_t j = 0; j < spec.n; ++j)
        kernel[j] = spec.h0 * std::pow(static_cast<double>(j + 1), -0.5 - spec.phi);

    std::vector<double> dx(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        double omega = 0.0;
        for (std::size_t j = 0; j < i; ++j) omega += dx[j] * kernel[i - j - 1];
        double expo = -omega / spec.sigma;
        // the discrete recursion is explosive for large h0; fail loudly
        // rather than emit non-finite samples
        if (std::abs(expo) > 600.0)
            throw std::domain_error("gen_semf: self-excitation diverged at step " +
                                    std::to_string(i) +
                                    " (reduce h0 or increase phi)");
        dx[i] = spec.sigma * rng.gaussian() * std::exp(expo);
    }
    return make_series(std::move(dx), Role::increments, "semf");
}

// ---------------------------------------------------------------------------
// MMAR
// ---------------------------------------------------------------------------

Series gen_mmar(double hurst, double cascade_m, std::size_t n, std::uint64_t seed) {
    if (!(hurst > 0.0 && hurst < 1.0)) throw std::invalid_argument("gen_mmar: H must be in (0,1)");
    if (!(cascade_m > 0.0 && cascade_m < 1.0))
        throw std::invalid_argument("gen_mmar: cascade multiplier must be in (0,1)");
    if (n < 8) throw std::invalid_argument("gen_mmar: n too small");

    int levels = static_cast<int>(std::ceil(std::log2(static_cast<double>(n))));
    Series cascade = gen_binomial(cascade_m, levels);
    auto theta_grid = cumulative_sum(cascade.values); // CDF of trading time on [0,1]
    const std::size_t cells = theta_grid.size();

    // fBm on an 8x oversampled uniform grid of [0,1]
    const std::size_t grid = 8 * n;
    Series fgn = gen_fgn(hurst, grid, seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<double> bh(grid + 1, 0.0);
    double step_sd = std::pow(1.0 / static_cast<double>(grid), hurst);
    for (std::size_t i = 0; i < grid; ++i) bh[i + 1] = bh[i] + fgn.values[i] * step_sd;

    auto eval_bh = [&](double t) {
        double pos = t * static_cast<double>(grid);
        auto i0 = static_cast<std::size_t>(pos);
        if (i0 >= grid) return bh[grid];
        double frac = pos - static_cast<double>(i0);
        return bh[i0] * (1.0 - frac) + bh[i0 + 1] * frac;
    };
    auto eval_theta = [&](double t) {
        double pos = t * static_cast<double>(cells);
        auto i0 = static_cast<std::size_t>(pos);
        if (i0 >= cells) return 1.0;
        double frac = pos - static_cast<double>(i0);
        double left = i0 == 0 ? 0.0 : theta_grid[i0 - 1];
        return left + frac * (theta_grid[i0] - left);
    };

    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double t = static_cast<double>(i + 1) / static_cast<double>(n);
        x[i] = eval_bh(eval_theta(t));
    }
    return make_series(std::move(x), Role::levels, "mmar");
}

double oracle_mmar_tau(double hurst, double cascade_m, double q) {
    return oracle_binomial_tau(cascade_m, hurst * q);
}

// ---------------------------------------------------------------------------
// Levy
// ---------------------------------------------------------------------------

Series gen_levy(double gamma, std::size_t n, std::uint64_t seed) {
    if (!(gamma > 0.0 && gamma <= 2.0))
        throw std::invalid_argument("gen_levy: gamma must be in (0, 2]");
    if (n < 2) throw std::invalid_argument("gen_levy: n too small");
    Rng rng(seed, 0x1E51ULL);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.stable_symmetric(gamma);
    return make_series(std::move(x), Role::increments, "levy");
}

double oracle_levy_tau(double gamma, double q) {
    return q <= gamma ? q / gamma - 1.0 : 0.0;
}

// ---------------------------------------------------------------------------
// Two-component ARFIMA
// ---------------------------------------------------------------------------

namespace {

// Causal fractional integration (1-B)^{-d} of the innovations via FFT
// convolution with the MA(inf) weights psi_k = Gamma(k+d)/(Gamma(d) k!).
std::vector<double> fractional_integrate(const std::vector<double>& eps, double d) {
    const std::size_t n = eps.size();
    std::vector<double> psi(n);
    psi[0] = 1.0;
    for (std::size_t k = 1; k < n; ++k)
        psi[k] = psi[k - 1] * (static_cast<double>(k) - 1.0 + d) / static_cast<double>(k);

    std::size_t m = 1;
    while (m < 2 * n) m *= 2;
    std::vector<double> a(m, 0.0), b(m, 0.0);
    std::copy(psi.begin(), psi.end(), a.begin());
    std::copy(eps.begin(), eps.end(), b.begin());
    auto fa = rfft(a);
    auto fb = rfft(b);
    for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
    auto conv = irfft(fa, m);
    conv.resize(n);
    return conv;
}

} // namespace

std::pair<Series, Series> gen_arfima_pair(double d1, double d2, double w, std::size_t n,
                                          std::uint64_t seed) {
    if (!(d1 > 0.0 && d1 < 0.5) || !(d2 > 0.0 && d2 < 0.5))
        throw std::invalid_argument("gen_arfima_pair: d must be in (0, 0.5)");
    if (w < 0.0 || w > 1.0) throw std::invalid_argument("gen_arfima_pair: W must be in [0,1]");
    if (n < 8) throw std::invalid_argument("gen_arfima_pair: n too small");

    Rng shared(seed, 0xA0ULL), own1(seed, 0xA1ULL), own2(seed, 0xA2ULL);
    std::vector<double> ex(n), ey(n);
    for (std::size_t i = 0; i < n; ++i) {
        double common = shared.gaussian();
        ex[i] = w * common + (1.0 - w) * own1.gaussian();
        ey[i] = w * common + (1.0 - w) * own2.gaussian();
    }
    auto x = fractional_integrate(ex, d1);
    auto y = fractional_integrate(ey, d2);
    return {make_series(std::move(x), Role::increments, "arfima-x"),
            make_series(std::move(y), Role::increments, "arfima-y")};
}

} // namespace mfa
