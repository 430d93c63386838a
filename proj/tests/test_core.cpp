#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mfa/fft.hpp"
#include "mfa/generators.hpp"
#include "mfa/grids.hpp"
#include "mfa/legendre.hpp"
#include "mfa/regression.hpp"
#include "mfa/rng.hpp"
#include "mfa/series.hpp"

using namespace mfa;

TEST_CASE("build_profile basics") {
    auto p1 = build_profile(make_series({1, 1, 1, 1}, Role::increments));
    for (double v : p1.values) CHECK(v == doctest::Approx(0.0));

    auto p2 = build_profile(make_series({1, -1, 1, -1}, Role::increments));
    CHECK(p2.values[0] == doctest::Approx(1.0));
    CHECK(p2.values[1] == doctest::Approx(0.0));
    CHECK(p2.values[2] == doctest::Approx(1.0));
    CHECK(p2.values[3] == doctest::Approx(0.0));
}

TEST_CASE("build_profile telescopes to zero on return-like data") {
    Rng rng(42);
    std::vector<double> r(1000);
    double maxabs = 0.0;
    for (auto& v : r) {
        v = 0.01 * rng.gaussian();
        maxabs = std::max(maxabs, std::abs(v));
    }
    auto p = build_profile(make_series(r, Role::increments));
    CHECK(std::abs(p.values.back()) < 1e-12);
    CHECK(std::abs(p.values.back()) < 1e-9 * 1000.0 * maxabs);
}

TEST_CASE("build_profile rejects non-finite input with index") {
    std::vector<double> bad{1.0, 2.0, std::nan(""), 4.0};
    CHECK_THROWS_WITH_AS(make_series(bad, Role::increments),
                         doctest::Contains("index 2"), std::invalid_argument);
}

TEST_CASE("fit_loglog recovers exact power laws to machine precision") {
    std::vector<double> xs, ys;
    for (int i = 1; i <= 20; ++i) {
        xs.push_back(4.0 * i);
        ys.push_back(std::pow(4.0 * i, 0.7));
    }
    auto fit = fit_loglog(xs, ys);
    CHECK(fit.exponent == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));

    for (std::size_t i = 0; i < ys.size(); ++i) ys[i] = 2.0 * std::pow(xs[i], 1.5);
    fit = fit_loglog(xs, ys);
    CHECK(fit.exponent == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("fit_loglog on noisy power laws: 100-seed Monte Carlo") {
    // 1% multiplicative noise over 20 scales
    std::vector<double> xs;
    for (int i = 0; i < 20; ++i) xs.push_back(8.0 * std::pow(1.5, i));
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed);
        std::vector<double> ys;
        for (double x : xs) ys.push_back(std::pow(x, 0.62) * std::exp(0.01 * rng.gaussian()));
        auto fit = fit_loglog(xs, ys);
        worst = std::max(worst, std::abs(fit.exponent - 0.62));
    }
    CHECK(worst < 0.02);
}

TEST_CASE("fit_loglog variance-weighted flag") {
    std::vector<double> xs{2, 4, 8, 16, 32}, ys;
    for (double x : xs) ys.push_back(3.0 * std::pow(x, 0.4));
    auto plain = fit_loglog(xs, ys);
    auto unit_weights = fit_loglog(xs, ys, {}, std::vector<double>(xs.size(), 1.0));
    CHECK(plain.exponent == doctest::Approx(unit_weights.exponent).epsilon(1e-14));

    // upweighting two points pulls the fit toward their local slope
    std::vector<double> bent(ys);
    bent.back() *= 2.0;
    auto skewed = fit_loglog(xs, bent, {}, {1.0, 1.0, 1.0, 100.0, 100.0});
    auto flat = fit_loglog(xs, bent);
    CHECK(skewed.exponent != doctest::Approx(flat.exponent).epsilon(1e-6));
}

TEST_CASE("fit_loglog error paths") {
    std::vector<double> xs{1, 2, 4, 8}, ys{1, 2, 3, 4};
    CHECK_THROWS_AS(fit_loglog(xs, ys, FitRange{3.0, 5.0}), std::invalid_argument);
    ys[2] = -1.0;
    CHECK_THROWS_AS(fit_loglog(xs, ys), std::domain_error);
}

TEST_CASE("legendre of a monofractal line") {
    std::vector<double> q, tau;
    for (double qq = -4.0; qq <= 4.0 + 1e-9; qq += 0.5) {
        q.push_back(qq);
        tau.push_back(0.5 * qq - 1.0);
    }
    std::vector<double> alpha, f;
    legendre(q, tau, alpha, f);
    for (std::size_t i = 0; i < q.size(); ++i) {
        CHECK(alpha[i] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(f[i] == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("legendre: f at q=0 equals -tau(0)") {
    std::vector<double> q, tau;
    for (double qq = -3.0; qq <= 3.0 + 1e-9; qq += 0.25) {
        q.push_back(qq);
        tau.push_back(oracle_binomial_tau(0.35, qq));
    }
    std::vector<double> alpha, f;
    legendre(q, tau, alpha, f);
    auto it = std::find_if(q.begin(), q.end(), [](double v) { return std::abs(v) < 1e-12; });
    REQUIRE(it != q.end());
    auto i0 = static_cast<std::size_t>(it - q.begin());
    CHECK(f[i0] == doctest::Approx(-tau[i0]).epsilon(1e-12));
    CHECK(f[i0] == doctest::Approx(1.0).epsilon(1e-10)); // f_max = f(q=0) = 1
}

TEST_CASE("legendre matches the binomial closed forms at q=2") {
    // frozen from the closed forms: tau(2) = -ln(0.09+0.49)/ln 2,
    // alpha(2) = -(m^2 ln m + (1-m)^2 ln(1-m)) / ((m^2+(1-m)^2) ln 2)
    double tau2 = oracle_binomial_tau(0.3, 2.0);
    double alpha2 = oracle_binomial_alpha(0.3, 2.0);
    CHECK(tau2 == doctest::Approx(0.785875).epsilon(1e-5));
    CHECK(alpha2 == doctest::Approx(0.704255).epsilon(1e-5));

    std::vector<double> q, tau;
    for (double qq = -4.0; qq <= 4.0 + 1e-9; qq += 0.01) {
        q.push_back(qq);
        tau.push_back(oracle_binomial_tau(0.3, qq));
    }
    std::vector<double> alpha, f;
    legendre(q, tau, alpha, f);
    auto i2 = static_cast<std::size_t>(
        std::find_if(q.begin(), q.end(), [](double v) { return std::abs(v - 2.0) < 1e-6; }) -
        q.begin());
    CHECK(alpha[i2] == doctest::Approx(alpha2).epsilon(1e-4));
    CHECK(f[i2] == doctest::Approx(2.0 * alpha2 - tau2).epsilon(1e-3));
}

TEST_CASE("legendre of strictly concave tau: alpha decreasing, f slope = q") {
    std::vector<double> q, tau;
    for (double qq = -4.0; qq <= 4.0 + 1e-9; qq += 0.25) {
        q.push_back(qq);
        tau.push_back(oracle_binomial_tau(0.25, qq));
    }
    std::vector<double> alpha, f;
    legendre(q, tau, alpha, f);
    for (std::size_t i = 1; i < alpha.size(); ++i) CHECK(alpha[i] < alpha[i - 1]);
    for (std::size_t i = 1; i + 1 < alpha.size(); ++i) {
        double slope = (f[i + 1] - f[i - 1]) / (alpha[i + 1] - alpha[i - 1]);
        CHECK(slope == doctest::Approx(q[i]).epsilon(0.05));
    }
    std::vector<double> a2, f2;
    CHECK_THROWS_AS(legendre({0.0, 1.0}, {0.0, 1.0}, a2, f2), std::invalid_argument);
}

TEST_CASE("make_scales grids") {
    auto dyadic = make_scales(1 << 16, ScaleSpacing::dyadic, 4, 1 << 14);
    REQUIRE(dyadic.size() == 13);
    CHECK(dyadic.scales.front() == 4);
    CHECK(dyadic.scales.back() == 16384);

    auto divisors = make_scales(1000, ScaleSpacing::divisors, 4, 250);
    std::vector<std::size_t> expect{4, 5, 8, 10, 20, 25, 40, 50, 100, 125, 200, 250};
    CHECK(divisors.scales == expect);

    auto geo = make_scales(100, ScaleSpacing::geometric, 4, 25, std::sqrt(2.0));
    std::vector<std::size_t> expect_geo{4, 6, 8, 11, 16, 23};
    CHECK(geo.scales == expect_geo);

    CHECK_THROWS_WITH_AS(make_scales(1000, ScaleSpacing::divisors, 251, 260),
                         doctest::Contains("empty grid"), std::invalid_argument);
}

TEST_CASE("spectrum widths: monofractal and binomial") {
    std::vector<double> q, tau;
    for (double qq = -4.0; qq <= 4.0 + 1e-9; qq += 0.25) {
        q.push_back(qq);
        tau.push_back(0.5 * qq - 1.0);
    }
    auto mono = spectrum_from_tau(q, tau, "mono");
    CHECK(mono.widths.delta_alpha == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(mono.widths.delta_h == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(mono.widths.d_ineff == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(mono.widths.c1 == doctest::Approx(0.0).epsilon(1e-10));

    std::vector<double> tau_b;
    for (double qq : q) tau_b.push_back(oracle_binomial_tau(0.3, qq));
    auto spec = spectrum_from_tau(q, tau_b, "binomial");
    // delta_alpha on the finite grid: alpha(-4) - alpha(4) from the closed form
    double expect_width = oracle_binomial_alpha(0.3, -4.0) - oracle_binomial_alpha(0.3, 4.0);
    CHECK(spec.widths.delta_alpha == doctest::Approx(expect_width).epsilon(0.02));
    CHECK(spec.widths.delta_alpha >= 0.0);
    // measure-like tau: C1 = 1 - alpha(1) > 0
    CHECK(spec.widths.c1 == doctest::Approx(1.0 - oracle_binomial_alpha(0.3, 1.0)).epsilon(0.02));

    // skew symmetry between m and 1-m
    std::vector<double> tau_c;
    for (double qq : q) tau_c.push_back(oracle_binomial_tau(0.7, qq));
    auto spec_c = spectrum_from_tau(q, tau_c, "binomial-mirror");
    CHECK(spec.widths.skew * spec_c.widths.skew == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("rng determinism and distribution sanity") {
    Rng a(123, 7), b(123, 7), c(123, 8);
    for (int i = 0; i < 16; ++i) {
        double va = a.gaussian();
        CHECK(va == b.gaussian());
    }
    CHECK(a.next_u64() != c.next_u64());

    Rng rng(99);
    double mean = 0.0, var = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double g = rng.gaussian();
        mean += g;
        var += g * g;
    }
    mean /= n;
    var = var / n - mean * mean;
    CHECK(mean == doctest::Approx(0.0).epsilon(0.02));
    CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("fft round trip and Parseval") {
    Rng rng(7);
    std::vector<double> x(1000);
    for (auto& v : x) v = rng.gaussian();
    auto spec = rfft(x);
    auto back = irfft(spec, x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-10));

    double sum2 = 0.0;
    for (double v : x) sum2 += v * v;
    auto p = periodogram(x);
    double total = p[0] + p.back(); // even n: DC and Nyquist appear once
    for (std::size_t k = 1; k + 1 < p.size(); ++k) total += 2.0 * p[k];
    CHECK(total / x.size() == doctest::Approx(sum2).epsilon(1e-9));
}

TEST_CASE("local_log_slopes of an exact power law is flat") {
    std::vector<double> xs, ly;
    for (int i = 0; i < 24; ++i) {
        xs.push_back(8.0 * std::pow(1.3, i));
        ly.push_back(0.8 * std::log(xs.back()) + 1.0);
    }
    auto ls = local_log_slopes(xs, ly, 5, 1);
    for (double h : ls.slope) CHECK(h == doctest::Approx(0.8).epsilon(1e-10));
}
