#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mfa/fft.hpp"
#include "mfa/fluctmethods.hpp"
#include "mfa/generators.hpp"
#include "mfa/grids.hpp"
#include "mfa/surrogates.hpp"

using namespace mfa;

namespace {

bool same_multiset(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

double lag1_autocorr(const std::vector<double>& x) {
    double mean = std::accumulate(x.begin(), x.end(), 0.0) / double(x.size());
    double num = 0, den = 0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) num += (x[i] - mean) * (x[i + 1] - mean);
    for (double v : x) den += (v - mean) * (v - mean);
    return num / den;
}

double skewness(const std::vector<double>& x) {
    double mean = std::accumulate(x.begin(), x.end(), 0.0) / double(x.size());
    double m2 = 0, m3 = 0;
    for (double v : x) {
        m2 += (v - mean) * (v - mean);
        m3 += (v - mean) * (v - mean) * (v - mean);
    }
    m2 /= double(x.size());
    m3 /= double(x.size());
    return m3 / std::pow(m2, 1.5);
}

double kurtosis(const std::vector<double>& x) {
    double mean = std::accumulate(x.begin(), x.end(), 0.0) / double(x.size());
    double m2 = 0, m4 = 0;
    for (double v : x) {
        m2 += (v - mean) * (v - mean);
        m4 += std::pow(v - mean, 4);
    }
    return x.size() * m4 / (m2 * m2);
}

double periodogram_rel_rms(const std::vector<double>& a, const std::vector<double>& b) {
    auto pa = periodogram(a);
    auto pb = periodogram(b);
    double num = 0, den = 0;
    for (std::size_t k = 1; k < pa.size(); ++k) {
        num += (pa[k] - pb[k]) * (pa[k] - pb[k]);
        den += pa[k] * pa[k];
    }
    return std::sqrt(num / den);
}

double delta_alpha_mfdfa(const Series& x) {
    auto scales =
        make_scales(x.size(), ScaleSpacing::geometric, 16, x.size() / 8, std::sqrt(2.0));
    auto surf = detrended_fluctuation(x, scales, make_moments(-4.0, 4.0, 0.5), DetrendConfig{});
    return surface_exponents(surf).widths.delta_alpha;
}

} // namespace

TEST_CASE("shuffle: multiset exactness, determinism, decorrelation") {
    auto x = gen_fgn(0.9, 1 << 14, 3);
    auto s1 = shuffle_surrogate(x, 42);
    auto s2 = shuffle_surrogate(x, 42);
    auto s3 = shuffle_surrogate(x, 43);

    CHECK(same_multiset(x.values, s1.values));
    bool deterministic = s1.values == s2.values;
    CHECK(deterministic);
    bool differs = s1.values != s3.values;
    CHECK(differs);
    CHECK(std::abs(lag1_autocorr(s1.values)) < 2.0 / std::sqrt(double(x.size())));
}

TEST_CASE("phase randomization preserves the periodogram exactly") {
    // strongly skewed input
    auto base = gen_fgn(0.7, 1 << 14, 5);
    Series x = base;
    for (auto& v : x.values) v = std::exp(v);
    CHECK(std::abs(skewness(x.values)) > 1.0);

    auto sur = ft_phase_surrogate(x, 7);
    CHECK(sur.size() == x.size());
    CHECK(periodogram_rel_rms(x.values, sur.values) < 1e-9);
    CHECK(std::abs(skewness(sur.values)) < 0.2); // gaussianized marginal

    // odd length: no Nyquist bin, contract still exact
    Series odd = x;
    odd.values.resize((1 << 14) - 1);
    auto sur_odd = ft_phase_surrogate(odd, 9);
    CHECK(periodogram_rel_rms(odd.values, sur_odd.values) < 1e-9);
}

TEST_CASE("AAFT keeps the multiset exactly") {
    auto x = gen_mrw(MrwSpec{0.05, 1.0, 1 << 12, 1 << 12, 11});
    auto sur = aaft_surrogate(x, 13);
    CHECK(same_multiset(x.values, sur.values));
}

TEST_CASE("IAAFT: multiset exact and periodogram within 1%") {
    auto x = gen_fgn(0.8, 1 << 14, 17);
    auto res = iaaft_surrogate(x, 19, 200, 1e-8);
    CHECK(same_multiset(x.values, res.series.values));
    CHECK(res.iterations <= 200);
    CHECK(periodogram_rel_rms(x.values, res.series.values) < 0.01);
    // reported error agrees with a direct recomputation
    CHECK(res.periodogram_rel_rms ==
          doctest::Approx(periodogram_rel_rms(x.values, res.series.values)).epsilon(1e-6));
}

TEST_CASE("IAAFT error is non-increasing with the iteration budget") {
    auto x = gen_mrw(MrwSpec{0.05, 1.0, 1 << 12, 1 << 12, 3});
    double prev = 1e9;
    for (std::size_t iters : {1u, 5u, 20u, 80u}) {
        auto res = iaaft_surrogate(x, 7, iters, 1e-12);
        CHECK(res.periodogram_rel_rms <= prev + 1e-15);
        prev = res.periodogram_rel_rms;
    }
}

TEST_CASE("IAAFT removes the nonlinear part of a cascade walk") {
    auto m = gen_binomial(0.3, 14);
    auto walk = make_series(m.values, Role::increments, "binwalk");
    double width_raw = delta_alpha_mfdfa(walk);
    auto sur = iaaft_surrogate(walk, 23, 100, 1e-7);
    double width_sur = delta_alpha_mfdfa(sur.series);
    CHECK(width_sur < width_raw);
}

TEST_CASE("rank remap: order preserved, law reshaped, variance matched") {
    auto x = gen_mrw(MrwSpec{0.05, 1.0, 1 << 13, 1 << 13, 29});
    auto gauss = rank_remap_surrogate(x, {TargetLaw::gaussian, 0, 0}, 31);

    // identical rank ordering
    for (std::size_t i = 1; i < x.size(); ++i) {
        bool same_order = (x.values[i] > x.values[i - 1]) == (gauss.values[i] > gauss.values[i - 1]);
        CHECK(same_order);
    }

    // variance matched to the source
    auto var = [](const std::vector<double>& v) {
        double mean = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
        double acc = 0;
        for (double y : v) acc += (y - mean) * (y - mean);
        return acc / double(v.size());
    };
    CHECK(var(gauss.values) == doctest::Approx(var(x.values)).epsilon(1e-9));

    // gaussian remap of a gaussian input: Q-Q correlation > 0.999
    auto g0 = gen_fgn(0.5, 1 << 13, 33);
    auto g1 = rank_remap_surrogate(g0, {TargetLaw::gaussian, 0, 0}, 35);
    std::vector<double> a(g0.values), b(g1.values);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double ma = std::accumulate(a.begin(), a.end(), 0.0) / double(a.size());
    double mb = std::accumulate(b.begin(), b.end(), 0.0) / double(b.size());
    double num = 0, da = 0, db = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - ma) * (b[i] - mb);
        da += (a[i] - ma) * (a[i] - ma);
        db += (b[i] - mb) * (b[i] - mb);
    }
    CHECK(num / std::sqrt(da * db) > 0.999);

    // student t3 target: heavier tails than the gaussian remap
    auto t3 = rank_remap_surrogate(g0, {TargetLaw::student, 0, 3.0}, 37);
    CHECK(kurtosis(t3.values) > kurtosis(g1.values));

    CHECK_THROWS_AS(rank_remap_surrogate(g0, {TargetLaw::student, 0, -1.0}, 1),
                    std::invalid_argument);
}

TEST_CASE("ensembles: distinctness and reproducibility") {
    auto x = gen_fgn(0.5, 1 << 10, 39);
    SurrogateMethod shuffle_method{SurrogateMethod::Kind::shuffle, 0, 0, {}};
    auto ens = make_ensemble(x, shuffle_method, 100, 1000);
    REQUIRE(ens.replicates.size() == 100);
    for (std::size_t i = 1; i < ens.replicates.size(); ++i) {
        bool distinct = ens.replicates[i].values != ens.replicates[0].values;
        CHECK(distinct);
    }

    auto again = make_ensemble(x, shuffle_method, 100, 1000);
    for (std::size_t i = 0; i < ens.replicates.size(); ++i) {
        bool same = ens.replicates[i].values == again.replicates[i].values;
        CHECK(same);
    }

    auto singleton = make_ensemble(x, shuffle_method, 1, 5);
    CHECK(singleton.replicates.size() == 1);
}
