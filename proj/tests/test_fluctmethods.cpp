#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mfa/fluctmethods.hpp"
#include "mfa/generators.hpp"
#include "mfa/grids.hpp"
#include "mfa/inference.hpp"
#include "mfa/rng.hpp"

using namespace mfa;

namespace {

Series cumsum_levels(const Series& increments) {
    return make_series(cumulative_sum(increments.values), Role::levels,
                       increments.name + ":path");
}

double grid_value(const MfSpectrum& spec, const std::vector<double>& row, double q) {
    auto it = std::find_if(spec.q.begin(), spec.q.end(),
                           [&](double v) { return std::abs(v - q) < 1e-9; });
    REQUIRE(it != spec.q.end());
    return row[std::size_t(it - spec.q.begin())];
}

} // namespace

TEST_CASE("structure functions: K(0,s)=1 and the Brownian exponent") {
    auto path = cumsum_levels(gen_fgn(0.5, 1 << 16, 5));
    auto scales =
        make_scales(path.size(), ScaleSpacing::geometric, 4, path.size() / 16, std::sqrt(2.0));
    auto surf = structure_function(path, scales, make_moments(0.0, 4.0, 0.5));
    for (std::size_t is = 0; is < surf.scales.size(); ++is)
        CHECK(surf.log_f[0][is] == doctest::Approx(0.0)); // K(0,s) = 1

    auto spec = surface_exponents(surf);
    CHECK(grid_value(spec, spec.tau, 2.0) + 1.0 == doctest::Approx(1.0).epsilon(0.05));

    CHECK_THROWS_WITH_AS(structure_function(path, scales, make_moments(-1.0, 1.0, 0.5)),
                         doctest::Contains("q < 0"), std::invalid_argument);
}

TEST_CASE("extended self-similarity") {
    auto path = cumsum_levels(gen_fgn(0.5, 1 << 15, 8));
    auto scales =
        make_scales(path.size(), ScaleSpacing::geometric, 4, path.size() / 16, std::sqrt(2.0));
    auto surf = structure_function(path, scales, make_moments(0.0, 4.0, 0.5));

    // xi(q0, q0) = 1 exactly
    CHECK(ess(surf, 2.0, 2.0).exponent == doctest::Approx(1.0).epsilon(1e-12));

    // monofractal: xi(q, 2) = q/2
    for (double q : {1.0, 3.0, 4.0})
        CHECK(ess(surf, q, 2.0).exponent == doctest::Approx(q / 2.0).epsilon(0.05 / (q / 2.0)));

    // MRW: xi(4,2) = zeta(4)/zeta(2) = 1.8 +- 0.1 at lambda2 = 0.05
    MrwSpec mspec;
    mspec.lambda2 = 0.05;
    mspec.n = 1 << 16;
    mspec.integral_scale = 1 << 16;
    mspec.seed = 12;
    auto mpath = cumsum_levels(gen_mrw(mspec));
    auto msurf = structure_function(
        mpath, make_scales(mpath.size(), ScaleSpacing::geometric, 4, 1 << 12, std::sqrt(2.0)),
        make_moments(0.0, 4.0, 0.5));
    CHECK(ess(msurf, 4.0, 2.0).exponent == doctest::Approx(1.8).epsilon(0.1 / 1.8));
}

TEST_CASE("exit times: deterministic ramp and monotone moments") {
    std::vector<double> ramp(64);
    std::iota(ramp.begin(), ramp.end(), 0.0);
    auto x = make_series(ramp, Role::levels, "ramp");
    auto set = exit_times(x, {3.0}, ExitDirection::gain);
    for (auto t : set.times[0]) CHECK(t == 3);

    // loss direction on a falling ramp
    std::vector<double> fall(ramp.rbegin(), ramp.rend());
    auto set_loss =
        exit_times(make_series(fall, Role::levels, "fall"), {2.0}, ExitDirection::loss);
    for (auto t : set_loss.times[0]) CHECK(t == 2);

    // T_1 increases with the threshold on any path
    auto brownian = cumsum_levels(gen_fgn(0.5, 1 << 14, 3));
    std::vector<double> thresholds{0.5, 1.0, 2.0, 4.0, 8.0};
    auto bset = exit_times(brownian, thresholds, ExitDirection::gain);
    auto isf = inverse_sf(bset, {1.0});
    for (std::size_t i = 1; i < thresholds.size(); ++i)
        CHECK(isf.log_tp[0][i] > isf.log_tp[0][i - 1]);
}

TEST_CASE("exit times: Brownian most-probable horizon scales as threshold^2") {
    auto brownian = cumsum_levels(gen_fgn(0.5, 1 << 16, 23));
    std::vector<double> thresholds;
    for (double t = 4.0; t <= 64.0; t *= std::sqrt(2.0)) thresholds.push_back(t);
    auto set = exit_times(brownian, thresholds, ExitDirection::gain);
    auto modes = most_probable_exit(set);
    auto fit = fit_loglog(thresholds, modes);
    CHECK(fit.exponent == doctest::Approx(2.0).epsilon(0.3 / 2.0));
}

TEST_CASE("MF-FA: fGn slope and degenerate input") {
    auto path = cumsum_levels(gen_fgn(0.7, 1 << 16, 9));
    auto scales =
        make_scales(path.size(), ScaleSpacing::geometric, 4, path.size() / 16, std::sqrt(2.0));
    auto surf = mf_fa(path, scales, make_moments({2.0}));
    auto fit = fit_logx_liny(std::vector<double>(surf.scales.begin(), surf.scales.end()),
                             surf.log_f[0]);
    // Z(2,s) ~ s^{2H}
    CHECK(fit.exponent == doctest::Approx(1.4).epsilon(0.1 / 1.4));

    std::vector<double> constant(256, 5.0);
    CHECK_THROWS_AS(
        mf_fa(make_series(constant, Role::levels, "const"), make_scales(256, ScaleSpacing::dyadic, 4, 32),
              make_moments({2.0})),
        std::domain_error);

    // binomial walk: h(q) decreasing in q
    auto m = gen_binomial(0.3, 14);
    Series walk = cumsum_levels(make_series(m.values, Role::increments, "binwalk"));
    auto bscales = make_scales(walk.size(), ScaleSpacing::dyadic, 4, walk.size() / 8);
    auto bsurf = mf_fa(walk, bscales, make_moments(0.5, 4.0, 0.5));
    auto bspec = surface_exponents(bsurf);
    for (std::size_t i = 1; i < bspec.h.size(); ++i) CHECK(bspec.h[i] <= bspec.h[i - 1] + 0.01);
}

TEST_CASE("MF-DFA: white-noise Hurst and the binomial oracle") {
    auto fgn = gen_fgn(0.5, 1 << 16, 41);
    auto scales =
        make_scales(fgn.size(), ScaleSpacing::geometric, 16, fgn.size() / 16, std::sqrt(2.0));
    auto surf = detrended_fluctuation(fgn, scales, make_moments({2.0}), DetrendConfig{});
    auto spec = surface_exponents(surf);
    CHECK(spec.h[0] == doctest::Approx(0.5).epsilon(0.03 / 0.5));

    // binomial measure as increments, dyadic scales; the smallest boxes carry
    // a detrending transient, so the floor starts at 2^7
    auto m = gen_binomial(0.3, 19);
    auto bscales = make_scales(m.size(), ScaleSpacing::dyadic, 128, m.size() / 16);
    auto bsurf = detrended_fluctuation(m, bscales, make_moments(-4.0, 4.0, 0.5), DetrendConfig{});
    auto bspec = surface_exponents(bsurf);
    double worst = 0.0;
    for (std::size_t iq = 0; iq < bspec.q.size(); ++iq)
        worst = std::max(worst, std::abs(bspec.tau[iq] - oracle_binomial_tau(0.3, bspec.q[iq])));
    CHECK(worst < 0.05);

    // h(q) non-increasing on the cascade within fit noise
    for (std::size_t i = 1; i < bspec.h.size(); ++i) CHECK(bspec.h[i] <= bspec.h[i - 1] + 0.01);
}

TEST_CASE("q -> 0 continuity of the detrended fluctuation") {
    auto fgn = gen_fgn(0.6, 1 << 14, 77);
    auto scales =
        make_scales(fgn.size(), ScaleSpacing::geometric, 16, fgn.size() / 8, std::sqrt(2.0));
    auto surf =
        detrended_fluctuation(fgn, scales, make_moments({-0.01, 0.0, 0.01}), DetrendConfig{});
    for (std::size_t is = 0; is < surf.scales.size(); ++is) {
        double lo = surf.log_f[0][is], mid = surf.log_f[1][is], hi = surf.log_f[2][is];
        CHECK(lo <= mid + 1e-12);
        CHECK(mid <= hi + 1e-12);
        CHECK(std::abs(hi - lo) < 0.005); // brackets within 0.5%
    }
}

TEST_CASE("translation invariance: DFA and centered DMA, not backward DMA") {
    auto fgn = gen_fgn(0.5, 1 << 13, 15);
    Series shifted = fgn;
    for (auto& v : shifted.values) v += 0.35;

    auto scales =
        make_scales(fgn.size(), ScaleSpacing::geometric, 8, fgn.size() / 8, std::sqrt(2.0));
    auto qs = make_moments({2.0});

    for (DetrendConfig cfg :
         {DetrendConfig{Detrender::dfa, 1, 0.0, Covering::both_ends},
          DetrendConfig{Detrender::dma, 1, 0.5, Covering::both_ends}}) {
        auto a = detrended_fluctuation(fgn, scales, qs, cfg);
        auto b = detrended_fluctuation(shifted, scales, qs, cfg);
        for (std::size_t is = 0; is < scales.size(); ++is)
            CHECK(std::abs(a.log_f[0][is] - b.log_f[0][is]) < 1e-10);
    }

    DetrendConfig backward{Detrender::dma, 1, 0.0, Covering::both_ends};
    auto a = detrended_fluctuation(fgn, scales, qs, backward);
    auto b = detrended_fluctuation(shifted, scales, qs, backward);
    double max_diff = 0.0;
    for (std::size_t is = 0; is < scales.size(); ++is)
        max_diff = std::max(max_diff, std::abs(a.log_f[0][is] - b.log_f[0][is]));
    CHECK(max_diff > 0.1); // the constant shift must show up
}

TEST_CASE("backward-DMA shift-induced crossover matches the closed form within 2x") {
    const double shift = 0.05;
    auto fgn = gen_fgn(0.5, 1 << 15, 29);
    Series shifted = fgn;
    for (auto& v : shifted.values) v += shift;

    auto scales =
        make_scales(fgn.size(), ScaleSpacing::geometric, 8, fgn.size() / 8, std::pow(2.0, 0.25));
    auto qs = make_moments({2.0});
    DetrendConfig backward{Detrender::dma, 1, 0.0, Covering::both_ends};

    auto clean = detrended_fluctuation(fgn, scales, qs, backward);
    auto bent = detrended_fluctuation(shifted, scales, qs, backward);

    // b0 from the clean backward-DMA fluctuation
    std::vector<double> xs(scales.scales.begin(), scales.scales.end());
    auto fit = fit_logx_liny(xs, clean.log_f[0]);
    double b0 = std::exp(fit.intercept);
    double s_pred = std::pow(2.0 * b0 / shift, 1.0 / (1.0 - 0.5));

    auto cross = fit_crossover(xs, bent.log_f[0]);
    CHECK(cross.s_cross > 0.5 * s_pred);
    CHECK(cross.s_cross < 2.0 * s_pred);
}

TEST_CASE("DFA absorbs polynomial trends below its order") {
    auto fgn = gen_fgn(0.5, 1 << 13, 19);
    // quadratic added to the profile == its increment added to the series
    Series trended = fgn;
    const auto n = static_cast<double>(fgn.size());
    for (std::size_t i = 0; i < trended.size(); ++i) {
        double t1 = double(i + 1) / n, t0 = double(i) / n;
        trended.values[i] += 5.0 * (t1 * t1 - t0 * t0);
    }
    auto scales =
        make_scales(fgn.size(), ScaleSpacing::geometric, 16, fgn.size() / 8, std::sqrt(2.0));
    auto qs = make_moments({2.0});
    DetrendConfig dfa2{Detrender::dfa, 2, 0.0, Covering::both_ends};
    auto a = detrended_fluctuation(fgn, scales, qs, dfa2);
    auto b = detrended_fluctuation(trended, scales, qs, dfa2);
    for (std::size_t is = 0; is < scales.size(); ++is)
        CHECK(std::abs(a.log_f[0][is] - b.log_f[0][is]) < 1e-9);
}

TEST_CASE("superposition law for independent components") {
    auto x = gen_fgn(0.5, 1 << 15, 101);
    auto u = gen_fgn(0.8, 1 << 15, 202);
    Series z = x;
    for (std::size_t i = 0; i < z.size(); ++i) z.values[i] += u.values[i];

    auto scales = make_scales(x.size(), ScaleSpacing::geometric, 16, x.size() / 8, std::sqrt(2.0));
    auto qs = make_moments({2.0});
    auto fx = detrended_fluctuation(x, scales, qs, DetrendConfig{});
    auto fu = detrended_fluctuation(u, scales, qs, DetrendConfig{});
    auto fz = detrended_fluctuation(z, scales, qs, DetrendConfig{});

    double mean_resid = 0.0;
    for (std::size_t is = 0; is < scales.size(); ++is) {
        double f2x = std::exp(2.0 * fx.log_f[0][is]);
        double f2u = std::exp(2.0 * fu.log_f[0][is]);
        double f2z = std::exp(2.0 * fz.log_f[0][is]);
        mean_resid += std::abs(f2z - f2x - f2u) / f2z;
    }
    mean_resid /= double(scales.size());
    CHECK(mean_resid < 0.05);
}

TEST_CASE("direct detrended spectrum agrees with the closed forms") {
    auto m = gen_binomial(0.35, 16);
    auto scales = make_scales(m.size(), ScaleSpacing::dyadic, 16, m.size() / 16);
    auto qs = make_moments(-4.0, 4.0, 0.5);
    auto d = detrended_direct_spectrum(m, scales, qs, DetrendConfig{});
    double worst_a = 0.0, f_at_0 = 0.0;
    for (std::size_t iq = 0; iq < d.q.size(); ++iq) {
        worst_a = std::max(worst_a, std::abs(d.alpha[iq] - oracle_binomial_alpha(0.35, d.q[iq])));
        if (d.q[iq] == 0.0) f_at_0 = d.f[iq];
    }
    CHECK(worst_a < 0.05);
    CHECK(f_at_0 == doctest::Approx(1.0).epsilon(0.05));

    // monofractal control: alpha(q) flat within 0.05
    auto fgn = gen_fgn(0.5, 1 << 15, 55);
    auto gscales =
        make_scales(fgn.size(), ScaleSpacing::geometric, 16, fgn.size() / 16, std::sqrt(2.0));
    auto g = detrended_direct_spectrum(fgn, gscales, make_moments(-2.0, 2.0, 0.5),
                                       DetrendConfig{});
    auto [lo, hi] = std::minmax_element(g.alpha.begin(), g.alpha.end());
    CHECK(*hi - *lo < 0.05 * 2.0);
}

TEST_CASE("asymmetric MF-DFA") {
    // symmetric fGn: the two exponents agree on average over 20 seeds
    double mean_gap = 0.0;
    for (int sd = 0; sd < 20; ++sd) {
        auto fgn = gen_fgn(0.5, 1 << 13, 900 + sd);
        auto scales =
            make_scales(fgn.size(), ScaleSpacing::geometric, 16, fgn.size() / 16, std::sqrt(2.0));
        auto res = asym_detrended(fgn, scales, make_moments({2.0}));
        double hp = surface_exponents(res.plus).h[0];
        double hm = surface_exponents(res.minus).h[0];
        mean_gap += hp - hm;
    }
    mean_gap = std::abs(mean_gap / 20.0);
    CHECK(mean_gap < 0.05);

    // sawtooth with asymmetric flanks: 7 rising steps, 1 large fall
    std::vector<double> saw;
    for (int rep = 0; rep < 512; ++rep) {
        for (int i = 0; i < 7; ++i) saw.push_back(1.0);
        saw.push_back(-7.0);
    }
    auto x = make_series(saw, Role::increments, "saw");
    ScaleGrid sg;
    sg.scales = {8};
    auto res = asym_detrended(x, sg, make_moments({2.0}));
    CHECK(res.plus_count[0] + res.minus_count[0] == saw.size() / 8);
    CHECK(res.plus_count[0] > 0);

    // all-increasing ramp: the falling class is empty and flagged
    std::vector<double> up(4096, 1.0);
    Rng rng(4);
    for (auto& v : up) v += 0.01 * rng.gaussian();
    auto ramp = make_series(up, Role::increments, "ramp");
    auto rscales = make_scales(ramp.size(), ScaleSpacing::dyadic, 8, 512);
    auto rres = asym_detrended(ramp, rscales, make_moments({2.0}));
    bool some_empty = false;
    for (auto c : rres.minus_count) some_empty |= (c == 0);
    CHECK(some_empty);
    CHECK(!rres.minus.excluded_cells.empty());
}

TEST_CASE("local Hurst surface (MMA)") {
    // exact power law: constant h
    FluctuationSurface surf;
    surf.kind = SurfaceKind::box_rms;
    surf.qs = {2.0};
    for (double s = 8; s <= 4096; s *= std::sqrt(2.0))
        surf.scales.push_back(std::size_t(std::llround(s)));
    surf.log_f.assign(1, {});
    for (auto s : surf.scales) surf.log_f[0].push_back(0.62 * std::log(double(s)) - 1.0);
    auto lh = local_hurst(surf, 4, 1);
    for (double h : lh.h[0]) CHECK(h == doctest::Approx(0.62).epsilon(1e-9));

    // two-regime synthetic: the step is resolved within a window width
    FluctuationSurface two = surf;
    two.log_f[0].clear();
    for (auto s : two.scales) {
        double ls = std::log(double(s));
        double cross = std::log(256.0);
        two.log_f[0].push_back(ls < cross ? 0.9 * ls : 0.9 * cross + 0.3 * (ls - cross));
    }
    auto lh2 = local_hurst(two, 3, 1);
    CHECK(lh2.h[0].front() == doctest::Approx(0.9).epsilon(1e-6));
    CHECK(lh2.h[0].back() == doctest::Approx(0.3).epsilon(1e-6));

    // binomial measure on a non-dyadic grid: log-periodic wobble visible
    auto m = gen_binomial(0.3, 16);
    auto gscales =
        make_scales(m.size(), ScaleSpacing::geometric, 16, m.size() / 16, std::pow(2.0, 1.0 / 3));
    auto msurf = detrended_fluctuation(m, gscales, make_moments({2.0}), DetrendConfig{});
    auto mlh = local_hurst(msurf, 4, 1);
    double mean = std::accumulate(mlh.h[0].begin(), mlh.h[0].end(), 0.0) / double(mlh.h[0].size());
    double var = 0.0;
    for (double h : mlh.h[0]) var += (h - mean) * (h - mean);
    CHECK(std::sqrt(var / double(mlh.h[0].size())) > 0.01);
}

TEST_CASE("wavelet leaders: fGn exponent and the binomial oracle") {
    auto fgn = gen_fgn(0.5, 1 << 16, 61);
    auto wl = wavelet_leaders(fgn, make_moments({1.0, 2.0, 3.0}));
    CHECK(grid_value(wl.spectrum, wl.spectrum.tau, 2.0) + 1.0 ==
          doctest::Approx(1.0).epsilon(0.1));

    auto m = gen_binomial(0.3, 18);
    auto wlb = wavelet_leaders(make_series(m.values, Role::increments, "bin"),
                               make_moments(-2.0, 4.0, 0.5), 4);
    double worst = 0.0;
    for (std::size_t iq = 0; iq < wlb.spectrum.q.size(); ++iq) {
        double zeta_minus_1 = wlb.spectrum.tau[iq];
        worst = std::max(worst,
                         std::abs(zeta_minus_1 - oracle_binomial_tau(0.3, wlb.spectrum.q[iq])));
    }
    CHECK(worst < 0.08);

    // pad-or-truncate policy is flagged
    auto odd = gen_fgn(0.5, (1 << 14) + 100, 3);
    auto wodd = wavelet_leaders(odd, make_moments({2.0}));
    CHECK(wodd.truncated_to == (1 << 14));
    CHECK(!wodd.surface.warnings.empty());

    std::vector<double> tiny(64, 1.0);
    tiny[3] = 2.0;
    CHECK_THROWS_AS(wavelet_leaders(make_series(tiny, Role::increments, "tiny"),
                                    make_moments({2.0})),
                    std::invalid_argument);
}
