#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mfa/boxmethods.hpp"
#include "mfa/generators.hpp"
#include "mfa/grids.hpp"
#include "mfa/rng.hpp"

using namespace mfa;

namespace {

Series uniform_measure(std::size_t n) {
    return make_series(std::vector<double>(n, 1.0 / double(n)), Role::measure, "uniform");
}

} // namespace

TEST_CASE("partition function: uniform measure gives tau = q - 1 exactly") {
    auto m = uniform_measure(1 << 12);
    auto scales = make_scales(m.size(), ScaleSpacing::dyadic, 4, m.size() / 4);
    auto qs = make_moments(-3.0, 3.0, 0.5);
    auto ps = partition_function(m, scales, qs);
    auto spec = mass_exponents(ps);
    for (std::size_t iq = 0; iq < spec.q.size(); ++iq) {
        CHECK(spec.tau[iq] == doctest::Approx(spec.q[iq] - 1.0).epsilon(1e-10));
        CHECK(spec.d_q[iq] == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("partition function: chi(1,s)=1 and chi(0,s) is the box count") {
    auto m = gen_binomial(0.3, 12);
    auto scales = make_scales(m.size(), ScaleSpacing::dyadic, 4, m.size() / 4);
    auto qs = make_moments({-1.0, 0.0, 1.0});
    auto ps = partition_function(m, scales, qs);
    for (std::size_t is = 0; is < scales.size(); ++is) {
        CHECK(ps.log_chi[2][is] == doctest::Approx(0.0).epsilon(1e-12)); // mass conservation
        double count = std::exp(ps.log_chi[1][is]);
        CHECK(count == doctest::Approx(double(m.size() / scales.scales[is])).epsilon(1e-9));
    }
}

TEST_CASE("partition function: binomial tau matches the closed form over q in [-10,10]") {
    auto m = gen_binomial(0.3, 16);
    auto scales = make_scales(m.size(), ScaleSpacing::dyadic, 4, m.size() / 4);
    auto qs = make_moments(-10.0, 10.0, 0.5);
    auto spec = mass_exponents(partition_function(m, scales, qs));
    double worst = 0.0;
    for (std::size_t iq = 0; iq < spec.q.size(); ++iq)
        worst = std::max(worst, std::abs(spec.tau[iq] - oracle_binomial_tau(0.3, spec.q[iq])));
    CHECK(worst < 0.02); // dyadic covering of an exact cascade: machine-level
    CHECK(worst < 1e-9);

    // D_0 = 1 and the D_1 = alpha(1) = f(alpha(1)) fixed point
    auto i0 = std::find(spec.q.begin(), spec.q.end(), 0.0) - spec.q.begin();
    auto i1 = std::find(spec.q.begin(), spec.q.end(), 1.0) - spec.q.begin();
    CHECK(spec.d_q[std::size_t(i0)] == doctest::Approx(1.0).epsilon(1e-9));
    double d1 = spec.d_q[std::size_t(i1)];
    CHECK(d1 == doctest::Approx(oracle_binomial_alpha(0.3, 1.0)).epsilon(1e-6));
    // fixed point up to the finite-difference step of the Legendre pair
    CHECK(spec.f_alpha[std::size_t(i1)] == doctest::Approx(d1).epsilon(0.01));
}

TEST_CASE("partition function: tau(q) non-decreasing and concave on cascades") {
    auto m = gen_lognormal_cascade(-0.9, 0.25, 14, 19);
    auto scales = make_scales(m.size(), ScaleSpacing::dyadic, 8, m.size() / 8);
    auto qs = make_moments(-4.0, 4.0, 0.25);
    auto spec = mass_exponents(partition_function(m, scales, qs));
    for (std::size_t i = 1; i < spec.tau.size(); ++i) CHECK(spec.tau[i] >= spec.tau[i - 1]);
    for (std::size_t i = 1; i + 1 < spec.tau.size(); ++i) {
        double second = spec.tau[i + 1] - 2.0 * spec.tau[i] + spec.tau[i - 1];
        CHECK(second <= 0.01);
    }
}

TEST_CASE("partition function: zero-mass boxes follow the policy") {
    std::vector<double> v(1 << 10, 0.0);
    for (std::size_t i = 0; i < v.size(); i += 2) v[i] = 1.0; // half the boxes empty at s=1... s=2 groups both
    // make quarter-boxes empty at scale 4: zero out one 256-sample block
    for (std::size_t i = 256; i < 512; ++i) v[i] = 0.0;
    auto m = make_series(v, Role::measure, "gappy");
    ScaleGrid g;
    g.scales = {4};
    auto qs = make_moments({-1.0, 1.0});
    auto ps = partition_function(m, g, qs);
    CHECK(!ps.warnings.empty()); // exclusions reported

    PartitionOptions strict;
    strict.zero_policy = ZeroBoxPolicy::error;
    CHECK_THROWS_AS(partition_function(m, g, qs, strict), std::domain_error);
}

TEST_CASE("partition function: scale must divide N unless continuous covering") {
    auto m = uniform_measure(1000);
    ScaleGrid bad;
    bad.scales = {7};
    auto qs = make_moments({1.0, 2.0});
    CHECK_THROWS_WITH_AS(partition_function(m, bad, qs), doctest::Contains("divide"),
                         std::invalid_argument);

    PartitionOptions opts;
    opts.continuous_covering = true;
    auto ps = partition_function(m, bad, qs, opts);
    CHECK(std::isfinite(ps.log_chi[0][0]));
}

TEST_CASE("partition function precision invariant: rescaled == direct") {
    auto m = gen_binomial(0.4, 10);
    auto scales = make_scales(m.size(), ScaleSpacing::dyadic, 4, m.size() / 4);
    auto qs = make_moments(-2.0, 2.0, 0.5);
    PartitionOptions direct;
    direct.max_rescaling = false;
    auto a = partition_function(m, scales, qs);
    auto b = partition_function(m, scales, qs, direct);
    for (std::size_t iq = 0; iq < qs.qs.size(); ++iq)
        for (std::size_t is = 0; is < scales.size(); ++is)
            CHECK(a.log_chi[iq][is] == doctest::Approx(b.log_chi[iq][is]).epsilon(1e-12));
}

TEST_CASE("direct determination matches the closed forms for m = 0.35") {
    auto m = gen_binomial(0.35, 16);
    auto scales = make_scales(m.size(), ScaleSpacing::dyadic, 4, m.size() / 4);
    auto qs = make_moments(-5.0, 5.0, 0.5);
    auto d = direct_spectrum(m, scales, qs);
    double worst_a = 0, worst_f = 0;
    for (std::size_t iq = 0; iq < d.q.size(); ++iq) {
        worst_a = std::max(worst_a, std::abs(d.alpha[iq] - oracle_binomial_alpha(0.35, d.q[iq])));
        worst_f = std::max(worst_f, std::abs(d.f[iq] - oracle_binomial_f(0.35, d.q[iq])));
    }
    CHECK(worst_a < 0.02);
    CHECK(worst_f < 0.02);

    auto i0 = std::find(d.q.begin(), d.q.end(), 0.0) - d.q.begin();
    CHECK(d.f[std::size_t(i0)] == doctest::Approx(1.0).epsilon(0.02)); // support dimension
}

TEST_CASE("direct determination: uniform measure sits at (alpha, f) = (1, 1)") {
    auto m = uniform_measure(1 << 12);
    auto scales = make_scales(m.size(), ScaleSpacing::dyadic, 4, m.size() / 4);
    auto qs = make_moments(-2.0, 2.0, 1.0);
    auto d = direct_spectrum(m, scales, qs);
    for (std::size_t iq = 0; iq < d.q.size(); ++iq) {
        CHECK(d.alpha[iq] == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(d.f[iq] == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("inverse partition function: uniform measure is exact") {
    auto m = uniform_measure(1 << 12);
    std::vector<std::size_t> js{16, 32, 64, 128, 256};
    std::vector<double> psg;
    for (double p = -3.0; p <= 3.0 + 1e-9; p += 0.5) psg.push_back(p);
    auto inv = inverse_partition(m, js, psg);
    auto fits = tau_dagger(inv);
    for (std::size_t ip = 0; ip < psg.size(); ++ip)
        CHECK(fits[ip].exponent == doctest::Approx(psg[ip] - 1.0).epsilon(1e-9));
    CHECK(inv.plateau_skips == 0);
}

TEST_CASE("inversion formula on the binomial measure") {
    auto m = gen_binomial(0.3, 18);
    auto scales = make_scales(m.size(), ScaleSpacing::dyadic, 4, m.size() / 8);
    auto qs = make_moments(0.0, 6.5, 0.25);
    auto spec = mass_exponents(partition_function(m, scales, qs));

    // dense geometric thresholds average out the log-periodic wobble of the
    // dyadic covering of the inverse cascade
    std::vector<std::size_t> js;
    for (double j = 8.0; j <= 512.0; j *= std::pow(2.0, 0.25)) {
        auto J = static_cast<std::size_t>(std::llround(j));
        if (js.empty() || J != js.back()) js.push_back(J);
    }
    std::vector<double> psg;
    for (double p = -4.5; p <= 1.5 + 1e-9; p += 0.125) psg.push_back(p);
    auto inv = inverse_partition(m, js, psg);
    auto dag_fits = tau_dagger(inv);
    std::vector<double> tau_dag(psg.size());
    for (std::size_t ip = 0; ip < psg.size(); ++ip) tau_dag[ip] = dag_fits[ip].exponent;

    double residual = invert_check(spec.q, spec.tau, psg, tau_dag, 1.0, 6.0);
    CHECK(residual < 0.05);

    // alpha(q) = 1/alpha^dag(p) spot check at q = 2: p* = -tau(2)
    double p_star = -oracle_binomial_tau(0.3, 2.0);
    auto it = std::lower_bound(psg.begin(), psg.end(), p_star);
    auto hi = std::size_t(it - psg.begin());
    double alpha_dag = (tau_dag[hi + 1] - tau_dag[hi - 1]) / (psg[hi + 1] - psg[hi - 1]);
    CHECK(1.0 / alpha_dag == doctest::Approx(oracle_binomial_alpha(0.3, 2.0)).epsilon(0.05));
}

TEST_CASE("multiplier method on the binomial measure") {
    auto m = gen_binomial(0.3, 16);
    auto qs = make_moments(-0.75, 5.0, 0.25);
    auto res = multiplier_spectrum(m, 2, qs);

    for (double mult : res.multipliers)
        CHECK((std::abs(mult - 0.3) < 1e-12 || std::abs(mult - 0.7) < 1e-12));

    for (std::size_t iq = 0; iq < res.spectrum.q.size(); ++iq) {
        double q = res.spectrum.q[iq];
        CHECK(res.spectrum.tau[iq] == doctest::Approx(oracle_binomial_tau(0.3, q)).epsilon(1e-9));
        CHECK(res.spectrum.alpha[iq] ==
              doctest::Approx(oracle_binomial_alpha(0.3, q)).epsilon(1e-9));
    }

    // base invariance: a = 2 vs a = 4
    auto res4 = multiplier_spectrum(m, 4, qs);
    for (std::size_t iq = 0; iq < qs.qs.size(); ++iq)
        CHECK(std::abs(res.spectrum.tau[iq] - res4.spectrum.tau[iq]) < 0.03);
    CHECK(multiplier_base_gap(m, 2, 4, qs) < 0.03);

    auto bad = make_moments(-2.0, 2.0, 1.0);
    CHECK_THROWS_WITH_AS(multiplier_spectrum(m, 2, bad), doctest::Contains("diverge"),
                         std::invalid_argument);
}

TEST_CASE("multiplier method on the uniform measure") {
    auto m = uniform_measure(1 << 12);
    auto qs = make_moments(-0.5, 4.0, 0.5);
    auto res = multiplier_spectrum(m, 2, qs);
    for (std::size_t iq = 0; iq < qs.qs.size(); ++iq)
        CHECK(res.spectrum.tau[iq] == doctest::Approx(qs.qs[iq] - 1.0).epsilon(1e-9));
}

TEST_CASE("ensemble tau: identical copies collapse to the single-series fit") {
    auto m = gen_binomial(0.3, 12);
    std::vector<Series> copies{m, m, m};
    auto scales = make_scales(m.size(), ScaleSpacing::dyadic, 4, m.size() / 4);
    auto qs = make_moments(-3.0, 3.0, 0.5);
    auto ens = ensemble_tau(copies, scales, qs);
    auto single = mass_exponents(partition_function(m, scales, qs));
    for (std::size_t iq = 0; iq < qs.qs.size(); ++iq) {
        CHECK(ens.quenched.tau[iq] == doctest::Approx(single.tau[iq]).epsilon(1e-10));
        CHECK(ens.annealed.tau[iq] == doctest::Approx(single.tau[iq]).epsilon(1e-10));
    }

    std::vector<Series> bad{m, uniform_measure(64)};
    CHECK_THROWS_AS(ensemble_tau(bad, scales, qs), std::invalid_argument);
}

TEST_CASE("ensemble tau: annealed beats any single realization on CRM cascades") {
    Crm crm;
    crm.rows = {{0.3, 0.7}, {0.8, 0.2}};
    crm.probs = {0.4, 0.6};
    const int reps = 200;
    std::vector<Series> ensemble;
    ensemble.reserve(reps);
    for (int r = 0; r < reps; ++r)
        ensemble.push_back(gen_stochastic_multinomial(crm, 14, 9000 + r));
    auto scales = make_scales(ensemble[0].size(), ScaleSpacing::dyadic, 8, 1 << 11);
    auto qs = make_moments(-2.0, 3.0, 0.5);
    auto ens = ensemble_tau(ensemble, scales, qs);

    auto i2 = std::find(qs.qs.begin(), qs.qs.end(), 2.0) - qs.qs.begin();
    CHECK(ens.annealed.tau[std::size_t(i2)] ==
          doctest::Approx(oracle_crm_tau(crm, 2.0)).epsilon(0.05));

    auto single = mass_exponents(partition_function(ensemble[0], scales, qs));
    double rms_ann = 0, rms_single = 0;
    for (std::size_t iq = 0; iq < qs.qs.size(); ++iq) {
        double oracle = oracle_crm_tau(crm, qs.qs[iq]);
        rms_ann += std::pow(ens.annealed.tau[iq] - oracle, 2);
        rms_single += std::pow(single.tau[iq] - oracle, 2);
    }
    CHECK(rms_ann < rms_single);
}

TEST_CASE("ensemble tau: an outlier splits annealed from quenched at large q") {
    std::vector<Series> ensemble;
    for (int r = 0; r < 10; ++r) ensemble.push_back(gen_lognormal_cascade(-0.75, 0.1, 12, 40 + r));
    ensemble.push_back(gen_binomial(0.05, 12)); // extreme realization
    auto scales = make_scales(ensemble[0].size(), ScaleSpacing::dyadic, 8, 1 << 10);
    auto qs = make_moments(1.0, 5.0, 1.0);
    auto ens = ensemble_tau(ensemble, scales, qs);
    double gap_q1 = std::abs(ens.annealed.tau.front() - ens.quenched.tau.front());
    double gap_q5 = std::abs(ens.annealed.tau.back() - ens.quenched.tau.back());
    CHECK(gap_q5 > gap_q1);
}
