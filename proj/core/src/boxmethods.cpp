#include "mfa/boxmethods.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mfa {

namespace {

// ln sum(exp(v)) with the max pulled out; this is exactly the max-rescaled
// partition sum ln sum (m/m_max)^q + q ln m_max when v = q ln m.
double logsumexp(const std::vector<double>& v) {
    if (v.empty()) return -std::numeric_limits<double>::infinity();
    double vmax = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(vmax)) return vmax;
    double acc = 0.0;
    for (double x : v) acc += std::exp(x - vmax);
    return vmax + std::log(acc);
}

std::vector<double> normalized_measure(const Series& s) {
    if (s.role != Role::measure)
        throw std::invalid_argument("expected a series with role 'measure'");
    double total = std::accumulate(s.values.begin(), s.values.end(), 0.0);
    std::vector<double> m(s.values);
    for (auto& x : m) x /= total;
    return m;
}

// Box masses at scale s. Exact summation when s divides N; interpolated
// covering with int[N/s] boxes otherwise (requires opts.continuous_covering).
std::vector<double> box_masses(const std::vector<double>& m, std::size_t s,
                               const PartitionOptions& opts) {
    const std::size_t n = m.size();
    if (s < 1 || s > n) throw std::invalid_argument("box scale out of range");
    if (n % s == 0) {
        std::size_t nb = n / s;
        std::vector<double> out(nb, 0.0);
        for (std::size_t b = 0; b < nb; ++b)
            for (std::size_t i = 0; i < s; ++i) out[b] += m[b * s + i];
        return out;
    }
    if (!opts.continuous_covering)
        throw std::invalid_argument("scale " + std::to_string(s) + " does not divide N = " +
                                    std::to_string(n) +
                                    " (enable continuous covering or use divisor scales)");
    std::size_t nb = n / s;
    std::vector<double> cum(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) cum[i + 1] = cum[i] + m[i];
    auto cum_at = [&](double t) {
        if (t <= 0.0) return 0.0;
        if (t >= static_cast<double>(n)) return cum[n];
        auto i0 = static_cast<std::size_t>(t);
        double frac = t - static_cast<double>(i0);
        return cum[i0] + frac * (cum[i0 + 1] - cum[i0]);
    };
    double width = static_cast<double>(n) / static_cast<double>(nb);
    std::vector<double> out(nb);
    for (std::size_t b = 0; b < nb; ++b)
        out[b] = cum_at(width * double(b + 1)) - cum_at(width * double(b));
    return out;
}

} // namespace

PartitionSurface partition_function(const Series& measure, const ScaleGrid& scales,
                                    const MomentGrid& qs, const PartitionOptions& opts) {
    auto m = normalized_measure(measure);
    PartitionSurface out;
    out.qs = qs.qs;
    out.scales = scales.scales;
    out.log_chi.assign(qs.qs.size(), std::vector<double>(scales.size(), 0.0));
    out.info_sum.assign(scales.size(), 0.0);

    std::size_t zero_boxes_seen = 0;
    for (std::size_t is = 0; is < scales.size(); ++is) {
        auto boxes = box_masses(m, scales.scales[is], opts);
        std::vector<double> log_m;
        log_m.reserve(boxes.size());
        for (double b : boxes) {
            if (b > 0.0) {
                log_m.push_back(std::log(b));
            } else {
                ++zero_boxes_seen;
                if (opts.zero_policy == ZeroBoxPolicy::error)
                    throw std::domain_error("empty box at scale " +
                                            std::to_string(scales.scales[is]));
            }
        }
        if (log_m.empty()) throw std::domain_error("all boxes empty");

        double info = 0.0;
        for (double lm : log_m) info += std::exp(lm) * lm;
        out.info_sum[is] = info;

        for (std::size_t iq = 0; iq < qs.qs.size(); ++iq) {
            double q = qs.qs[iq];
            if (opts.max_rescaling) {
                std::vector<double> v(log_m.size());
                for (std::size_t k = 0; k < log_m.size(); ++k) v[k] = q * log_m[k];
                out.log_chi[iq][is] = logsumexp(v);
            } else {
                double chi = 0.0;
                for (double lm : log_m) chi += std::exp(q * lm);
                out.log_chi[iq][is] = std::log(chi);
            }
        }
    }
    if (zero_boxes_seen > 0)
        out.warnings.push_back(std::to_string(zero_boxes_seen) +
                               " empty boxes excluded from the partition sums");
    return out;
}

MfSpectrum mass_exponents(const PartitionSurface& ps, FitRange range) {
    std::vector<double> xs(ps.scales.begin(), ps.scales.end());
    std::vector<double> tau(ps.qs.size());
    std::vector<ScalingFit> fits(ps.qs.size());
    for (std::size_t iq = 0; iq < ps.qs.size(); ++iq) {
        try {
            fits[iq] = fit_logx_liny(xs, ps.log_chi[iq], range);
        } catch (const std::exception& e) {
            throw std::domain_error("mass_exponents: fit failed at q = " +
                                    std::to_string(ps.qs[iq]) + ": " + e.what());
        }
        tau[iq] = fits[iq].exponent;
    }
    MfSpectrum spec = spectrum_from_tau(ps.qs, tau, "mf-pf");
    spec.fits = std::move(fits);
    for (const auto& w : ps.warnings) spec.warnings.push_back(w);

    // Information-dimension limit at q = 1 from the sum m ln m scaling.
    for (std::size_t iq = 0; iq < spec.q.size(); ++iq) {
        if (std::abs(spec.q[iq] - 1.0) < 1e-9) {
            ScalingFit d1 = fit_logx_liny(xs, ps.info_sum, range);
            spec.d_q[iq] = d1.exponent;
        }
    }
    return spec;
}

DirectSpectrum direct_spectrum(const Series& measure, const ScaleGrid& scales,
                               const MomentGrid& qs, FitRange range,
                               const PartitionOptions& opts) {
    auto m = normalized_measure(measure);
    const std::size_t nq = qs.qs.size();
    const std::size_t ns = scales.size();

    std::vector<std::vector<double>> num_alpha(nq, std::vector<double>(ns, 0.0));
    std::vector<std::vector<double>> num_f(nq, std::vector<double>(ns, 0.0));

    for (std::size_t is = 0; is < ns; ++is) {
        auto boxes = box_masses(m, scales.scales[is], opts);
        std::vector<double> log_m;
        log_m.reserve(boxes.size());
        for (double b : boxes)
            if (b > 0.0) log_m.push_back(std::log(b));
        if (log_m.size() < 2) throw std::domain_error("direct_spectrum: too few occupied boxes");

        for (std::size_t iq = 0; iq < nq; ++iq) {
            double q = qs.qs[iq];
            std::vector<double> v(log_m.size());
            for (std::size_t k = 0; k < log_m.size(); ++k) v[k] = q * log_m[k];
            double lz = logsumexp(v);
            double a = 0.0, f = 0.0;
            for (std::size_t k = 0; k < log_m.size(); ++k) {
                double lmu = v[k] - lz; // ln mu(q,s,k)
                double mu = std::exp(lmu);
                a += mu * log_m[k];
                f += mu * lmu;
            }
            num_alpha[iq][is] = a;
            num_f[iq][is] = f;
        }
    }

    DirectSpectrum out;
    out.q = qs.qs;
    out.alpha.resize(nq);
    out.f.resize(nq);
    out.tau.resize(nq);
    out.alpha_fits.resize(nq);
    out.f_fits.resize(nq);
    std::vector<double> xs(scales.scales.begin(), scales.scales.end());
    for (std::size_t iq = 0; iq < nq; ++iq) {
        out.alpha_fits[iq] = fit_logx_liny(xs, num_alpha[iq], range);
        out.f_fits[iq] = fit_logx_liny(xs, num_f[iq], range);
        out.alpha[iq] = out.alpha_fits[iq].exponent;
        out.f[iq] = out.f_fits[iq].exponent;
        out.tau[iq] = qs.qs[iq] * out.alpha[iq] - out.f[iq];
    }
    return out;
}

InverseSurface inverse_partition(const Series& measure, const std::vector<std::size_t>& js,
                                 const std::vector<double>& ps) {
    auto m = normalized_measure(measure);
    if (js.empty() || ps.empty())
        throw std::invalid_argument("inverse_partition: empty threshold or moment grid");
    const auto n = static_cast<double>(m.size());

    // piecewise-linear cumulative measure U(t), crossings interpolated inside
    // samples so exit sizes are not floored at one sample
    std::vector<double> cum(m.size() + 1, 0.0);
    for (std::size_t i = 0; i < m.size(); ++i) cum[i + 1] = cum[i] + m[i];

    InverseSurface out;
    out.ps = ps;
    out.mus.reserve(js.size());
    out.log_chi_dag.assign(ps.size(), std::vector<double>(js.size(), 0.0));

    for (std::size_t ij = 0; ij < js.size(); ++ij) {
        std::size_t J = js[ij];
        if (J < 2) throw std::invalid_argument("inverse_partition: J must be >= 2");
        double mu = 1.0 / static_cast<double>(J);
        out.mus.push_back(mu);

        std::vector<double> log_exit;
        log_exit.reserve(J);
        double t_prev = 0.0;
        std::size_t i = 0;
        for (std::size_t j = 1; j <= J; ++j) {
            double target = (j == J) ? 1.0 - 1e-14 : mu * static_cast<double>(j);
            while (i < m.size() && cum[i + 1] < target) ++i;
            double t_exit;
            if (i >= m.size()) {
                t_exit = n;
            } else {
                double d = cum[i + 1] - cum[i];
                t_exit = static_cast<double>(i) + (d > 0.0 ? (target - cum[i]) / d : 1.0);
            }
            double size = t_exit - t_prev;
            if (!(size > 1e-12)) {
                ++out.plateau_skips; // jump crossed several thresholds at once
                continue;
            }
            log_exit.push_back(std::log(size / n));
            t_prev = t_exit;
        }
        if (log_exit.size() < 2)
            throw std::domain_error("inverse_partition: fewer than 2 exits at J = " +
                                    std::to_string(J));

        for (std::size_t ip = 0; ip < ps.size(); ++ip) {
            std::vector<double> v(log_exit.size());
            for (std::size_t k = 0; k < log_exit.size(); ++k) v[k] = ps[ip] * log_exit[k];
            out.log_chi_dag[ip][ij] = logsumexp(v);
        }
    }
    if (out.plateau_skips > 0)
        out.warnings.push_back(std::to_string(out.plateau_skips) +
                               " zero-length exits skipped (measure plateaus or jumps)");
    return out;
}

std::vector<ScalingFit> tau_dagger(const InverseSurface& inv, FitRange range) {
    std::vector<ScalingFit> fits(inv.ps.size());
    for (std::size_t ip = 0; ip < inv.ps.size(); ++ip)
        fits[ip] = fit_logx_liny(inv.mus, inv.log_chi_dag[ip], range);
    return fits;
}

double invert_check(const std::vector<double>& q_grid, const std::vector<double>& tau,
                    const std::vector<double>& p_grid, const std::vector<double>& tau_dag,
                    double q_lo, double q_hi) {
    if (q_grid.size() != tau.size() || p_grid.size() != tau_dag.size())
        throw std::invalid_argument("invert_check: grid size mismatch");
    if (p_grid.size() < 2) throw std::invalid_argument("invert_check: need >= 2 p samples");
    for (std::size_t i = 1; i < tau_dag.size(); ++i)
        if (!(tau_dag[i] > tau_dag[i - 1]))
            throw std::domain_error("invert_check: sampled tau^dag is not increasing");

    double worst = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < q_grid.size(); ++i) {
        double q = q_grid[i];
        if (q < q_lo || q > q_hi) continue;
        double target = -q; // solve tau_dag(p) = -q
        if (target < tau_dag.front() || target > tau_dag.back()) continue;
        auto it = std::lower_bound(tau_dag.begin(), tau_dag.end(), target);
        std::size_t hi = static_cast<std::size_t>(it - tau_dag.begin());
        double p_star;
        if (hi == 0) {
            p_star = p_grid.front();
        } else {
            std::size_t lo = hi - 1;
            double frac = (target - tau_dag[lo]) / (tau_dag[hi] - tau_dag[lo]);
            p_star = p_grid[lo] + frac * (p_grid[hi] - p_grid[lo]);
        }
        worst = std::max(worst, std::abs(tau[i] + p_star));
        any = true;
    }
    if (!any)
        throw std::domain_error("invert_check: sampled tau^dag does not cover the q range");
    return worst;
}

MultiplierResult multiplier_spectrum(const Series& measure, std::size_t base,
                                     const MomentGrid& qs, std::size_t mother_scale) {
    if (base < 2) throw std::invalid_argument("multiplier_spectrum: base must be >= 2");
    for (double q : qs.qs)
        if (q <= -1.0)
            throw std::invalid_argument(
                "multiplier_spectrum: moments q <= -1 diverge for multiplier distributions");
    auto m = normalized_measure(measure);
    const std::size_t n = m.size();

    if (mother_scale == 0) {
        // geometric middle of the available levels, keeps both box counts large
        auto levels = static_cast<std::size_t>(
            std::log(static_cast<double>(n)) / std::log(static_cast<double>(base)) + 1e-9);
        std::size_t half = std::max<std::size_t>(1, levels / 2);
        mother_scale = 1;
        for (std::size_t i = 0; i < half; ++i) mother_scale *= base;
    }
    if (mother_scale < base || mother_scale % base != 0)
        throw std::invalid_argument("multiplier_spectrum: base must divide the mother scale");
    if (n % mother_scale != 0)
        throw std::invalid_argument("multiplier_spectrum: mother scale must divide N");
    std::size_t daughter = mother_scale / base;

    MultiplierResult out;
    out.base = base;
    out.mother_scale = mother_scale;

    std::size_t n_mothers = n / mother_scale;
    out.multipliers.reserve(n_mothers * base);
    for (std::size_t b = 0; b < n_mothers; ++b) {
        double mother_mass = 0.0;
        for (std::size_t i = 0; i < mother_scale; ++i) mother_mass += m[b * mother_scale + i];
        if (!(mother_mass > 0.0)) {
            ++out.zero_mothers;
            continue;
        }
        for (std::size_t d = 0; d < base; ++d) {
            double dm = 0.0;
            for (std::size_t i = 0; i < daughter; ++i)
                dm += m[b * mother_scale + d * daughter + i];
            out.multipliers.push_back(dm / mother_mass);
        }
    }
    if (out.multipliers.size() < 4)
        throw std::domain_error("multiplier_spectrum: too few multiplier samples");

    double ln_a = std::log(static_cast<double>(base));
    const std::size_t nq = qs.qs.size();
    MfSpectrum spec;
    spec.method = "multiplier";
    spec.q = qs.qs;
    spec.tau.resize(nq);
    spec.alpha.resize(nq);
    spec.f_alpha.resize(nq);
    spec.h.resize(nq);
    spec.d_q.resize(nq);

    for (std::size_t iq = 0; iq < nq; ++iq) {
        double q = qs.qs[iq];
        double mq = 0.0, mq_lnm = 0.0, mq_lnmq = 0.0;
        std::size_t cnt = 0;
        for (double mult : out.multipliers) {
            if (mult <= 0.0) {
                if (q > 0.0) { ++cnt; } // contributes exactly zero
                continue;               // excluded for q <= 0
            }
            double w = std::pow(mult, q);
            mq += w;
            mq_lnm += w * std::log(mult);
            mq_lnmq += w * q * std::log(mult);
            ++cnt;
        }
        if (cnt == 0) throw std::domain_error("multiplier_spectrum: no usable multipliers");
        mq /= static_cast<double>(cnt);
        mq_lnm /= static_cast<double>(cnt);
        mq_lnmq /= static_cast<double>(cnt);

        spec.tau[iq] = -1.0 - std::log(mq) / ln_a;
        spec.alpha[iq] = -mq_lnm / (mq * ln_a);
        spec.f_alpha[iq] = (mq * std::log(mq) - mq_lnmq) / (mq * ln_a);
        spec.h[iq] = q != 0.0 ? (spec.tau[iq] + 1.0) / q : spec.alpha[iq];
        spec.d_q[iq] = std::abs(q - 1.0) < 1e-9 ? spec.alpha[iq] : spec.tau[iq] / (q - 1.0);
    }
    try {
        spec.widths = strength_measures(spec);
    } catch (const std::exception& e) {
        spec.warnings.push_back(std::string("widths unavailable: ") + e.what());
    }
    if (out.zero_mothers > 0)
        spec.warnings.push_back(std::to_string(out.zero_mothers) + " zero-mass mothers skipped");
    out.spectrum = std::move(spec);
    return out;
}

double multiplier_base_gap(const Series& measure, std::size_t base_a, std::size_t base_b,
                           const MomentGrid& qs) {
    auto a = multiplier_spectrum(measure, base_a, qs);
    auto b = multiplier_spectrum(measure, base_b, qs);
    double worst = 0.0;
    for (std::size_t iq = 0; iq < qs.qs.size(); ++iq)
        worst = std::max(worst, std::abs(a.spectrum.tau[iq] - b.spectrum.tau[iq]));
    return worst;
}

EnsembleTau ensemble_tau(const std::vector<Series>& measures, const ScaleGrid& scales,
                         const MomentGrid& qs, FitRange range, const PartitionOptions& opts) {
    if (measures.size() < 2) throw std::invalid_argument("ensemble_tau: need >= 2 series");
    const std::size_t n0 = measures.front().size();
    for (const auto& s : measures)
        if (s.size() != n0)
            throw std::invalid_argument("ensemble_tau: heterogeneous series lengths");

    std::vector<PartitionSurface> surfaces;
    surfaces.reserve(measures.size());
    for (const auto& s : measures) surfaces.push_back(partition_function(s, scales, qs, opts));

    const std::size_t nq = qs.qs.size(), ns = scales.size();
    const auto k = static_cast<double>(measures.size());
    std::vector<std::vector<double>> quen(nq, std::vector<double>(ns, 0.0));
    std::vector<std::vector<double>> ann(nq, std::vector<double>(ns, 0.0));
    for (std::size_t iq = 0; iq < nq; ++iq) {
        for (std::size_t is = 0; is < ns; ++is) {
            std::vector<double> lc(surfaces.size());
            double mean = 0.0;
            for (std::size_t r = 0; r < surfaces.size(); ++r) {
                lc[r] = surfaces[r].log_chi[iq][is];
                mean += lc[r];
            }
            quen[iq][is] = mean / k;
            ann[iq][is] = logsumexp(lc) - std::log(k);
        }
    }

    std::vector<double> xs(scales.scales.begin(), scales.scales.end());
    auto fit_all = [&](const std::vector<std::vector<double>>& surface, const char* name) {
        std::vector<double> tau(nq);
        std::vector<ScalingFit> fits(nq);
        for (std::size_t iq = 0; iq < nq; ++iq) {
            fits[iq] = fit_logx_liny(xs, surface[iq], range);
            tau[iq] = fits[iq].exponent;
        }
        MfSpectrum spec = spectrum_from_tau(qs.qs, tau, name);
        spec.fits = std::move(fits);
        return spec;
    };

    EnsembleTau out;
    out.quenched = fit_all(quen, "mf-pf-quenched");
    out.annealed = fit_all(ann, "mf-pf-annealed");
    return out;
}

} // namespace mfa
