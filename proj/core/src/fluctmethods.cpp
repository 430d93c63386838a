#include "mfa/fluctmethods.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "detail_boxes.hpp"

namespace mfa {

namespace {

using detail::box_starts;
using detail::dma_residuals;
using detail::logsumexp;
using detail::PolyBasis;

// ln F_q from per-box ln F_v: power mean for q != 0, log-average for q = 0.
double q_mean_log(const std::vector<double>& log_fv, double q) {
    const auto m = static_cast<double>(log_fv.size());
    if (q == 0.0) {
        double acc = 0.0;
        for (double lf : log_fv) acc += lf;
        return acc / m;
    }
    std::vector<double> v(log_fv.size());
    for (std::size_t i = 0; i < log_fv.size(); ++i) v[i] = q * log_fv[i];
    return (logsumexp(v) - std::log(m)) / q;
}



std::vector<double> dfa_box_fluct(const std::vector<double>& profile, std::size_t s, int order,
                                  Covering covering, std::vector<double>* slopes = nullptr) {
    PolyBasis basis(s, order);
    auto starts = box_starts(profile.size(), s, covering);
    std::vector<double> fv;
    fv.reserve(starts.size());
    if (slopes) slopes->clear();
    for (auto st : starts) {
        double lin = 0.0;
        double ssr = basis.ssr(profile.data() + st, slopes ? &lin : nullptr);
        fv.push_back(std::sqrt(ssr / static_cast<double>(s)));
        if (slopes) slopes->push_back(lin);
    }
    return fv;
}


std::vector<double> box_rms(const std::vector<double>& res, std::size_t s, Covering covering) {
    auto starts = box_starts(res.size(), s, covering);
    std::vector<double> fv;
    fv.reserve(starts.size());
    for (auto st : starts) {
        double acc = 0.0;
        for (std::size_t i = 0; i < s; ++i) acc += res[st + i] * res[st + i];
        fv.push_back(std::sqrt(acc / static_cast<double>(s)));
    }
    return fv;
}

void check_detrend_cfg(const DetrendConfig& cfg) {
    if (cfg.method == Detrender::dfa && cfg.order < 1)
        throw std::invalid_argument("dfa order must be >= 1");
    if (cfg.method == Detrender::dma &&
        !(cfg.theta == 0.0 || cfg.theta == 0.5 || cfg.theta == 1.0))
        throw std::invalid_argument("dma theta must be one of 0, 0.5, 1");
}

std::size_t min_scale_for(const DetrendConfig& cfg) {
    if (cfg.method == Detrender::dfa) return static_cast<std::size_t>(cfg.order) + 2;
    return 3;
}

// Per-box fluctuations for one scale under the given config.
std::vector<double> detrended_box_fluct(const std::vector<double>& dfa_profile,
                                        const std::vector<double>& raw_path, std::size_t s,
                                        const DetrendConfig& cfg) {
    if (cfg.method == Detrender::dfa)
        return dfa_box_fluct(dfa_profile, s, cfg.order, cfg.covering);
    auto res = dma_residuals(raw_path, s, cfg.theta);
    return box_rms(res, s, cfg.covering);
}

// Aggregate per-box fluctuations into ln F(q, s), excluding zero boxes for
// q < 0 and flagging degenerate cells.
void fill_surface_column(FluctuationSurface& out, std::size_t is, const std::vector<double>& fv) {
    std::vector<double> log_fv;
    log_fv.reserve(fv.size());
    std::size_t zeros = 0;
    for (double f : fv) {
        if (f > 0.0)
            log_fv.push_back(std::log(f));
        else
            ++zeros;
    }
    for (std::size_t iq = 0; iq < out.qs.size(); ++iq) {
        double q = out.qs[iq];
        if (log_fv.empty()) {
            out.log_f[iq][is] = std::numeric_limits<double>::quiet_NaN();
            out.excluded_cells.emplace_back(q, out.scales[is]);
            continue;
        }
        if (zeros > 0 && q < 0.0) out.excluded_cells.emplace_back(q, out.scales[is]);
        if (zeros > 0 && q > 0.0) {
            // zero boxes contribute nothing to the power sum but do count
            std::vector<double> v(log_fv.size());
            for (std::size_t k = 0; k < log_fv.size(); ++k) v[k] = q * log_fv[k];
            out.log_f[iq][is] =
                (logsumexp(v) - std::log(double(log_fv.size() + zeros))) / q;
            continue;
        }
        out.log_f[iq][is] = q_mean_log(log_fv, q);
    }
    if (zeros > 0)
        out.warnings.push_back(std::to_string(zeros) + " zero-fluctuation boxes at scale " +
                               std::to_string(out.scales[is]));
}

} // namespace

// ---------------------------------------------------------------------------

MfSpectrum surface_exponents(const FluctuationSurface& surface, FitRange range,
                             const std::string& method) {
    std::vector<double> xs(surface.scales.begin(), surface.scales.end());
    std::vector<double> tau(surface.qs.size());
    std::vector<ScalingFit> fits(surface.qs.size());
    for (std::size_t iq = 0; iq < surface.qs.size(); ++iq) {
        // drop NaN cells (flagged during construction)
        std::vector<double> x, y;
        for (std::size_t is = 0; is < xs.size(); ++is) {
            if (std::isfinite(surface.log_f[iq][is])) {
                x.push_back(xs[is]);
                y.push_back(surface.log_f[iq][is]);
            }
        }
        fits[iq] = fit_logx_liny(x, y, range);
        double q = surface.qs[iq];
        tau[iq] = surface.kind == SurfaceKind::moment ? fits[iq].exponent - 1.0
                                                      : q * fits[iq].exponent - 1.0;
    }
    if (surface.qs.size() < 3) {
        // single-exponent use: no Legendre pair on a tiny grid
        MfSpectrum spec;
        spec.method = method.empty() ? surface.method : method;
        spec.q = surface.qs;
        spec.tau = tau;
        spec.h.resize(tau.size());
        spec.d_q.resize(tau.size());
        for (std::size_t iq = 0; iq < tau.size(); ++iq) {
            double q = surface.qs[iq];
            spec.h[iq] = q != 0.0 ? (tau[iq] + 1.0) / q
                                  : std::numeric_limits<double>::quiet_NaN();
            spec.d_q[iq] = q != 1.0 ? tau[iq] / (q - 1.0) : spec.h[iq];
        }
        spec.fits = std::move(fits);
        for (const auto& w : surface.warnings) spec.warnings.push_back(w);
        return spec;
    }
    MfSpectrum spec =
        spectrum_from_tau(surface.qs, tau, method.empty() ? surface.method : method);
    spec.fits = std::move(fits);
    for (const auto& w : surface.warnings) spec.warnings.push_back(w);
    return spec;
}

// ---------------------------------------------------------------------------
// Structure functions
// ---------------------------------------------------------------------------

FluctuationSurface structure_function(const Series& levels, const ScaleGrid& scales,
                                      const MomentGrid& qs) {
    if (levels.role != Role::levels)
        throw std::invalid_argument("structure_function: expected a levels series");
    for (double q : qs.qs)
        if (q < 0.0)
            throw std::invalid_argument(
                "structure_function: q < 0 is not defined (zero increments); use mf_fa or the "
                "detrended methods");
    const auto& x = levels.values;
    const std::size_t n = x.size();

    // scale-free normalization <|X|^q>
    std::vector<double> log_absx;
    log_absx.reserve(n);
    for (double v : x)
        if (v != 0.0) log_absx.push_back(std::log(std::abs(v)));

    FluctuationSurface out;
    out.qs = qs.qs;
    out.scales = scales.scales;
    out.kind = SurfaceKind::moment;
    out.method = "mf-sf";
    out.log_f.assign(qs.qs.size(), std::vector<double>(scales.size(), 0.0));

    for (std::size_t is = 0; is < scales.size(); ++is) {
        std::size_t s = scales.scales[is];
        if (s >= n) throw std::invalid_argument("structure_function: scale >= length");
        std::vector<double> log_dx;
        log_dx.reserve(n - s);
        std::size_t zeros = 0;
        for (std::size_t i = s; i < n; ++i) {
            double d = x[i] - x[i - s];
            if (d != 0.0)
                log_dx.push_back(std::log(std::abs(d)));
            else
                ++zeros;
        }
        if (log_dx.empty()) throw std::domain_error("structure_function: all increments zero");
        auto total = static_cast<double>(log_dx.size() + zeros);

        for (std::size_t iq = 0; iq < qs.qs.size(); ++iq) {
            double q = qs.qs[iq];
            if (q == 0.0) {
                out.log_f[iq][is] = 0.0; // K(0,s) = 1
                continue;
            }
            std::vector<double> v(log_dx.size());
            for (std::size_t k = 0; k < log_dx.size(); ++k) v[k] = q * log_dx[k];
            double lk = logsumexp(v) - std::log(total);
            // normalization by <|X|^q> shifts the intercept only
            std::vector<double> w(log_absx.size());
            for (std::size_t k = 0; k < log_absx.size(); ++k) w[k] = q * log_absx[k];
            double lnorm = logsumexp(w) - std::log(static_cast<double>(n));
            out.log_f[iq][is] = lk - lnorm;
        }
    }
    return out;
}

ScalingFit ess(const FluctuationSurface& surface, double q, double q0) {
    auto find = [&](double qq) -> const std::vector<double>& {
        for (std::size_t iq = 0; iq < surface.qs.size(); ++iq)
            if (std::abs(surface.qs[iq] - qq) < 1e-9) return surface.log_f[iq];
        throw std::invalid_argument("ess: q = " + std::to_string(qq) + " not on the grid");
    };
    const auto& ly = find(q);
    const auto& lx = find(q0);
    for (double v : lx)
        if (!std::isfinite(v)) throw std::domain_error("ess: degenerate reference moment");
    return fit_linear(lx, ly);
}

// ---------------------------------------------------------------------------
// Exit times
// ---------------------------------------------------------------------------

ExitTimeSet exit_times(const Series& levels, const std::vector<double>& thresholds,
                       ExitDirection direction) {
    if (levels.role != Role::levels)
        throw std::invalid_argument("exit_times: expected a levels series");
    if (thresholds.empty()) throw std::invalid_argument("exit_times: no thresholds");
    for (double t : thresholds)
        if (!(t > 0.0)) throw std::invalid_argument("exit_times: thresholds must be positive");

    const auto& x = levels.values;
    const std::size_t n = x.size();
    // keep the start count bounded; exits are statistically dense anyway
    std::size_t stride = std::max<std::size_t>(1, n / 16384);

    ExitTimeSet out;
    out.direction = direction;
    out.thresholds = thresholds;
    out.times.resize(thresholds.size());
    out.unreached.assign(thresholds.size(), 0);

    for (std::size_t it = 0; it < thresholds.size(); ++it) {
        double thr = thresholds[it];
        for (std::size_t i = 0; i + 1 < n; i += stride) {
            bool found = false;
            for (std::size_t k = i + 1; k < n; ++k) {
                double move = x[k] - x[i];
                if ((direction == ExitDirection::gain && move >= thr) ||
                    (direction == ExitDirection::loss && move <= -thr)) {
                    out.times[it].push_back(k - i);
                    found = true;
                    break;
                }
            }
            if (!found) ++out.unreached[it];
        }
    }
    return out;
}

InverseSf inverse_sf(const ExitTimeSet& set, const std::vector<double>& ps) {
    if (ps.empty()) throw std::invalid_argument("inverse_sf: no moment orders");
    InverseSf out;
    out.ps = ps;
    out.thresholds = set.thresholds;
    out.log_tp.assign(ps.size(), std::vector<double>(set.thresholds.size(), 0.0));

    for (std::size_t it = 0; it < set.thresholds.size(); ++it) {
        const auto& times = set.times[it];
        if (times.size() < 3)
            throw std::domain_error("inverse_sf: too few exits at threshold " +
                                    std::to_string(set.thresholds[it]));
        for (std::size_t ip = 0; ip < ps.size(); ++ip) {
            std::vector<double> v(times.size());
            for (std::size_t k = 0; k < times.size(); ++k)
                v[k] = ps[ip] * std::log(static_cast<double>(times[k]));
            out.log_tp[ip][it] = logsumexp(v) - std::log(static_cast<double>(times.size()));
        }
    }
    out.phi.resize(ps.size());
    for (std::size_t ip = 0; ip < ps.size(); ++ip)
        out.phi[ip] = fit_logx_liny(set.thresholds, out.log_tp[ip]);
    return out;
}

std::vector<double> most_probable_exit(const ExitTimeSet& set, double bin_ratio) {
    if (!(bin_ratio > 1.0)) throw std::invalid_argument("most_probable_exit: ratio must be > 1");
    std::vector<double> modes(set.thresholds.size(), 0.0);
    for (std::size_t it = 0; it < set.thresholds.size(); ++it) {
        const auto& times = set.times[it];
        if (times.empty()) continue;
        auto max_t = static_cast<double>(*std::max_element(times.begin(), times.end()));
        std::size_t nbins = static_cast<std::size_t>(std::log(max_t) / std::log(bin_ratio)) + 2;
        std::vector<double> density(nbins, 0.0);
        for (auto t : times) {
            auto b = static_cast<std::size_t>(std::log(double(t)) / std::log(bin_ratio));
            double width = std::pow(bin_ratio, double(b + 1)) - std::pow(bin_ratio, double(b));
            density[b] += 1.0 / std::max(width, 1.0);
        }
        std::size_t best = static_cast<std::size_t>(
            std::max_element(density.begin(), density.end()) - density.begin());
        modes[it] = std::pow(bin_ratio, static_cast<double>(best) + 0.5);
    }
    return modes;
}

// ---------------------------------------------------------------------------
// MF-FA
// ---------------------------------------------------------------------------

FluctuationSurface mf_fa(const Series& levels, const ScaleGrid& scales, const MomentGrid& qs) {
    if (levels.role != Role::levels)
        throw std::invalid_argument("mf_fa: expected a levels series");
    const auto& x = levels.values;
    const std::size_t n = x.size();

    FluctuationSurface out;
    out.qs = qs.qs;
    out.scales = scales.scales;
    out.kind = SurfaceKind::moment;
    out.method = "mf-fa";
    out.log_f.assign(qs.qs.size(), std::vector<double>(scales.size(), 0.0));

    for (std::size_t is = 0; is < scales.size(); ++is) {
        std::size_t s = scales.scales[is];
        if (s >= n) throw std::invalid_argument("mf_fa: scale >= length");
        std::vector<double> dx(n - s);
        double mean = 0.0;
        for (std::size_t i = s; i < n; ++i) {
            dx[i - s] = x[i] - x[i - s];
            mean += dx[i - s];
        }
        mean /= static_cast<double>(dx.size());

        std::vector<double> log_dev;
        log_dev.reserve(dx.size());
        std::size_t zeros = 0;
        for (double d : dx) {
            double dev = std::abs(d - mean);
            if (dev > 0.0)
                log_dev.push_back(std::log(dev));
            else
                ++zeros;
        }
        if (log_dev.empty()) throw std::domain_error("mf_fa: degenerate increments");

        for (std::size_t iq = 0; iq < qs.qs.size(); ++iq) {
            double q = qs.qs[iq];
            if (q == 0.0) {
                out.log_f[iq][is] = 0.0; // Z(0,s) = 1
                continue;
            }
            if (zeros > 0 && q < 0.0) out.excluded_cells.emplace_back(q, s);
            std::vector<double> v(log_dev.size());
            for (std::size_t k = 0; k < log_dev.size(); ++k) v[k] = q * log_dev[k];
            auto total = static_cast<double>(q > 0 ? log_dev.size() + zeros : log_dev.size());
            out.log_f[iq][is] = logsumexp(v) - std::log(total);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// MF-DFA / MF-DMA
// ---------------------------------------------------------------------------

FluctuationSurface detrended_fluctuation(const Series& increments, const ScaleGrid& scales,
                                         const MomentGrid& qs, const DetrendConfig& cfg) {
    check_detrend_cfg(cfg);
    std::vector<double> dfa_profile, raw_path;
    if (cfg.method == Detrender::dfa) {
        Series incr = increments;
        incr.role = Role::increments;
        dfa_profile = build_profile(incr).values;
    } else {
        raw_path = cumulative_sum(increments.values);
    }

    FluctuationSurface out;
    out.qs = qs.qs;
    out.scales = scales.scales;
    out.kind = SurfaceKind::box_rms;
    out.method = cfg.method == Detrender::dfa
                     ? "mf-dfa(" + std::to_string(cfg.order) + ")"
                     : "mf-dma(theta=" + std::to_string(cfg.theta) + ")";
    out.log_f.assign(qs.qs.size(), std::vector<double>(scales.size(), 0.0));

    std::size_t smin = min_scale_for(cfg);
    for (std::size_t is = 0; is < scales.size(); ++is) {
        std::size_t s = scales.scales[is];
        if (s < smin)
            throw std::invalid_argument("detrended_fluctuation: scale " + std::to_string(s) +
                                        " below the method floor " + std::to_string(smin));
        auto fv = detrended_box_fluct(dfa_profile, raw_path, s, cfg);
        fill_surface_column(out, is, fv);
    }
    bool all_nan = true;
    for (const auto& row : out.log_f)
        for (double v : row)
            if (std::isfinite(v)) all_nan = false;
    if (all_nan) throw std::domain_error("detrended_fluctuation: all fluctuations vanish");
    return out;
}

DetrendedDirect detrended_direct_spectrum(const Series& increments, const ScaleGrid& scales,
                                          const MomentGrid& qs, const DetrendConfig& cfg,
                                          FitRange range) {
    check_detrend_cfg(cfg);
    std::vector<double> dfa_profile, raw_path;
    if (cfg.method == Detrender::dfa) {
        Series incr = increments;
        incr.role = Role::increments;
        dfa_profile = build_profile(incr).values;
    } else {
        raw_path = cumulative_sum(increments.values);
    }

    const std::size_t nq = qs.qs.size(), ns = scales.size();
    std::vector<std::vector<double>> num_alpha(nq, std::vector<double>(ns, 0.0));
    std::vector<std::vector<double>> num_f(nq, std::vector<double>(ns, 0.0));

    for (std::size_t is = 0; is < ns; ++is) {
        auto fv = detrended_box_fluct(dfa_profile, raw_path, scales.scales[is], cfg);
        std::vector<double> log_fv;
        log_fv.reserve(fv.size());
        for (double f : fv)
            if (f > 0.0) log_fv.push_back(std::log(f));
        if (log_fv.size() < 2)
            throw std::domain_error("detrended_direct_spectrum: too few usable boxes");

        for (std::size_t iq = 0; iq < nq; ++iq) {
            double q = qs.qs[iq];
            std::vector<double> v(log_fv.size());
            for (std::size_t k = 0; k < log_fv.size(); ++k) v[k] = q * log_fv[k];
            double lz = logsumexp(v);
            double a = 0.0, f = 0.0;
            for (std::size_t k = 0; k < log_fv.size(); ++k) {
                double lmu = v[k] - lz;
                double mu = std::exp(lmu);
                a += mu * log_fv[k];
                f += mu * lmu;
            }
            num_alpha[iq][is] = a;
            num_f[iq][is] = f;
        }
    }

    DetrendedDirect out;
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

AsymDetrended asym_detrended(const Series& increments, const ScaleGrid& scales,
                             const MomentGrid& qs) {
    // raw cumulative path: the up/down split must reflect the actual local
    // trend of the level series, which mean removal would erase
    auto profile = cumulative_sum(increments.values);

    AsymDetrended out;
    for (auto* surf : {&out.plus, &out.minus}) {
        surf->qs = qs.qs;
        surf->scales = scales.scales;
        surf->kind = SurfaceKind::box_rms;
        surf->log_f.assign(qs.qs.size(), std::vector<double>(scales.size(), 0.0));
    }
    out.plus.method = "a-mf-dfa(+)";
    out.minus.method = "a-mf-dfa(-)";
    out.plus_count.resize(scales.size());
    out.minus_count.resize(scales.size());

    for (std::size_t is = 0; is < scales.size(); ++is) {
        std::size_t s = scales.scales[is];
        if (s < 3) throw std::invalid_argument("asym_detrended: scale must be >= 3");
        std::vector<double> slopes;
        auto fv = dfa_box_fluct(profile, s, 1, Covering::both_ends, &slopes);
        std::vector<double> plus, minus;
        for (std::size_t v = 0; v < fv.size(); ++v)
            (slopes[v] >= 0.0 ? plus : minus).push_back(fv[v]);
        out.plus_count[is] = plus.size();
        out.minus_count[is] = minus.size();
        if (plus.empty()) {
            for (std::size_t iq = 0; iq < qs.qs.size(); ++iq)
                out.plus.log_f[iq][is] = std::numeric_limits<double>::quiet_NaN();
            out.plus.excluded_cells.emplace_back(0.0, s);
        } else {
            fill_surface_column(out.plus, is, plus);
        }
        if (minus.empty()) {
            for (std::size_t iq = 0; iq < qs.qs.size(); ++iq)
                out.minus.log_f[iq][is] = std::numeric_limits<double>::quiet_NaN();
            out.minus.excluded_cells.emplace_back(0.0, s);
        } else {
            fill_surface_column(out.minus, is, minus);
        }
    }
    return out;
}

LocalHurst local_hurst(const FluctuationSurface& surface, std::size_t window, std::size_t step) {
    if (window < 3) throw std::invalid_argument("local_hurst: window must cover >= 3 scales");
    if (surface.scales.size() < window)
        throw std::invalid_argument("local_hurst: not enough scales for the window");
    std::vector<double> xs(surface.scales.begin(), surface.scales.end());

    LocalHurst out;
    out.qs = surface.qs;
    for (std::size_t iq = 0; iq < surface.qs.size(); ++iq) {
        auto slopes = local_log_slopes(xs, surface.log_f[iq], window, step);
        if (iq == 0) out.scale_centers = slopes.center_x;
        if (surface.kind == SurfaceKind::moment && surface.qs[iq] != 0.0)
            for (auto& h : slopes.slope) h /= surface.qs[iq];
        out.h.push_back(std::move(slopes.slope));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Wavelet leaders (Haar)
// ---------------------------------------------------------------------------

WaveletLeaderResult wavelet_leaders(const Series& increments, const MomentGrid& qs,
                                    std::size_t j_min, std::size_t j_drop_top) {
    // Raw cumulative path: mean removal would plant an artificial linear
    // component that the order-1 basis cannot annihilate.
    auto path = cumulative_sum(increments.values);

    std::size_t n = 1;
    std::size_t levels = 0;
    while (n * 2 <= path.size()) {
        n *= 2;
        ++levels;
    }
    WaveletLeaderResult out;
    if (n < path.size()) {
        out.truncated_to = n;
        path.resize(n);
    }
    if (levels < j_min + j_drop_top + 3)
        throw std::invalid_argument("wavelet_leaders: fewer than 4 usable dyadic levels");

    // Haar pyramid, L1 normalization: d scales as 2^{jH} for H-sssi paths.
    std::vector<std::vector<double>> details(levels + 1);
    std::vector<double> approx = path;
    for (std::size_t j = 1; j <= levels; ++j) {
        std::size_t m = approx.size() / 2;
        std::vector<double> next(m), det(m);
        for (std::size_t k = 0; k < m; ++k) {
            next[k] = 0.5 * (approx[2 * k] + approx[2 * k + 1]);
            det[k] = 0.5 * (approx[2 * k + 1] - approx[2 * k]);
        }
        details[j] = std::move(det);
        approx = std::move(next);
    }

    // Leaders: sup of |d| over all finer coefficients inside the interval,
    // then over the 3-neighborhood.
    std::vector<std::vector<double>> tree(levels + 1);
    for (std::size_t j = 1; j <= levels; ++j) {
        auto& d = details[j];
        tree[j].resize(d.size());
        for (std::size_t k = 0; k < d.size(); ++k) {
            double m = std::abs(d[k]);
            if (j > 1) m = std::max({m, tree[j - 1][2 * k], tree[j - 1][2 * k + 1]});
            tree[j][k] = m;
        }
    }

    std::size_t j_max = levels >= j_drop_top ? levels - j_drop_top : 0;
    if (j_max < j_min + 3)
        throw std::invalid_argument("wavelet_leaders: usable j-range too short");

    FluctuationSurface surf;
    surf.qs = qs.qs;
    surf.kind = SurfaceKind::moment;
    surf.method = "mf-wl";
    for (std::size_t j = j_min; j <= j_max; ++j) {
        const auto& t = tree[j];
        if (t.size() < 3) break;
        std::vector<double> log_leaders;
        log_leaders.reserve(t.size() - 2);
        for (std::size_t k = 1; k + 1 < t.size(); ++k) {
            double lead = std::max({t[k - 1], t[k], t[k + 1]});
            if (lead > 0.0) log_leaders.push_back(std::log(lead));
        }
        if (log_leaders.size() < 2) continue;
        surf.scales.push_back(std::size_t{1} << j);
        surf.log_f.emplace_back(); // filled transposed below
        std::vector<double> column(qs.qs.size());
        for (std::size_t iq = 0; iq < qs.qs.size(); ++iq) {
            double q = qs.qs[iq];
            if (q == 0.0) {
                column[iq] = 0.0; // M(0,j) = 1
            } else {
                std::vector<double> v(log_leaders.size());
                for (std::size_t k = 0; k < log_leaders.size(); ++k) v[k] = q * log_leaders[k];
                column[iq] = logsumexp(v) - std::log(static_cast<double>(log_leaders.size()));
            }
        }
        surf.log_f.back() = std::move(column);
    }
    // transpose the per-scale columns into [iq][is]
    FluctuationSurface shaped;
    shaped.qs = surf.qs;
    shaped.scales = surf.scales;
    shaped.kind = surf.kind;
    shaped.method = surf.method;
    shaped.log_f.assign(surf.qs.size(), std::vector<double>(surf.scales.size(), 0.0));
    for (std::size_t is = 0; is < surf.scales.size(); ++is)
        for (std::size_t iq = 0; iq < surf.qs.size(); ++iq)
            shaped.log_f[iq][is] = surf.log_f[is][iq];
    if (out.truncated_to)
        shaped.warnings.push_back("series truncated to " + std::to_string(out.truncated_to) +
                                  " samples (power of two)");

    out.spectrum = surface_exponents(shaped, {}, "mf-wl");
    out.surface = std::move(shaped);
    return out;
}

} // namespace mfa
