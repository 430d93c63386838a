#include "mfa/crossmethods.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "detail_boxes.hpp"

namespace mfa {

namespace {

constexpr double kLn2 = 0.6931471805599453;

using detail::box_starts;
using detail::dma_residuals;
using detail::logsumexp;
using detail::PolyBasis;

std::vector<double> normalized_measure(const Series& s) {
    if (s.role != Role::measure)
        throw std::invalid_argument("expected a series with role 'measure'");
    double total = std::accumulate(s.values.begin(), s.values.end(), 0.0);
    std::vector<double> m(s.values);
    for (auto& x : m) x /= total;
    return m;
}

std::vector<double> box_masses_exact(const std::vector<double>& m, std::size_t s) {
    if (m.size() % s != 0)
        throw std::invalid_argument("joint partition function: scale must divide N");
    std::size_t nb = m.size() / s;
    std::vector<double> out(nb, 0.0);
    for (std::size_t b = 0; b < nb; ++b)
        for (std::size_t i = 0; i < s; ++i) out[b] += m[b * s + i];
    return out;
}




// Per-box signed cross fluctuations F_v^2 and the two variances, one scale.
struct CrossBoxes {
    std::vector<double> fxy2; // signed
    std::vector<double> fxx2;
    std::vector<double> fyy2;
};

CrossBoxes cross_box_fluct(const std::vector<double>& px, const std::vector<double>& py,
                           std::size_t s, const DetrendConfig& cfg) {
    CrossBoxes out;
    if (cfg.method == Detrender::dfa) {
        PolyBasis basis(s, cfg.order);
        auto starts = box_starts(px.size(), s, cfg.covering);
        std::vector<double> rx, ry;
        for (auto st : starts) {
            basis.residual(px.data() + st, rx);
            basis.residual(py.data() + st, ry);
            double cxy = 0, cxx = 0, cyy = 0;
            for (std::size_t i = 0; i < s; ++i) {
                cxy += rx[i] * ry[i];
                cxx += rx[i] * rx[i];
                cyy += ry[i] * ry[i];
            }
            out.fxy2.push_back(cxy / double(s));
            out.fxx2.push_back(cxx / double(s));
            out.fyy2.push_back(cyy / double(s));
        }
    } else {
        auto rx = dma_residuals(px, s, cfg.theta);
        auto ry = dma_residuals(py, s, cfg.theta);
        auto starts = box_starts(rx.size(), s, cfg.covering);
        for (auto st : starts) {
            double cxy = 0, cxx = 0, cyy = 0;
            for (std::size_t i = 0; i < s; ++i) {
                cxy += rx[st + i] * ry[st + i];
                cxx += rx[st + i] * rx[st + i];
                cyy += ry[st + i] * ry[st + i];
            }
            out.fxy2.push_back(cxy / double(s));
            out.fxx2.push_back(cxx / double(s));
            out.fyy2.push_back(cyy / double(s));
        }
    }
    return out;
}

void make_pair_paths(const Series& x, const Series& y, const DetrendConfig& cfg,
                     std::vector<double>& px, std::vector<double>& py) {
    if (x.size() != y.size())
        throw std::invalid_argument("cross methods: series lengths differ");
    if (cfg.method == Detrender::dfa) {
        Series xi = x, yi = y;
        xi.role = yi.role = Role::increments;
        px = build_profile(xi).values;
        py = build_profile(yi).values;
    } else {
        px = cumulative_sum(x.values);
        py = cumulative_sum(y.values);
    }
}

} // namespace

// ---------------------------------------------------------------------------
// MF-X-PF
// ---------------------------------------------------------------------------

JointSurface mfx_pf_surface(const Series& mx, const Series& my, const std::vector<double>& ps,
                            const std::vector<double>& qs, const ScaleGrid& scales) {
    auto vx = normalized_measure(mx);
    auto vy = normalized_measure(my);
    if (vx.size() != vy.size())
        throw std::invalid_argument("mfx_pf: measures must have equal lengths");

    JointSurface out;
    out.ps = ps;
    out.qs = qs;
    out.scales = scales.scales;
    out.log_chi.assign(
        ps.size(), std::vector<std::vector<double>>(qs.size(), std::vector<double>(scales.size())));

    std::size_t zero_boxes = 0;
    for (std::size_t is = 0; is < scales.size(); ++is) {
        auto bx = box_masses_exact(vx, scales.scales[is]);
        auto by = box_masses_exact(vy, scales.scales[is]);
        std::vector<double> lmx, lmy;
        for (std::size_t b = 0; b < bx.size(); ++b) {
            if (bx[b] > 0.0 && by[b] > 0.0) {
                lmx.push_back(std::log(bx[b]));
                lmy.push_back(std::log(by[b]));
            } else {
                ++zero_boxes;
            }
        }
        if (lmx.empty()) throw std::domain_error("mfx_pf: all boxes empty");
        for (std::size_t ip = 0; ip < ps.size(); ++ip) {
            for (std::size_t iq = 0; iq < qs.size(); ++iq) {
                std::vector<double> v(lmx.size());
                for (std::size_t k = 0; k < lmx.size(); ++k)
                    v[k] = 0.5 * ps[ip] * lmx[k] + 0.5 * qs[iq] * lmy[k];
                out.log_chi[ip][iq][is] = logsumexp(v);
            }
        }
    }
    if (zero_boxes > 0)
        out.warnings.push_back(std::to_string(zero_boxes) + " empty joint boxes excluded");
    return out;
}

JointSpectrum mfx_pf(const Series& mx, const Series& my, const std::vector<double>& ps,
                     const std::vector<double>& qs, const ScaleGrid& scales, FitRange range) {
    auto surface = mfx_pf_surface(mx, my, ps, qs, scales);
    auto vx = normalized_measure(mx);
    auto vy = normalized_measure(my);

    JointSpectrum out;
    out.ps = ps;
    out.qs = qs;
    out.warnings = surface.warnings;
    out.tau.assign(ps.size(), std::vector<double>(qs.size(), 0.0));
    out.alpha_x.assign(ps.size(), std::vector<double>(qs.size(), 0.0));
    out.alpha_y.assign(ps.size(), std::vector<double>(qs.size(), 0.0));
    out.f_xy.assign(ps.size(), std::vector<double>(qs.size(), 0.0));

    std::vector<double> xs(scales.scales.begin(), scales.scales.end());
    const std::size_t ns = scales.size();

    // canonical-measure numerators per (p, q, s)
    std::vector<std::vector<double>> ax(ns), ay(ns), ff(ns);
    std::vector<std::vector<double>> lmx_s(ns), lmy_s(ns);
    for (std::size_t is = 0; is < ns; ++is) {
        auto bx = box_masses_exact(vx, scales.scales[is]);
        auto by = box_masses_exact(vy, scales.scales[is]);
        for (std::size_t b = 0; b < bx.size(); ++b) {
            if (bx[b] > 0.0 && by[b] > 0.0) {
                lmx_s[is].push_back(std::log(bx[b]));
                lmy_s[is].push_back(std::log(by[b]));
            }
        }
    }

    for (std::size_t ip = 0; ip < ps.size(); ++ip) {
        for (std::size_t iq = 0; iq < qs.size(); ++iq) {
            std::vector<double> na(ns), nb(ns), nf(ns);
            for (std::size_t is = 0; is < ns; ++is) {
                const auto& lmx = lmx_s[is];
                const auto& lmy = lmy_s[is];
                std::vector<double> v(lmx.size());
                for (std::size_t k = 0; k < lmx.size(); ++k)
                    v[k] = 0.5 * ps[ip] * lmx[k] + 0.5 * qs[iq] * lmy[k];
                double lz = logsumexp(v);
                double sa = 0, sb = 0, sf = 0;
                for (std::size_t k = 0; k < lmx.size(); ++k) {
                    double lmu = v[k] - lz;
                    double mu = std::exp(lmu);
                    sa += mu * lmx[k];
                    sb += mu * lmy[k];
                    sf += mu * lmu;
                }
                na[is] = sa;
                nb[is] = sb;
                nf[is] = sf;
            }
            out.tau[ip][iq] = fit_logx_liny(xs, surface.log_chi[ip][iq], range).exponent;
            out.alpha_x[ip][iq] = fit_logx_liny(xs, na, range).exponent;
            out.alpha_y[ip][iq] = fit_logx_liny(xs, nb, range).exponent;
            out.f_xy[ip][iq] = fit_logx_liny(xs, nf, range).exponent;
        }
    }
    return out;
}

MfxBinomialOracle oracle_mfx_binomial(double px, double py, double p, double q) {
    if (!(px > 0 && px < 1) || !(py > 0 && py < 1))
        throw std::invalid_argument("oracle_mfx_binomial: weights must be in (0,1)");
    MfxBinomialOracle o;
    o.beta = (std::log(px) - std::log(1.0 - px)) / (std::log(py) - std::log(1.0 - py));
    o.gamma = o.beta * std::log(1.0 - py) - std::log(1.0 - px);
    double big_q = o.beta * p / 2.0 + q / 2.0;
    double aq = std::pow(py, big_q), bq = std::pow(1.0 - py, big_q);
    double tau_y = -std::log(aq + bq) / kLn2;
    o.tau = p * o.gamma / (2.0 * kLn2) + tau_y;
    o.alpha_y = -(aq * std::log(py) + bq * std::log(1.0 - py)) / ((aq + bq) * kLn2);
    o.alpha_x = o.gamma / kLn2 + o.beta * o.alpha_y;
    o.f = p * o.alpha_x / 2.0 + q * o.alpha_y / 2.0 - o.tau;
    return o;
}

// ---------------------------------------------------------------------------
// MF-X-SF
// ---------------------------------------------------------------------------

FluctuationSurface mfx_sf(const Series& x, const Series& y, const ScaleGrid& scales,
                          const MomentGrid& qs) {
    if (x.role != Role::levels || y.role != Role::levels)
        throw std::invalid_argument("mfx_sf: expected levels series");
    if (x.size() != y.size()) throw std::invalid_argument("mfx_sf: lengths differ");
    for (double q : qs.qs)
        if (q < 0.0) throw std::invalid_argument("mfx_sf: q >= 0 required (zero products)");

    const auto& vx = x.values;
    const auto& vy = y.values;
    const std::size_t n = vx.size();

    FluctuationSurface out;
    out.qs = qs.qs;
    out.scales = scales.scales;
    out.kind = SurfaceKind::moment;
    out.method = "mf-x-sf";
    out.log_f.assign(qs.qs.size(), std::vector<double>(scales.size(), 0.0));

    for (std::size_t is = 0; is < scales.size(); ++is) {
        std::size_t s = scales.scales[is];
        if (s >= n) throw std::invalid_argument("mfx_sf: scale >= length");
        std::vector<double> log_prod;
        std::size_t zeros = 0;
        for (std::size_t i = s; i < n; ++i) {
            double prod = std::abs((vx[i] - vx[i - s]) * (vy[i] - vy[i - s]));
            if (prod > 0.0)
                log_prod.push_back(std::log(prod));
            else
                ++zeros;
        }
        if (log_prod.empty()) throw std::domain_error("mfx_sf: all joint increments vanish");
        auto total = static_cast<double>(log_prod.size() + zeros);
        for (std::size_t iq = 0; iq < qs.qs.size(); ++iq) {
            double q = qs.qs[iq];
            if (q == 0.0) {
                out.log_f[iq][is] = 0.0;
                continue;
            }
            std::vector<double> v(log_prod.size());
            for (std::size_t k = 0; k < log_prod.size(); ++k) v[k] = 0.5 * q * log_prod[k];
            out.log_f[iq][is] = logsumexp(v) - std::log(total);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// MF-DCCA / MF-CCA
// ---------------------------------------------------------------------------

FluctuationSurface mf_dcca(const Series& x, const Series& y, const ScaleGrid& scales,
                           const MomentGrid& qs, const DetrendConfig& cfg) {
    std::vector<double> px, py;
    make_pair_paths(x, y, cfg, px, py);

    FluctuationSurface out;
    out.qs = qs.qs;
    out.scales = scales.scales;
    out.kind = SurfaceKind::box_rms;
    out.method = "mf-dcca";
    out.log_f.assign(qs.qs.size(), std::vector<double>(scales.size(), 0.0));

    for (std::size_t is = 0; is < scales.size(); ++is) {
        auto boxes = cross_box_fluct(px, py, scales.scales[is], cfg);
        std::vector<double> log_absf; // ln |F_v| = ln sqrt|F_v^2|
        std::size_t zeros = 0;
        for (double f2 : boxes.fxy2) {
            if (f2 != 0.0)
                log_absf.push_back(0.5 * std::log(std::abs(f2)));
            else
                ++zeros;
        }
        if (log_absf.empty()) throw std::domain_error("mf_dcca: all cross fluctuations vanish");
        auto total = static_cast<double>(log_absf.size() + zeros);
        for (std::size_t iq = 0; iq < qs.qs.size(); ++iq) {
            double q = qs.qs[iq];
            if (q == 0.0) {
                double acc = 0.0;
                for (double lf : log_absf) acc += lf;
                out.log_f[iq][is] = acc / static_cast<double>(log_absf.size());
                continue;
            }
            if (zeros > 0 && q < 0.0) out.excluded_cells.emplace_back(q, scales.scales[is]);
            std::vector<double> v(log_absf.size());
            for (std::size_t k = 0; k < log_absf.size(); ++k) v[k] = q * log_absf[k];
            double count = q > 0 ? total : static_cast<double>(log_absf.size());
            out.log_f[iq][is] = (logsumexp(v) - std::log(count)) / q;
        }
    }
    return out;
}

MfCcaResult mf_cca(const Series& x, const Series& y, const ScaleGrid& scales, const MomentGrid& qs,
                   const DetrendConfig& cfg, FitRange range) {
    std::vector<double> px, py;
    make_pair_paths(x, y, cfg, px, py);

    MfCcaResult out;
    out.surface.qs = qs.qs;
    out.surface.scales = scales.scales;
    out.surface.kind = SurfaceKind::box_rms;
    out.surface.method = "mf-cca";
    out.surface.log_f.assign(qs.qs.size(), std::vector<double>(scales.size(), 0.0));
    out.sign.assign(qs.qs.size(), std::vector<int>(scales.size(), 0));

    for (std::size_t is = 0; is < scales.size(); ++is) {
        auto boxes = cross_box_fluct(px, py, scales.scales[is], cfg);
        const auto m = static_cast<double>(boxes.fxy2.size());
        for (std::size_t iq = 0; iq < qs.qs.size(); ++iq) {
            double q = qs.qs[iq];
            double val;
            int sgn;
            if (q == 0.0) {
                double num = 0.0, den = 0.0;
                for (double f2 : boxes.fxy2) {
                    if (f2 == 0.0) continue;
                    double sign_v = f2 > 0 ? 1.0 : -1.0;
                    num += sign_v * 0.5 * std::log(std::abs(f2));
                    den += sign_v;
                }
                if (den == 0.0) {
                    out.surface.log_f[iq][is] = std::numeric_limits<double>::quiet_NaN();
                    out.sign[iq][is] = 0;
                    continue;
                }
                val = num / den;
                sgn = 1;
                out.surface.log_f[iq][is] = val;
                out.sign[iq][is] = sgn;
                continue;
            }
            // signed q-mean of F_v = sign(F_v^2) |F_v^2|^{1/2}
            double acc = 0.0;
            for (double f2 : boxes.fxy2) {
                if (f2 == 0.0) continue;
                double mag = std::pow(std::abs(f2), 0.5 * q);
                acc += f2 > 0 ? mag : -mag;
            }
            acc /= m;
            if (acc == 0.0) {
                out.surface.log_f[iq][is] = std::numeric_limits<double>::quiet_NaN();
                out.sign[iq][is] = 0;
                continue;
            }
            sgn = acc > 0 ? 1 : -1;
            val = std::log(std::abs(acc)) / q;
            out.surface.log_f[iq][is] = val;
            out.sign[iq][is] = sgn;
        }
    }

    // Verdict per q: consistent sign across scales or no scaling.
    out.verdict.resize(qs.qs.size());
    std::vector<double> xs(scales.scales.begin(), scales.scales.end());
    std::vector<double> tau(qs.qs.size(), std::numeric_limits<double>::quiet_NaN());
    std::vector<ScalingFit> fits(qs.qs.size());
    for (std::size_t iq = 0; iq < qs.qs.size(); ++iq) {
        bool any_pos = false, any_neg = false;
        for (std::size_t is = 0; is < scales.size(); ++is) {
            if (out.sign[iq][is] > 0) any_pos = true;
            if (out.sign[iq][is] < 0) any_neg = true;
        }
        if (any_pos && any_neg) {
            out.verdict[iq] = CcaVerdict::no_scaling;
            continue;
        }
        out.verdict[iq] = any_neg ? CcaVerdict::negative_branch : CcaVerdict::positive;
        std::vector<double> sx, sy;
        for (std::size_t is = 0; is < scales.size(); ++is) {
            if (std::isfinite(out.surface.log_f[iq][is])) {
                sx.push_back(xs[is]);
                sy.push_back(out.surface.log_f[iq][is]);
            }
        }
        if (sx.size() >= 3) {
            fits[iq] = fit_logx_liny(sx, sy, range);
            tau[iq] = qs.qs[iq] * fits[iq].exponent - 1.0;
        } else {
            out.verdict[iq] = CcaVerdict::no_scaling;
        }
    }

    // Spectrum assembled by hand: no Legendre across NaN gaps.
    MfSpectrum spec;
    spec.method = "mf-cca";
    spec.q = qs.qs;
    spec.tau = tau;
    spec.h.resize(qs.qs.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t iq = 0; iq < qs.qs.size(); ++iq)
        if (std::isfinite(tau[iq]) && qs.qs[iq] != 0.0) spec.h[iq] = fits[iq].exponent;
    spec.fits = std::move(fits);
    std::size_t unstable = 0;
    for (auto v : out.verdict)
        if (v == CcaVerdict::no_scaling) ++unstable;
    if (unstable > 0)
        spec.warnings.push_back(std::to_string(unstable) +
                                " q values have mixed-sign F_xy (no-scaling verdict)");
    out.spectrum = std::move(spec);
    return out;
}

// ---------------------------------------------------------------------------
// MF-DPXA
// ---------------------------------------------------------------------------

namespace {

// Least-squares solve (X^T X) beta = X^T y by Gaussian elimination; returns
// false when the normal matrix is numerically singular.
bool solve_normal(std::vector<std::vector<double>> a, std::vector<double> b,
                  std::vector<double>& beta) {
    const std::size_t d = b.size();
    for (std::size_t col = 0; col < d; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < d; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-12) return false;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < d; ++r) {
            double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < d; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    beta.assign(d, 0.0);
    for (std::size_t r = d; r-- > 0;) {
        double acc = b[r];
        for (std::size_t c = r + 1; c < d; ++c) acc -= a[r][c] * beta[c];
        beta[r] = acc / a[r][r];
    }
    return true;
}

struct DpxaCrossBoxes {
    CrossBoxes boxes;
    std::size_t dropped = 0;
};


DpxaCrossBoxes dpxa_boxes(const Series& x, const Series& y,
                          const std::vector<Series>& drivers, std::size_t s,
                          const DpxaOptions& opts) {
    const std::size_t n = x.size();
    const std::size_t nd = drivers.size();
    const std::size_t ncols = nd + (opts.intercept ? 1 : 0);
    if (s <= ncols + 2)
        throw std::invalid_argument("mf_dpxa: scale " + std::to_string(s) + " too small for " +
                                    std::to_string(nd) + " drivers");

    DpxaCrossBoxes out;
    PolyBasis basis(s, opts.detrend.order);
    auto starts = box_starts(n, s, opts.detrend.covering);

    std::vector<double> rx(s), ry(s), prof_x(s), prof_y(s), resx(s), resy(s);
    for (auto st : starts) {
        if (ncols > 0) {
            std::vector<std::vector<double>> cols(ncols, std::vector<double>(s));
            for (std::size_t d = 0; d < nd; ++d)
                for (std::size_t i = 0; i < s; ++i) cols[d][i] = drivers[d].values[st + i];
            if (opts.intercept) cols[nd].assign(s, 1.0);

            std::vector<std::vector<double>> ata(ncols, std::vector<double>(ncols, 0.0));
            std::vector<double> atx(ncols, 0.0), aty(ncols, 0.0);
            for (std::size_t a = 0; a < ncols; ++a) {
                for (std::size_t b = a; b < ncols; ++b) {
                    double acc = 0.0;
                    for (std::size_t i = 0; i < s; ++i) acc += cols[a][i] * cols[b][i];
                    ata[a][b] = ata[b][a] = acc;
                }
                double ax = 0, ay = 0;
                for (std::size_t i = 0; i < s; ++i) {
                    ax += cols[a][i] * x.values[st + i];
                    ay += cols[a][i] * y.values[st + i];
                }
                atx[a] = ax;
                aty[a] = ay;
            }
            std::vector<double> bx, by;
            if (!solve_normal(ata, atx, bx) || !solve_normal(ata, aty, by)) {
                ++out.dropped;
                continue;
            }
            for (std::size_t i = 0; i < s; ++i) {
                double fit_x = 0, fit_y = 0;
                for (std::size_t c = 0; c < ncols; ++c) {
                    fit_x += bx[c] * cols[c][i];
                    fit_y += by[c] * cols[c][i];
                }
                rx[i] = x.values[st + i] - fit_x;
                ry[i] = y.values[st + i] - fit_y;
            }
        } else {
            for (std::size_t i = 0; i < s; ++i) {
                rx[i] = x.values[st + i];
                ry[i] = y.values[st + i];
            }
        }
        // residual profiles inside the window, detrended per config
        double ax = 0, ay = 0;
        for (std::size_t i = 0; i < s; ++i) {
            ax += rx[i];
            ay += ry[i];
            prof_x[i] = ax;
            prof_y[i] = ay;
        }
        basis.residual(prof_x.data(), resx);
        basis.residual(prof_y.data(), resy);
        double cxy = 0, cxx = 0, cyy = 0;
        for (std::size_t i = 0; i < s; ++i) {
            cxy += resx[i] * resy[i];
            cxx += resx[i] * resx[i];
            cyy += resy[i] * resy[i];
        }
        out.boxes.fxy2.push_back(cxy / double(s));
        out.boxes.fxx2.push_back(cxx / double(s));
        out.boxes.fyy2.push_back(cyy / double(s));
    }
    if (out.boxes.fxy2.empty()) throw std::domain_error("mf_dpxa: all windows dropped");
    return out;
}

} // namespace

DpxaResult mf_dpxa(const Series& x, const Series& y, const std::vector<Series>& drivers,
                   const ScaleGrid& scales, const MomentGrid& qs, const DpxaOptions& opts) {
    if (opts.detrend.method != Detrender::dfa)
        throw std::invalid_argument(
            "mf_dpxa: only polynomial (DFA) detrending of the residual profiles is supported");
    const std::size_t n = x.size();
    if (y.size() != n) throw std::invalid_argument("mf_dpxa: series lengths differ");
    for (const auto& z : drivers)
        if (z.size() != n) throw std::invalid_argument("mf_dpxa: driver length differs");

    DpxaResult out;
    out.surface.qs = qs.qs;
    out.surface.scales = scales.scales;
    out.surface.kind = SurfaceKind::box_rms;
    out.surface.method = "mf-dpxa";
    out.surface.log_f.assign(qs.qs.size(), std::vector<double>(scales.size(), 0.0));

    for (std::size_t is = 0; is < scales.size(); ++is) {
        auto win = dpxa_boxes(x, y, drivers, scales.scales[is], opts);
        out.dropped_windows += win.dropped;

        std::vector<double> log_absf;
        std::size_t zeros = 0;
        for (double f2 : win.boxes.fxy2) {
            if (f2 != 0.0)
                log_absf.push_back(0.5 * std::log(std::abs(f2)));
            else
                ++zeros;
        }
        if (log_absf.empty()) throw std::domain_error("mf_dpxa: all cross fluctuations vanish");
        auto total = static_cast<double>(log_absf.size() + zeros);
        for (std::size_t iq = 0; iq < qs.qs.size(); ++iq) {
            double q = qs.qs[iq];
            if (q == 0.0) {
                double acc = 0.0;
                for (double lf : log_absf) acc += lf;
                out.surface.log_f[iq][is] = acc / static_cast<double>(log_absf.size());
                continue;
            }
            std::vector<double> v(log_absf.size());
            for (std::size_t k = 0; k < log_absf.size(); ++k) v[k] = q * log_absf[k];
            double count = q > 0 ? total : static_cast<double>(log_absf.size());
            out.surface.log_f[iq][is] = (logsumexp(v) - std::log(count)) / q;
        }
    }
    if (out.dropped_windows > 0)
        out.surface.warnings.push_back(std::to_string(out.dropped_windows) +
                                       " rank-deficient windows dropped");
    return out;
}

// ---------------------------------------------------------------------------
// Cross-correlation coefficients
// ---------------------------------------------------------------------------

RhoCurve rho_dcca(const Series& x, const Series& y, const ScaleGrid& scales,
                  const DetrendConfig& cfg) {
    std::vector<double> px, py;
    make_pair_paths(x, y, cfg, px, py);

    RhoCurve out;
    out.scales = scales.scales;
    out.qs = {2.0};
    out.rho.assign(1, std::vector<double>(scales.size(), 0.0));
    out.method = "rho-dcca";

    for (std::size_t is = 0; is < scales.size(); ++is) {
        auto boxes = cross_box_fluct(px, py, scales.scales[is], cfg);
        double sxy = 0, sxx = 0, syy = 0;
        for (std::size_t v = 0; v < boxes.fxy2.size(); ++v) {
            sxy += boxes.fxy2[v];
            sxx += boxes.fxx2[v];
            syy += boxes.fyy2[v];
        }
        double denom = std::sqrt(sxx * syy);
        if (denom > 0.0) {
            double r = sxy / denom;
            out.rho[0][is] = std::clamp(r, -1.0, 1.0);
        } else {
            out.rho[0][is] = std::numeric_limits<double>::quiet_NaN();
            out.warnings.push_back("zero denominator at scale " +
                                   std::to_string(scales.scales[is]));
        }
    }
    return out;
}

RhoCurve rho_qdcca(const Series& x, const Series& y, const ScaleGrid& scales,
                   const MomentGrid& qs, const DetrendConfig& cfg) {
    std::vector<double> px, py;
    make_pair_paths(x, y, cfg, px, py);

    RhoCurve out;
    out.scales = scales.scales;
    out.qs = qs.qs;
    out.rho.assign(qs.qs.size(), std::vector<double>(scales.size(), 0.0));
    out.method = "rho-qdcca";

    for (std::size_t is = 0; is < scales.size(); ++is) {
        auto boxes = cross_box_fluct(px, py, scales.scales[is], cfg);
        const auto m = static_cast<double>(boxes.fxy2.size());
        for (std::size_t iq = 0; iq < qs.qs.size(); ++iq) {
            double q = qs.qs[iq];
            if (q == 0.0) {
                out.rho[iq][is] = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            double num = 0, dx = 0, dy = 0;
            for (std::size_t v = 0; v < boxes.fxy2.size(); ++v) {
                double mag = std::pow(std::abs(boxes.fxy2[v]), 0.5 * q);
                num += boxes.fxy2[v] > 0 ? mag : (boxes.fxy2[v] < 0 ? -mag : 0.0);
                dx += std::pow(boxes.fxx2[v], 0.5 * q);
                dy += std::pow(boxes.fyy2[v], 0.5 * q);
            }
            num /= m;
            dx /= m;
            dy /= m;
            double denom = std::sqrt(dx * dy);
            if (!(denom > 0.0)) {
                out.rho[iq][is] = std::numeric_limits<double>::quiet_NaN();
                out.warnings.push_back("zero denominator at scale " +
                                       std::to_string(scales.scales[is]));
                continue;
            }
            double r = num / denom;
            if (q > 0.0) r = std::clamp(r, -1.0, 1.0);
            out.rho[iq][is] = r;
        }
    }
    return out;
}

RhoCurve rho_dpxa(const Series& x, const Series& y, const std::vector<Series>& drivers,
                  const ScaleGrid& scales, const DpxaOptions& opts) {
    if (opts.detrend.method != Detrender::dfa)
        throw std::invalid_argument("rho_dpxa: only DFA detrending is supported");

    RhoCurve out;
    out.scales = scales.scales;
    out.qs = {2.0};
    out.rho.assign(1, std::vector<double>(scales.size(), 0.0));
    out.method = "rho-dpxa";

    for (std::size_t is = 0; is < scales.size(); ++is) {
        auto win = dpxa_boxes(x, y, drivers, scales.scales[is], opts);
        double sxy = 0, sxx = 0, syy = 0;
        for (std::size_t v = 0; v < win.boxes.fxy2.size(); ++v) {
            sxy += win.boxes.fxy2[v];
            sxx += win.boxes.fxx2[v];
            syy += win.boxes.fyy2[v];
        }
        double denom = std::sqrt(sxx * syy);
        if (denom > 0.0) {
            out.rho[0][is] = std::clamp(sxy / denom, -1.0, 1.0);
        } else {
            out.rho[0][is] = std::numeric_limits<double>::quiet_NaN();
            out.warnings.push_back("zero denominator at scale " +
                                   std::to_string(scales.scales[is]));
        }
    }
    return out;
}

} // namespace mfa
