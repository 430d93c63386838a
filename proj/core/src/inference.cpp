#include "mfa/inference.hpp"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <future>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace mfa {

namespace {

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

} // namespace

// ---------------------------------------------------------------------------
// Range selection
// ---------------------------------------------------------------------------

RangeSelection select_range(const std::vector<double>& xs,
                            const std::vector<std::vector<double>>& log_rows,
                            const RangePolicy& policy) {
    if (xs.size() < 6) throw std::invalid_argument("select_range: need at least 6 scales");
    if (log_rows.empty()) throw std::invalid_argument("select_range: no moment rows");
    for (const auto& row : log_rows)
        if (row.size() != xs.size())
            throw std::invalid_argument("select_range: row length mismatch");

    RangeSelection out;
    switch (policy.kind) {
    case RangePolicy::Kind::fixed: {
        out.range = FitRange{policy.s_lo, policy.s_hi};
        std::vector<double> r2;
        for (const auto& row : log_rows)
            r2.push_back(fit_logx_liny(xs, row, out.range).r_squared);
        out.mean_r2 = mean_of(r2);
        out.diagnostics = "fixed range";
        return out;
    }
    case RangePolicy::Kind::brute_r2: {
        double min_span = policy.min_decades * std::log(10.0);
        double best = -1.0, best_span = -1.0;
        std::size_t best_i = 0, best_j = 0;
        double fallback = -1.0;
        std::size_t fb_i = 0, fb_j = 0;
        for (std::size_t i = 0; i + 2 < xs.size(); ++i) {
            for (std::size_t j = i + 2; j < xs.size(); ++j) {
                double span = std::log(xs[j]) - std::log(xs[i]);
                double acc = 0.0;
                bool ok = true;
                for (const auto& row : log_rows) {
                    try {
                        acc += fit_logx_liny(xs, row, FitRange{xs[i], xs[j]}).r_squared;
                    } catch (const std::exception&) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) continue;
                double mean_r2 = acc / static_cast<double>(log_rows.size());
                if (mean_r2 > fallback) {
                    fallback = mean_r2;
                    fb_i = i;
                    fb_j = j;
                }
                if (span + 1e-12 < min_span) continue;
                // prefer the widest range among (numerically) tied fits
                if (mean_r2 > best + 1e-12 ||
                    (std::abs(mean_r2 - best) <= 1e-12 && span > best_span)) {
                    best = mean_r2;
                    best_span = span;
                    best_i = i;
                    best_j = j;
                }
            }
        }
        if (best < 0.0) {
            throw std::domain_error(
                "select_range: no pair spans " + std::to_string(policy.min_decades) +
                " decades; best candidate [" + std::to_string(xs[fb_i]) + ", " +
                std::to_string(xs[fb_j]) + "] with mean R^2 = " + std::to_string(fallback));
        }
        out.range = FitRange{xs[best_i], xs[best_j]};
        out.mean_r2 = best;
        out.diagnostics = "brute-force R^2 over " + std::to_string(log_rows.size()) + " rows";
        return out;
    }
    case RangePolicy::Kind::slope_flatness: {
        if (xs.size() < policy.window + 1)
            throw std::invalid_argument("select_range: too few scales for the slope window");
        // local slopes per row, then the longest run where every row is flat
        std::vector<std::vector<double>> slopes;
        std::vector<double> centers;
        for (const auto& row : log_rows) {
            auto ls = local_log_slopes(xs, row, policy.window, 1);
            slopes.push_back(ls.slope);
            if (centers.empty()) centers = ls.center_x;
        }
        std::size_t nwin = centers.size();
        std::vector<bool> flat(nwin > 0 ? nwin - 1 : 0, true);
        for (const auto& sl : slopes)
            for (std::size_t k = 0; k + 1 < sl.size(); ++k) {
                double dlns = std::log(centers[k + 1]) - std::log(centers[k]);
                if (std::abs((sl[k + 1] - sl[k]) / dlns) > policy.tol) flat[k] = false;
            }
        std::size_t best_len = 0, best_start = 0, cur_start = 0, cur_len = 0;
        for (std::size_t k = 0; k < flat.size(); ++k) {
            if (flat[k]) {
                if (cur_len == 0) cur_start = k;
                ++cur_len;
                if (cur_len > best_len) {
                    best_len = cur_len;
                    best_start = cur_start;
                }
            } else {
                cur_len = 0;
            }
        }
        if (best_len == 0)
            throw std::domain_error("select_range: no flat slope window found at tol " +
                                    std::to_string(policy.tol));
        out.range = FitRange{centers[best_start], centers[best_start + best_len]};
        out.diagnostics = "flat local slopes over " + std::to_string(best_len + 1) + " windows";
        std::vector<double> r2;
        for (const auto& row : log_rows)
            r2.push_back(fit_logx_liny(xs, row, out.range).r_squared);
        out.mean_r2 = mean_of(r2);
        return out;
    }
    }
    throw std::logic_error("select_range: unknown policy");
}

// ---------------------------------------------------------------------------
// Crossover fit
// ---------------------------------------------------------------------------

CrossoverFit fit_crossover(const std::vector<double>& xs, const std::vector<double>& log_ys) {
    const std::size_t n = xs.size();
    if (n < 8) throw std::invalid_argument("fit_crossover: need at least 8 scales");
    if (log_ys.size() != n) throw std::invalid_argument("fit_crossover: size mismatch");

    std::vector<double> lx(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(xs[i] > 0.0)) throw std::domain_error("fit_crossover: non-positive scale");
        lx[i] = std::log(xs[i]);
    }

    CrossoverFit best;
    best.objective = std::numeric_limits<double>::infinity();
    bool found = false;

    // candidate crossovers need >= 3 points on each side
    for (std::size_t k = 2; k + 3 < n; ++k) {
        double lxc = lx[k];
        // parameters (H1, H2, c2); segment 1 rows [lx - lxc, lxc, 1],
        // segment 2 rows [0, lx, 1]; continuity c1 = c2 + (H2 - H1) lxc
        double ata[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
        double atb[3] = {0, 0, 0};
        for (std::size_t i = 0; i < n; ++i) {
            double row[3];
            if (i <= k) {
                row[0] = lx[i] - lxc;
                row[1] = lxc;
                row[2] = 1.0;
            } else {
                row[0] = 0.0;
                row[1] = lx[i];
                row[2] = 1.0;
            }
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b) ata[a][b] += row[a] * row[b];
                atb[a] += row[a] * log_ys[i];
            }
        }
        // 3x3 Gaussian elimination
        double m[3][4];
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) m[a][b] = ata[a][b];
            m[a][3] = atb[a];
        }
        bool singular = false;
        for (int col = 0; col < 3; ++col) {
            int piv = col;
            for (int r = col + 1; r < 3; ++r)
                if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
            if (std::abs(m[piv][col]) < 1e-12) {
                singular = true;
                break;
            }
            std::swap(m[piv], m[col]);
            for (int r = col + 1; r < 3; ++r) {
                double f = m[r][col] / m[col][col];
                for (int c = col; c < 4; ++c) m[r][c] -= f * m[col][c];
            }
        }
        if (singular) continue;
        double c2 = 0, h2 = 0, h1 = 0;
        c2 = (m[2][3]) / m[2][2];
        h2 = (m[1][3] - m[1][2] * c2) / m[1][1];
        h1 = (m[0][3] - m[0][1] * h2 - m[0][2] * c2) / m[0][0];

        double ssr = 0.0;
        double c1 = c2 + (h2 - h1) * lxc;
        for (std::size_t i = 0; i < n; ++i) {
            double fit = i <= k ? c1 + h1 * lx[i] : c2 + h2 * lx[i];
            double r = log_ys[i] - fit;
            ssr += r * r;
        }
        if (ssr < best.objective) {
            best.objective = ssr;
            best.s_cross = xs[k];
            best.h1 = h1;
            best.h2 = h2;
            best.c1 = c1;
            best.c2 = c2;
            found = true;
        }
    }
    if (!found) throw std::domain_error("fit_crossover: no candidate with 3 points on each side");
    best.stable = std::abs(best.h1 - best.h2) >= 0.05;
    return best;
}

// ---------------------------------------------------------------------------
// Estimator pipeline for the tests
// ---------------------------------------------------------------------------

MfSpectrum run_estimator(const Series& x, const EstimatorConfig& cfg) {
    std::size_t smax = cfg.s_max ? cfg.s_max : x.size() / 8;
    ScaleGrid scales = make_scales(x.size(), cfg.spacing, cfg.s_min, smax, cfg.lambda);
    MomentGrid qs = make_moments(cfg.q_lo, cfg.q_hi, cfg.q_step);
    auto surface = detrended_fluctuation(x, scales, qs, cfg.detrend);
    return surface_exponents(surface, cfg.fit);
}

double spectrum_statistic(const MfSpectrum& spec, TestStatistic stat) {
    switch (stat) {
    case TestStatistic::delta_alpha: return spec.widths.delta_alpha;
    case TestStatistic::delta_h: return spec.widths.delta_h;
    case TestStatistic::f_endpoint:
        return 0.5 * (spec.f_alpha.front() + spec.f_alpha.back());
    }
    throw std::logic_error("spectrum_statistic: unknown statistic");
}

namespace {

// Deterministic parallel map: results land in slot `i` regardless of timing.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
    if (threads == 0) threads = std::thread::hardware_concurrency();
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&]() {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) break;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace

TestReport significance_test(const Series& x, TestStatistic stat, const SurrogateMethod& method,
                             std::size_t n, const EstimatorConfig& cfg, std::uint64_t seed,
                             std::size_t threads) {
    if (n < 1) throw std::invalid_argument("significance_test: need n >= 1 replicates");

    TestReport report;
    report.statistic = stat;
    report.method = method;
    report.observed = spectrum_statistic(run_estimator(x, cfg), stat);

    std::vector<double> nulls(n, std::numeric_limits<double>::quiet_NaN());
    std::vector<std::string> errors(n);
    parallel_for(n, threads, [&](std::size_t i) {
        try {
            Series rep = make_surrogate(x, method, seed + i);
            nulls[i] = spectrum_statistic(run_estimator(rep, cfg), stat);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    std::vector<double> ok;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::isfinite(nulls[i])) {
            ok.push_back(nulls[i]);
        } else {
            ++report.replicate_failures;
            if (report.warnings.size() < 5)
                report.warnings.push_back("replicate " + std::to_string(i) + ": " + errors[i]);
        }
    }
    if (report.replicate_failures * 10 > n)
        throw std::runtime_error("significance_test: more than 10% of replicates failed (" +
                                 std::to_string(report.replicate_failures) + "/" +
                                 std::to_string(n) + ")");

    report.null_values = ok;
    std::size_t count_ge = 0;
    for (double v : ok)
        if (report.observed <= v) ++count_ge;
    report.p_value = static_cast<double>(count_ge) / static_cast<double>(ok.size());
    report.null_mean = mean_of(ok);
    double var = 0.0;
    for (double v : ok) var += (v - report.null_mean) * (v - report.null_mean);
    report.null_std = ok.size() > 1 ? std::sqrt(var / double(ok.size() - 1)) : 0.0;
    return report;
}

// ---------------------------------------------------------------------------
// Decomposition
// ---------------------------------------------------------------------------

namespace {

double mean_width_over(const Series& x, const SurrogateMethod& method, std::size_t n,
                       const EstimatorConfig& cfg, std::uint64_t seed, std::size_t threads) {
    std::vector<double> widths(n, std::numeric_limits<double>::quiet_NaN());
    parallel_for(n, threads, [&](std::size_t i) {
        Series rep = make_surrogate(x, method, seed + i);
        widths[i] = run_estimator(rep, cfg).widths.delta_alpha;
    });
    return mean_of(widths);
}

} // namespace

ComponentDecomposition decompose_components(const Series& x, const EstimatorConfig& cfg,
                                            std::size_t n, std::uint64_t seed,
                                            std::size_t threads) {
    if (n < 2) throw std::invalid_argument("decompose_components: need n >= 2 replicates");

    SurrogateMethod shuf{SurrogateMethod::Kind::shuffle, 0, 0, {}};
    SurrogateMethod iaaft{SurrogateMethod::Kind::iaaft, 100, 1e-6, {}};

    ComponentDecomposition out;
    out.total = run_estimator(x, cfg).widths.delta_alpha;

    // Linear-memory (finite size) component: IAAFT width above the iid floor.
    double w_iaaft = mean_width_over(x, iaaft, n, cfg, seed + 1000, threads);
    double w_shuf = mean_width_over(x, shuf, n, cfg, seed + 2000, threads);
    out.lm = w_iaaft - w_shuf;

    // Nonlinearity: effective width of the Gaussian rank-remapped series.
    Series x_norm = rank_remap_surrogate(x, {TargetLaw::gaussian, 0, 0}, seed + 3000);
    double w_norm = 0.0;
    {
        std::vector<double> widths(n, 0.0);
        parallel_for(n, threads, [&](std::size_t i) {
            Series rep = rank_remap_surrogate(x, {TargetLaw::gaussian, 0, 0}, seed + 3000 + i);
            widths[i] = run_estimator(rep, cfg).widths.delta_alpha;
        });
        w_norm = mean_of(widths);
    }
    double w_norm_iaaft = mean_width_over(x_norm, iaaft, n, cfg, seed + 4000, threads);
    double w_norm_shuf = mean_width_over(x_norm, shuf, n, cfg, seed + 5000, threads);
    out.nl = w_norm - (w_norm_iaaft - w_norm_shuf);

    // PDF component closes the bookkeeping identity.
    out.pdf = (out.total - out.lm) - out.nl;
    return out;
}

} // namespace mfa
