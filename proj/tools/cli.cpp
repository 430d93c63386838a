#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "csv.hpp"
#include "report.hpp"

#include "mfa/boxmethods.hpp"
#include "mfa/crossmethods.hpp"
#include "mfa/fluctmethods.hpp"
#include "mfa/generators.hpp"
#include "mfa/grids.hpp"
#include "mfa/inference.hpp"
#include "mfa/legendre.hpp"
#include "mfa/series.hpp"
#include "mfa/surrogates.hpp"

namespace mfa::cli {

namespace {

using nlohmann::json;

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

MomentGrid parse_q_grid(const std::string& text) {
    double lo, hi, step;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3)
        throw ValidationError("bad --q grid '" + text + "', expected lo:hi:step");
    return make_moments(lo, hi, step);
}

struct ScaleSpec {
    ScaleSpacing spacing = ScaleSpacing::dyadic;
    double lambda = 2.0;
};

ScaleSpec parse_scales(const std::string& text) {
    ScaleSpec spec;
    if (text == "dyadic") {
        spec.spacing = ScaleSpacing::dyadic;
    } else if (text == "divisors") {
        spec.spacing = ScaleSpacing::divisors;
    } else if (text.rfind("geometric", 0) == 0) {
        spec.spacing = ScaleSpacing::geometric;
        auto pos = text.find(':');
        spec.lambda = pos == std::string::npos ? std::sqrt(2.0)
                                               : std::stod(text.substr(pos + 1));
    } else {
        throw ValidationError("unknown --scales preset '" + text + "'");
    }
    return spec;
}

// Shared ingestion flags.
struct InputFlags {
    std::string path;
    std::size_t column = 1;
    std::string role = "increments";
    bool log_returns = false;
    bool as_volatility = false;
    bool drop_nan = false;

    void attach(CLI::App* cmd, const char* opt = "--input", bool required = true,
                bool with_common_flags = true) {
        auto* o = cmd->add_option(opt, path, "input CSV file");
        if (required) o->required();
        if (!with_common_flags) return;
        cmd->add_option("--column", column, "1-based column selector");
        cmd->add_option("--role", role, "series role: increments|levels|measure");
        cmd->add_flag("--log-returns", log_returns, "derive log-returns from price levels");
        cmd->add_flag("--as-volatility", as_volatility,
                      "use |values| normalized to unit mass (role=measure)");
        cmd->add_flag("--drop-nan", drop_nan, "skip non-numeric rows instead of failing");
    }

    IngestResult load() const {
        IngestOptions opts;
        opts.column = column;
        opts.role = role_from_name(role);
        opts.log_returns = log_returns;
        opts.as_volatility = as_volatility;
        opts.drop_nan = drop_nan;
        try {
            return ingest_csv(path, opts);
        } catch (const std::exception& e) {
            // bad inputs are configuration problems, not compute failures
            throw ValidationError(e.what());
        }
    }
};

json config_echo(const InputFlags& in, const std::string& method, const MomentGrid& qs,
                 const std::string& scales, std::uint64_t seed) {
    json j;
    j["input"] = in.path;
    j["column"] = in.column;
    j["role"] = in.role;
    j["method"] = method;
    if (!qs.qs.empty()) {
        j["q_lo"] = qs.qs.front();
        j["q_hi"] = qs.qs.back();
        j["q_count"] = qs.qs.size();
    }
    j["scales"] = scales;
    j["seed"] = seed;
    return j;
}

FitRange range_from(double lo, double hi) { return FitRange{lo, hi}; }

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

void setup_analyze(CLI::App& app, int& rc) {
    auto* cmd = app.add_subcommand("analyze", "single-series multifractal estimators");
    auto in = std::make_shared<InputFlags>();
    in->attach(cmd);
    auto method = std::make_shared<std::string>("mfdfa");
    auto qspec = std::make_shared<std::string>("-4:4:0.25");
    auto scales_text = std::make_shared<std::string>("dyadic");
    auto smin = std::make_shared<std::size_t>(0);
    auto smax = std::make_shared<std::size_t>(0);
    auto order = std::make_shared<int>(1);
    auto theta = std::make_shared<double>(0.0);
    auto base = std::make_shared<std::size_t>(2);
    auto fit_lo = std::make_shared<double>(0.0);
    auto fit_hi = std::make_shared<double>(0.0);
    auto range_policy = std::make_shared<std::string>("");
    auto output = std::make_shared<std::string>("");
    auto dump_surface = std::make_shared<bool>(false);

    cmd->add_option("--method", *method,
                    "mfpf|mfpf-direct|mfdfa|mfdfa-direct|mfdma|mfsf|mffa|wl|multiplier|inverse|"
                    "asym|mma");
    cmd->add_option("--q", *qspec, "moment grid lo:hi:step");
    cmd->add_option("--scales", *scales_text, "dyadic|divisors|geometric[:lambda]");
    cmd->add_option("--smin", *smin, "smallest scale");
    cmd->add_option("--smax", *smax, "largest scale (default n/4)");
    cmd->add_option("--order", *order, "DFA polynomial order");
    cmd->add_option("--theta", *theta, "DMA position parameter (0, 0.5, 1)");
    cmd->add_option("--base", *base, "multiplier method base");
    cmd->add_option("--fit-lo", *fit_lo, "fit range lower scale");
    cmd->add_option("--fit-hi", *fit_hi, "fit range upper scale");
    cmd->add_option("--range-policy", *range_policy, "brute|flat (overrides --fit-*)");
    cmd->add_option("--output,-o", *output, "report path (default stdout)");
    cmd->add_flag("--surfaces", *dump_surface, "include the raw F(q,s) surface");

    cmd->callback([=, &rc]() {
        auto loaded = in->load();
        const Series& series = loaded.series;
        MomentGrid qs = parse_q_grid(*qspec);
        ScaleSpec sc = parse_scales(*scales_text);

        std::size_t floor_scale = *smin;
        if (floor_scale == 0) floor_scale = (*method == "mfpf" || *method == "mfpf-direct" ||
                                             *method == "inverse")
                                                ? 8
                                                : 16;
        ScaleGrid grid = make_scales(series.size(), sc.spacing, floor_scale, *smax, sc.lambda);
        FitRange fr = range_from(*fit_lo, *fit_hi);

        json report = report_root("analyze", config_echo(*in, *method, qs, *scales_text, 0));
        for (const auto& w : loaded.warnings) report["warnings"].push_back(w);

        auto apply_range_policy = [&](const FluctuationSurface& surf) {
            if (range_policy->empty()) return fr;
            RangePolicy pol;
            pol.kind = *range_policy == "flat" ? RangePolicy::Kind::slope_flatness
                                               : RangePolicy::Kind::brute_r2;
            std::vector<double> xs(surf.scales.begin(), surf.scales.end());
            auto sel = select_range(xs, surf.log_f, pol);
            report["range_selection"] = {{"s_lo", num(sel.range.s_lo)},
                                         {"s_hi", num(sel.range.s_hi)},
                                         {"mean_r2", num(sel.mean_r2)},
                                         {"policy", sel.diagnostics}};
            return sel.range;
        };
        auto add_surface = [&](const FluctuationSurface& surf) {
            if (!*dump_surface) return;
            json sj;
            sj["scales"] = surf.scales;
            sj["q"] = num_vector(surf.qs);
            json rows = json::array();
            for (const auto& r : surf.log_f) rows.push_back(num_vector(r));
            sj["log_f"] = rows;
            report["surface"] = sj;
        };

        auto lift_warnings = [&report](const std::vector<std::string>& ws) {
            for (const auto& w : ws) report["warnings"].push_back(w);
        };
        if (*method == "mfpf") {
            auto ps = partition_function(series, grid, qs);
            auto spec = mass_exponents(ps, fr);
            report["spectrum"] = spectrum_json(spec);
            lift_warnings(spec.warnings);
        } else if (*method == "mfpf-direct") {
            auto direct = direct_spectrum(series, grid, qs, fr);
            report["direct"] = {{"q", num_vector(direct.q)},
                                {"alpha", num_vector(direct.alpha)},
                                {"f", num_vector(direct.f)},
                                {"tau", num_vector(direct.tau)}};
        } else if (*method == "mfdfa" || *method == "mfdma") {
            DetrendConfig cfg;
            cfg.method = *method == "mfdfa" ? Detrender::dfa : Detrender::dma;
            cfg.order = *order;
            cfg.theta = *theta;
            auto surf = detrended_fluctuation(series, grid, qs, cfg);
            auto spec = surface_exponents(surf, apply_range_policy(surf));
            report["spectrum"] = spectrum_json(spec);
            lift_warnings(spec.warnings);
            add_surface(surf);
        } else if (*method == "mfdfa-direct") {
            DetrendConfig cfg;
            cfg.order = *order;
            auto direct = detrended_direct_spectrum(series, grid, qs, cfg, fr);
            report["direct"] = {{"q", num_vector(direct.q)},
                                {"alpha", num_vector(direct.alpha)},
                                {"f", num_vector(direct.f)},
                                {"tau", num_vector(direct.tau)}};
        } else if (*method == "mfsf") {
            auto surf = structure_function(series, grid, qs);
            auto spec = surface_exponents(surf, apply_range_policy(surf));
            report["spectrum"] = spectrum_json(spec);
            add_surface(surf);
        } else if (*method == "mffa") {
            auto surf = mf_fa(series, grid, qs);
            auto spec = surface_exponents(surf, apply_range_policy(surf));
            report["spectrum"] = spectrum_json(spec);
            add_surface(surf);
        } else if (*method == "wl") {
            auto wl = wavelet_leaders(series, qs);
            report["spectrum"] = spectrum_json(wl.spectrum);
            add_surface(wl.surface);
        } else if (*method == "multiplier") {
            auto res = multiplier_spectrum(series, *base, qs);
            report["spectrum"] = spectrum_json(res.spectrum);
            report["multiplier"] = {{"base", res.base},
                                    {"mother_scale", res.mother_scale},
                                    {"samples", res.multipliers.size()}};
        } else if (*method == "inverse") {
            std::vector<std::size_t> js;
            for (double j = 8.0; j <= double(series.size()) / 1024.0;
                 j *= std::pow(2.0, 0.25)) {
                auto jj = static_cast<std::size_t>(std::llround(j));
                if (js.empty() || jj != js.back()) js.push_back(jj);
            }
            std::vector<double> psg;
            for (double p = -4.0; p <= 4.0 + 1e-9; p += 0.25) psg.push_back(p);
            auto inv = inverse_partition(series, js, psg);
            auto fits = tau_dagger(inv, fr);
            json tj = json::array();
            for (std::size_t i = 0; i < fits.size(); ++i)
                tj.push_back({{"p", num(psg[i])}, {"tau_dag", num(fits[i].exponent)}});
            report["inverse"] = tj;
        } else if (*method == "asym") {
            auto res = asym_detrended(series, grid, qs);
            auto spec_p = surface_exponents(res.plus, fr);
            auto spec_m = surface_exponents(res.minus, fr);
            report["plus"] = spectrum_json(spec_p);
            report["minus"] = spectrum_json(spec_m);
        } else if (*method == "mma") {
            DetrendConfig cfg;
            cfg.order = *order;
            auto surf = detrended_fluctuation(series, grid, qs, cfg);
            auto lh = local_hurst(surf, 4, 1);
            json hj = json::array();
            for (const auto& row : lh.h) hj.push_back(num_vector(row));
            report["local_hurst"] = {{"q", num_vector(lh.qs)},
                                     {"scale_centers", num_vector(lh.scale_centers)},
                                     {"h", hj}};
        } else {
            throw ValidationError("unknown analyze method '" + *method + "'");
        }
        write_report(*output, report);
        rc = 0;
    });
}

// ---------------------------------------------------------------------------
// cross
// ---------------------------------------------------------------------------

void setup_cross(CLI::App& app, int& rc) {
    auto* cmd = app.add_subcommand("cross", "two-series estimators and coefficients");
    auto in1 = std::make_shared<InputFlags>();
    in1->attach(cmd, "--input");
    auto in2 = std::make_shared<InputFlags>();
    in2->attach(cmd, "--input2", true, false); // shares the ingestion flags of --input
    auto drivers_path = std::make_shared<std::vector<std::string>>();
    cmd->add_option("--driver", *drivers_path, "driver series CSV (repeatable)");

    auto method = std::make_shared<std::string>("mfdcca");
    auto qspec = std::make_shared<std::string>("-4:4:0.25");
    auto scales_text = std::make_shared<std::string>("dyadic");
    auto smin = std::make_shared<std::size_t>(16);
    auto smax = std::make_shared<std::size_t>(0);
    auto order = std::make_shared<int>(1);
    auto theta = std::make_shared<double>(0.0);
    auto use_dma = std::make_shared<bool>(false);
    auto fit_lo = std::make_shared<double>(0.0);
    auto fit_hi = std::make_shared<double>(0.0);
    auto output = std::make_shared<std::string>("");

    cmd->add_option("--method", *method, "mfdcca|mfcca|mfxpf|mfxsf|mfdpxa|rho|qrho");
    cmd->add_option("--q", *qspec, "moment grid lo:hi:step");
    cmd->add_option("--scales", *scales_text, "dyadic|divisors|geometric[:lambda]");
    cmd->add_option("--smin", *smin, "smallest scale");
    cmd->add_option("--smax", *smax, "largest scale");
    cmd->add_option("--order", *order, "DFA order");
    cmd->add_option("--theta", *theta, "DMA theta");
    cmd->add_flag("--dma", *use_dma, "use moving-average detrending");
    cmd->add_option("--fit-lo", *fit_lo, "fit range lower scale");
    cmd->add_option("--fit-hi", *fit_hi, "fit range upper scale");
    cmd->add_option("--output,-o", *output, "report path");

    cmd->callback([=, &rc]() {
        auto x = in1->load().series;
        InputFlags second = *in1;
        second.path = in2->path;
        auto y = second.load().series;
        MomentGrid qs = parse_q_grid(*qspec);
        ScaleSpec sc = parse_scales(*scales_text);
        ScaleGrid grid = make_scales(std::min(x.size(), y.size()), sc.spacing, *smin, *smax,
                                     sc.lambda);
        DetrendConfig cfg;
        cfg.method = *use_dma ? Detrender::dma : Detrender::dfa;
        cfg.order = *order;
        cfg.theta = *theta;
        FitRange fr = range_from(*fit_lo, *fit_hi);

        json cfg_echo = config_echo(*in1, *method, qs, *scales_text, 0);
        cfg_echo["input2"] = in2->path;
        json report = report_root("cross", cfg_echo);

        if (*method == "mfdcca") {
            auto surf = mf_dcca(x, y, grid, qs, cfg);
            report["spectrum"] = spectrum_json(surface_exponents(surf, fr));
        } else if (*method == "mfcca") {
            auto res = mf_cca(x, y, grid, qs, cfg, fr);
            report["spectrum"] = spectrum_json(res.spectrum);
            json verdicts = json::array();
            for (auto v : res.verdict)
                verdicts.push_back(v == CcaVerdict::positive ? "positive"
                                   : v == CcaVerdict::negative_branch ? "negative"
                                                                      : "no-scaling");
            report["verdicts"] = verdicts;
        } else if (*method == "mfxpf") {
            auto spec = mfx_pf(x, y, qs.qs, qs.qs, grid, fr);
            json tj = json::array();
            for (std::size_t ip = 0; ip < spec.ps.size(); ++ip)
                tj.push_back(num_vector(spec.tau[ip]));
            report["joint"] = {{"p", num_vector(spec.ps)},
                               {"q", num_vector(spec.qs)},
                               {"tau_xy", tj}};
        } else if (*method == "mfxsf") {
            auto surf = mfx_sf(x, y, grid, qs);
            report["spectrum"] = spectrum_json(surface_exponents(surf, fr));
        } else if (*method == "mfdpxa") {
            std::vector<Series> drivers;
            for (const auto& p : *drivers_path) {
                InputFlags f = *in1;
                f.path = p;
                drivers.push_back(f.load().series);
            }
            DpxaOptions opts;
            opts.detrend = cfg;
            auto res = mf_dpxa(x, y, drivers, grid, qs, opts);
            report["spectrum"] = spectrum_json(surface_exponents(res.surface, fr));
            report["dropped_windows"] = res.dropped_windows;
        } else if (*method == "rho") {
            auto rho = rho_dcca(x, y, grid, cfg);
            report["rho"] = {{"scales", rho.scales}, {"values", num_vector(rho.rho[0])}};
        } else if (*method == "qrho") {
            auto rho = rho_qdcca(x, y, grid, qs, cfg);
            json rows = json::array();
            for (const auto& r : rho.rho) rows.push_back(num_vector(r));
            report["rho"] = {{"scales", rho.scales}, {"q", num_vector(rho.qs)}, {"values", rows}};
        } else {
            throw ValidationError("unknown cross method '" + *method + "'");
        }
        write_report(*output, report);
        rc = 0;
    });
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

void setup_generate(CLI::App& app, int& rc) {
    auto* cmd = app.add_subcommand("generate", "synthetic processes with known spectra");
    auto model = std::make_shared<std::string>("pmodel");
    auto m = std::make_shared<double>(0.3);
    auto levels = std::make_shared<int>(16);
    auto hurst = std::make_shared<double>(0.5);
    auto n = std::make_shared<std::size_t>(65536);
    auto lambda2 = std::make_shared<double>(0.05);
    auto big_t = std::make_shared<std::size_t>(0);
    auto lambda = std::make_shared<double>(1.1);
    auto kbar = std::make_shared<int>(8);
    auto mu = std::make_shared<double>(-1.0);
    auto sigma = std::make_shared<double>(0.3);
    auto gamma = std::make_shared<double>(1.5);
    auto phi = std::make_shared<double>(0.1);
    auto h0 = std::make_shared<double>(0.2);
    auto d1 = std::make_shared<double>(0.3);
    auto d2 = std::make_shared<double>(0.3);
    auto w = std::make_shared<double>(1.0);
    auto seed = std::make_shared<std::uint64_t>(0);
    auto output = std::make_shared<std::string>("");

    auto weights = std::make_shared<std::string>("");
    auto rows = std::make_shared<std::vector<std::string>>();
    auto msm_law = std::make_shared<std::string>("lognormal");
    auto m0 = std::make_shared<double>(1.4);
    auto lp_mean = std::make_shared<double>(2.0);
    auto lp_delta = std::make_shared<double>(0.8);
    auto lp_gamma = std::make_shared<double>(0.0);
    cmd->add_option("--model", *model,
                    "pmodel|multinomial|crm|lognormal|logpoisson|fgn|mrw|msm|semf|mmar|levy|"
                    "arfima-pair");
    cmd->add_option("--lp-mean", *lp_mean, "log-Poisson multiplier mean");
    cmd->add_option("--lp-delta", *lp_delta, "log-Poisson delta in (0,1)");
    cmd->add_option("--lp-gamma", *lp_gamma, "log-Poisson gamma");
    cmd->add_option("--m", *m, "binomial weight");
    cmd->add_option("--weights", *weights, "multinomial weights, e.g. 0.2,0.3,0.5");
    cmd->add_option("--row", *rows,
                    "stochastic cascade row 'm1,m2,...:prob' (repeatable)");
    cmd->add_option("--msm-law", *msm_law, "lognormal|binomial");
    cmd->add_option("--m0", *m0, "MSM binomial multiplier in [1,2]");
    cmd->add_option("--levels", *levels, "cascade levels");
    cmd->add_option("--hurst", *hurst, "Hurst exponent");
    cmd->add_option("--n", *n, "series length");
    cmd->add_option("--lambda2", *lambda2, "MRW intermittency");
    cmd->add_option("--T", *big_t, "MRW integral scale");
    cmd->add_option("--lambda", *lambda, "MSM lognormal parameter");
    cmd->add_option("--kbar", *kbar, "MSM frequency count");
    cmd->add_option("--mu", *mu, "lognormal cascade mean of ln W");
    cmd->add_option("--sigma", *sigma, "lognormal cascade sd of ln W");
    cmd->add_option("--gamma", *gamma, "Levy stable index");
    cmd->add_option("--phi", *phi, "SEMF kernel exponent offset");
    cmd->add_option("--h0", *h0, "SEMF kernel amplitude");
    cmd->add_option("--d1", *d1, "ARFIMA d of series 1");
    cmd->add_option("--d2", *d2, "ARFIMA d of series 2");
    cmd->add_option("--W", *w, "ARFIMA shared-innovation weight");
    cmd->add_option("--seed", *seed, "random seed (required for stochastic models)");
    cmd->add_option("--output,-o", *output, "output CSV")->required();

    cmd->callback([=, &rc]() {
        bool stochastic = *model != "pmodel" && *model != "multinomial";
        if (stochastic && cmd->count("--seed") == 0)
            throw ValidationError("--seed is required for stochastic models");
        if (*model == "pmodel") {
            write_csv(*output, gen_binomial(*m, *levels).values);
        } else if (*model == "multinomial") {
            std::vector<double> ws;
            std::stringstream ss(*weights);
            std::string cell;
            while (std::getline(ss, cell, ',')) ws.push_back(std::stod(cell));
            if (ws.empty()) throw ValidationError("--weights required for multinomial");
            write_csv(*output, gen_multinomial(ws, *levels).values);
        } else if (*model == "crm") {
            Crm crm;
            for (const auto& row_text : *rows) {
                auto colon = row_text.find(':');
                if (colon == std::string::npos)
                    throw ValidationError("--row needs the form m1,m2,...:prob");
                std::vector<double> ms;
                std::stringstream ss(row_text.substr(0, colon));
                std::string cell;
                while (std::getline(ss, cell, ',')) ms.push_back(std::stod(cell));
                crm.rows.push_back(std::move(ms));
                crm.probs.push_back(std::stod(row_text.substr(colon + 1)));
            }
            if (crm.rows.empty()) throw ValidationError("--row required for crm");
            write_csv(*output, gen_stochastic_multinomial(crm, *levels, *seed).values);
        } else if (*model == "lognormal") {
            write_csv(*output, gen_lognormal_cascade(*mu, *sigma, *levels, *seed).values);
        } else if (*model == "logpoisson") {
            write_csv(*output,
                      gen_logpoisson_cascade(*lp_mean, *lp_delta, *lp_gamma, *levels, *seed)
                          .values);
        } else if (*model == "fgn") {
            write_csv(*output, gen_fgn(*hurst, *n, *seed).values);
        } else if (*model == "mrw") {
            MrwSpec spec;
            spec.lambda2 = *lambda2;
            spec.integral_scale = *big_t;
            spec.n = *n;
            spec.seed = *seed;
            if (spec.integral_scale > 0 && spec.n > spec.integral_scale)
                std::fprintf(stderr,
                             "warning: n > T, scales beyond T are in the monofractal regime\n");
            write_csv(*output, gen_mrw(spec).values);
        } else if (*model == "msm") {
            MsmSpec spec;
            spec.kbar = *kbar;
            spec.lambda = *lambda;
            spec.law = *msm_law == "binomial" ? MsmLaw::binomial : MsmLaw::lognormal;
            spec.m0 = *m0;
            spec.n = *n;
            spec.seed = *seed;
            write_csv(*output, gen_msm(spec).values);
        } else if (*model == "semf") {
            SemfSpec spec;
            spec.phi = *phi;
            spec.h0 = *h0;
            spec.n = *n;
            spec.seed = *seed;
            write_csv(*output, gen_semf(spec).values);
        } else if (*model == "mmar") {
            write_csv(*output, gen_mmar(*hurst, *m, *n, *seed).values);
        } else if (*model == "levy") {
            write_csv(*output, gen_levy(*gamma, *n, *seed).values);
        } else if (*model == "arfima-pair") {
            auto pair = gen_arfima_pair(*d1, *d2, *w, *n, *seed);
            write_csv_pair(*output, pair.first.values, pair.second.values);
        } else {
            throw ValidationError("unknown model '" + *model + "'");
        }
        rc = 0;
    });
}

// ---------------------------------------------------------------------------
// surrogate
// ---------------------------------------------------------------------------

SurrogateMethod parse_surrogate(const std::string& name) {
    SurrogateMethod m;
    if (name == "shuffle") {
        m.kind = SurrogateMethod::Kind::shuffle;
    } else if (name == "ft") {
        m.kind = SurrogateMethod::Kind::ft_phase;
    } else if (name == "aaft") {
        m.kind = SurrogateMethod::Kind::aaft;
    } else if (name == "iaaft") {
        m.kind = SurrogateMethod::Kind::iaaft;
    } else if (name.rfind("remap-gaussian", 0) == 0) {
        m.kind = SurrogateMethod::Kind::rank_remap;
        m.remap.law = TargetLaw::gaussian;
    } else if (name.rfind("remap-weibull", 0) == 0) {
        m.kind = SurrogateMethod::Kind::rank_remap;
        m.remap.law = TargetLaw::weibull;
        auto pos = name.find(':');
        if (pos != std::string::npos) m.remap.beta = std::stod(name.substr(pos + 1));
    } else if (name.rfind("remap-student", 0) == 0) {
        m.kind = SurrogateMethod::Kind::rank_remap;
        m.remap.law = TargetLaw::student;
        auto pos = name.find(':');
        if (pos != std::string::npos) m.remap.dof = std::stod(name.substr(pos + 1));
    } else {
        throw ValidationError("unknown surrogate method '" + name + "'");
    }
    return m;
}

void setup_surrogate(CLI::App& app, int& rc) {
    auto* cmd = app.add_subcommand("surrogate", "null-model series construction");
    auto in = std::make_shared<InputFlags>();
    in->attach(cmd);
    auto method = std::make_shared<std::string>("iaaft");
    auto seed = std::make_shared<std::uint64_t>(0);
    auto output = std::make_shared<std::string>("");
    cmd->add_option("--method", *method,
                    "shuffle|ft|aaft|iaaft|remap-gaussian|remap-weibull:b|remap-student:g");
    cmd->add_option("--seed", *seed, "random seed (required)");
    cmd->add_option("--output,-o", *output, "output CSV")->required();

    cmd->callback([=, &rc]() {
        if (cmd->count("--seed") == 0)
            throw ValidationError("--seed is required for surrogate generation");
        auto x = in->load().series;
        auto sur = make_surrogate(x, parse_surrogate(*method), *seed);
        write_csv(*output, sur.values);
        rc = 0;
    });
}

// ---------------------------------------------------------------------------
// test / decompose
// ---------------------------------------------------------------------------

void setup_test(CLI::App& app, int& rc) {
    auto* cmd = app.add_subcommand("test", "surrogate-ensemble multifractality test");
    auto in = std::make_shared<InputFlags>();
    in->attach(cmd);
    auto statistic = std::make_shared<std::string>("delta_alpha");
    auto null_model = std::make_shared<std::string>("iaaft");
    auto n = std::make_shared<std::size_t>(100);
    auto seed = std::make_shared<std::uint64_t>(0);
    auto order = std::make_shared<int>(1);
    auto smin = std::make_shared<std::size_t>(16);
    auto smax = std::make_shared<std::size_t>(0);
    auto output = std::make_shared<std::string>("");
    cmd->add_option("--statistic", *statistic, "delta_alpha|delta_h|f_endpoint");
    cmd->add_option("--null", *null_model, "surrogate family for the null");
    cmd->add_option("-n,--replicates", *n, "ensemble size (>= 20 recommended)");
    cmd->add_option("--seed", *seed, "random seed (required)");
    cmd->add_option("--order", *order, "MF-DFA order");
    cmd->add_option("--smin", *smin, "smallest scale");
    cmd->add_option("--smax", *smax, "largest scale");
    cmd->add_option("--output,-o", *output, "report path");

    cmd->callback([=, &rc]() {
        if (cmd->count("--seed") == 0)
            throw ValidationError("--seed is required for the surrogate test");
        auto x = in->load().series;
        TestStatistic stat = *statistic == "delta_h" ? TestStatistic::delta_h
                             : *statistic == "f_endpoint" ? TestStatistic::f_endpoint
                                                          : TestStatistic::delta_alpha;
        EstimatorConfig cfg;
        cfg.detrend.order = *order;
        cfg.s_min = *smin;
        cfg.s_max = *smax;
        auto report = significance_test(x, stat, parse_surrogate(*null_model), *n, cfg, *seed);

        json cfg_echo = config_echo(*in, "test", {}, "", *seed);
        cfg_echo["statistic"] = *statistic;
        cfg_echo["null"] = *null_model;
        cfg_echo["replicates"] = *n;
        json body = report_root("test", cfg_echo);
        body["observed"] = num(report.observed);
        body["p_value"] = num(report.p_value);
        body["null_mean"] = num(report.null_mean);
        body["null_std"] = num(report.null_std);
        body["null_values"] = num_vector(report.null_values);
        body["replicate_failures"] = report.replicate_failures;
        for (const auto& w : report.warnings) body["warnings"].push_back(w);
        write_report(*output, body);
        rc = 0;
    });
}

void setup_decompose(CLI::App& app, int& rc) {
    auto* cmd = app.add_subcommand("decompose", "NL+LM+PDF width decomposition");
    auto in = std::make_shared<InputFlags>();
    in->attach(cmd);
    auto n = std::make_shared<std::size_t>(24);
    auto seed = std::make_shared<std::uint64_t>(0);
    auto order = std::make_shared<int>(1);
    auto smin = std::make_shared<std::size_t>(16);
    auto smax = std::make_shared<std::size_t>(0);
    auto output = std::make_shared<std::string>("");
    cmd->add_option("-n,--replicates", *n, "replicates per surrogate family");
    cmd->add_option("--seed", *seed, "random seed (required)");
    cmd->add_option("--order", *order, "MF-DFA order");
    cmd->add_option("--smin", *smin, "smallest scale");
    cmd->add_option("--smax", *smax, "largest scale");
    cmd->add_option("--output,-o", *output, "report path");

    cmd->callback([=, &rc]() {
        if (cmd->count("--seed") == 0)
            throw ValidationError("--seed is required for decomposition");
        auto x = in->load().series;
        EstimatorConfig cfg;
        cfg.detrend.order = *order;
        cfg.s_min = *smin;
        cfg.s_max = *smax;
        auto d = decompose_components(x, cfg, *n, *seed);

        json cfg_echo = config_echo(*in, "decompose", {}, "", *seed);
        cfg_echo["replicates"] = *n;
        json body = report_root("decompose", cfg_echo);
        body["decomposition"] = {{"total", num(d.total)},
                                 {"nl", num(d.nl)},
                                 {"lm", num(d.lm)},
                                 {"pdf", num(d.pdf)}};
        write_report(*output, body);
        rc = 0;
    });
}

} // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"multifractal time-series analysis toolkit"};
    app.require_subcommand(1);
    int rc = 2;

    setup_analyze(app, rc);
    setup_cross(app, rc);
    setup_generate(app, rc);
    setup_surrogate(app, rc);
    setup_test(app, rc);
    setup_decompose(app, rc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "compute error: %s\n", e.what());
        return 2;
    }
    return rc;
}

} // namespace mfa::cli
