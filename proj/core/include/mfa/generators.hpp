#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mfa/rng.hpp"
#include "mfa/series.hpp"

namespace mfa {

// ---------------------------------------------------------------------------
// Multiplicative cascades
// ---------------------------------------------------------------------------

// Deterministic binomial (p-model) measure of length 2^levels, total mass 1.
// The left child of every node receives fraction m.
Series gen_binomial(double m, int levels);

// Two binomial measures sharing branching addresses (left weight mx resp. my),
// for joint-estimator oracles that presume aligned supports.
std::pair<Series, Series> gen_binomial_pair(double mx, double my, int levels);

// Deterministic multinomial measure, branching b = ms.size(), rows sum to 1.
Series gen_multinomial(const std::vector<double>& ms, int levels);

double oracle_binomial_tau(double m, double q);
double oracle_binomial_alpha(double m, double q);
double oracle_binomial_f(double m, double q); // f(alpha(q)) = q*alpha - tau
double oracle_binomial_alpha_min(double m);
double oracle_binomial_alpha_max(double m);

double oracle_multinomial_tau(const std::vector<double>& ms, double q);

// Stochastic multinomial construction rows: with probability probs[i] a node
// distributes mass to its b children in proportions rows[i][0..b-1].
struct Crm {
    std::vector<std::vector<double>> rows;
    std::vector<double> probs;

    std::size_t branching() const { return rows.empty() ? 0 : rows.front().size(); }
};

void validate_crm(const Crm& crm);
Series gen_stochastic_multinomial(const Crm& crm, int levels, std::uint64_t seed);
double oracle_crm_tau(const Crm& crm, double q);

// Lognormal W-cascade: every child multiplier is exp(N(mu, sigma^2)),
// renormalized to unit mass per realization.
Series gen_lognormal_cascade(double mu, double sigma, int levels, std::uint64_t seed);
double oracle_lognormal_tau(double mu, double sigma, double q);
// (alpha_min, alpha_max), the zeros of f(alpha).
std::pair<double, double> oracle_lognormal_alpha_range(double mu, double sigma);

// Log-Poisson W-cascade: ln W = P ln(delta) + gamma with P ~ Poisson(mean).
Series gen_logpoisson_cascade(double mean, double delta, double gamma, int levels,
                              std::uint64_t seed);
double oracle_logpoisson_tau(double mean, double delta, double gamma, double q);

// ---------------------------------------------------------------------------
// Fractional Gaussian noise (spectral synthesis), zero mean, unit variance.
// ---------------------------------------------------------------------------
Series gen_fgn(double hurst, std::size_t n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Multifractal random walk
// ---------------------------------------------------------------------------
struct MrwSpec {
    double lambda2 = 0.05; // intermittency lambda^2, in (0, 0.5)
    double sigma = 1.0;
    std::size_t integral_scale = 0; // T; n <= T for the multifractal regime
    std::size_t n = 0;
    std::uint64_t seed = 1;
};

Series gen_mrw(const MrwSpec& spec);
double oracle_mrw_zeta(double lambda2, double q); // -lambda2 q^2/2 + (1/2+lambda2) q

// ---------------------------------------------------------------------------
// Markov-switching multifractal
// ---------------------------------------------------------------------------
enum class MsmLaw { binomial, lognormal };

struct MsmSpec {
    int kbar = 8;
    double b = 2.0;            // > 1
    double gamma_kbar = 0.5;   // in (0,1)
    MsmLaw law = MsmLaw::lognormal;
    double m0 = 1.4;           // binomial law, in [1,2]
    double lambda = 1.1;       // lognormal law; S^2 = 2 lambda enforces E[M]=1
    double sigma = 1.0;
    std::size_t n = 0;
    std::uint64_t seed = 1;
};

Series gen_msm(const MsmSpec& spec);
double oracle_msm_lognormal_tau(double lambda, double q);

// ---------------------------------------------------------------------------
// Self-excited multifractal process
// ---------------------------------------------------------------------------
struct SemfSpec {
    double sigma = 1.0;
    double phi = 0.1;  // >= 0
    double h0 = 0.2;
    std::size_t n = 0;
    std::uint64_t seed = 1;
};

Series gen_semf(const SemfSpec& spec);

// ---------------------------------------------------------------------------
// Multifractal model of asset returns: X(t) = B_H(theta(t)) with theta the
// CDF of a binomial cascade, B_H sampled on an 8x oversampled grid.
// ---------------------------------------------------------------------------
Series gen_mmar(double hurst, double cascade_m, std::size_t n, std::uint64_t seed);
double oracle_mmar_tau(double hurst, double cascade_m, double q); // tau_theta(H q)

// ---------------------------------------------------------------------------
// Symmetric Levy flight, bifractal oracle
// ---------------------------------------------------------------------------
Series gen_levy(double gamma, std::size_t n, std::uint64_t seed);
double oracle_levy_tau(double gamma, double q); // q/gamma - 1 for q <= gamma, else 0

// ---------------------------------------------------------------------------
// Two ARFIMA(0,d,0) sequences sharing innovations with weight W in [0,1]:
// eps_x = W eta0 + (1-W) eta1, eps_y = W eta0 + (1-W) eta2. H = d + 1/2.
// ---------------------------------------------------------------------------
std::pair<Series, Series> gen_arfima_pair(double d1, double d2, double w, std::size_t n,
                                          std::uint64_t seed);

// Stationary Gaussian sequence with prescribed autocovariance cov[0..m-1]
// (cov beyond m-1 taken as zero) via circulant spectral synthesis. Negative
// circulant eigenvalues, if any, are clipped to zero.
std::vector<double> gaussian_from_autocov(const std::vector<double>& cov, std::size_t n, Rng& rng);

} // namespace mfa
