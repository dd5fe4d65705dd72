#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "mnap/bmatrix.hpp"
#include "mnap/model.hpp"
#include "mnap/rng.hpp"

namespace mnap {

// Hyperparameters for the conditional sampler.
//
// beta has prior Normal(beta_mean, h I); sigma2 has the conjugate inverse
// gamma prior with parameters (s0, q0) in the convention of Rng::inv_gamma;
// each rho_i has prior Normal(rho_mean_i, rho_var_i) and a random-walk
// proposal increment Normal(0, mh_var_i).
struct Priors {
    Eigen::VectorXd beta_mean;
    double h = 400.0;
    double s0 = 5.0;
    double q0 = 10.0;
    Eigen::VectorXd rho_mean;
    Eigen::VectorXd rho_var;
    Eigen::VectorXd mh_var;

    static Priors defaults(int m, int k);
    // The priors used by the calibration harness: beta ~ Normal(0,1),
    // sigma2 ~ inv_gamma(5, 10), rho ~ Normal(0.05, 0.05^2).
    static Priors calibration_defaults(int m, int k);

    void validate(int m, int k) const;
};

// Deliberate sampler corruptions used by the validation harness to prove
// that the calibration test has teeth. Never enabled in normal runs.
enum class SamplerMutation {
    none,
    wrong_sigma2_parametrization,  // draws sigma2 ~ Gamma(a,b) instead of 1/Gamma(a,b)
    alpha_drop_det_and_prior,      // MH ratio without |B| and prior terms
    untruncated_z,                 // z drawn ignoring the observed y
};

std::string to_string(SamplerMutation m);
SamplerMutation sampler_mutation_from_string(const std::string& s);

struct SamplerConfig {
    long iterations = 30000;
    long burnin = 10000;
    long thin = 20;
    int chains = 1;
    std::uint64_t seed = 0;
    bool adapt_mh = false;             // Robbins-Monro on mh_var during burn-in
    bool paper_literal_alpha = false;  // drop the prior ratio from the MH accept
    SamplerMutation mutation = SamplerMutation::none;
    int jobs = 1;

    long retained_per_chain() const { return (iterations - burnin) / thin; }
    void validate() const;
};

// Full data-augmented state of one chain, with B cached alongside rho.
struct ChainState {
    Eigen::VectorXd z;
    Eigen::VectorXd theta;
    Eigen::VectorXd beta;
    Eigen::VectorXd rho;
    double sigma2 = 1.0;

    BFactor B;
    Eigen::MatrixXd BtB;

    Eigen::VectorXd mh_sd;  // current proposal SDs (adaptation may move them)
    std::vector<long> rho_proposed, rho_accepted;  // post-burn-in counters

    // Fresh state initialized the way run_chain does it: beta and rho from
    // their priors, sigma2 from its prior, theta = 0, z from its truncated
    // conditional.
    ChainState(const Dataset& data, const Priors& priors, Rng& rng);

    // State assembled from given values (used by tests and the EM module).
    ChainState(Eigen::VectorXd z, Eigen::VectorXd theta, Eigen::VectorXd beta,
               Eigen::VectorXd rho, double sigma2, const std::vector<NetworkMatrix>& networks);

    void refresh_b_cache(const std::vector<NetworkMatrix>& networks);
    bool all_finite() const;
};

// Thinned posterior draws, stacked across chains.
struct DrawsStore {
    std::vector<std::string> names;  // beta0.., rho1.., sigma2, loglike
    Eigen::MatrixXd values;          // rows = retained draws
    Eigen::VectorXi chain;           // 1-based chain id per row
    Eigen::VectorXi iteration;       // iteration index within the chain
    Eigen::MatrixXd acceptance_rate;  // chains x k, post-burn-in MH rates
    int n_chains = 0;
    long retained_per_chain = 0;

    Eigen::Index col(const std::string& name) const;
    std::vector<double> column(const std::string& name) const;
    std::vector<double> column_for_chain(const std::string& name, int chain_id) const;

    void save_chain(const std::string& path, int chain_id) const;
    static DrawsStore load(const std::vector<std::string>& chain_paths);
};

// --- Conditional draws (Steps 1-5). Exposed so tests can drive the loop and
// --- check each conditional against an independent oracle.

// Step 1: z_i ~ Normal(x_i beta + theta_i, 1) truncated to [0,inf) when
// y_i = 1 and to (-inf,0) when y_i = 0.
void draw_z(ChainState& state, const Dataset& data, Rng& rng, bool untruncated = false);

struct GaussianConditional {
    Eigen::VectorXd mean;
    Eigen::MatrixXd precision;
    Eigen::MatrixXd covariance() const;
};

// Step 2: beta | z, theta with precision D^-1 + X'X and mean
// (D^-1 + X'X)^-1 (X'(z - theta) + D^-1 beta_mean).
GaussianConditional beta_conditional(const ChainState& state, const Dataset& data,
                                     const Priors& priors);
void draw_beta(ChainState& state, const Dataset& data, const Priors& priors, Rng& rng);

// Step 3: theta | z, beta, sigma2, rho with precision I + B'B / sigma2 and
// mean (I + B'B/sigma2)^-1 (z - X beta).
GaussianConditional theta_conditional(const ChainState& state, const Dataset& data);
void draw_theta(ChainState& state, const Dataset& data, Rng& rng);

// Step 4: sigma2 ~ inv_gamma(a, b) with a = s0 + n/2 and
// b = 2 / (theta' B'B theta + 2/q0).
std::pair<double, double> sigma2_conditional(const ChainState& state, const Priors& priors);
void draw_sigma2(ChainState& state, const Priors& priors, Rng& rng,
                 bool wrong_parametrization = false);

// Step 5 acceptance ratio (log scale, before the min with 0). `corrected`
// includes the Normal prior ratio on rho_i; `paper_literal` is the
// determinant-and-likelihood-only ratio; the mutation mode drops the
// determinant and prior terms.
enum class AlphaMode { corrected, paper_literal, drop_det_and_prior };

double rho_log_accept_ratio(const BFactor& b_old, const BFactor& b_new,
                            const Eigen::VectorXd& theta, double sigma2, double rho_old,
                            double rho_new, double prior_mean, double prior_var,
                            AlphaMode mode);

// One forced proposal on network i; returns whether it was accepted and
// refreshes the B cache on acceptance. Proposals with singular B are
// rejected outright.
bool attempt_rho_move(ChainState& state, const Dataset& data, const Priors& priors, int i,
                      double delta, AlphaMode mode, Rng& rng);

// Step 5: sequential random-walk Metropolis over rho_1..rho_k.
// adapt_gamma > 0 applies a Robbins-Monro step toward 20-40% acceptance
// (target 0.3); pass 0 after burn-in so detailed balance holds.
void draw_rho(ChainState& state, const Dataset& data, const Priors& priors, Rng& rng,
              AlphaMode mode, double adapt_gamma = 0.0, bool count = true);

// Runs `chains` independent chains (Table-order sweep z, beta, theta,
// sigma2, rho) and returns the thinned draws. Deterministic given the seed.
DrawsStore run_chain(const Dataset& data, const Priors& priors, const SamplerConfig& config);

}  // namespace mnap
