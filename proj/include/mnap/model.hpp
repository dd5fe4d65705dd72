#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "mnap/bmatrix.hpp"
#include "mnap/netmat.hpp"
#include "mnap/rng.hpp"

namespace mnap {

// phi = {beta, rho, sigma2}: covariate coefficients, one partial network
// autocorrelation per W_i, and the variance of the network-propagated error.
struct ModelParams {
    Eigen::VectorXd beta;
    Eigen::VectorXd rho;
    double sigma2 = 0.0;

    ModelParams() = default;
    ModelParams(Eigen::VectorXd beta_, Eigen::VectorXd rho_, double sigma2_)
        : beta(std::move(beta_)), rho(std::move(rho_)), sigma2(sigma2_) {}

    int m() const { return static_cast<int>(beta.size()); }
    int k() const { return static_cast<int>(rho.size()); }

    // sigma2 >= 0 and finite entries; invertibility of B is checked where
    // B is actually built.
    void validate() const;
};

struct Dataset {
    Eigen::VectorXi y;                    // binary outcomes
    Eigen::MatrixXd X;                    // n x m covariates
    std::vector<NetworkMatrix> networks;  // k matrices, each n x n

    int n() const { return static_cast<int>(y.size()); }
    int m() const { return static_cast<int>(X.cols()); }
    int k() const { return static_cast<int>(networks.size()); }

    void validate() const;
};

// Latent preferences z and network-autocorrelated effects theta. The
// individual error is z - X beta - theta and the network error is B theta.
struct LatentState {
    Eigen::VectorXd z;
    Eigen::VectorXd theta;
};

// Marginal covariance of z: Q = I + sigma2 * B^-1 B^-T. Throws SingularB.
Eigen::MatrixXd marginal_Q(const ModelParams& params,
                           const std::vector<NetworkMatrix>& networks);

// Draws u ~ N(0, sigma2 I), theta = B^-1 u, z = X beta + theta + eps,
// y = 1(z > 0). Boundary z = 0 maps to y = 0. Deterministic given the rng
// stream.
std::pair<Dataset, LatentState> simulate(const ModelParams& params, const Eigen::MatrixXd& X,
                                         const std::vector<NetworkMatrix>& networks, Rng& rng);

// log N(z; X beta, Q) = -(n/2) log 2pi - 1/2 log|Q| - 1/2 (z-Xb)' Q^-1 (z-Xb),
// evaluated through factorized solves (Q^-1 is never formed).
double loglik_z(const Eigen::VectorXd& z, const ModelParams& params, const Eigen::MatrixXd& X,
                const std::vector<NetworkMatrix>& networks);

// Internals shared with the sampler: the same likelihood evaluated with
// B and B B^T already at hand.
double loglik_z_with_b(const Eigen::VectorXd& z, const Eigen::VectorXd& beta, double sigma2,
                       const Eigen::MatrixXd& X, const BFactor& b, const Eigen::MatrixXd& bbt);

// "Quick and dirty" logistic baseline: y_i ~ Bernoulli(p_i) with
// logit(p_i) = x_i beta + rho * (W y)_i, fit by IRLS with step-halving.
// Biased by construction; kept for side-by-side comparison only.
struct QadFit {
    Eigen::VectorXd coef;             // beta..., then rho (if network kept)
    Eigen::VectorXd se;
    std::vector<std::string> names;
    int iterations = 0;
    bool network_dropped = false;     // W y was identically zero
    double deviance = 0.0;

    double rho() const { return network_dropped ? 0.0 : coef(coef.size() - 1); }
};

QadFit fit_qad(const Dataset& data, int network_index);

}  // namespace mnap
