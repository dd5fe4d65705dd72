#include "mnap/model.hpp"

#include <cmath>

#include "mnap/errors.hpp"

namespace mnap {

void ModelParams::validate() const {
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2))
        throw Error("ModelParams: sigma2 must be finite and >= 0");
    if (!beta.allFinite() || !rho.allFinite())
        throw Error("ModelParams: non-finite coefficients");
}

void Dataset::validate() const {
    const int nn = n();
    if (nn == 0) throw Error("Dataset: empty outcome vector");
    for (int i = 0; i < nn; ++i)
        if (y(i) != 0 && y(i) != 1) throw Error("Dataset: y entries must be 0 or 1");
    if (X.rows() != nn) throw Error("Dataset: X row count != length of y");
    if (!X.allFinite()) throw Error("Dataset: non-finite covariates");
    if (networks.empty()) throw Error("Dataset: at least one network required");
    for (const NetworkMatrix& w : networks) {
        w.validate();
        if (w.n != nn) throw Error("Dataset: network dimension != n");
    }
}

Eigen::MatrixXd marginal_Q(const ModelParams& params,
                           const std::vector<NetworkMatrix>& networks) {
    params.validate();
    const BFactor b(params.rho, networks);
    if (b.singular()) throw SingularB("marginal_Q: B is singular");
    const int n = b.n();
    const Eigen::MatrixXd binv = b.inverse();
    Eigen::MatrixXd q = params.sigma2 * (binv * binv.transpose());
    q += Eigen::MatrixXd::Identity(n, n);
    // Force exact symmetry; downstream Cholesky factorizations expect it.
    q = 0.5 * (q + q.transpose()).eval();
    return q;
}

std::pair<Dataset, LatentState> simulate(const ModelParams& params, const Eigen::MatrixXd& X,
                                         const std::vector<NetworkMatrix>& networks, Rng& rng) {
    params.validate();
    const int n = static_cast<int>(X.rows());
    if (params.m() != static_cast<int>(X.cols()))
        throw Error("simulate: beta length != number of covariate columns");
    const BFactor b(params.rho, networks);
    if (b.singular()) throw SingularB("simulate: B is singular at the requested rho");

    const double sigma = std::sqrt(params.sigma2);
    Eigen::VectorXd u(n);
    for (int i = 0; i < n; ++i) u(i) = sigma * rng.normal();
    const Eigen::VectorXd theta = b.solve(u);

    Eigen::VectorXd z = X * params.beta + theta;
    for (int i = 0; i < n; ++i) z(i) += rng.normal();

    Dataset data;
    data.y.resize(n);
    for (int i = 0; i < n; ++i) data.y(i) = z(i) > 0.0 ? 1 : 0;
    data.X = X;
    data.networks = networks;
    data.validate();
    return {std::move(data), LatentState{std::move(z), theta}};
}

double loglik_z_with_b(const Eigen::VectorXd& z, const Eigen::VectorXd& beta, double sigma2,
                       const Eigen::MatrixXd& X, const BFactor& b, const Eigen::MatrixXd& bbt) {
    const int n = static_cast<int>(z.size());
    // Q = B^-1 (B B' + sigma2 I) B^-T, so
    //   log|Q| = log|B B' + sigma2 I| - 2 log|B|
    //   Q^-1   = B' (B B' + sigma2 I)^-1 B.
    Eigen::MatrixXd c = bbt;
    c.diagonal().array() += sigma2;
    const Eigen::LLT<Eigen::MatrixXd> llt(c);
    if (llt.info() != Eigen::Success)
        throw SingularB("loglik_z: covariance factorization failed");
    double log_det_c = 0.0;
    for (int i = 0; i < n; ++i) log_det_c += 2.0 * std::log(llt.matrixL()(i, i));
    const double log_det_q = log_det_c - 2.0 * b.log_abs_det();

    const Eigen::VectorXd resid = b.matrix() * (z - X * beta);
    const double quad = resid.dot(llt.solve(resid));

    constexpr double kLog2Pi = 1.8378770664093454836;
    return -0.5 * n * kLog2Pi - 0.5 * log_det_q - 0.5 * quad;
}

double loglik_z(const Eigen::VectorXd& z, const ModelParams& params, const Eigen::MatrixXd& X,
                const std::vector<NetworkMatrix>& networks) {
    params.validate();
    const BFactor b(params.rho, networks);
    if (b.singular()) throw SingularB("loglik_z: B is singular");
    const Eigen::MatrixXd bbt = b.matrix() * b.matrix().transpose();
    return loglik_z_with_b(z, params.beta, params.sigma2, X, b, bbt);
}

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double bernoulli_deviance(const Eigen::VectorXi& y, const Eigen::VectorXd& eta) {
    double dev = 0.0;
    for (int i = 0; i < y.size(); ++i) {
        // -2 log p(y_i), written to stay finite for large |eta|.
        const double e = eta(i);
        const double log1pexp = e > 30.0 ? e : std::log1p(std::exp(e));
        dev += 2.0 * (log1pexp - (y(i) == 1 ? e : 0.0));
    }
    return dev;
}

}  // namespace

QadFit fit_qad(const Dataset& data, int network_index) {
    data.validate();
    if (network_index < 0 || network_index >= data.k())
        throw Error("fit_qad: network index out of range");
    const int n = data.n();
    const int m = data.m();

    const Eigen::VectorXd wy =
        data.networks[network_index].values * data.y.cast<double>();
    const bool drop_network = wy.isZero(0.0);
    const int p = drop_network ? m : m + 1;

    Eigen::MatrixXd design(n, p);
    design.leftCols(m) = data.X;
    if (!drop_network) design.col(m) = wy;

    {
        const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
        if (qr.rank() < p) throw RankDeficient("fit_qad: design matrix [X | Wy] is rank deficient");
    }

    Eigen::VectorXd coef = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd eta = design * coef;
    double dev = bernoulli_deviance(data.y, eta);
    Eigen::MatrixXd info(p, p);

    constexpr int kMaxIter = 100;
    constexpr double kTol = 1e-8;
    int iter = 0;
    for (; iter < kMaxIter; ++iter) {
        Eigen::VectorXd mu(n), wgt(n);
        for (int i = 0; i < n; ++i) {
            mu(i) = logistic(eta(i));
            wgt(i) = mu(i) * (1.0 - mu(i));
        }
        info = design.transpose() * wgt.asDiagonal() * design;
        const Eigen::VectorXd score =
            design.transpose() * (data.y.cast<double>() - mu);
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
            throw NonConvergence("fit_qad: information matrix not positive definite "
                                 "(fitted probabilities degenerate)");
        Eigen::VectorXd step = ldlt.solve(score);

        // Step-halving on the deviance.
        double new_dev = 0.0;
        Eigen::VectorXd new_coef;
        bool improved = false;
        for (int half = 0; half < 30; ++half) {
            new_coef = coef + step;
            eta = design * new_coef;
            new_dev = bernoulli_deviance(data.y, eta);
            if (new_dev <= dev + 1e-12) {
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved)
            throw NonConvergence("fit_qad: step-halving failed to improve the deviance");

        const double max_change = (new_coef - coef).cwiseAbs().maxCoeff();
        coef = new_coef;
        dev = new_dev;
        if (coef.cwiseAbs().maxCoeff() > 1e4)
            throw NonConvergence("fit_qad: coefficients diverging (separated data?)");
        if (max_change < kTol) break;
    }
    if (iter == kMaxIter)
        throw NonConvergence("fit_qad: IRLS did not converge in 100 iterations");

    QadFit fit;
    fit.coef = coef;
    fit.iterations = iter + 1;
    fit.network_dropped = drop_network;
    fit.deviance = dev;
    const Eigen::MatrixXd cov = info.ldlt().solve(Eigen::MatrixXd::Identity(p, p));
    fit.se = cov.diagonal().cwiseSqrt();
    for (int j = 0; j < m; ++j) fit.names.push_back("beta" + std::to_string(j));
    if (!drop_network) fit.names.push_back("rho");
    return fit;
}

}  // namespace mnap
