#include "mnap/mcmc.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "mnap/errors.hpp"
#include "mnap/parallel.hpp"

namespace mnap {

Priors Priors::defaults(int m, int k) {
    Priors p;
    p.beta_mean = Eigen::VectorXd::Zero(m);
    p.h = 400.0;
    p.s0 = 5.0;
    p.q0 = 10.0;
    p.rho_mean = Eigen::VectorXd::Constant(k, 0.05);
    p.rho_var = Eigen::VectorXd::Constant(k, 0.05 * 0.05);
    p.mh_var = Eigen::VectorXd::Constant(k, 0.05 * 0.05);
    return p;
}

Priors Priors::calibration_defaults(int m, int k) {
    Priors p = defaults(m, k);
    p.h = 1.0;
    return p;
}

void Priors::validate(int m, int k) const {
    if (beta_mean.size() != m) throw ConfigError("Priors: beta_mean length != m");
    if (!(h > 0.0)) throw ConfigError("Priors: h must be > 0");
    if (!(s0 > 0.0) || !(q0 > 0.0)) throw ConfigError("Priors: s0 and q0 must be > 0");
    if (rho_mean.size() != k || rho_var.size() != k || mh_var.size() != k)
        throw ConfigError("Priors: rho_mean/rho_var/mh_var must have one entry per network");
    if ((rho_var.array() <= 0.0).any()) throw ConfigError("Priors: rho_var must be > 0");
    if ((mh_var.array() <= 0.0).any()) throw ConfigError("Priors: mh_var must be > 0");
}

std::string to_string(SamplerMutation m) {
    switch (m) {
        case SamplerMutation::none: return "none";
        case SamplerMutation::wrong_sigma2_parametrization: return "wrong-sigma2";
        case SamplerMutation::alpha_drop_det_and_prior: return "alpha-drop-terms";
        case SamplerMutation::untruncated_z: return "untruncated-z";
    }
    return "none";
}

SamplerMutation sampler_mutation_from_string(const std::string& s) {
    if (s == "none") return SamplerMutation::none;
    if (s == "wrong-sigma2") return SamplerMutation::wrong_sigma2_parametrization;
    if (s == "alpha-drop-terms") return SamplerMutation::alpha_drop_det_and_prior;
    if (s == "untruncated-z") return SamplerMutation::untruncated_z;
    throw ConfigError("unknown sampler mutation: " + s);
}

void SamplerConfig::validate() const {
    if (iterations < 1) throw ConfigError("SamplerConfig: iterations must be >= 1");
    if (burnin < 0 || burnin >= iterations)
        throw ConfigError("SamplerConfig: burn-in must satisfy 0 <= burnin < iterations");
    if (thin < 1) throw ConfigError("SamplerConfig: thinning must be >= 1");
    if (chains < 1) throw ConfigError("SamplerConfig: need at least one chain");
    if (retained_per_chain() < 1)
        throw ConfigError("SamplerConfig: no draws would be retained");
}

ChainState::ChainState(const Dataset& data, const Priors& priors, Rng& rng)
    : B(Eigen::MatrixXd::Identity(data.n(), data.n())) {
    const int n = data.n();
    const int m = data.m();
    const int k = data.k();
    priors.validate(m, k);

    beta.resize(m);
    const double beta_sd = std::sqrt(priors.h);
    for (int j = 0; j < m; ++j) beta(j) = priors.beta_mean(j) + beta_sd * rng.normal();

    rho.resize(k);
    bool ok = false;
    for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
        for (int i = 0; i < k; ++i)
            rho(i) = priors.rho_mean(i) + std::sqrt(priors.rho_var(i)) * rng.normal();
        BFactor candidate(rho, data.networks);
        if (!candidate.singular()) {
            B = std::move(candidate);
            ok = true;
        }
    }
    if (!ok)
        throw SingularB("ChainState: no invertible B found among 100 prior draws of rho");
    BtB = B.matrix().transpose() * B.matrix();

    sigma2 = rng.inv_gamma(priors.s0, priors.q0);
    theta = Eigen::VectorXd::Zero(n);

    z.resize(n);
    const Eigen::VectorXd xb = data.X * beta;
    for (int i = 0; i < n; ++i)
        z(i) = data.y(i) == 1 ? trunc_normal_lower(rng, xb(i), 1.0, 0.0)
                              : trunc_normal_upper(rng, xb(i), 1.0, 0.0);

    mh_sd = priors.mh_var.cwiseSqrt();
    rho_proposed.assign(k, 0);
    rho_accepted.assign(k, 0);
}

ChainState::ChainState(Eigen::VectorXd z_, Eigen::VectorXd theta_, Eigen::VectorXd beta_,
                       Eigen::VectorXd rho_, double sigma2_,
                       const std::vector<NetworkMatrix>& networks)
    : z(std::move(z_)),
      theta(std::move(theta_)),
      beta(std::move(beta_)),
      rho(std::move(rho_)),
      sigma2(sigma2_),
      B(rho, networks) {
    if (B.singular()) throw SingularB("ChainState: B singular at supplied rho");
    BtB = B.matrix().transpose() * B.matrix();
    mh_sd = Eigen::VectorXd::Constant(rho.size(), 0.05);
    rho_proposed.assign(rho.size(), 0);
    rho_accepted.assign(rho.size(), 0);
}

void ChainState::refresh_b_cache(const std::vector<NetworkMatrix>& networks) {
    BFactor fresh(rho, networks);
    if (fresh.singular()) throw SingularB("refresh_b_cache: B singular at current rho");
    B = std::move(fresh);
    BtB = B.matrix().transpose() * B.matrix();
}

bool ChainState::all_finite() const {
    return z.allFinite() && theta.allFinite() && beta.allFinite() && rho.allFinite() &&
           std::isfinite(sigma2) && sigma2 > 0.0;
}

void draw_z(ChainState& state, const Dataset& data, Rng& rng, bool untruncated) {
    const Eigen::VectorXd mean = data.X * state.beta + state.theta;
    const int n = data.n();
    for (int i = 0; i < n; ++i) {
        if (untruncated) {
            state.z(i) = mean(i) + rng.normal();
        } else if (data.y(i) == 1) {
            state.z(i) = trunc_normal_lower(rng, mean(i), 1.0, 0.0);
        } else {
            state.z(i) = trunc_normal_upper(rng, mean(i), 1.0, 0.0);
        }
    }
}

Eigen::MatrixXd GaussianConditional::covariance() const {
    const Eigen::LLT<Eigen::MatrixXd> llt(precision);
    if (llt.info() != Eigen::Success)
        throw Error("GaussianConditional: precision not positive definite");
    return llt.solve(Eigen::MatrixXd::Identity(precision.rows(), precision.cols()));
}

GaussianConditional beta_conditional(const ChainState& state, const Dataset& data,
                                     const Priors& priors) {
    const int m = data.m();
    Eigen::MatrixXd prec = data.X.transpose() * data.X;
    prec.diagonal().array() += 1.0 / priors.h;
    const Eigen::VectorXd rhs =
        data.X.transpose() * (state.z - state.theta) + priors.beta_mean / priors.h;
    const Eigen::LLT<Eigen::MatrixXd> llt(prec);
    if (llt.info() != Eigen::Success)
        throw RankDeficient("beta_conditional: D^-1 + X'X not positive definite");
    GaussianConditional cond;
    cond.mean = llt.solve(rhs);
    cond.precision = prec;
    (void)m;
    return cond;
}

namespace {

// Draws Normal(mean, precision^-1) given the Cholesky factor of the precision.
Eigen::VectorXd draw_from_precision(const Eigen::VectorXd& mean,
                                    const Eigen::LLT<Eigen::MatrixXd>& llt, Rng& rng) {
    Eigen::VectorXd xi(mean.size());
    for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = rng.normal();
    return mean + llt.matrixU().solve(xi);
}

}  // namespace

void draw_beta(ChainState& state, const Dataset& data, const Priors& priors, Rng& rng) {
    const GaussianConditional cond = beta_conditional(state, data, priors);
    const Eigen::LLT<Eigen::MatrixXd> llt(cond.precision);
    state.beta = draw_from_precision(cond.mean, llt, rng);
}

GaussianConditional theta_conditional(const ChainState& state, const Dataset& data) {
    GaussianConditional cond;
    cond.precision = state.BtB / state.sigma2;
    cond.precision.diagonal().array() += 1.0;
    const Eigen::LLT<Eigen::MatrixXd> llt(cond.precision);
    if (llt.info() != Eigen::Success)
        throw SingularB("theta_conditional: precision factorization failed");
    cond.mean = llt.solve(data.X * state.beta * -1.0 + state.z);
    return cond;
}

void draw_theta(ChainState& state, const Dataset& data, Rng& rng) {
    Eigen::MatrixXd prec = state.BtB / state.sigma2;
    prec.diagonal().array() += 1.0;
    const Eigen::LLT<Eigen::MatrixXd> llt(prec);
    if (llt.info() != Eigen::Success)
        throw SingularB("draw_theta: precision factorization failed");
    const Eigen::VectorXd mean = llt.solve(state.z - data.X * state.beta);
    state.theta = draw_from_precision(mean, llt, rng);
}

std::pair<double, double> sigma2_conditional(const ChainState& state, const Priors& priors) {
    const double quad = state.theta.dot(state.BtB * state.theta);
    const double a = priors.s0 + 0.5 * static_cast<double>(state.z.size());
    const double b = 2.0 / (quad + 2.0 / priors.q0);
    return {a, b};
}

void draw_sigma2(ChainState& state, const Priors& priors, Rng& rng, bool wrong_parametrization) {
    const auto [a, b] = sigma2_conditional(state, priors);
    state.sigma2 = wrong_parametrization ? rng.gamma(a, b) : rng.inv_gamma(a, b);
}

double rho_log_accept_ratio(const BFactor& b_old, const BFactor& b_new,
                            const Eigen::VectorXd& theta, double sigma2, double rho_old,
                            double rho_new, double prior_mean, double prior_var,
                            AlphaMode mode) {
    if (b_new.singular()) return -std::numeric_limits<double>::infinity();

    const double quad_old = (b_old.matrix() * theta).squaredNorm();
    const double quad_new = (b_new.matrix() * theta).squaredNorm();
    double ratio = -(quad_new - quad_old) / (2.0 * sigma2);
    if (mode != AlphaMode::drop_det_and_prior)
        ratio += b_new.log_abs_det() - b_old.log_abs_det();
    if (mode == AlphaMode::corrected) {
        const double dn = rho_new - prior_mean;
        const double dd = rho_old - prior_mean;
        ratio += (dd * dd - dn * dn) / (2.0 * prior_var);
    }
    return ratio;
}

bool attempt_rho_move(ChainState& state, const Dataset& data, const Priors& priors, int i,
                      double delta, AlphaMode mode, Rng& rng) {
    Eigen::VectorXd rho_new = state.rho;
    rho_new(i) += delta;
    BFactor b_new(rho_new, data.networks);
    const double log_alpha =
        rho_log_accept_ratio(state.B, b_new, state.theta, state.sigma2, state.rho(i),
                             rho_new(i), priors.rho_mean(i), priors.rho_var(i), mode);
    const double log_u = std::log(rng.uniform());
    if (log_u < log_alpha) {
        state.rho = std::move(rho_new);
        state.BtB = b_new.matrix().transpose() * b_new.matrix();
        state.B = std::move(b_new);
        return true;
    }
    return false;
}

void draw_rho(ChainState& state, const Dataset& data, const Priors& priors, Rng& rng,
              AlphaMode mode, double adapt_gamma, bool count) {
    const int k = data.k();
    for (int i = 0; i < k; ++i) {
        const double delta = state.mh_sd(i) * rng.normal();
        const bool accepted = attempt_rho_move(state, data, priors, i, delta, mode, rng);
        if (count) {
            ++state.rho_proposed[i];
            if (accepted) ++state.rho_accepted[i];
        }
        if (adapt_gamma > 0.0) {
            // Robbins-Monro on log sd toward 30% acceptance.
            const double step = adapt_gamma * ((accepted ? 1.0 : 0.0) - 0.3);
            state.mh_sd(i) = std::clamp(state.mh_sd(i) * std::exp(step), 1e-6, 10.0);
        }
    }
}

namespace {

AlphaMode alpha_mode_for(const SamplerConfig& cfg) {
    if (cfg.mutation == SamplerMutation::alpha_drop_det_and_prior)
        return AlphaMode::drop_det_and_prior;
    return cfg.paper_literal_alpha ? AlphaMode::paper_literal : AlphaMode::corrected;
}

}  // namespace

Eigen::Index DrawsStore::col(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<Eigen::Index>(i);
    throw Error("DrawsStore: no column named " + name);
}

std::vector<double> DrawsStore::column(const std::string& name) const {
    const Eigen::Index c = col(name);
    std::vector<double> out(values.rows());
    for (Eigen::Index r = 0; r < values.rows(); ++r) out[r] = values(r, c);
    return out;
}

std::vector<double> DrawsStore::column_for_chain(const std::string& name, int chain_id) const {
    const Eigen::Index c = col(name);
    std::vector<double> out;
    for (Eigen::Index r = 0; r < values.rows(); ++r)
        if (chain(r) == chain_id) out.push_back(values(r, c));
    return out;
}

void DrawsStore::save_chain(const std::string& path, int chain_id) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write draws file: " + path);
    out.precision(17);
    out << "iteration";
    for (const std::string& name : names) out << ' ' << name;
    out << '\n';
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        if (chain(r) != chain_id) continue;
        out << iteration(r);
        for (Eigen::Index c = 0; c < values.cols(); ++c) out << ' ' << values(r, c);
        out << '\n';
    }
}

DrawsStore DrawsStore::load(const std::vector<std::string>& chain_paths) {
    if (chain_paths.empty()) throw IoError("DrawsStore::load: no files given");
    DrawsStore store;
    std::vector<std::vector<double>> rows;
    std::vector<int> chain_ids, iter_ids;
    for (std::size_t ci = 0; ci < chain_paths.size(); ++ci) {
        std::ifstream in(chain_paths[ci]);
        if (!in) throw IoError("cannot open draws file: " + chain_paths[ci]);
        std::string header;
        if (!std::getline(in, header)) throw IoError("empty draws file: " + chain_paths[ci]);
        std::istringstream hs(header);
        std::vector<std::string> cols;
        std::string tok;
        while (hs >> tok) cols.push_back(tok);
        if (cols.empty() || cols.front() != "iteration")
            throw IoError("draws file must start with an 'iteration' column: " + chain_paths[ci]);
        cols.erase(cols.begin());
        if (store.names.empty()) {
            store.names = cols;
        } else if (store.names != cols) {
            throw IoError("draws files have mismatched headers");
        }
        std::string line;
        long count = 0;
        while (std::getline(in, line)) {
            std::istringstream ls(line);
            long it;
            if (!(ls >> it)) continue;
            std::vector<double> row(store.names.size());
            for (double& v : row)
                if (!(ls >> v)) throw IoError("short row in draws file: " + chain_paths[ci]);
            rows.push_back(std::move(row));
            chain_ids.push_back(static_cast<int>(ci) + 1);
            iter_ids.push_back(static_cast<int>(it));
            ++count;
        }
        if (count == 0) throw IoError("draws file has no rows: " + chain_paths[ci]);
        store.retained_per_chain = count;
    }
    store.n_chains = static_cast<int>(chain_paths.size());
    store.values.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(store.names.size()));
    store.chain.resize(static_cast<Eigen::Index>(rows.size()));
    store.iteration.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            store.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        store.chain(static_cast<Eigen::Index>(r)) = chain_ids[r];
        store.iteration(static_cast<Eigen::Index>(r)) = iter_ids[r];
    }
    store.acceptance_rate = Eigen::MatrixXd::Zero(store.n_chains, 0);
    return store;
}

DrawsStore run_chain(const Dataset& data, const Priors& priors, const SamplerConfig& config) {
    data.validate();
    config.validate();
    const int m = data.m();
    const int k = data.k();
    priors.validate(m, k);

    const long retained = config.retained_per_chain();
    const int n_cols = m + k + 2;

    DrawsStore store;
    for (int j = 0; j < m; ++j) store.names.push_back("beta" + std::to_string(j));
    for (int i = 0; i < k; ++i) store.names.push_back("rho" + std::to_string(i + 1));
    store.names.push_back("sigma2");
    store.names.push_back("loglike");
    store.values.resize(retained * config.chains, n_cols);
    store.chain.resize(retained * config.chains);
    store.iteration.resize(retained * config.chains);
    store.acceptance_rate = Eigen::MatrixXd::Zero(config.chains, k);
    store.n_chains = config.chains;
    store.retained_per_chain = retained;

    const AlphaMode mode = alpha_mode_for(config);
    const bool untruncated = config.mutation == SamplerMutation::untruncated_z;
    const bool wrong_sigma2 = config.mutation == SamplerMutation::wrong_sigma2_parametrization;

    parallel_for(static_cast<std::size_t>(config.chains), config.jobs, [&](std::size_t ci) {
        Rng rng = Rng::substream(config.seed, 2, ci + 1);
        ChainState state(data, priors, rng);
        long row = static_cast<long>(ci) * retained;
        long kept = 0;
        for (long t = 1; t <= config.iterations; ++t) {
            const bool counting = t > config.burnin;
            draw_z(state, data, rng, untruncated);
            draw_beta(state, data, priors, rng);
            draw_theta(state, data, rng);
            draw_sigma2(state, priors, rng, wrong_sigma2);
            const double adapt_gamma =
                (config.adapt_mh && t <= config.burnin) ? std::pow(static_cast<double>(t), -0.6)
                                                        : 0.0;
            draw_rho(state, data, priors, rng, mode, adapt_gamma, counting);

            if (!state.all_finite()) {
                std::ostringstream msg;
                msg << "chain " << (ci + 1) << " diverged at iteration " << t
                    << " (non-finite state; sigma2=" << state.sigma2 << ")";
                throw ChainDiverged(msg.str());
            }

            if (counting && (t - config.burnin) % config.thin == 0) {
                Eigen::Index c = 0;
                for (int j = 0; j < m; ++j) store.values(row, c++) = state.beta(j);
                for (int i = 0; i < k; ++i) store.values(row, c++) = state.rho(i);
                store.values(row, c++) = state.sigma2;
                const Eigen::MatrixXd bbt = state.B.matrix() * state.B.matrix().transpose();
                store.values(row, c++) =
                    loglik_z_with_b(state.z, state.beta, state.sigma2, data.X, state.B, bbt);
                store.chain(row) = static_cast<int>(ci) + 1;
                store.iteration(row) = static_cast<int>(t);
                ++row;
                ++kept;
            }
        }
        for (int i = 0; i < k; ++i)
            store.acceptance_rate(static_cast<Eigen::Index>(ci), i) =
                state.rho_proposed[i] > 0
                    ? static_cast<double>(state.rho_accepted[i]) / state.rho_proposed[i]
                    : 0.0;
        (void)kept;
    });
    return store;
}

}  // namespace mnap
