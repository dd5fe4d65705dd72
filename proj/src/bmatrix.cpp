#include "mnap/bmatrix.hpp"

#include <cmath>

#include "mnap/errors.hpp"

namespace mnap {

Eigen::MatrixXd combine_networks(const Eigen::VectorXd& rho,
                                 const std::vector<NetworkMatrix>& networks) {
    if (networks.empty()) throw Error("combine_networks: no networks");
    if (rho.size() != static_cast<Eigen::Index>(networks.size()))
        throw Error("combine_networks: rho length != network count");
    const int n = networks.front().n;
    Eigen::MatrixXd b = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t i = 0; i < networks.size(); ++i) {
        if (networks[i].n != n) throw Error("combine_networks: network dimension mismatch");
        b -= rho(static_cast<Eigen::Index>(i)) * networks[i].values;
    }
    return b;
}

BFactor::BFactor(const Eigen::VectorXd& rho, const std::vector<NetworkMatrix>& networks)
    : b_(combine_networks(rho, networks)) {
    factorize();
}

BFactor::BFactor(Eigen::MatrixXd b) : b_(std::move(b)) {
    if (b_.rows() != b_.cols()) throw Error("BFactor: matrix must be square");
    factorize();
}

double BFactor::singular_log_tolerance(int n) { return std::log(1e-10 * n); }

void BFactor::factorize() {
    if (!b_.allFinite()) {
        singular_ = true;
        return;
    }
    lu_.compute(b_);
    double log_det = 0.0;
    bool zero_pivot = false;
    const auto& u = lu_.matrixLU();
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
        const double pivot = std::abs(u(i, i));
        if (pivot == 0.0 || !std::isfinite(pivot)) {
            zero_pivot = true;
            break;
        }
        log_det += std::log(pivot);
    }
    log_abs_det_ = log_det;
    singular_ = zero_pivot || !std::isfinite(log_det) ||
                log_det < singular_log_tolerance(n());
}

void BFactor::require_invertible() const {
    if (singular_) throw SingularB("B = I - sum rho_i W_i is numerically singular");
}

double BFactor::log_abs_det() const {
    require_invertible();
    return log_abs_det_;
}

Eigen::VectorXd BFactor::solve(const Eigen::VectorXd& rhs) const {
    require_invertible();
    return lu_.solve(rhs);
}

Eigen::MatrixXd BFactor::solve(const Eigen::MatrixXd& rhs) const {
    require_invertible();
    return lu_.solve(rhs);
}

Eigen::MatrixXd BFactor::inverse() const {
    require_invertible();
    return lu_.inverse();
}

}  // namespace mnap
