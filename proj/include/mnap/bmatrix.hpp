#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mnap/netmat.hpp"

namespace mnap {

// LU-factored B = I - sum_i rho_i W_i with its log-absolute-determinant.
//
// Singularity rule, shared with the validity-region scan: B counts as
// singular when |det B| <= 1e-10 * n or the factorization produces a
// non-finite value. Accessors that need an invertible B throw SingularB;
// samplers should test singular() and treat the point as invalid instead.
class BFactor {
public:
    BFactor(const Eigen::VectorXd& rho, const std::vector<NetworkMatrix>& networks);
    explicit BFactor(Eigen::MatrixXd b);

    bool singular() const { return singular_; }
    int n() const { return static_cast<int>(b_.rows()); }

    const Eigen::MatrixXd& matrix() const { return b_; }

    double log_abs_det() const;

    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
    Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;
    Eigen::MatrixXd inverse() const;

    static double singular_log_tolerance(int n);

private:
    void factorize();
    void require_invertible() const;

    Eigen::MatrixXd b_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    double log_abs_det_ = 0.0;
    bool singular_ = false;
};

Eigen::MatrixXd combine_networks(const Eigen::VectorXd& rho,
                                 const std::vector<NetworkMatrix>& networks);

}  // namespace mnap
