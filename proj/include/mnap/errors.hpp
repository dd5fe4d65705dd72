#pragma once

#include <stdexcept>
#include <string>

namespace mnap {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// B = I - sum_i rho_i W_i is not invertible at the requested point.
struct SingularB : Error {
    using Error::Error;
};

struct RankDeficient : Error {
    using Error::Error;
};

// Iterative fit failed to converge (e.g. separated logistic data).
struct NonConvergence : Error {
    using Error::Error;
};

// Numerical maximizer gave up; message carries the trajectory.
struct MaximizerFailure : Error {
    using Error::Error;
};

// MCMC state became non-finite; message carries iteration diagnostics.
struct ChainDiverged : Error {
    using Error::Error;
};

struct InsufficientData : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace mnap
