#pragma once

#include <cstdint>
#include <random>

namespace mnap {

// Seedable random stream with explicit substream derivation.
//
// All draw types (uniform, normal, gamma, truncated normal) are generated
// from the raw 64-bit output of a mt19937_64 through fixed arithmetic, so a
// (seed, stream) pair reproduces the same sequence on any platform. Nothing
// here touches std::uniform_real_distribution / std::normal_distribution,
// whose output is implementation-defined.
//
// Stream splitting: independent components derive their stream from a master
// seed and small integer tags, Rng::substream(master, tag, index). The tags
// in use across the library:
//   1  simulation of a dataset
//   2  one MCMC chain (index = chain number)
//   3  one validation replication (index = replication number)
//   4  EM Monte-Carlo E-step (index = EM iteration)
//   5  validation design generation
// so e.g. chains and replications never share a stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    static Rng substream(std::uint64_t master, std::uint64_t tag, std::uint64_t index = 0);

    std::uint64_t next_u64();

    // Uniform on (0, 1); never returns an exact 0 or 1.
    double uniform();

    // Standard normal via the inverse CDF (Wichura AS 241).
    double normal();

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Exponential with the given rate.
    double exponential(double rate = 1.0);

    // Gamma(shape, scale) by Marsaglia-Tsang; shape < 1 handled by boosting.
    double gamma(double shape, double scale);

    // Inverse gamma in the convention used throughout: if
    // x ~ inv_gamma(a, b) then 1/x ~ Gamma(shape a, scale b), i.e. the
    // density of x is proportional to x^-(a+1) exp(-1/(b x)).
    double inv_gamma(double shape, double scale);

private:
    std::mt19937_64 gen_;
};

// One draw from Normal(mean, sd^2) conditioned on the value being >= lower.
// Plain rejection in the bulk, Robert (1995) exponential rejection in the
// tail; bounded expected iterations for any lower bound, with an inverse-CDF
// fallback so the call can never spin.
double trunc_normal_lower(Rng& rng, double mean, double sd, double lower);

// Same, conditioned on the value being <= upper.
double trunc_normal_upper(Rng& rng, double mean, double sd, double upper);

namespace detail {
std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index);
}  // namespace detail

}  // namespace mnap
