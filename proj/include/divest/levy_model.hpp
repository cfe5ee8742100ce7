#ifndef DIVEST_LEVY_MODEL_HPP
#define DIVEST_LEVY_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

#include "divest/rng.hpp"

namespace divest {

/**
 * Surplus model X_t = u + c t + sigma W_t - S_t where S is compound Poisson
 * with intensity `lambda` and exponential claims of rate `mu` (mean 1/mu).
 */
struct ModelParams {
    double u = 0.0;       ///< initial surplus
    double c = 0.0;       ///< premium rate
    double sigma = 0.0;   ///< diffusion volatility
    double lambda = 0.0;  ///< claim intensity
    double mu = 1.0;      ///< exponential claim rate

    /// E[S_1] = lambda / mu.
    double expected_claims_rate() const noexcept { return lambda / mu; }
    /// E[X_1 - u].
    double net_drift() const noexcept { return c - expected_claims_rate(); }
    /// Var[X_h - X_0] = sigma^2 h + 2 lambda h / mu^2.
    double increment_variance(double h) const noexcept {
        return sigma * sigma * h + 2.0 * lambda * h / (mu * mu);
    }
};

/// Checks the model constraints, including the net profit condition
/// c > lambda/mu. Throws divest::Error on violation.
ModelParams validate_params(const ModelParams& raw);

/// Regular observation grid t_k = k h, k = 0..n.
struct SamplingScheme {
    double h = 1.0;
    std::size_t n = 1;

    double horizon() const noexcept { return static_cast<double>(n) * h; }
    double time(std::size_t k) const noexcept { return static_cast<double>(k) * h; }

    friend bool operator==(const SamplingScheme&, const SamplingScheme&) = default;
};

SamplingScheme make_scheme(double h, std::size_t n);

/// Advisory message when the grid is far from high-frequency, long-horizon
/// sampling (h >= 1 or T < 10); empty when the scheme looks reasonable.
std::optional<std::string> sampling_warning(const SamplingScheme& scheme);

struct IncrementSeries {
    SamplingScheme scheme;
    std::vector<double> deltas;
};

/// Right-continuous step path on the grid: values[k] = X_{t_k}.
struct StepPath {
    double u0 = 0.0;
    std::vector<double> values;
    SamplingScheme scheme;

    std::size_t steps() const noexcept { return scheme.n; }
};

/**
 * Draws exact increments of the surplus model one grid step at a time:
 * c h + sigma sqrt(h) Z - (sum of Poisson(lambda h) exponential claims).
 * Owns its engine, so separate samplers never share state.
 */
class IncrementSampler {
public:
    IncrementSampler(const ModelParams& params, double h, std::uint64_t seed);

    double next();

private:
    double drift_;
    double scale_;
    bool has_jumps_;
    Engine engine_;
    boost::random::normal_distribution<double> normal_;
    boost::random::poisson_distribution<int, double> count_;
    boost::random::exponential_distribution<double> claim_;
};

IncrementSeries simulate_increments(const ModelParams& params, const SamplingScheme& scheme,
                                    std::uint64_t seed);

/// Cumulative sum u0 + deltas[0] + ... + deltas[k-1], accumulated left to right.
StepPath path_from_increments(double u0, const IncrementSeries& increments);

/// Consecutive differences of a path (inverse of path_from_increments).
IncrementSeries increments_of(const StepPath& path);

}  // namespace divest

#endif  // DIVEST_LEVY_MODEL_HPP
