#ifndef DIVEST_ESTIMATOR_HPP
#define DIVEST_ESTIMATOR_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "divest/dividend.hpp"
#include "divest/levy_model.hpp"

namespace divest {

/// Ensemble mean of discounted dividends per barrier level.
struct ContrastCurve {
    std::vector<double> thetas;
    std::vector<double> values;
    std::size_t alpha = 0;
};

struct EstimateDiagnostics {
    std::uint64_t seed = 0;
    std::size_t alpha = 0;
    double h = 0.0;
    std::size_t n = 0;
    std::vector<std::string> warnings;
    double grid_theta_hat = 0.0;  ///< argmax on the grid, before refinement
    bool refined = false;
};

struct Estimate {
    double theta_hat = 0.0;
    ContrastCurve curve;
    EstimateDiagnostics diagnostics;
};

struct EstimateOptions {
    bool refine = false;
    unsigned threads = 0;  ///< 0: hardware concurrency
    /// Test hook: use the identity permutation for every ensemble member.
    bool identity_permutations = false;
};

/// Pointwise ensemble mean of value_curve. Per-path curves are combined by a
/// pairwise tree keyed by ensemble index, so the result does not depend on
/// the thread count.
ContrastCurve contrast(std::span<const StepPath> ensemble, std::span<const double> grid, double r,
                       unsigned threads = 0);

/// Index of the largest value; ties go to the smallest theta.
std::size_t argmax_index(const ContrastCurve& curve);

/**
 * Maximum-contrast barrier estimate from one increment series: draws `alpha`
 * uniform permutations rooted at `seed`, evaluates every quasi-path on the
 * grid and returns the smallest maximizer of the ensemble mean.
 *
 * Quasi-paths are streamed one at a time and each is only scanned until
 * every grid barrier has been ruined.
 */
Estimate estimate_barrier(const IncrementSeries& increments, double u0, std::size_t alpha,
                          std::span<const double> grid, double r, std::uint64_t seed,
                          const EstimateOptions& options = {});

/// Searches the exact contrast at every ensemble breakpoint between the
/// grid neighbours of the grid argmax. Never returns a point whose contrast
/// is below the grid maximum.
double refine_argmax(const ContrastCurve& curve, std::span<const StepPath> ensemble, double r,
                     unsigned threads = 0);

}  // namespace divest

#endif  // DIVEST_ESTIMATOR_HPP
