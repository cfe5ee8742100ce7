#include "divest/estimator.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "divest/error.hpp"
#include "divest/parallel.hpp"
#include "divest/quasi_process.hpp"

namespace divest {

namespace {

void require_grid(std::span<const double> grid) {
    if (grid.empty()) throw Error(ErrorKind::DomainError, "barrier grid is empty");
    for (double theta : grid) {
        if (!std::isfinite(theta)) throw Error(ErrorKind::DomainError, "barrier grid has non-finite values");
    }
}

/// out = sum of rows [lo, hi) of a row-major (rows x width) matrix, split
/// pairwise so the association order depends only on the row indices.
void pairwise_sum(const std::vector<double>& rows, std::size_t width, std::size_t lo, std::size_t hi,
                  std::vector<double>& out) {
    if (hi - lo == 1) {
        out.assign(rows.begin() + static_cast<std::ptrdiff_t>(lo * width),
                   rows.begin() + static_cast<std::ptrdiff_t>((lo + 1) * width));
        return;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    std::vector<double> right;
    pairwise_sum(rows, width, lo, mid, out);
    pairwise_sum(rows, width, mid, hi, right);
    for (std::size_t j = 0; j < width; ++j) out[j] += right[j];
}

/// Builds profile `index` with the given cap into `profile` using worker
/// scratch slot `worker`.
template <class Builder>
ContrastCurve mean_curve(std::size_t alpha, std::span<const double> grid, unsigned threads,
                         Builder&& build) {
    const std::size_t width = grid.size();
    const double cap = *std::max_element(grid.begin(), grid.end());
    std::vector<double> rows(alpha * width);
    std::vector<DividendProfile> profiles(resolve_threads(threads));
    parallel_for(alpha, threads, [&](std::size_t i, unsigned worker) {
        DividendProfile& profile = profiles[worker];
        build(i, cap, profile, worker);
        for (std::size_t j = 0; j < width; ++j) rows[i * width + j] = profile.value(grid[j]);
    });
    ContrastCurve curve;
    curve.thetas.assign(grid.begin(), grid.end());
    curve.alpha = alpha;
    pairwise_sum(rows, width, 0, alpha, curve.values);
    for (double& v : curve.values) v /= static_cast<double>(alpha);
    return curve;
}

template <class Builder>
double mean_value_at(std::size_t alpha, double theta, unsigned threads, Builder&& build) {
    const double grid[] = {theta};
    return mean_curve(alpha, grid, threads, build).values.front();
}

template <class Builder>
double refine_impl(const ContrastCurve& curve, std::size_t alpha, unsigned threads, Builder&& build) {
    const std::size_t best = argmax_index(curve);
    const double theta_star = curve.thetas[best];
    const double best_value = curve.values[best];

    double lo = theta_star;
    double hi = theta_star;
    for (double t : curve.thetas) {
        if (t < theta_star && (lo == theta_star || t > lo)) lo = t;
        if (t > theta_star && (hi == theta_star || t < hi)) hi = t;
    }
    if (lo == hi) return theta_star;

    std::vector<PiecewiseValue> pieces(alpha);
    std::vector<DividendProfile> profiles(resolve_threads(threads));
    parallel_for(alpha, threads, [&](std::size_t i, unsigned worker) {
        DividendProfile& profile = profiles[worker];
        build(i, hi, profile, worker);
        pieces[i] = profile.piecewise(lo, hi);
    });

    std::vector<double> candidates{lo, hi};
    for (const PiecewiseValue& pw : pieces) candidates.insert(candidates.end(), pw.knots.begin(), pw.knots.end());
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    std::vector<double> sums(candidates.size(), 0.0);
    for (const PiecewiseValue& pw : pieces) {
        std::size_t knot = 0;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            const double theta = candidates[c];
            while (knot + 1 < pw.knots.size() && pw.knots[knot + 1] <= theta) ++knot;
            sums[c] += pw.values[knot] + pw.slopes[knot] * (theta - pw.knots[knot]);
        }
    }
    const auto top = std::max_element(sums.begin(), sums.end());
    const double candidate = candidates[static_cast<std::size_t>(std::distance(sums.begin(), top))];
    if (candidate == theta_star) return theta_star;

    const double exact = mean_value_at(alpha, candidate, threads, build);
    if (exact > best_value || (exact == best_value && candidate < theta_star)) return candidate;
    return theta_star;
}

}  // namespace

std::size_t argmax_index(const ContrastCurve& curve) {
    if (curve.values.empty()) throw Error(ErrorKind::DomainError, "contrast curve is empty");
    std::size_t best = 0;
    for (std::size_t j = 1; j < curve.values.size(); ++j) {
        const double v = curve.values[j];
        const double b = curve.values[best];
        if (v > b || (v == b && curve.thetas[j] < curve.thetas[best])) best = j;
    }
    return best;
}

ContrastCurve contrast(std::span<const StepPath> ensemble, std::span<const double> grid, double r,
                       unsigned threads) {
    if (ensemble.empty()) throw Error(ErrorKind::EmptyEnsemble, "contrast needs at least one path");
    for (const StepPath& p : ensemble) {
        if (!(p.scheme == ensemble.front().scheme)) {
            throw Error(ErrorKind::SchemeMismatch, "ensemble paths use different sampling schemes");
        }
    }
    require_grid(grid);
    return mean_curve(ensemble.size(), grid, threads,
                      [&](std::size_t i, double cap, DividendProfile& profile, unsigned) {
                          profile = DividendProfile::from_path(ensemble[i], r, cap);
                      });
}

double refine_argmax(const ContrastCurve& curve, std::span<const StepPath> ensemble, double r,
                     unsigned threads) {
    if (ensemble.empty()) throw Error(ErrorKind::EmptyEnsemble, "refinement needs the ensemble");
    return refine_impl(curve, ensemble.size(), threads,
                       [&](std::size_t i, double cap, DividendProfile& profile, unsigned) {
                           profile = DividendProfile::from_path(ensemble[i], r, cap);
                       });
}

Estimate estimate_barrier(const IncrementSeries& increments, double u0, std::size_t alpha,
                          std::span<const double> grid, double r, std::uint64_t seed,
                          const EstimateOptions& options) {
    const SamplingScheme scheme = make_scheme(increments.scheme.h, increments.scheme.n);
    if (increments.deltas.size() != scheme.n) {
        throw Error(ErrorKind::LengthMismatch, "increment count differs from scheme.n");
    }
    if (alpha < 1) throw Error(ErrorKind::NonPositive, "alpha must be at least 1");
    require_grid(grid);
    for (double theta : grid) {
        if (theta < u0) throw Error(ErrorKind::DomainError, "barrier grid must not start below u0");
    }

    std::vector<LazyShuffle> shuffles(resolve_threads(options.threads), LazyShuffle(scheme.n));
    auto build = [&](std::size_t i, double cap, DividendProfile& profile, unsigned worker) {
        profile.reset(u0, scheme, r, cap);
        LazyShuffle& shuffle = shuffles[worker];
        shuffle.reset(permutation_seed(seed, i));
        double level = u0;
        for (std::size_t k = 0; k < scheme.n; ++k) {
            const std::size_t idx = options.identity_permutations ? k : shuffle.next();
            level += increments.deltas[idx];
            if (!profile.push(level)) break;
        }
    };

    Estimate est;
    est.curve = mean_curve(alpha, grid, options.threads, build);
    est.theta_hat = est.curve.thetas[argmax_index(est.curve)];
    est.diagnostics.seed = seed;
    est.diagnostics.alpha = alpha;
    est.diagnostics.h = scheme.h;
    est.diagnostics.n = scheme.n;
    est.diagnostics.grid_theta_hat = est.theta_hat;
    if (auto w = sampling_warning(scheme)) est.diagnostics.warnings.push_back(*w);
    if (scheme.n >= alpha) {
        est.diagnostics.warnings.push_back(
            fmt::format("permutation set is small relative to n (n={}, alpha={})", scheme.n, alpha));
    }
    if (options.refine) {
        est.theta_hat = refine_impl(est.curve, alpha, options.threads, build);
        est.diagnostics.refined = true;
    }
    return est;
}

}  // namespace divest
