#ifndef DIVEST_DIVIDEND_HPP
#define DIVEST_DIVIDEND_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "divest/levy_model.hpp"

namespace divest {

struct BarrierParams {
    double theta = 0.0;  ///< barrier level
    double r = 0.0;      ///< discount rate, > 0
};

struct DividendOutcome {
    std::size_t ruin_index = 0;  ///< k* with tau = t_{k*}; n when not ruined
    bool ruined = false;
    double value = 0.0;  ///< discounted dividends paid strictly before tau
};

struct ValueCurve {
    std::vector<double> thetas;
    std::vector<double> values;
    /// Sorted distinct levels inside (min theta, max theta) where the curve
    /// can change shape: running-maximum levels (slope changes) and ruin
    /// release levels (upward jumps).
    std::vector<double> breakpoints;
};

/// e^{-r t_k} with t_k = k h. Every route uses this exact expression.
inline double discount_factor(double r, double h, std::size_t k) noexcept {
    return std::exp(-r * (static_cast<double>(k) * h));
}

/// Cumulative dividend (M - theta) v 0 for left-open running maximum M.
inline double barrier_excess(double running_max, double theta) noexcept {
    return std::max(running_max - theta, 0.0);
}

/// U_k < 0 for the controlled value U_k = X_k - (M_k - theta) v 0.
inline bool ruined_at(double running_max, double value, double theta) noexcept {
    return value - barrier_excess(running_max, theta) < 0.0;
}

/// M_k = max(X_0..X_{k-1}) for k = 1..n (left-open supremum).
std::vector<double> running_presup(const StepPath& path);

/// xi_k = (M_k - theta) v 0 for k = 1..n.
std::vector<double> cumulative_dividends(const StepPath& path, double theta);

/**
 * Discounted barrier dividends on the grid:
 *   sum_k 1{ruin_index > k} e^{-r t_k} (xi_k - xi_{k-1}),  xi_0 = 0,
 * with ruin at the first k where X_k - xi_k < 0, else ruin_index = n.
 */
DividendOutcome barrier_outcome(const StepPath& path, const BarrierParams& barrier);

/// Exact affine-between-knots form of theta -> value on [lo, hi].
struct PiecewiseValue {
    std::vector<double> knots;   ///< knots[0] = lo
    std::vector<double> values;  ///< value at each knot
    std::vector<double> slopes;  ///< right derivative at each knot
    double hi = 0.0;

    double evaluate(double theta) const;
};

/**
 * Precomputed view of one path that answers barrier_outcome for any theta
 * without rescanning the path.
 *
 * Values are pushed one grid step at a time. Only the steps where the
 * running maximum rises can pay dividends, and only steps that extend the
 * ruin frontier can change the ruin index, so those are the only ones kept.
 * Once every theta <= theta_cap is ruined the profile is saturated and
 * further input is ignored. Queries reproduce barrier_outcome bit for bit.
 */
class DividendProfile {
public:
    DividendProfile() = default;

    void reset(double u0, const SamplingScheme& scheme, double r,
               double theta_cap = std::numeric_limits<double>::infinity());

    /// Feeds X_{t_k} for the next k. Returns false once more input cannot
    /// change any answer (saturated or all n steps seen).
    bool push(double value);

    bool complete() const noexcept { return saturated_ || pushed_ == n_; }
    bool saturated() const noexcept { return saturated_; }
    std::size_t steps_seen() const noexcept { return pushed_; }
    double theta_cap() const noexcept { return cap_; }

    DividendOutcome outcome(double theta) const;
    double value(double theta) const { return outcome(theta).value; }
    /// Right derivative of theta -> value.
    double slope(double theta) const;

    /// Running-maximum levels in (lo, hi).
    std::vector<double> kink_levels(double lo, double hi) const;
    /// Thetas in (lo, hi) at which the ruin index increases; the value jumps
    /// there and is right-continuous.
    std::vector<double> ruin_levels(double lo, double hi) const;
    /// Union of kink and ruin levels in (lo, hi), sorted and distinct.
    std::vector<double> breakpoints(double lo, double hi) const;

    PiecewiseValue piecewise(double lo, double hi) const;

    static DividendProfile from_path(const StepPath& path, double r,
                                     double theta_cap = std::numeric_limits<double>::infinity());

private:
    struct Record {
        std::size_t k;
        double before;  ///< M_{k-1}, or -inf for k = 1
        double level;   ///< M_k
        double discount;
    };
    struct RuinStep {
        double release;  ///< smallest theta that survives step k
        std::size_t k;
    };

    void check_query(double theta) const;

    double h_ = 1.0;
    double r_ = 0.0;
    double cap_ = std::numeric_limits<double>::infinity();
    std::size_t n_ = 0;
    std::size_t pushed_ = 0;
    double running_max_ = 0.0;
    double last_level_ = -std::numeric_limits<double>::infinity();
    double ruin_front_ = -std::numeric_limits<double>::infinity();
    bool saturated_ = false;
    std::vector<Record> records_;
    std::vector<RuinStep> ruin_steps_;
};

/// Smallest theta for which step k is not ruinous, given M_k and X_k.
double ruin_release_level(double running_max, double value);

/// values[j] = barrier_outcome(path, {grid[j], r}).value, in the order given.
ValueCurve value_curve(const StepPath& path, std::span<const double> grid, double r);

}  // namespace divest

#endif  // DIVEST_DIVIDEND_HPP
