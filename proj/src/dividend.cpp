#include "divest/dividend.hpp"

#include <bit>
#include <cstdint>
#include <numeric>

#include "divest/error.hpp"

namespace divest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_rate(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw Error(ErrorKind::NonPositive, "discount rate r must be positive");
    }
}

void require_path(const StepPath& path) {
    if (path.values.size() != path.scheme.n + 1 || path.scheme.n < 1) {
        throw Error(ErrorKind::LengthMismatch, "path must hold n+1 values with n >= 1");
    }
}

}  // namespace

std::vector<double> running_presup(const StepPath& path) {
    require_path(path);
    std::vector<double> m(path.scheme.n);
    double running = path.values[0];
    for (std::size_t k = 1; k <= path.scheme.n; ++k) {
        m[k - 1] = running;
        running = std::max(running, path.values[k]);
    }
    return m;
}

std::vector<double> cumulative_dividends(const StepPath& path, double theta) {
    std::vector<double> xi = running_presup(path);
    for (double& x : xi) x = barrier_excess(x, theta);
    return xi;
}

DividendOutcome barrier_outcome(const StepPath& path, const BarrierParams& barrier) {
    require_path(path);
    require_rate(barrier.r);
    const std::size_t n = path.scheme.n;
    DividendOutcome out{n, false, 0.0};
    double running = path.values[0];
    double xi_prev = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        const double m = running;
        const double xi = barrier_excess(m, barrier.theta);
        if (ruined_at(m, path.values[k], barrier.theta)) {
            out.ruin_index = k;
            out.ruined = true;
            break;
        }
        if (k < n) out.value += discount_factor(barrier.r, path.scheme.h, k) * (xi - xi_prev);
        xi_prev = xi;
        running = std::max(running, path.values[k]);
    }
    return out;
}

double ruin_release_level(double running_max, double value) {
    if (!(value >= 0.0)) return kInf;
    // Survival is monotone in theta: -inf is ruined, running_max is not.
    // Bisect on the order-preserving integer image of the doubles.
    auto key = [](double d) {
        const auto i = std::bit_cast<std::int64_t>(d);
        return i < 0 ? std::numeric_limits<std::int64_t>::min() - i : i;
    };
    auto from_key = [](std::int64_t k) {
        return std::bit_cast<double>(k < 0 ? std::numeric_limits<std::int64_t>::min() - k : k);
    };
    std::int64_t ruined = key(-kInf);
    std::int64_t safe = key(running_max);
    while (static_cast<std::uint64_t>(safe) - static_cast<std::uint64_t>(ruined) > 1) {
        const std::int64_t mid = std::midpoint(ruined, safe);
        if (ruined_at(running_max, value, from_key(mid))) ruined = mid; else safe = mid;
    }
    return from_key(safe);
}

double PiecewiseValue::evaluate(double theta) const {
    if (knots.empty() || !(theta >= knots.front()) || !(theta <= hi)) {
        throw Error(ErrorKind::DomainError, "theta outside the piecewise range");
    }
    const auto it = std::upper_bound(knots.begin(), knots.end(), theta);
    const auto i = static_cast<std::size_t>(std::distance(knots.begin(), it)) - 1;
    return values[i] + slopes[i] * (theta - knots[i]);
}

void DividendProfile::reset(double u0, const SamplingScheme& scheme, double r, double theta_cap) {
    require_rate(r);
    if (scheme.n < 1) throw Error(ErrorKind::NonPositive, "n must be at least 1");
    h_ = scheme.h;
    r_ = r;
    cap_ = theta_cap;
    n_ = scheme.n;
    pushed_ = 0;
    running_max_ = u0;
    last_level_ = -kInf;
    ruin_front_ = -kInf;
    saturated_ = false;
    records_.clear();
    ruin_steps_.clear();
}

bool DividendProfile::push(double value) {
    if (complete()) return false;
    const std::size_t k = ++pushed_;
    const double m = running_max_;
    if (m > last_level_) {
        records_.push_back({k, last_level_, m, discount_factor(r_, h_, k)});
        last_level_ = m;
    }
    if (ruined_at(m, value, ruin_front_)) {
        ruin_front_ = ruin_release_level(m, value);
        ruin_steps_.push_back({ruin_front_, k});
        if (ruin_front_ > cap_) saturated_ = true;
    }
    running_max_ = std::max(running_max_, value);
    return !complete();
}

void DividendProfile::check_query(double theta) const {
    if (std::isnan(theta)) throw Error(ErrorKind::DomainError, "theta is NaN");
    if (pushed_ == n_ || theta < ruin_front_) return;
    throw Error(ErrorKind::DomainError, "profile does not cover theta (above cap or incomplete)");
}

DividendOutcome DividendProfile::outcome(double theta) const {
    check_query(theta);
    DividendOutcome out{n_, false, 0.0};
    const auto ruin = std::upper_bound(ruin_steps_.begin(), ruin_steps_.end(), theta,
                                       [](double t, const RuinStep& s) { return t < s.release; });
    if (ruin != ruin_steps_.end()) {
        out.ruin_index = ruin->k;
        out.ruined = true;
    }
    const std::size_t last_paid = out.ruin_index - 1;
    auto rec = std::upper_bound(records_.begin(), records_.end(), theta,
                                [](double t, const Record& r) { return t < r.level; });
    for (; rec != records_.end() && rec->k <= last_paid; ++rec) {
        out.value += rec->discount * (barrier_excess(rec->level, theta) - barrier_excess(rec->before, theta));
    }
    return out;
}

double DividendProfile::slope(double theta) const {
    const DividendOutcome o = outcome(theta);
    const auto rec = std::upper_bound(records_.begin(), records_.end(), theta,
                                      [](double t, const Record& r) { return t < r.level; });
    if (rec == records_.end() || rec->k + 1 > o.ruin_index) return 0.0;
    return rec->before <= theta ? -rec->discount : 0.0;
}

std::vector<double> DividendProfile::kink_levels(double lo, double hi) const {
    std::vector<double> out;
    for (const Record& r : records_) {
        if (r.level > lo && r.level < hi) out.push_back(r.level);
    }
    return out;
}

std::vector<double> DividendProfile::ruin_levels(double lo, double hi) const {
    std::vector<double> out;
    for (const RuinStep& s : ruin_steps_) {
        if (s.release > lo && s.release < hi) out.push_back(s.release);
    }
    return out;
}

std::vector<double> DividendProfile::breakpoints(double lo, double hi) const {
    std::vector<double> out = kink_levels(lo, hi);
    const std::vector<double> ruin = ruin_levels(lo, hi);
    out.insert(out.end(), ruin.begin(), ruin.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

PiecewiseValue DividendProfile::piecewise(double lo, double hi) const {
    if (!(lo <= hi)) throw Error(ErrorKind::DomainError, "piecewise range requires lo <= hi");
    PiecewiseValue pw;
    pw.hi = hi;
    pw.knots.push_back(lo);
    for (double b : breakpoints(lo, hi)) pw.knots.push_back(b);
    pw.values.reserve(pw.knots.size());
    pw.slopes.reserve(pw.knots.size());
    for (double knot : pw.knots) {
        pw.values.push_back(value(knot));
        pw.slopes.push_back(slope(knot));
    }
    return pw;
}

DividendProfile DividendProfile::from_path(const StepPath& path, double r, double theta_cap) {
    require_path(path);
    DividendProfile profile;
    profile.reset(path.values[0], path.scheme, r, theta_cap);
    for (std::size_t k = 1; k <= path.scheme.n && profile.push(path.values[k]); ++k) {
    }
    return profile;
}

ValueCurve value_curve(const StepPath& path, std::span<const double> grid, double r) {
    ValueCurve curve;
    curve.thetas.assign(grid.begin(), grid.end());
    if (grid.empty()) return curve;
    const auto [lo, hi] = std::minmax_element(grid.begin(), grid.end());
    const DividendProfile profile = DividendProfile::from_path(path, r, *hi);
    curve.values.reserve(grid.size());
    for (double theta : grid) curve.values.push_back(profile.value(theta));
    curve.breakpoints = profile.breakpoints(*lo, *hi);
    return curve;
}

}  // namespace divest
