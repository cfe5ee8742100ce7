#ifndef DIVEST_ORACLE_HPP
#define DIVEST_ORACLE_HPP

#include <array>

#include "divest/levy_model.hpp"

namespace divest {

/// Laplace exponent psi(s) = c s + sigma^2 s^2 / 2 - lambda s / (mu + s).
double laplace_exponent(const ModelParams& p, double s);
/// psi'(s) = c + sigma^2 s - lambda mu / (mu + s)^2.
double laplace_exponent_derivative(const ModelParams& p, double s);

/**
 * Real solutions s1 > 0 > s2 > s3 of the cleared equation
 *   (sigma^2/2) s^3 + (c + sigma^2 mu/2) s^2 + (c mu - lambda - r) s - r mu = 0,
 * i.e. psi(s) = r multiplied through by (mu + s).
 *
 * weights[j] = (mu + s_j) / cubic'(s_j), which equals 1/psi'(s_j) at a
 * genuine root and vanishes at the spurious root s = -mu that appears when
 * lambda = 0.
 */
struct LundbergRoots {
    std::array<double, 3> roots{};
    std::array<double, 3> weights{};
    ModelParams params;
    double r = 0.0;
};

LundbergRoots lundberg_roots(const ModelParams& params, double r);

/// d^order/dx^order of W(x) = sum_j weights_j e^{s_j x}; x >= 0.
double scale_eval(const LundbergRoots& roots, double x, int order);

/// V(u; b) = W(u) / W'(b) for 0 <= u <= b.
double true_value(const LundbergRoots& roots, double u, double b);

/// The unique zero of W'' on (0, inf).
double optimal_barrier(const LundbergRoots& roots);

/// Immutable bundle of the roots and optimal barrier.
class OracleResult {
public:
    OracleResult(const ModelParams& params, double r);

    const LundbergRoots& roots() const noexcept { return roots_; }
    double b_star() const noexcept { return b_star_; }
    double value_at(double u, double b) const { return true_value(roots_, u, b); }

private:
    LundbergRoots roots_;
    double b_star_;
};

}  // namespace divest

#endif  // DIVEST_ORACLE_HPP
