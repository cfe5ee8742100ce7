#include "divest/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "divest/error.hpp"

namespace divest {

namespace {

struct Cubic {
    double a3, a2, a1, a0;

    double operator()(double s) const { return ((a3 * s + a2) * s + a1) * s + a0; }
    double derivative(double s) const { return (3.0 * a3 * s + 2.0 * a2) * s + a1; }
};

Cubic cleared_cubic(const ModelParams& p, double r) {
    const double half_var = 0.5 * p.sigma * p.sigma;
    return {half_var, p.c + half_var * p.mu, p.c * p.mu - p.lambda - r, -r * p.mu};
}

double newton_polish(double s, auto&& f, auto&& df, int max_iter = 60) {
    for (int it = 0; it < max_iter; ++it) {
        const double d = df(s);
        if (d == 0.0) break;
        const double step = f(s) / d;
        s -= step;
        if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(s))) break;
    }
    return s;
}

/// Three distinct real roots of a cubic via the trigonometric form.
std::array<double, 3> real_cubic_roots(const Cubic& cubic) {
    const double b = cubic.a2 / cubic.a3;
    const double c = cubic.a1 / cubic.a3;
    const double d = cubic.a0 / cubic.a3;
    const double p = c - b * b / 3.0;
    const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    const double disc = -(4.0 * p * p * p + 27.0 * q * q);
    if (!(p < 0.0) || !(disc > 0.0)) {
        throw Error(ErrorKind::DegenerateRoots, "Lundberg equation does not have three distinct real roots");
    }
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    std::array<double, 3> roots{};
    for (int k = 0; k < 3; ++k) {
        roots[static_cast<std::size_t>(k)] = m * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0) - b / 3.0;
    }
    return roots;
}

}  // namespace

double laplace_exponent(const ModelParams& p, double s) {
    return p.c * s + 0.5 * p.sigma * p.sigma * s * s - p.lambda * s / (p.mu + s);
}

double laplace_exponent_derivative(const ModelParams& p, double s) {
    const double denom = p.mu + s;
    return p.c + p.sigma * p.sigma * s - p.lambda * p.mu / (denom * denom);
}

LundbergRoots lundberg_roots(const ModelParams& params, double r) {
    const ModelParams p = validate_params(params);
    if (!(p.sigma > 0.0)) throw Error(ErrorKind::NoDiffusion, "the scale-function oracle requires sigma > 0");
    if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorKind::NonPositive, "discount rate r must be positive");

    const Cubic cubic = cleared_cubic(p, r);
    std::array<double, 3> roots = real_cubic_roots(cubic);
    for (double& s : roots) {
        s = newton_polish(s, cubic, [&](double x) { return cubic.derivative(x); });
        if (std::abs(p.mu + s) > 1e-9 * p.mu) {
            s = newton_polish(
                s, [&](double x) { return laplace_exponent(p, x) - r; },
                [&](double x) { return laplace_exponent_derivative(p, x); }, 8);
        }
    }
    std::sort(roots.begin(), roots.end(), std::greater<>());

    const double scale = 1.0 + std::max({std::abs(roots[0]), std::abs(roots[1]), std::abs(roots[2])});
    if (roots[0] - roots[1] <= 1e-9 * scale || roots[1] - roots[2] <= 1e-9 * scale) {
        throw Error(ErrorKind::DegenerateRoots, "Lundberg roots are not distinct");
    }
    if (!(roots[0] > 0.0 && roots[1] < 0.0)) {
        throw Error(ErrorKind::DegenerateRoots, "expected exactly one positive Lundberg root");
    }

    LundbergRoots out;
    out.roots = roots;
    out.params = p;
    out.r = r;
    for (std::size_t j = 0; j < 3; ++j) {
        const double s = roots[j];
        out.weights[j] = (p.mu + s) / cubic.derivative(s);
        if (out.weights[j] != 0.0 && std::abs(p.mu + s) > 1e-9 * p.mu) {
            const double residual = laplace_exponent(p, s) - r;
            if (std::abs(residual) > 1e-10 * std::max(1.0, r)) {
                throw Error(ErrorKind::DegenerateRoots, "root polish failed to reach psi(s) = r");
            }
        }
    }

    const double w0 = scale_eval(out, 0.0, 0);
    const double w1 = scale_eval(out, 0.0, 1);
    const double expected_w1 = 2.0 / (p.sigma * p.sigma);
    if (std::abs(w0) > 1e-9 || std::abs(w1 - expected_w1) > 1e-8 * expected_w1) {
        throw Error(ErrorKind::DegenerateRoots, "scale function fails W(0) = 0 or W'(0) = 2/sigma^2");
    }
    return out;
}

double scale_eval(const LundbergRoots& roots, double x, int order) {
    if (!(x >= 0.0)) throw Error(ErrorKind::DomainError, "scale function is evaluated at x >= 0 only");
    if (order < 0) throw Error(ErrorKind::DomainError, "derivative order must be non-negative");
    double sum = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
        const double s = roots.roots[j];
        sum += roots.weights[j] * std::pow(s, order) * std::exp(s * x);
    }
    return sum;
}

double true_value(const LundbergRoots& roots, double u, double b) {
    if (!(u >= 0.0) || !(u <= b)) throw Error(ErrorKind::DomainError, "true_value requires 0 <= u <= b");
    return scale_eval(roots, u, 0) / scale_eval(roots, b, 1);
}

double optimal_barrier(const LundbergRoots& roots) {
    auto w2 = [&](double x) { return scale_eval(roots, x, 2); };
    auto w3 = [&](double x) { return scale_eval(roots, x, 3); };

    constexpr int kSteps = 900;
    constexpr double kLo = 1e-6;
    constexpr double kDecades = 9.0;
    double a = kLo;
    double fa = w2(a);
    double b = 0.0;
    bool bracketed = false;
    for (int i = 1; i <= kSteps; ++i) {
        const double x = kLo * std::pow(10.0, kDecades * i / kSteps);
        const double fx = w2(x);
        if (fa < 0.0 && fx >= 0.0) {
            b = x;
            bracketed = true;
            break;
        }
        a = x;
        fa = fx;
    }
    if (!bracketed) throw Error(ErrorKind::BracketNotFound, "W'' has no sign change on [1e-6, 1e3]");

    while (b - a > 1e-12 * b) {
        const double mid = 0.5 * (a + b);
        if (w2(mid) < 0.0) a = mid; else b = mid;
    }
    double x = 0.5 * (a + b);
    for (int it = 0; it < 20; ++it) {
        const double d = w3(x);
        if (d == 0.0) break;
        const double next = x - w2(x) / d;
        if (!(next >= a && next <= b)) break;
        const bool done = std::abs(next - x) <= 1e-15 * x;
        x = next;
        if (done) break;
    }
    return x;
}

OracleResult::OracleResult(const ModelParams& params, double r)
    : roots_(lundberg_roots(params, r)), b_star_(optimal_barrier(roots_)) {}

}  // namespace divest
