#include "divest/levy_model.hpp"

#include <cmath>

#include <fmt/format.h>

#include "divest/error.hpp"

namespace divest {

namespace {

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw Error(ErrorKind::NonPositive, std::string(name) + " must be positive and finite");
    }
}

void require_non_negative(double value, const char* name) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw Error(ErrorKind::NonPositive, std::string(name) + " must be non-negative and finite");
    }
}

}  // namespace

ModelParams validate_params(const ModelParams& raw) {
    require_non_negative(raw.u, "u");
    require_positive(raw.c, "c");
    if (!(raw.sigma >= 0.0) || !std::isfinite(raw.sigma)) {
        throw Error(ErrorKind::NegativeVolatility, "sigma must be non-negative and finite");
    }
    require_non_negative(raw.lambda, "lambda");
    require_positive(raw.mu, "mu");
    if (!(raw.c > raw.expected_claims_rate())) {
        throw Error(ErrorKind::NetProfitViolation,
                    fmt::format("premium rate c must exceed E[S_1] = lambda/mu = {}", raw.expected_claims_rate()));
    }
    return raw;
}

SamplingScheme make_scheme(double h, std::size_t n) {
    require_positive(h, "h");
    if (n < 1) throw Error(ErrorKind::NonPositive, "n must be at least 1");
    return SamplingScheme{h, n};
}

std::optional<std::string> sampling_warning(const SamplingScheme& scheme) {
    if (scheme.h >= 1.0 || scheme.horizon() < 10.0) {
        return fmt::format("sampling far from high-frequency/long-horizon regime (h={}, T={})", scheme.h,
                           scheme.horizon());
    }
    return std::nullopt;
}

IncrementSampler::IncrementSampler(const ModelParams& params, double h, std::uint64_t seed)
    : drift_(params.c * h),
      scale_(params.sigma * std::sqrt(h)),
      has_jumps_(params.lambda > 0.0),
      engine_(make_engine(seed)),
      normal_(0.0, 1.0),
      count_(has_jumps_ ? params.lambda * h : 1.0),
      claim_(params.mu) {}

double IncrementSampler::next() {
    double delta = drift_;
    if (scale_ > 0.0) delta += scale_ * normal_(engine_);
    if (has_jumps_) {
        const int claims = count_(engine_);
        for (int j = 0; j < claims; ++j) delta -= claim_(engine_);
    }
    return delta;
}

IncrementSeries simulate_increments(const ModelParams& params, const SamplingScheme& scheme,
                                    std::uint64_t seed) {
    const ModelParams p = validate_params(params);
    const SamplingScheme s = make_scheme(scheme.h, scheme.n);
    IncrementSampler sampler(p, s.h, seed);
    IncrementSeries out{s, {}};
    out.deltas.resize(s.n);
    for (double& d : out.deltas) d = sampler.next();
    return out;
}

StepPath path_from_increments(double u0, const IncrementSeries& increments) {
    if (increments.deltas.size() != increments.scheme.n) {
        throw Error(ErrorKind::LengthMismatch, "increment count differs from scheme.n");
    }
    StepPath path{u0, {}, increments.scheme};
    path.values.reserve(increments.deltas.size() + 1);
    double level = u0;
    path.values.push_back(level);
    for (double d : increments.deltas) {
        level += d;
        path.values.push_back(level);
    }
    return path;
}

IncrementSeries increments_of(const StepPath& path) {
    if (path.values.size() != path.scheme.n + 1) {
        throw Error(ErrorKind::LengthMismatch, "path must hold n+1 values");
    }
    IncrementSeries out{path.scheme, {}};
    out.deltas.reserve(path.scheme.n);
    for (std::size_t k = 1; k < path.values.size(); ++k) {
        out.deltas.push_back(path.values[k] - path.values[k - 1]);
    }
    return out;
}

}  // namespace divest
