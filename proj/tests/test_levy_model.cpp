#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "divest/error.hpp"
#include "divest/levy_model.hpp"

using namespace divest;

namespace {

const ModelParams kBase{10.0, 15.0, 2.0, 5.0, 0.5};

ErrorKind kind_of(const ModelParams& p) {
    try {
        validate_params(p);
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::ValidationError;
}

}  // namespace

TEST_CASE("reference parameters validate", "[levy]") {
    const ModelParams p = validate_params(kBase);
    CHECK(p.expected_claims_rate() == 10.0);
    CHECK(p.net_drift() == 5.0);
}

TEST_CASE("parameter errors", "[levy]") {
    CHECK(kind_of({10, 9, 2, 5, 0.5}) == ErrorKind::NetProfitViolation);
    CHECK(kind_of({10, 10, 2, 5, 0.5}) == ErrorKind::NetProfitViolation);
    CHECK(kind_of({10, 15, -1, 5, 0.5}) == ErrorKind::NegativeVolatility);
    CHECK(kind_of({-1, 15, 2, 5, 0.5}) == ErrorKind::NonPositive);
    CHECK(kind_of({10, 0, 0, 0, 0.5}) == ErrorKind::NonPositive);
    CHECK(kind_of({10, 15, 2, 5, 0.0}) == ErrorKind::NonPositive);
    CHECK(kind_of({10, 15, 2, -1, 0.5}) == ErrorKind::NonPositive);
    CHECK_THROWS_AS(make_scheme(0.0, 10), Error);
    CHECK_THROWS_AS(make_scheme(1.0, 0), Error);
}

TEST_CASE("sampling warning at coarse or short schemes", "[levy]") {
    CHECK(sampling_warning(make_scheme(1.0, 100)).has_value());
    CHECK(sampling_warning(make_scheme(0.01, 500)).has_value());
    CHECK_FALSE(sampling_warning(make_scheme(0.01, 10000)).has_value());
}

TEST_CASE("deterministic drift without noise or claims", "[levy]") {
    const auto inc = simulate_increments({10, 15, 0, 0, 0.5}, make_scheme(1.0, 3), 42);
    CHECK(inc.deltas == std::vector<double>{15.0, 15.0, 15.0});
}

TEST_CASE("same seed gives identical increments", "[levy]") {
    const auto scheme = make_scheme(0.01, 5000);
    const auto a = simulate_increments(kBase, scheme, 7);
    const auto b = simulate_increments(kBase, scheme, 7);
    const auto c = simulate_increments(kBase, scheme, 8);
    CHECK(a.deltas == b.deltas);
    CHECK(a.deltas != c.deltas);
}

TEST_CASE("increment moments match the model", "[levy][slow]") {
    // Mean (c - lambda/mu) h, variance sigma^2 h + 2 lambda h / mu^2. The
    // standard error of the sample variance uses the fourth central moment,
    // estimated from the same sample.
    const double h = 0.01;
    const std::size_t n = 1'000'000;
    const auto inc = simulate_increments(kBase, make_scheme(h, n), 2024);
    const double nn = static_cast<double>(n);
    double mean = 0.0;
    for (double d : inc.deltas) mean += d;
    mean /= nn;
    double m2 = 0.0, m4 = 0.0;
    for (double d : inc.deltas) {
        const double e = (d - mean) * (d - mean);
        m2 += e;
        m4 += e * e;
    }
    m2 /= nn;
    m4 /= nn;
    const double want_mean = (15.0 - 5.0 / 0.5) * h;
    const double want_var = 4.0 * h + 2.0 * 5.0 * h / 0.25;
    CHECK(want_var == Catch::Approx(kBase.increment_variance(h)));
    CHECK(std::abs(mean - want_mean) <= 3.0 * std::sqrt(want_var / nn));
    CHECK(std::abs(m2 - want_var) <= 3.0 * std::sqrt((m4 - m2 * m2) / nn));
}

TEST_CASE("path from increments", "[levy]") {
    IncrementSeries inc{make_scheme(1.0, 3), {2.0, -1.0, 1.0}};
    const StepPath p = path_from_increments(10.0, inc);
    CHECK(p.values == std::vector<double>{10, 12, 11, 12});

    IncrementSeries neg{make_scheme(1.0, 1), {-20.0}};
    CHECK(path_from_increments(10.0, neg).values == std::vector<double>{10, -10});

    IncrementSeries bad{make_scheme(1.0, 2), {1.0}};
    CHECK_THROWS_AS(path_from_increments(0.0, bad), Error);
}

TEST_CASE("dyadic sums are exact", "[levy]") {
    // Multiples of 2^-10 with small magnitude add without rounding, so the
    // cumulative sums must equal integer arithmetic exactly.
    std::mt19937_64 gen(3);
    std::uniform_int_distribution<int> pick(-5000, 5000);
    std::vector<int> ticks(400);
    for (int& t : ticks) t = pick(gen);
    IncrementSeries inc{make_scheme(0.25, ticks.size()), {}};
    for (int t : ticks) inc.deltas.push_back(std::ldexp(static_cast<double>(t), -10));
    const StepPath p = path_from_increments(3.0, inc);
    long long acc = 3 * 1024;
    for (std::size_t k = 0; k < ticks.size(); ++k) {
        acc += ticks[k];
        REQUIRE(p.values[k + 1] == std::ldexp(static_cast<double>(acc), -10));
    }
}

TEST_CASE("differences invert the cumulative sum", "[levy]") {
    const auto inc = simulate_increments(kBase, make_scheme(0.1, 1000), 5);
    const StepPath p = path_from_increments(10.0, inc);
    const IncrementSeries back = increments_of(p);
    CHECK(back.scheme == inc.scheme);
    const StepPath again = path_from_increments(10.0, back);
    for (std::size_t k = 0; k < p.values.size(); ++k) {
        REQUIRE(std::abs(again.values[k] - p.values[k]) <= 1e-12 * (1.0 + std::abs(p.values[k])));
    }
}
