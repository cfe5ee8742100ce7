#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "divest/error.hpp"
#include "divest/estimator.hpp"
#include "divest/oracle.hpp"
#include "divest/quasi_process.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace divest;

namespace {

const ModelParams kBase{10.0, 15.0, 2.0, 5.0, 0.5};

StepPath hand_path(std::vector<double> deltas) {
    IncrementSeries inc{make_scheme(1.0, deltas.size()), std::move(deltas)};
    return path_from_increments(10.0, inc);
}

std::vector<double> make_grid(double lo, double hi, double step) {
    std::vector<double> g;
    for (int i = 0; lo + i * step <= hi + 1e-9; ++i) g.push_back(lo + i * step);
    return g;
}

double sup_distance(const ContrastCurve& a, const ContrastCurve& b) {
    double d = 0.0;
    for (std::size_t j = 0; j < a.values.size(); ++j) d = std::max(d, std::abs(a.values[j] - b.values[j]));
    return d;
}

double mse(const std::vector<double>& est, double truth) {
    double s = 0.0;
    for (double v : est) s += (v - truth) * (v - truth);
    return s / static_cast<double>(est.size());
}

}  // namespace

TEST_CASE("contrast of one path is its value curve", "[estimator]") {
    testkit::Gen g(1);
    const StepPath p = testkit::random_path(g, 150);
    const auto grid = make_grid(p.values[0], p.values[0] + 5.0, 0.25);
    const ContrastCurve c = contrast(std::span(&p, 1), grid, 0.2);
    CHECK(c.values == value_curve(p, grid, 0.2).values);
    CHECK(c.alpha == 1);
    const std::vector<StepPath> twice{p, p};
    CHECK(contrast(twice, grid, 0.2).values == c.values);
}

TEST_CASE("contrast by hand", "[estimator]") {
    // A pays (12 - theta) e^-0.4, B pays (11 - theta)^+ e^-0.4, C is ruined at
    // the first step.
    const std::vector<StepPath> ens{hand_path({2, -1, 1}), hand_path({1, 1, -3}), hand_path({-11, 5, 5})};
    const std::vector<double> grid{10.0, 10.5, 11.0, 11.5};
    const ContrastCurve c = contrast(ens, grid, 0.2);
    const double d = std::exp(-0.4) / 3.0;
    const std::vector<double> want{3.0 * d, 2.0 * d, 1.0 * d, 0.5 * d};
    for (std::size_t j = 0; j < 4; ++j) CHECK(c.values[j] == Catch::Approx(want[j]).epsilon(1e-14));
    CHECK(argmax_index(c) == 0);
}

TEST_CASE("contrast errors", "[estimator]") {
    const std::vector<double> grid{10.0, 11.0};
    CHECK_THROWS_AS(contrast(std::span<const StepPath>{}, grid, 0.2), Error);
    StepPath a = hand_path({1, 1});
    StepPath b = hand_path({1, 1});
    b.scheme.h = 0.5;
    const std::vector<StepPath> mixed{a, b};
    try {
        contrast(mixed, grid, 0.2);
        FAIL("expected SchemeMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SchemeMismatch);
    }
}

TEST_CASE("ties go to the smallest barrier", "[estimator]") {
    ContrastCurve c{{12.0, 10.0, 11.0}, {1.0, 1.0, 0.5}, 1};
    CHECK(c.thetas[argmax_index(c)] == 10.0);
}

TEST_CASE("single grid point is the estimate", "[estimator]") {
    const auto inc = simulate_increments(kBase, make_scheme(0.1, 1000), 3);
    const std::vector<double> grid{13.7};
    CHECK(estimate_barrier(inc, 10.0, 20, grid, 0.2, 9).theta_hat == 13.7);
    const std::vector<double> below{9.0, 12.0};
    CHECK_THROWS_AS(estimate_barrier(inc, 10.0, 20, below, 0.2, 9), Error);
}

TEST_CASE("identity permutations reduce to the observed path", "[estimator]") {
    const auto grid = make_grid(10.0, 20.0, 0.05);
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        const auto inc = simulate_increments(kBase, make_scheme(0.1, 1000), seed);
        const StepPath x = path_from_increments(10.0, inc);
        const ValueCurve vc = value_curve(x, grid, 0.2);
        ContrastCurve direct{vc.thetas, vc.values, 1};
        EstimateOptions opt;
        opt.identity_permutations = true;
        const Estimate e = estimate_barrier(inc, 10.0, 1, grid, 0.2, 5, opt);
        CHECK(e.curve.values == vc.values);
        CHECK(e.theta_hat == grid[argmax_index(direct)]);
    }
}

TEST_CASE("streamed estimate equals the materialized ensemble", "[estimator]") {
    const auto inc = simulate_increments(kBase, make_scheme(0.1, 1000), 21);
    const auto grid = make_grid(10.0, 20.0, 0.05);
    const PermutationSet set = sample_permutation_set(1000, 60, 77);
    std::vector<StepPath> ens;
    for (const auto& perm : set.perms) ens.push_back(build_quasi_path(10.0, inc, perm));
    const Estimate e = estimate_barrier(inc, 10.0, 60, grid, 0.2, 77);
    CHECK(e.curve.values == contrast(ens, grid, 0.2).values);
    CHECK(e.diagnostics.alpha == 60);
    CHECK(e.diagnostics.n == 1000);
    CHECK_FALSE(e.diagnostics.warnings.empty());
}

TEST_CASE("grid order and thread count do not matter", "[estimator]") {
    const auto inc = simulate_increments(kBase, make_scheme(0.01, 10000), 4);
    auto grid = make_grid(10.0, 20.0, 0.05);
    EstimateOptions one;
    one.threads = 1;
    const Estimate base = estimate_barrier(inc, 10.0, 200, grid, 0.2, 8, one);
    for (unsigned threads : {2u, 3u, 8u}) {
        EstimateOptions opt;
        opt.threads = threads;
        const Estimate e = estimate_barrier(inc, 10.0, 200, grid, 0.2, 8, opt);
        CHECK(e.curve.values == base.curve.values);
        CHECK(e.theta_hat == base.theta_hat);
    }
    testkit::Gen g(5);
    std::shuffle(grid.begin(), grid.end(), g);
    const Estimate shuffled = estimate_barrier(inc, 10.0, 200, grid, 0.2, 8, one);
    CHECK(shuffled.theta_hat == base.theta_hat);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const auto it = std::find(base.curve.thetas.begin(), base.curve.thetas.end(), grid[j]);
        REQUIRE(shuffled.curve.values[j] == base.curve.values[static_cast<std::size_t>(it - base.curve.thetas.begin())]);
    }
}

TEST_CASE("refinement never loses to the grid", "[estimator]") {
    const auto grid = make_grid(10.0, 20.0, 0.5);
    int moved = 0;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const auto inc = simulate_increments(kBase, make_scheme(0.1, 1000), seed);
        const PermutationSet set = sample_permutation_set(1000, 30, seed + 100);
        std::vector<StepPath> ens;
        for (const auto& perm : set.perms) ens.push_back(build_quasi_path(10.0, inc, perm));
        const ContrastCurve c = contrast(ens, grid, 0.2);
        const double grid_best = c.values[argmax_index(c)];
        const double refined = refine_argmax(c, ens, 0.2);
        const std::vector<double> at{refined};
        REQUIRE(contrast(ens, at, 0.2).values[0] >= grid_best);
        if (refined != c.thetas[argmax_index(c)]) ++moved;

        EstimateOptions opt;
        opt.refine = true;
        const Estimate e = estimate_barrier(inc, 10.0, 30, grid, 0.2, seed + 100, opt);
        CHECK(e.theta_hat == refined);
        CHECK(e.diagnostics.grid_theta_hat == c.thetas[argmax_index(c)]);
    }
    CHECK(moved > 0);
}

TEST_CASE("refinement of one path finds the dense-scan maximum", "[estimator]") {
    // Oracle: a dense scan over the window between the grid neighbours.
    testkit::Gen g(6);
    for (int trial = 0; trial < 40; ++trial) {
        const StepPath p = testkit::random_path(g, 200);
        const double lo = p.values[0];
        const auto grid = make_grid(lo, lo + 8.0, 1.0);
        const ContrastCurve c = contrast(std::span(&p, 1), grid, 0.2);
        const double refined = refine_argmax(c, std::span(&p, 1), 0.2);
        const double refined_value = barrier_outcome(p, {refined, 0.2}).value;
        const std::size_t best = argmax_index(c);
        const double wlo = best > 0 ? grid[best - 1] : grid[best];
        const double whi = best + 1 < grid.size() ? grid[best + 1] : grid[best];
        double dense_best = c.values[best];
        for (int j = 0; j <= 4000; ++j) {
            const double theta = wlo + (whi - wlo) * j / 4000.0;
            dense_best = std::max(dense_best, barrier_outcome(p, {theta, 0.2}).value);
        }
        REQUIRE(refined_value >= c.values[best]);
        REQUIRE(refined_value >= dense_best - 1e-12);
    }
}

TEST_CASE("unchanged when the grid already holds the maximum", "[estimator]") {
    // Value decreases on the whole window and no breakpoint lies inside it.
    const StepPath p = hand_path({5, -1, 1});
    const std::vector<double> grid{10.0, 10.5, 11.0};
    const ContrastCurve c = contrast(std::span(&p, 1), grid, 0.2);
    CHECK(refine_argmax(c, std::span(&p, 1), 0.2) == 10.0);
}

TEST_CASE("nested ensembles settle as alpha grows", "[estimator][slow]") {
    const auto grid = make_grid(10.0, 20.0, 0.05);
    int ok = 0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        const auto inc = simulate_increments(kBase, make_scheme(0.1, 1000), 500 + s);
        const std::uint64_t root = 900 + s;
        auto curve = [&](std::size_t alpha) { return estimate_barrier(inc, 10.0, alpha, grid, 0.2, root).curve; };
        const double coarse = sup_distance(curve(50), curve(100));
        const double fine = sup_distance(curve(500), curve(1000));
        if (fine < coarse) ++ok;
    }
    CHECK(ok >= 18);
}

TEST_CASE("finer sampling and more permutations reduce the error", "[estimator][slow]") {
    const double theta0 = OracleResult(kBase, 0.2).b_star();
    const auto grid = make_grid(10.0, 20.0, 0.05);
    std::vector<double> coarse, fine;
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
        const auto inc1 = simulate_increments(kBase, make_scheme(1.0, 100), derive_seed(31, rep, 0));
        coarse.push_back(estimate_barrier(inc1, 10.0, 10, grid, 0.2, derive_seed(31, rep, 1)).theta_hat);
        const auto inc2 = simulate_increments(kBase, make_scheme(0.01, 10000), derive_seed(32, rep, 0));
        fine.push_back(estimate_barrier(inc2, 10.0, 1000, grid, 0.2, derive_seed(32, rep, 1)).theta_hat);
    }
    CHECK(mse(fine, theta0) < mse(coarse, theta0));
}

TEST_CASE("contrast stays near the true value curve", "[estimator][slow][proximity]") {
    // h = 0.001, alpha = 1000, 21 barriers on [10, 20]: sup |contrast - V| <= 0.5
    // in at least 90% of seeds.
    const OracleResult oracle(kBase, 0.2);
    const auto grid = make_grid(10.0, 20.0, 0.5);
    const int seeds = 20;
    int ok = 0;
    std::vector<double> sups;
    for (int s = 0; s < seeds; ++s) {
        const auto inc = simulate_increments(kBase, make_scheme(0.001, 100000), derive_seed(41, s, 0));
        const Estimate e = estimate_barrier(inc, 10.0, 1000, grid, 0.2, derive_seed(41, s, 1));
        double sup = 0.0;
        for (std::size_t j = 0; j < grid.size(); ++j) {
            sup = std::max(sup, std::abs(e.curve.values[j] - oracle.value_at(10.0, grid[j])));
        }
        sups.push_back(sup);
        if (sup <= 0.5) ++ok;
    }
    std::sort(sups.begin(), sups.end());
    UNSCOPED_INFO("median sup distance " << sups[sups.size() / 2] << ", max " << sups.back());
    CHECK(ok >= 18);
}

TEST_CASE("reference cell alpha = 1000, h = 0.01", "[estimator][slow]") {
    // 100 replications against a fixed 100-replication reference cell (mean
    // 12.680, std 1.183). Both means carry sampling error, so the gap is
    // compared with three standard errors of the difference.
    const auto grid = make_grid(10.0, 20.0, 0.05);
    std::vector<double> est;
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
        const auto inc = simulate_increments(kBase, make_scheme(0.01, 10000), derive_seed(51, rep, 0));
        est.push_back(estimate_barrier(inc, 10.0, 1000, grid, 0.2, derive_seed(51, rep, 1)).theta_hat);
    }
    double mean = 0.0;
    for (double v : est) mean += v;
    mean /= 100.0;
    double ss = 0.0;
    for (double v : est) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / 100.0);
    UNSCOPED_INFO("mean " << mean << ", std " << sd);
    const double se_diff = std::sqrt(sd * sd / 100.0 + 1.183 * 1.183 / 100.0);
    CHECK(std::abs(mean - 12.680) <= 3.0 * se_diff);
}
