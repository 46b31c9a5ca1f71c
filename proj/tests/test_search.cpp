#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "cpinfer/search.hpp"

using namespace cpinfer;

namespace {

void assert_disjoint_and_contained(const std::vector<significant_interval>& ivs, index_t n,
                                   const grid_spec& grid) {
    index_t prev_end = 0;
    for (const significant_interval& iv : ivs) {
        ASSERT_GE(iv.start, 1);
        ASSERT_LE(iv.end, n);
        ASSERT_EQ(iv.end - iv.start + 1, iv.width);
        ASSERT_TRUE(std::find(grid.scales.begin(), grid.scales.end(), iv.width) !=
                    grid.scales.end());
        ASSERT_GT(iv.start, prev_end);  // sorted and disjoint
        prev_end = iv.end;
    }
}

time_series gaussian_series(index_t n, std::uint64_t seed, double sigma = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sigma);
    std::vector<double> y(static_cast<std::size_t>(n));
    for (double& v : y) v = gauss(rng);
    return time_series(std::move(y));
}

}  // namespace

TEST(GreedySearch, InfiniteThresholdFindsNothing) {
    const time_series ts = gaussian_series(400, 5);
    const grid_spec grid = build_grid(400, 5, std::numbers::sqrt2);
    const prefix_sums ps = build_prefix_sums(ts);
    const auto out = greedy_interval_search(ps, grid, 1, 400,
                                            std::numeric_limits<double>::infinity(), binomials(0));
    EXPECT_TRUE(out.empty());
}

TEST(GreedySearch, SingleStepDetectedAndCovered) {
    // step of height 10 at t = 100, sigma = 1 supplied directly
    const index_t n = 200;
    const index_t W = static_cast<index_t>(std::log(static_cast<double>(n)));
    const grid_spec grid = build_grid(n, W, std::numbers::sqrt2);
    const threshold_params tp{n, W, std::numbers::sqrt2, 0, 0.1, noise_mode::gaussian};
    const double lambda = lambda_gaussian(tp).lambda_alpha;
    std::mt19937_64 rng(303);
    std::normal_distribution<double> gauss(0.0, 1.0);
    int single_hit = 0;
    const int reps = 200;
    for (int rep = 0; rep < reps; ++rep) {
        std::vector<double> y(static_cast<std::size_t>(n));
        for (index_t t = 1; t <= n; ++t)
            y[static_cast<std::size_t>(t - 1)] = (t > 100 ? 10.0 : 0.0) + gauss(rng);
        const prefix_sums ps = build_prefix_sums(time_series(std::move(y)));
        const auto out = greedy_interval_search(ps, grid, 1, n, lambda, binomials(0));
        assert_disjoint_and_contained(out, n, grid);
        if (out.size() == 1 && out[0].start <= 100 && out[0].end >= 100) ++single_hit;
    }
    EXPECT_GE(single_hit, static_cast<int>(0.95 * reps));
}

TEST(GreedySearch, TwoStepsGiveTwoDisjointIntervals) {
    const index_t n = 600;
    const index_t W = static_cast<index_t>(std::log(static_cast<double>(n)));
    const grid_spec grid = build_grid(n, W, std::numbers::sqrt2);
    const threshold_params tp{n, W, std::numbers::sqrt2, 0, 0.1, noise_mode::gaussian};
    const double lambda = lambda_gaussian(tp).lambda_alpha;
    std::mt19937_64 rng(307);
    std::normal_distribution<double> gauss(0.0, 1.0);
    int both = 0;
    const int reps = 100;
    for (int rep = 0; rep < reps; ++rep) {
        std::vector<double> y(static_cast<std::size_t>(n));
        for (index_t t = 1; t <= n; ++t) {
            double mean = 0.0;
            if (t > 150) mean += 12.0;
            if (t > 450) mean -= 12.0;
            y[static_cast<std::size_t>(t - 1)] = mean + gauss(rng);
        }
        const prefix_sums ps = build_prefix_sums(time_series(std::move(y)));
        const auto out = greedy_interval_search(ps, grid, 1, n, lambda, binomials(0));
        assert_disjoint_and_contained(out, n, grid);
        bool first = false, second = false;
        for (const auto& iv : out) {
            if (iv.start <= 150 && iv.end >= 150) first = true;
            if (iv.start <= 450 && iv.end >= 450) second = true;
        }
        if (first && second && out.size() == 2) ++both;
    }
    EXPECT_GE(both, static_cast<int>(0.90 * reps));
}

TEST(GreedySearch, EvaluationCountBoundedByGrid) {
    const time_series ts = gaussian_series(2048, 311);
    const grid_spec grid = build_grid(2048, 7, std::numbers::sqrt2);
    const prefix_sums ps = build_prefix_sums(ts);
    std::uint64_t evals = 0;
    greedy_interval_search(ps, grid, 1, 2048, 3.0, binomials(0),
                           selection_rule::first_exceedance, &evals);
    EXPECT_LE(evals, static_cast<std::uint64_t>(grid.candidate_count()));
}

TEST(GreedySearch, AlphaMonotoneFirstScanCount) {
    const index_t n = 750;
    const index_t W = 6;
    const grid_spec grid = build_grid(n, W, std::numbers::sqrt2);
    const time_series ts = gaussian_series(n, 313);
    const prefix_sums ps = build_prefix_sums(ts);
    const diff_weights w = binomials(0);
    auto count_exceedances = [&](double alpha) {
        const threshold_params tp{n, W, std::numbers::sqrt2, 0, alpha, noise_mode::gaussian};
        const double lambda = lambda_gaussian(tp).lambda_alpha;
        long count = 0;
        for_each_candidate(grid, 1, n, [&](candidate c) {
            if (std::abs(diff_stat(ps, c.l, c.w, w)) > lambda) ++count;
        });
        return count;
    };
    EXPECT_LE(count_exceedances(0.02), count_exceedances(0.10));
    EXPECT_LE(count_exceedances(0.10), count_exceedances(0.40));
}

TEST(Detect, PipelineOnPureNoiseIsMostlyEmpty) {
    detection_config cfg;  // DIF1-MAD defaults
    int empty = 0;
    const int reps = 150;
    for (int rep = 0; rep < reps; ++rep) {
        const detection_result res = detect(gaussian_series(750, 1000 + rep), cfg);
        if (res.intervals.empty()) ++empty;
    }
    const double coverage = static_cast<double>(empty) / reps;
    EXPECT_GT(coverage, 0.80);
    EXPECT_LE(coverage, 1.0);
}

TEST(Detect, DeterministicAndSerialisable) {
    const time_series ts = gaussian_series(400, 317);
    detection_config cfg;
    cfg.mode = noise_mode::dependent;
    cfg.estimator = scale_method::lrv;
    const detection_result a = detect(ts, cfg);
    const detection_result b = detect(ts, cfg);
    ASSERT_EQ(a.intervals.size(), b.intervals.size());
    for (std::size_t i = 0; i < a.intervals.size(); ++i) {
        EXPECT_EQ(a.intervals[i].start, b.intervals[i].start);
        EXPECT_EQ(a.intervals[i].eta_hat, b.intervals[i].eta_hat);
        EXPECT_DOUBLE_EQ(a.intervals[i].stat, b.intervals[i].stat);
    }
    EXPECT_DOUBLE_EQ(a.lambda.lambda_alpha, b.lambda.lambda_alpha);
    EXPECT_DOUBLE_EQ(a.scale.value, b.scale.value);
}

TEST(Detect, LocalisesAStrongStep) {
    std::mt19937_64 rng(331);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> y(512);
    for (index_t t = 1; t <= 512; ++t)
        y[static_cast<std::size_t>(t - 1)] = (t > 256 ? 12.0 : 0.0) + gauss(rng);
    detection_config cfg;
    const detection_result res = detect(time_series(std::move(y)), cfg);
    ASSERT_EQ(res.intervals.size(), 1u);
    EXPECT_LE(res.intervals[0].start, 256);
    EXPECT_GE(res.intervals[0].end, 256);
    EXPECT_NEAR(static_cast<double>(res.intervals[0].eta_hat), 256.0, 3.0);
}

TEST(GreedySearch, ScalesBelowChunkMinimumAreSkipped) {
    // grid holds scale 2, which cannot carry a degree-2 statistic
    const time_series ts = gaussian_series(100, 401);
    const grid_spec grid = build_grid(100, 2, 2.0);
    ASSERT_EQ(grid.scales.front(), 2);
    const prefix_sums ps = build_prefix_sums(ts);
    EXPECT_NO_THROW(greedy_interval_search(ps, grid, 1, 100, 2.0, binomials(2)));
    detection_config cfg;
    cfg.degree = 2;
    cfg.min_scale = 2;
    cfg.decay = 2.0;
    EXPECT_NO_THROW(detect(ts, cfg));
}

TEST(Detect, DegenerateScaleRejected) {
    detection_config cfg;
    EXPECT_THROW(detect(time_series(std::vector<double>(750, 4.0)), cfg),
                 degenerate_scale_error);
}

TEST(Detect, ArgmaxSelectionAlsoValid) {
    std::mt19937_64 rng(337);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> y(512);
    for (index_t t = 1; t <= 512; ++t)
        y[static_cast<std::size_t>(t - 1)] = (t > 200 ? 9.0 : 0.0) + gauss(rng);
    detection_config cfg;
    cfg.selection = selection_rule::scale_argmax;
    const detection_result res = detect(time_series(std::move(y)), cfg);
    ASSERT_GE(res.intervals.size(), 1u);
    EXPECT_LE(res.intervals[0].start, 200);
    EXPECT_GE(res.intervals[0].end, 200);
    index_t prev_end = 0;
    for (const auto& iv : res.intervals) {
        EXPECT_GT(iv.start, prev_end);
        prev_end = iv.end;
    }
}
