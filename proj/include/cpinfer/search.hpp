#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "cpinfer/errors.hpp"
#include "cpinfer/grid.hpp"
#include "cpinfer/localize.hpp"
#include "cpinfer/scale.hpp"
#include "cpinfer/series.hpp"
#include "cpinfer/thresholds.hpp"

namespace cpinfer {

enum class selection_rule { first_exceedance, scale_argmax };

struct detection_config {
    int degree = 0;
    double alpha = 0.1;
    double decay = std::numbers::sqrt2;
    index_t min_scale = 0;  // 0 -> mode default: floor(log n) gaussian, floor(0.5 sqrt n) dependent
    noise_mode mode = noise_mode::gaussian;
    scale_method estimator = scale_method::mad;
    index_t lrv_block = 0;  // 0 -> floor(n^{1/3})
    selection_rule selection = selection_rule::first_exceedance;

    index_t resolved_min_scale(index_t n) const {
        if (min_scale > 0) return min_scale;
        const double w = (mode == noise_mode::gaussian)
                             ? std::log(static_cast<double>(n))
                             : 0.5 * std::sqrt(static_cast<double>(n));
        return std::max<index_t>(2, static_cast<index_t>(std::floor(w)));
    }
};

struct significant_interval {
    index_t start = 0;
    index_t end = 0;  // inclusive, end = l + w - 1
    index_t width = 0;
    double stat = 0.0;     // |D| at detection
    index_t eta_hat = 0;   // localised change point
    bool midpoint_fallback = false;
};

struct detection_result {
    std::vector<significant_interval> intervals;  // sorted by start, pairwise disjoint
    threshold_value lambda;
    scale_estimate scale;
    detection_config config;
    index_t n = 0;
    std::uint64_t stat_evals = 0;
    double elapsed_seconds = 0.0;
};

/// Greedy finest-scale-first search: scan candidates of G_{s,e} by width then
/// location; on the first exceedance record {l..l+w-1}, recurse on (s, l-1)
/// and (l+w, e), and abandon the rest of the scan. Scales below p+2 cannot
/// host the statistic and are skipped.
inline std::vector<significant_interval> greedy_interval_search(
    const prefix_sums& ps, const grid_spec& grid, index_t s, index_t e, double threshold,
    const diff_weights& weights, selection_rule rule = selection_rule::first_exceedance,
    std::uint64_t* eval_counter = nullptr) {
    std::vector<significant_interval> found;
    const index_t n = ps.n();
    const index_t stop_below = std::min<index_t>(grid.min_scale, weights.degree + 1);
    std::uint64_t evals = 0;
    std::vector<std::pair<index_t, index_t>> pending{{s, e}};
    while (!pending.empty()) {
        const auto [ls, le] = pending.back();
        pending.pop_back();
        if (le - ls < stop_below) continue;
        bool detected = false;
        significant_interval hit;
        for (index_t w : grid.scales) {
            if (w > le - ls + 1) break;
            if (w < weights.degree + 2) continue;
            const index_t lmax = std::min(le - w + 1, n - w);
            for (index_t l = ls; l <= lmax; ++l) {
                const double d = std::abs(diff_stat(ps, l, w, weights));
                ++evals;
                if (d > threshold) {
                    if (!detected || d > hit.stat) hit = {l, l + w - 1, w, d, 0, false};
                    detected = true;
                    if (rule == selection_rule::first_exceedance) break;
                }
            }
            if (detected) break;
        }
        if (detected) {
            found.push_back(hit);
            pending.emplace_back(ls, hit.start - 1);
            pending.emplace_back(hit.end + 1, le);
        }
    }
    std::sort(found.begin(), found.end(),
              [](const significant_interval& a, const significant_interval& b) {
                  return a.start < b.start;
              });
    if (eval_counter) *eval_counter += evals;
    return found;
}

/// End to end: prefix sums, grid, scale estimate, threshold, greedy search,
/// then per-interval localisation. Deterministic in its inputs.
inline detection_result detect(const time_series& ts, const detection_config& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const index_t n = ts.n();
    detection_result res;
    res.config = cfg;
    res.n = n;

    const index_t W = cfg.resolved_min_scale(n);
    const diff_weights weights = binomials(cfg.degree);
    const grid_spec grid = build_grid(n, W, cfg.decay);
    res.scale = estimate_scale(ts, cfg.degree, cfg.estimator, cfg.lrv_block);
    if (!(res.scale.value > 0.0))
        throw degenerate_scale_error("detect: scale estimate is zero; cannot threshold");
    const threshold_params tp{n, W, cfg.decay, cfg.degree, cfg.alpha, cfg.mode};
    res.lambda = lambda_for(tp);

    const prefix_sums ps = build_prefix_sums(ts);
    res.intervals = greedy_interval_search(ps, grid, 1, n, res.scale.value * res.lambda.lambda_alpha,
                                           weights, cfg.selection, &res.stat_evals);
    for (significant_interval& iv : res.intervals) {
        const split_fit sf = best_split(ts, iv.start, iv.end, cfg.degree);
        iv.eta_hat = sf.eta;
        iv.midpoint_fallback = sf.midpoint_fallback;
    }
    res.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace cpinfer
