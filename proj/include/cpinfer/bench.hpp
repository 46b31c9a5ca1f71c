#pragma once

#include <chrono>
#include <cstdint>
#include <random>
#include <vector>

#include "cpinfer/grid.hpp"
#include "cpinfer/search.hpp"
#include "cpinfer/series.hpp"

namespace cpinfer {

struct scan_report {
    index_t n = 0;
    index_t min_scale = 0;
    index_t grid_candidates = 0;
    std::uint64_t stat_evals = 0;
    double max_stat = 0.0;
    double scan_seconds = 0.0;  // fastest full-grid scan observed
};

/// Times full-grid scans over white noise for each requested length.
/// Passes are interleaved across the lengths and the per-length minimum is
/// kept, which damps scheduler and frequency noise on shared machines.
inline std::vector<scan_report> measure_scans(const std::vector<index_t>& sizes, int degree,
                                              std::uint64_t seed, int passes = 12) {
    struct scan_ctx {
        prefix_sums ps;
        grid_spec grid;
        index_t n;
    };
    const diff_weights weights = binomials(degree);
    std::vector<scan_ctx> ctx;
    std::vector<scan_report> reports;
    for (index_t n : sizes) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(n));
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<double> y(static_cast<std::size_t>(n));
        for (double& v : y) v = gauss(rng);
        detection_config cfg;
        cfg.degree = degree;
        const index_t W = cfg.resolved_min_scale(n);
        scan_ctx c{build_prefix_sums(time_series(std::move(y))), build_grid(n, W, cfg.decay), n};
        scan_report r;
        r.n = n;
        r.min_scale = W;
        r.grid_candidates = c.grid.candidate_count();
        r.scan_seconds = 1e100;
        ctx.push_back(std::move(c));
        reports.push_back(r);
    }
    for (int pass = -1; pass < passes; ++pass) {  // pass -1 warms caches, untimed
        for (std::size_t i = 0; i < ctx.size(); ++i) {
            std::uint64_t evals = 0;
            double maxstat = 0.0;
            const auto t0 = std::chrono::steady_clock::now();
            for_each_candidate(ctx[i].grid, 1, ctx[i].n, [&](candidate c) {
                const double d = std::abs(diff_stat(ctx[i].ps, c.l, c.w, weights));
                if (d > maxstat) maxstat = d;
                ++evals;
            });
            const double dt =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            if (pass < 0) continue;
            reports[i].stat_evals = evals;
            reports[i].max_stat = maxstat;
            if (dt < reports[i].scan_seconds) reports[i].scan_seconds = dt;
        }
    }
    return reports;
}

}  // namespace cpinfer
