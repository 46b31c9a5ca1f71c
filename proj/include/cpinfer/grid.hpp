#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "cpinfer/errors.hpp"
#include "cpinfer/series.hpp"

namespace cpinfer {

namespace detail {

// a^k with results snapped to the nearest integer when within rounding
// distance, so that exact real powers (e.g. sqrt(2)^(2m)) floor correctly.
inline double snapped_pow(double a, long k) {
    const double v = std::pow(a, static_cast<double>(k));
    const double r = std::round(v);
    if (std::abs(v - r) <= 1e-9 * std::max(1.0, std::abs(v))) return r;
    return v;
}

// Largest integer k with a^k <= x.
inline long floor_log(double a, double x) {
    long k = static_cast<long>(std::floor(std::log(x) / std::log(a)));
    while (snapped_pow(a, k) > x) --k;
    while (snapped_pow(a, k + 1) <= x) ++k;
    return k;
}

}  // namespace detail

/// The a-adic scale set: widths floor(a^k) for floor(log_a W) <= k <= floor(log_a(n/2)),
/// deduplicated, restricted to [2, n/2].
struct grid_spec {
    index_t n = 0;
    index_t min_scale = 0;  // W
    double decay = 0.0;     // a
    std::vector<index_t> scales;

    index_t candidate_count() const {
        index_t total = 0;
        for (index_t w : scales) total += n - w;
        return total;
    }
};

struct candidate {
    index_t l = 0;
    index_t w = 0;
    friend bool operator==(const candidate&, const candidate&) = default;
};

inline grid_spec build_grid(index_t n, index_t W, double a) {
    if (a <= 1.0) throw parameter_error("build_grid: decay must exceed 1");
    if (W < 2) throw parameter_error("build_grid: min scale must be >= 2");
    if (n < 2 * W) throw parameter_error("build_grid: empty scale set, need n >= 2W");
    grid_spec g;
    g.n = n;
    g.min_scale = W;
    g.decay = a;
    const long kmin = detail::floor_log(a, static_cast<double>(W));
    const long kmax = detail::floor_log(a, static_cast<double>(n) / 2.0);
    for (long k = kmin; k <= kmax; ++k) {
        const auto w = static_cast<index_t>(std::floor(detail::snapped_pow(a, k)));
        if (w < 2) continue;
        g.scales.push_back(w);
    }
    std::sort(g.scales.begin(), g.scales.end());
    g.scales.erase(std::unique(g.scales.begin(), g.scales.end()), g.scales.end());
    return g;
}

/// Visits the candidates of G_{s,e}(W,a), i.e. pairs with {l..l+w-1}
/// contained in {s..e} and l <= n-w, ordered by w ascending then l ascending.
template <typename Visitor>
inline void for_each_candidate(const grid_spec& g, index_t s, index_t e, Visitor&& visit) {
    if (s < 1 || e > g.n || s >= e) return;
    for (index_t w : g.scales) {
        if (w > e - s + 1) break;
        const index_t lmax = std::min(e - w + 1, g.n - w);
        for (index_t l = s; l <= lmax; ++l) visit(candidate{l, w});
    }
}

inline std::vector<candidate> enumerate_candidates(const grid_spec& g, index_t s, index_t e) {
    std::vector<candidate> out;
    for_each_candidate(g, s, e, [&](candidate c) { out.push_back(c); });
    return out;
}

}  // namespace cpinfer
