#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "cpinfer/errors.hpp"

namespace cpinfer {

using index_t = std::int64_t;

/// Observed data vector Y_1..Y_n. Indices in the public API are 1-based.
struct time_series {
    std::vector<double> values;

    time_series() = default;
    explicit time_series(std::vector<double> v) : values(std::move(v)) {
        if (values.empty()) throw parameter_error("time_series: need n >= 1");
        for (double y : values) {
            if (!std::isfinite(y)) throw parameter_error("time_series: non-finite value");
        }
    }

    index_t n() const { return static_cast<index_t>(values.size()); }
    double at(index_t t) const { return values[static_cast<std::size_t>(t - 1)]; }
};

/// cumsum[0] = 0, cumsum[t] = Y_1 + ... + Y_t.
struct prefix_sums {
    std::vector<double> cumsum;

    index_t n() const { return static_cast<index_t>(cumsum.size()) - 1; }
};

inline prefix_sums build_prefix_sums(const time_series& ts) {
    prefix_sums ps;
    ps.cumsum.resize(static_cast<std::size_t>(ts.n()) + 1);
    ps.cumsum[0] = 0.0;
    double acc = 0.0;
    for (std::size_t t = 0; t < ts.values.size(); ++t) {
        acc += ts.values[t];
        ps.cumsum[t + 1] = acc;
    }
    return ps;
}

/// Sum of Y_start..Y_{start+len-1} in O(1).
inline double local_sum(const prefix_sums& ps, index_t start, index_t len) {
    if (start < 1 || len < 1 || start + len - 1 > ps.n())
        throw range_error("local_sum: window out of range");
    return ps.cumsum[static_cast<std::size_t>(start + len - 1)] -
           ps.cumsum[static_cast<std::size_t>(start - 1)];
}

inline constexpr int kMaxDegree = 10;

/// Signed binomial weights of the (p+1)-th difference operator.
struct diff_weights {
    int degree = 0;
    std::vector<double> coeffs;  // p+2 entries: (-1)^(p+1-j) * C(p+1,j)
    double sumsq = 0.0;          // sum over i of C(p+1,i)^2
};

inline diff_weights binomials(int p) {
    if (p < 0 || p > kMaxDegree)
        throw unsupported_degree_error("binomials: degree must be in [0,10]");
    diff_weights w;
    w.degree = p;
    const int m = p + 1;
    std::vector<std::int64_t> binom(static_cast<std::size_t>(m) + 1, 0);
    binom[0] = 1;
    for (int row = 1; row <= m; ++row) {
        for (int j = row; j > 0; --j) binom[static_cast<std::size_t>(j)] += binom[static_cast<std::size_t>(j - 1)];
    }
    w.coeffs.resize(static_cast<std::size_t>(m) + 1);
    for (int j = 0; j <= m; ++j) {
        const double sign = ((m - j) % 2 == 0) ? 1.0 : -1.0;
        w.coeffs[static_cast<std::size_t>(j)] = sign * static_cast<double>(binom[static_cast<std::size_t>(j)]);
        w.sumsq += static_cast<double>(binom[static_cast<std::size_t>(j)] * binom[static_cast<std::size_t>(j)]);
    }
    return w;
}

/// Scaled (p+1)-th difference of the p+2 local sums on the window
/// {l..l+w-1}. Chunks have length floor(w/(p+2)); the trailing
/// w - (p+2)*chunk observations are excluded. O(1) via p+3 prefix lookups.
inline double diff_stat(const prefix_sums& ps, index_t l, index_t w, const diff_weights& weights) {
    const index_t n = ps.n();
    if (l < 1 || w < 1 || l + w - 1 > n) throw range_error("diff_stat: window out of range");
    const index_t pieces = weights.degree + 2;
    const index_t chunk = w / pieces;
    if (chunk < 1) throw invalid_scale_error("diff_stat: width smaller than p+2");
    double acc = 0.0;
    index_t pos = l - 1;  // cumsum offset ahead of chunk j
    for (index_t j = 0; j < pieces; ++j) {
        const double piece = ps.cumsum[static_cast<std::size_t>(pos + chunk)] -
                             ps.cumsum[static_cast<std::size_t>(pos)];
        acc += weights.coeffs[static_cast<std::size_t>(j)] * piece;
        pos += chunk;
    }
    return acc / std::sqrt(static_cast<double>(chunk) * weights.sumsq);
}

}  // namespace cpinfer
