#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "cpinfer/errors.hpp"
#include "cpinfer/series.hpp"

namespace cpinfer {

enum class scale_method { mad, dif, lrv };

struct scale_estimate {
    double value = 0.0;  // sigma-hat or tau-hat, standard-deviation scale
    scale_method method = scale_method::mad;
    index_t block_size = 0;  // W' when method == lrv
};

namespace detail {

// (p+1)-th difference: out[i] = sum_j coeff[j] * v[i+j], length |v|-(p+1).
inline std::vector<double> signed_differences(const std::vector<double>& v, const diff_weights& w) {
    const std::size_t order = w.coeffs.size() - 1;  // p+1
    std::vector<double> out(v.size() - order);
    for (std::size_t i = 0; i < out.size(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < w.coeffs.size(); ++j) acc += w.coeffs[j] * v[i + j];
        out[i] = acc;
    }
    return out;
}

inline double median_abs(std::vector<double> v) {
    for (double& x : v) x = std::abs(x);
    const std::size_t m = v.size();
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(m / 2);
    std::nth_element(v.begin(), mid, v.end());
    const double upper = *mid;
    if (m % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), mid);
    return 0.5 * (lower + upper);
}

inline constexpr double kNormalQuartile = 0.6744897501960817;  // Phi^{-1}(3/4)

}  // namespace detail

/// Generalised MAD estimator on the (p+1)-th differences of the data.
inline scale_estimate mad_sigma(const time_series& ts, int p) {
    const diff_weights w = binomials(p);
    if (ts.n() < p + 3) throw parameter_error("mad_sigma: need n >= p+3");
    const std::vector<double> x = detail::signed_differences(ts.values, w);
    const double med = detail::median_abs(x);
    return scale_estimate{med / (detail::kNormalQuartile * std::sqrt(w.sumsq)), scale_method::mad, 0};
}

/// Difference-based variance estimator; returns the standard deviation.
inline scale_estimate dif_sigma(const time_series& ts, int p) {
    const diff_weights w = binomials(p);
    if (ts.n() < p + 3) throw parameter_error("dif_sigma: need n >= p+3");
    const std::vector<double> x = detail::signed_differences(ts.values, w);
    double ssq = 0.0;
    for (double v : x) ssq += v * v;
    const double var = ssq / (static_cast<double>(x.size()) * w.sumsq);
    return scale_estimate{std::sqrt(var), scale_method::dif, 0};
}

inline index_t default_lrv_block(index_t n) {
    return static_cast<index_t>(std::floor(std::cbrt(static_cast<double>(n)) + 1e-9));
}

/// Long-run variance from (p+1)-th differences of disjoint block sums of
/// exactly block points each (trailing remainder dropped); returns tau-hat.
inline scale_estimate lrv_tau(const time_series& ts, int p, index_t block = 0) {
    const diff_weights w = binomials(p);
    if (block <= 0) block = default_lrv_block(ts.n());
    if (block < 1) throw parameter_error("lrv_tau: block size must be positive");
    const index_t m = ts.n() / block;
    if (m < p + 3) throw parameter_error("lrv_tau: too few blocks, need floor(n/W') >= p+3");
    std::vector<double> sums(static_cast<std::size_t>(m));
    for (index_t t = 0; t < m; ++t) {
        double acc = 0.0;
        for (index_t i = t * block; i < (t + 1) * block; ++i)
            acc += ts.values[static_cast<std::size_t>(i)];
        sums[static_cast<std::size_t>(t)] = acc;
    }
    const std::vector<double> x = detail::signed_differences(sums, w);
    double ssq = 0.0;
    for (double v : x) ssq += v * v;
    const double var = ssq / (static_cast<double>(x.size()) * static_cast<double>(block) * w.sumsq);
    return scale_estimate{std::sqrt(var), scale_method::lrv, block};
}

inline scale_estimate estimate_scale(const time_series& ts, int p, scale_method method,
                                     index_t lrv_block_size = 0) {
    switch (method) {
        case scale_method::mad: return mad_sigma(ts, p);
        case scale_method::dif: return dif_sigma(ts, p);
        case scale_method::lrv: return lrv_tau(ts, p, lrv_block_size);
    }
    throw parameter_error("estimate_scale: unknown method");
}

}  // namespace cpinfer
