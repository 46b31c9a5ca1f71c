#pragma once

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "cpinfer/errors.hpp"
#include "cpinfer/series.hpp"

namespace cpinfer {

inline double gauss_upper_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

/// Local-structure constant of the limiting Gaussian process:
/// C_p = (p+2) * (1 + sum_j C(p+1,j)C(p+1,j-1) / sum_i C(p+1,i)^2).
inline double c_p(int p) {
    if (p < 0 || p > kMaxDegree) throw unsupported_degree_error("c_p: degree must be in [0,10]");
    static const std::array<double, kMaxDegree + 1> table = [] {
        std::array<double, kMaxDegree + 1> t{};
        for (int q = 0; q <= kMaxDegree; ++q) {
            const diff_weights w = binomials(q);
            double cross = 0.0;
            for (int j = 1; j <= q + 1; ++j) {
                cross += std::abs(w.coeffs[static_cast<std::size_t>(j)]) *
                         std::abs(w.coeffs[static_cast<std::size_t>(j - 1)]);
            }
            t[static_cast<std::size_t>(q)] = (q + 2) * (1.0 + cross / w.sumsq);
        }
        return t;
    }();
    return table[static_cast<std::size_t>(p)];
}

/// Pickands-type grid constant p_inf(x) = exp(-sum_{k>=1} (1/k) Phibar(sqrt(kx/4))).
///
/// The series is summed until the term falls below term_tol; successive terms
/// shrink by at least exp(-x/8), which certifies the truncated tail. Below
/// x = 1e-4 the series needs k ~ 3e6/x terms, so the small-x limit
/// p_inf(x)^2 ~ (x/2) exp(-rho sqrt(x)), rho = -zeta(1/2)/sqrt(2 pi), is used
/// instead; its relative error is O(x) there, far below the series tolerance
/// anywhere it matters.
inline double p_inf(double x, double term_tol = 1e-15) {
    if (!(x > 0.0)) throw parameter_error("p_inf: need x > 0");
    if (x < 1e-4) {
        constexpr double rho = 0.5825971579390107;
        return std::sqrt(0.5 * x) * std::exp(-0.5 * rho * std::sqrt(x));
    }
    const double q = std::exp(-x / 8.0);
    double sum = 0.0;
    for (long k = 1;; ++k) {
        const double term = gauss_upper_tail(std::sqrt(static_cast<double>(k) * x / 4.0)) /
                            static_cast<double>(k);
        sum += term;
        if (term < term_tol && term * q / (1.0 - q) < 1e-12) break;
    }
    return std::exp(-sum);
}

enum class h_bound { lower, upper };

namespace detail {

inline double h1_series(double a, int p, double d, h_bound which, double summand_tol) {
    if (a <= 1.0) throw parameter_error("h1: decay must exceed 1");
    if (!(d > 0.0)) throw parameter_error("h1: need d > 0");
    const double b = (which == h_bound::lower) ? 1.0 / a : 1.0;
    const double cp = c_p(p);
    double sum = 0.0;
    double x = 2.0 * cp / (b * d);
    for (;;) {
        const double pinf = p_inf(x);
        const double summand = pinf * pinf;
        sum += summand;
        if (summand < summand_tol) break;
        x /= a;
    }
    return sum;
}

}  // namespace detail

/// H_{1,i} = sum_{j>=0} p_inf^2(2 C_p / (a^j b_i d)) with b_1 = 1/a, b_2 = 1.
/// Summands decay geometrically (p_inf^2(x) <= x/2); results are cached.
inline double h1(double a, int p, double d, h_bound which, double summand_tol = 1e-12) {
    using key_t = std::tuple<double, int, double, int, double>;
    static std::map<key_t, double> cache;
    static std::mutex mu;
    const key_t key{a, p, d, which == h_bound::lower ? 0 : 1, summand_tol};
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    const double value = detail::h1_series(a, p, d, which, summand_tol);
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(key, value);
    return value;
}

/// H_{2,i} = b_i^{-1} C_p / (1 - a^{-1}).
inline double h2(double a, int p, h_bound which) {
    if (a <= 1.0) throw parameter_error("h2: decay must exceed 1");
    const double b = (which == h_bound::lower) ? 1.0 / a : 1.0;
    return c_p(p) / (b * (1.0 - 1.0 / a));
}

enum class noise_mode { gaussian, dependent };

struct threshold_params {
    index_t n = 0;
    index_t min_scale = 0;  // W
    double decay = std::numbers::sqrt2;
    int degree = 0;
    double alpha = 0.1;
    noise_mode mode = noise_mode::gaussian;

    double d() const { return static_cast<double>(min_scale) / std::log(static_cast<double>(n)); }
};

struct threshold_value {
    double lambda_alpha = 0.0;
    double h_used = 0.0;
    noise_mode mode = noise_mode::gaussian;
};

namespace detail {

inline void check_threshold_params(const threshold_params& tp) {
    if (!(tp.alpha > 0.0 && tp.alpha < 1.0))
        throw parameter_error("threshold: alpha must lie in (0,1)");
    if (tp.decay <= 1.0) throw parameter_error("threshold: decay must exceed 1");
    if (tp.n < 50) throw parameter_error("threshold: small-sample, need n >= 50");
    if (tp.min_scale < 1) throw parameter_error("threshold: min scale must be positive");
}

}  // namespace detail

/// Gaussian-noise threshold, Gumbel-calibrated over the grid:
/// lambda_alpha = sqrt(2 log n)
///   + [ -log log(n)/2 - log(2 sqrt(pi)/H_{1,2}) + log(-2/log(1-alpha)) ] / sqrt(2 log n).
inline threshold_value lambda_gaussian(const threshold_params& tp) {
    detail::check_threshold_params(tp);
    if (tp.mode != noise_mode::gaussian) throw parameter_error("lambda_gaussian: wrong mode");
    const double logn = std::log(static_cast<double>(tp.n));
    const double H = h1(tp.decay, tp.degree, tp.d(), h_bound::upper);
    const double lead = std::sqrt(2.0 * logn);
    const double corr = -0.5 * std::log(logn) - std::log(2.0 * std::sqrt(std::numbers::pi) / H) +
                        std::log(-2.0 / std::log1p(-tp.alpha));
    return threshold_value{lead + corr / lead, H, noise_mode::gaussian};
}

/// Dependent / non-Gaussian threshold; note the log log term enters with the
/// opposite sign to the Gaussian case:
/// lambda_alpha = sqrt(2 log(n/W))
///   + [ +log log(n/W)/2 - log(sqrt(pi)/H_{2,2}) + log(-2/log(1-alpha)) ] / sqrt(2 log(n/W)).
inline threshold_value lambda_dependent(const threshold_params& tp) {
    detail::check_threshold_params(tp);
    if (tp.mode != noise_mode::dependent) throw parameter_error("lambda_dependent: wrong mode");
    const double ratio = static_cast<double>(tp.n) / static_cast<double>(tp.min_scale);
    if (ratio <= std::numbers::e)
        throw parameter_error("lambda_dependent: need n/W > e");
    const double logr = std::log(ratio);
    const double H = h2(tp.decay, tp.degree, h_bound::upper);
    const double lead = std::sqrt(2.0 * logr);
    const double corr = 0.5 * std::log(logr) - std::log(std::sqrt(std::numbers::pi) / H) +
                        std::log(-2.0 / std::log1p(-tp.alpha));
    return threshold_value{lead + corr / lead, H, noise_mode::dependent};
}

inline threshold_value lambda_for(const threshold_params& tp) {
    return tp.mode == noise_mode::gaussian ? lambda_gaussian(tp) : lambda_dependent(tp);
}

}  // namespace cpinfer
