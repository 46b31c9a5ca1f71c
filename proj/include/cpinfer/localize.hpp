#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "cpinfer/errors.hpp"
#include "cpinfer/series.hpp"

namespace cpinfer {

namespace detail {

// Sequential least squares: rows enter one at a time and Givens rotations
// keep an upper-triangular factor, so prefix/suffix residuals of a window
// come out of a single pass in O(p^2) per point.
class qr_accumulator {
public:
    explicit qr_accumulator(int ncols)
        : m_(ncols), r_(static_cast<std::size_t>(ncols) * ncols, 0.0), qty_(ncols, 0.0) {}

    void add_row(std::vector<double>& x, double y) {
        for (int i = 0; i < m_; ++i) {
            const double xi = x[static_cast<std::size_t>(i)];
            if (xi == 0.0) continue;
            double& rii = r_[static_cast<std::size_t>(i) * m_ + i];
            const double h = std::hypot(rii, xi);
            const double c = rii / h;
            const double s = xi / h;
            rii = h;
            for (int j = i + 1; j < m_; ++j) {
                double& rij = r_[static_cast<std::size_t>(i) * m_ + j];
                const double t = c * rij + s * x[static_cast<std::size_t>(j)];
                x[static_cast<std::size_t>(j)] = -s * rij + c * x[static_cast<std::size_t>(j)];
                rij = t;
            }
            const double t = c * qty_[static_cast<std::size_t>(i)] + s * y;
            y = -s * qty_[static_cast<std::size_t>(i)] + c * y;
            qty_[static_cast<std::size_t>(i)] = t;
        }
        rss_ += y * y;
        ++rows_;
    }

    double rss() const { return rss_; }
    long rows() const { return rows_; }

    std::vector<double> solve() const {
        std::vector<double> c(static_cast<std::size_t>(m_), 0.0);
        for (int i = m_ - 1; i >= 0; --i) {
            double acc = qty_[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < m_; ++j)
                acc -= r_[static_cast<std::size_t>(i) * m_ + j] * c[static_cast<std::size_t>(j)];
            const double rii = r_[static_cast<std::size_t>(i) * m_ + i];
            c[static_cast<std::size_t>(i)] = (rii != 0.0) ? acc / rii : 0.0;
        }
        return c;
    }

private:
    int m_;
    std::vector<double> r_;
    std::vector<double> qty_;
    double rss_ = 0.0;
    long rows_ = 0;
};

// Rebase a polynomial from the window variable u = alpha*s + beta back to
// powers of s = t/n.
inline std::vector<double> rebase_poly(const std::vector<double>& cu, double alpha, double beta) {
    const std::size_t m = cu.size();
    std::vector<double> out(m, 0.0);
    std::vector<double> binom(m, 0.0);
    binom[0] = 1.0;
    for (std::size_t k = 0; k < m; ++k) {
        if (k > 0) {
            for (std::size_t j = k; j > 0; --j) binom[j] = binom[j] + binom[j - 1];
        }
        double bpow = 1.0;  // beta^j
        for (std::size_t j = 0; j <= k; ++j) {
            // cu[k] * C(k,j) * alpha^{k-j} * beta^j contributes to s^{k-j}
            out[k - j] += cu[k] * binom[j] * std::pow(alpha, static_cast<double>(k - j)) * bpow;
            bpow *= beta;
        }
    }
    return out;
}

}  // namespace detail

struct poly_fit {
    std::vector<double> coeffs;  // data units per (t/n)^j
    double rss = 0.0;
};

/// Degree-p least squares in t/n over {start..end}; the fit runs in a basis
/// orthogonalised over the window, raw (t/n)^j coefficients are recovered
/// afterwards.
inline poly_fit poly_fit_rss(const time_series& ts, index_t start, index_t end, int p) {
    if (p < 0 || p > kMaxDegree) throw unsupported_degree_error("poly_fit_rss: degree in [0,10]");
    if (start < 1 || end > ts.n() || start > end) throw range_error("poly_fit_rss: bad window");
    if (end - start + 1 < p + 1) throw parameter_error("poly_fit_rss: too few points");
    const double n = static_cast<double>(ts.n());
    const double mid = 0.5 * static_cast<double>(start + end);
    const double half = std::max(1.0, 0.5 * static_cast<double>(end - start));
    detail::qr_accumulator acc(p + 1);
    std::vector<double> row(static_cast<std::size_t>(p) + 1);
    for (index_t t = start; t <= end; ++t) {
        const double u = (static_cast<double>(t) - mid) / half;
        double up = 1.0;
        for (int j = 0; j <= p; ++j) {
            row[static_cast<std::size_t>(j)] = up;
            up *= u;
        }
        acc.add_row(row, ts.at(t));
    }
    poly_fit fit;
    fit.rss = acc.rss();
    // u = (t - mid)/half = (n/half) s - mid/half with s = t/n
    fit.coeffs = detail::rebase_poly(acc.solve(), n / half, -mid / half);
    return fit;
}

struct split_fit {
    index_t eta = 0;  // left piece {start..eta}, right piece {eta+1..end}
    double rss = 0.0;
    poly_fit left;
    poly_fit right;
    bool midpoint_fallback = false;
};

inline index_t midpoint(index_t start, index_t end) { return (start + end) / 2; }

/// RSS-minimising split with degree-p fits on both sides. Admissible splits
/// leave at least p+1 points per side; ties break to the smallest eta.
inline split_fit best_split(const time_series& ts, index_t start, index_t end, int p) {
    if (p < 0 || p > kMaxDegree) throw unsupported_degree_error("best_split: degree in [0,10]");
    if (start < 1 || end > ts.n() || start > end) throw range_error("best_split: bad window");
    split_fit sf;
    const index_t width = end - start + 1;
    if (width < 2 * (p + 1) + 1) {
        sf.eta = midpoint(start, end);
        sf.midpoint_fallback = true;
        if (width >= p + 1) {
            sf.left = sf.right = poly_fit_rss(ts, start, end, p);
            sf.rss = sf.left.rss;
        }
        return sf;
    }
    const double mid = 0.5 * static_cast<double>(start + end);
    const double half = std::max(1.0, 0.5 * static_cast<double>(end - start));
    auto basis_row = [&](index_t t, std::vector<double>& row) {
        const double u = (static_cast<double>(t) - mid) / half;
        double up = 1.0;
        for (int j = 0; j <= p; ++j) {
            row[static_cast<std::size_t>(j)] = up;
            up *= u;
        }
    };
    const index_t eta_lo = start + p;
    const index_t eta_hi = end - p - 1;
    std::vector<double> row(static_cast<std::size_t>(p) + 1);
    std::vector<double> rss_left(static_cast<std::size_t>(width), 0.0);  // prefix end at start+i
    {
        detail::qr_accumulator acc(p + 1);
        for (index_t t = start; t <= end; ++t) {
            basis_row(t, row);
            acc.add_row(row, ts.at(t));
            rss_left[static_cast<std::size_t>(t - start)] = acc.rss();
        }
    }
    std::vector<double> rss_right(static_cast<std::size_t>(width), 0.0);  // suffix from start+i
    {
        detail::qr_accumulator acc(p + 1);
        for (index_t t = end; t >= start; --t) {
            basis_row(t, row);
            acc.add_row(row, ts.at(t));
            rss_right[static_cast<std::size_t>(t - start)] = acc.rss();
        }
    }
    index_t best_eta = eta_lo;
    double best = std::numeric_limits<double>::infinity();
    for (index_t eta = eta_lo; eta <= eta_hi; ++eta) {
        const double total = rss_left[static_cast<std::size_t>(eta - start)] +
                             rss_right[static_cast<std::size_t>(eta + 1 - start)];
        if (total < best) {
            best = total;
            best_eta = eta;
        }
    }
    sf.eta = best_eta;
    sf.left = poly_fit_rss(ts, start, best_eta, p);
    sf.right = poly_fit_rss(ts, best_eta + 1, end, p);
    sf.rss = sf.left.rss + sf.right.rss;
    return sf;
}

}  // namespace cpinfer
