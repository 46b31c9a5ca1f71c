#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "cpinfer/errors.hpp"
#include "cpinfer/search.hpp"
#include "cpinfer/series.hpp"

namespace cpinfer {

// ---------------------------------------------------------------------------
// Test signals
// ---------------------------------------------------------------------------

enum class signal_kind { none, blocks, waves, hills, custom };

/// Shipped defaults for the signals whose segment coefficients have no
/// canonical values; configs/signals.conf mirrors these numbers.
inline constexpr double kWavesDefaultAmplitude = 20.0;
inline constexpr double kHillsDefaultAmplitude = 2.5;

struct signal_spec {
    signal_kind kind = signal_kind::none;
    index_t n = 0;
    std::vector<index_t> thetas;  // change locations, strictly increasing
    int degree = 0;
    double amplitude = 0.0;
    // custom: one coefficient vector (powers of t/n) per segment; segment j
    // starts at thetas[j-1] (segment 0 starts at 1)
    std::vector<std::vector<double>> segment_coeffs;
};

inline signal_spec none_signal(index_t n) { return {signal_kind::none, n, {}, 0, 0.0, {}}; }

/// First 512 values of the standard blocks signal; jumps at 205/267/308/472.
inline signal_spec blocks_signal() {
    return {signal_kind::blocks, 512, {205, 267, 308, 472}, 0, 0.0, {}};
}

/// Continuous sawtooth, kinks every 150 points, peak value = amplitude.
inline signal_spec waves_signal(double amplitude = kWavesDefaultAmplitude) {
    return {signal_kind::waves, 600, {150, 300, 450}, 1, amplitude, {}};
}

/// Four quadratic bumps of height amplitude, breaks every 100 points.
inline signal_spec hills_signal(double amplitude = kHillsDefaultAmplitude) {
    return {signal_kind::hills, 400, {100, 200, 300}, 2, amplitude, {}};
}

inline signal_spec custom_signal(index_t n, std::vector<index_t> thetas,
                                 std::vector<std::vector<double>> coeffs, int degree) {
    return {signal_kind::custom, n, std::move(thetas), degree, 0.0, std::move(coeffs)};
}

namespace detail {

inline void validate_signal(const signal_spec& spec) {
    if (spec.n < 1) throw parameter_error("signal: need n >= 1");
    index_t prev = 1;
    for (index_t t : spec.thetas) {
        if (t <= prev || t > spec.n - 1)
            throw parameter_error("signal: change locations must be strictly increasing in (1, n)");
        prev = t;
    }
    if (spec.kind == signal_kind::custom &&
        spec.segment_coeffs.size() != spec.thetas.size() + 1)
        throw parameter_error("signal: need one coefficient set per segment");
}

}  // namespace detail

/// Noise-free mean vector of the requested signal.
inline time_series gen_signal(const signal_spec& spec) {
    detail::validate_signal(spec);
    std::vector<double> f(static_cast<std::size_t>(spec.n), 0.0);
    switch (spec.kind) {
        case signal_kind::none:
            break;
        case signal_kind::blocks: {
            if (spec.n != 512) throw parameter_error("blocks signal is defined for n = 512");
            const double means[5] = {0.0, 14.64, -3.66, 7.32, -7.32};
            std::size_t seg = 0;
            for (index_t t = 1; t <= spec.n; ++t) {
                if (seg < spec.thetas.size() && t >= spec.thetas[seg]) ++seg;
                f[static_cast<std::size_t>(t - 1)] = means[seg];
            }
            break;
        }
        case signal_kind::waves: {
            const double period = static_cast<double>(spec.thetas.empty() ? spec.n : spec.thetas[0]);
            for (index_t t = 1; t <= spec.n; ++t) {
                const double cycle = std::fmod(static_cast<double>(t), 2.0 * period);
                const double up = cycle <= period ? cycle : 2.0 * period - cycle;
                f[static_cast<std::size_t>(t - 1)] = spec.amplitude * up / period;
            }
            break;
        }
        case signal_kind::hills: {
            const index_t len = spec.thetas.empty() ? spec.n : spec.thetas[0];
            for (index_t t = 1; t <= spec.n; ++t) {
                const index_t seg_start = ((t - 1) / len) * len + 1;
                const double u = static_cast<double>(t - seg_start) / static_cast<double>(len - 1);
                f[static_cast<std::size_t>(t - 1)] = spec.amplitude * 4.0 * u * (1.0 - u);
            }
            break;
        }
        case signal_kind::custom: {
            std::size_t seg = 0;
            for (index_t t = 1; t <= spec.n; ++t) {
                if (seg < spec.thetas.size() && t >= spec.thetas[seg]) ++seg;
                const std::vector<double>& c = spec.segment_coeffs[seg];
                const double s = static_cast<double>(t) / static_cast<double>(spec.n);
                double acc = 0.0;
                double sp = 1.0;
                for (double ck : c) {
                    acc += ck * sp;
                    sp *= s;
                }
                f[static_cast<std::size_t>(t - 1)] = acc;
            }
            break;
        }
    }
    return time_series(std::move(f));
}

// ---------------------------------------------------------------------------
// Noise processes
// ---------------------------------------------------------------------------

enum class noise_kind { n1, n2, n3, n4 };

/// How to read the printed AR(1) innovation variance: as printed,
/// sigma^2/(1-phi^2), or the alternative sigma^2*(1-phi^2) which makes the
/// marginal variance equal sigma^2.
enum class ar_variance_reading { printed, stationary };

struct noise_spec {
    noise_kind kind = noise_kind::n1;
    double sigma = 1.0;
    double phi = 0.5;  // N3/N4
    std::uint64_t seed = 0;
    ar_variance_reading ar_reading = ar_variance_reading::printed;
};

inline const char* noise_name(noise_kind k) {
    switch (k) {
        case noise_kind::n1: return "N1";
        case noise_kind::n2: return "N2";
        case noise_kind::n3: return "N3";
        case noise_kind::n4: return "N4";
    }
    return "?";
}

inline std::vector<double> gen_noise(const noise_spec& spec, index_t n) {
    if (!(spec.sigma > 0.0)) throw parameter_error("noise: need sigma > 0");
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::student_t_distribution<double> t5(5.0);
    std::vector<double> out(static_cast<std::size_t>(n));
    const double phi2 = 1.0 - spec.phi * spec.phi;
    const double ar_factor =
        spec.ar_reading == ar_variance_reading::printed ? 1.0 / phi2 : phi2;
    switch (spec.kind) {
        case noise_kind::n1:
            for (double& z : out) z = spec.sigma * gauss(rng);
            break;
        case noise_kind::n2: {
            const double s = spec.sigma * std::sqrt(0.6);
            for (double& z : out) z = s * t5(rng);
            break;
        }
        case noise_kind::n3: {
            const double s = spec.sigma * std::sqrt(ar_factor);
            double z = 0.0;
            for (int t = 0; t < 500; ++t) z = spec.phi * z + s * gauss(rng);
            for (double& o : out) {
                z = spec.phi * z + s * gauss(rng);
                o = z;
            }
            break;
        }
        case noise_kind::n4: {
            const double s = spec.sigma * std::sqrt(0.6 * ar_factor);
            double z = 0.0;
            for (int t = 0; t < 500; ++t) z = spec.phi * z + s * t5(rng);
            for (double& o : out) {
                z = spec.phi * z + s * t5(rng);
                o = z;
            }
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Seeding and worker fan-out
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// rep_seed(root, cell, rep) = sm64(sm64(root ^ golden*(cell+1)) + rep).
inline std::uint64_t replication_seed(std::uint64_t root, std::uint64_t cell, std::uint64_t rep) {
    return splitmix64(splitmix64(root ^ (0x9E3779B97F4A7C15ull * (cell + 1))) + rep);
}

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("CPINFER_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs f(i) for i in [0, count); results must be written to per-i slots so
/// aggregation stays identical for any worker count.
template <typename F>
inline void parallel_for(int count, int threads, F&& f) {
    threads = std::min(std::max(threads, 1), count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count || failed.load()) return;
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!first_error) first_error = std::current_exception();
                    failed.store(true);
                    return;
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

struct method_spec {
    std::string name;
    noise_mode mode = noise_mode::gaussian;
    scale_method estimator = scale_method::mad;
};

inline std::vector<method_spec> builtin_methods() {
    return {{"dif1-mad", noise_mode::gaussian, scale_method::mad},
            {"dif2-sd", noise_mode::dependent, scale_method::dif},
            {"dif2-lrv", noise_mode::dependent, scale_method::lrv}};
}

inline method_spec method_by_name(const std::string& name) {
    for (const method_spec& m : builtin_methods())
        if (m.name == name) return m;
    throw parameter_error("unknown method: " + name);
}

struct report_row {
    std::string method;
    std::string noise;
    int degree = 0;
    double coverage = 0.0;      // fraction of reps where every interval is genuine
    double no_genuine = 0.0;    // mean count of genuine intervals
    double prop_genuine = 0.0;  // mean per-rep share of genuine intervals (empty -> 1)
    double mean_length = 0.0;   // mean per-rep mean interval length, nonempty reps
    int empty_count = 0;
    int reps = 0;
};

struct experiment_report {
    std::string kind;  // "coverage" or "performance"
    index_t n = 0;
    double alpha = 0.0;
    double sigma = 0.0;
    std::string signal;
    std::uint64_t seed = 0;
    int reps = 0;
    std::vector<report_row> rows;
};

struct coverage_options {
    index_t n = 750;
    double alpha = 0.1;
    int reps = 500;
    double sigma = 1.0;
    double decay = std::numbers::sqrt2;
    std::vector<method_spec> methods = builtin_methods();
    std::vector<noise_kind> noises = {noise_kind::n1};
    std::vector<int> degrees = {0, 1, 2};
    std::uint64_t seed = 1;
    ar_variance_reading ar_reading = ar_variance_reading::printed;
    double threshold_override = std::numeric_limits<double>::quiet_NaN();
    int threads = 0;
};

namespace detail {

inline bool run_is_empty(const time_series& ts, const detection_config& cfg,
                         double threshold_override) {
    if (std::isnan(threshold_override)) return detect(ts, cfg).intervals.empty();
    const index_t W = cfg.resolved_min_scale(ts.n());
    const grid_spec grid = build_grid(ts.n(), W, cfg.decay);
    const diff_weights weights = binomials(cfg.degree);
    const prefix_sums ps = build_prefix_sums(ts);
    return greedy_interval_search(ps, grid, 1, ts.n(), threshold_override, weights).empty();
}

}  // namespace detail

/// Fraction of replications with empty output per (method, noise, degree).
inline experiment_report coverage_experiment(const coverage_options& opt) {
    if (opt.reps < 1) throw parameter_error("coverage_experiment: need reps >= 1");
    const std::size_t cells = opt.noises.size() * opt.methods.size() * opt.degrees.size();
    std::vector<std::uint8_t> empty(static_cast<std::size_t>(opt.reps) * cells, 0);
    parallel_for(opt.reps, resolve_threads(opt.threads), [&](int rep) {
        std::size_t cell = 0;
        for (std::size_t ni = 0; ni < opt.noises.size(); ++ni) {
            noise_spec ns{opt.noises[ni], opt.sigma, 0.5,
                          replication_seed(opt.seed, ni, static_cast<std::uint64_t>(rep)),
                          opt.ar_reading};
            const time_series ts(gen_noise(ns, opt.n));
            for (const method_spec& m : opt.methods) {
                for (int degree : opt.degrees) {
                    detection_config cfg;
                    cfg.degree = degree;
                    cfg.alpha = opt.alpha;
                    cfg.decay = opt.decay;
                    cfg.mode = m.mode;
                    cfg.estimator = m.estimator;
                    empty[static_cast<std::size_t>(rep) * cells + cell] =
                        detail::run_is_empty(ts, cfg, opt.threshold_override) ? 1 : 0;
                    ++cell;
                }
            }
        }
    });
    experiment_report rep;
    rep.kind = "coverage";
    rep.n = opt.n;
    rep.alpha = opt.alpha;
    rep.sigma = opt.sigma;
    rep.signal = "none";
    rep.seed = opt.seed;
    rep.reps = opt.reps;
    std::size_t cell = 0;
    for (std::size_t ni = 0; ni < opt.noises.size(); ++ni) {
        for (const method_spec& m : opt.methods) {
            for (int degree : opt.degrees) {
                long count = 0;
                for (int r = 0; r < opt.reps; ++r)
                    count += empty[static_cast<std::size_t>(r) * cells + cell];
                report_row row;
                row.method = m.name;
                row.noise = noise_name(opt.noises[ni]);
                row.degree = degree;
                row.coverage = static_cast<double>(count) / opt.reps;
                row.reps = opt.reps;
                row.empty_count = static_cast<int>(count);
                rep.rows.push_back(std::move(row));
                ++cell;
            }
        }
    }
    return rep;
}

struct performance_options {
    signal_spec signal;
    double sigma = 1.0;
    double alpha = 0.1;
    int reps = 500;
    double decay = std::numbers::sqrt2;
    std::vector<method_spec> methods = builtin_methods();
    std::vector<noise_kind> noises = {noise_kind::n1};
    std::uint64_t seed = 1;
    ar_variance_reading ar_reading = ar_variance_reading::printed;
    int threads = 0;
};

/// An interval is genuine iff it contains a true change location; a
/// replication is covered iff every returned interval is genuine (vacuously
/// when none are returned).
inline experiment_report performance_experiment(const performance_options& opt) {
    if (opt.reps < 1) throw parameter_error("performance_experiment: need reps >= 1");
    const time_series mean = gen_signal(opt.signal);
    const index_t n = mean.n();
    const std::size_t cells = opt.noises.size() * opt.methods.size();
    struct rep_stats {
        int genuine = 0;
        int total = 0;
        double length_sum = 0.0;
    };
    std::vector<rep_stats> stats(static_cast<std::size_t>(opt.reps) * cells);
    parallel_for(opt.reps, resolve_threads(opt.threads), [&](int rep) {
        std::size_t cell = 0;
        for (std::size_t ni = 0; ni < opt.noises.size(); ++ni) {
            noise_spec ns{opt.noises[ni], opt.sigma, 0.5,
                          replication_seed(opt.seed, ni, static_cast<std::uint64_t>(rep)),
                          opt.ar_reading};
            std::vector<double> y = gen_noise(ns, n);
            for (index_t t = 0; t < n; ++t)
                y[static_cast<std::size_t>(t)] += mean.values[static_cast<std::size_t>(t)];
            const time_series ts(std::move(y));
            for (const method_spec& m : opt.methods) {
                detection_config cfg;
                cfg.degree = opt.signal.degree;
                cfg.alpha = opt.alpha;
                cfg.decay = opt.decay;
                cfg.mode = m.mode;
                cfg.estimator = m.estimator;
                const detection_result res = detect(ts, cfg);
                rep_stats st;
                st.total = static_cast<int>(res.intervals.size());
                for (const significant_interval& iv : res.intervals) {
                    bool genuine = false;
                    for (index_t theta : opt.signal.thetas)
                        if (theta >= iv.start && theta <= iv.end) genuine = true;
                    st.genuine += genuine ? 1 : 0;
                    st.length_sum += static_cast<double>(iv.width);
                }
                stats[static_cast<std::size_t>(rep) * cells + cell] = st;
                ++cell;
            }
        }
    });
    experiment_report rep;
    rep.kind = "performance";
    rep.n = n;
    rep.alpha = opt.alpha;
    rep.sigma = opt.sigma;
    rep.signal = opt.signal.kind == signal_kind::blocks   ? "blocks"
                 : opt.signal.kind == signal_kind::waves  ? "waves"
                 : opt.signal.kind == signal_kind::hills  ? "hills"
                 : opt.signal.kind == signal_kind::custom ? "custom"
                                                          : "none";
    rep.seed = opt.seed;
    rep.reps = opt.reps;
    std::size_t cell = 0;
    for (std::size_t ni = 0; ni < opt.noises.size(); ++ni) {
        for (const method_spec& m : opt.methods) {
            double genuine_sum = 0.0, prop_sum = 0.0, cover_sum = 0.0, length_sum = 0.0;
            int nonempty = 0, empty_count = 0;
            for (int r = 0; r < opt.reps; ++r) {
                const rep_stats& st = stats[static_cast<std::size_t>(r) * cells + cell];
                genuine_sum += st.genuine;
                if (st.total == 0) {
                    prop_sum += 1.0;
                    cover_sum += 1.0;
                    ++empty_count;
                } else {
                    prop_sum += static_cast<double>(st.genuine) / st.total;
                    cover_sum += (st.genuine == st.total) ? 1.0 : 0.0;
                    length_sum += st.length_sum / st.total;
                    ++nonempty;
                }
            }
            report_row row;
            row.method = m.name;
            row.noise = noise_name(opt.noises[ni]);
            row.degree = opt.signal.degree;
            row.no_genuine = genuine_sum / opt.reps;
            row.prop_genuine = prop_sum / opt.reps;
            row.coverage = cover_sum / opt.reps;
            row.mean_length = nonempty > 0 ? length_sum / nonempty : 0.0;
            row.empty_count = empty_count;
            row.reps = opt.reps;
            rep.rows.push_back(std::move(row));
            ++cell;
        }
    }
    return rep;
}

}  // namespace cpinfer
