// Command line front end: detect change-point intervals in a CSV series, run
// seeded simulation experiments, print threshold diagnostics, benchmark.

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cpinfer/cpinfer.hpp"

namespace {

using nlohmann::json;

struct detect_args {
    std::string input;
    int column = 1;
    int degree = 0;
    double alpha = 0.1;
    double decay = std::numbers::sqrt2;
    long long min_scale = 0;
    std::string mode = "gauss";
    std::string estimator;
    long long lrv_block = 0;
    std::string format = "json";
    std::string plot_data;
    std::string output;
};

cpinfer::detection_config make_config(const detect_args& a) {
    cpinfer::detection_config cfg;
    cfg.degree = a.degree;
    cfg.alpha = a.alpha;
    cfg.decay = a.decay;
    cfg.min_scale = a.min_scale;
    cfg.mode = (a.mode == "dep") ? cpinfer::noise_mode::dependent : cpinfer::noise_mode::gaussian;
    std::string est = a.estimator;
    if (est.empty()) est = (a.mode == "dep") ? "lrv" : "mad";
    if (est == "mad")
        cfg.estimator = cpinfer::scale_method::mad;
    else if (est == "dif")
        cfg.estimator = cpinfer::scale_method::dif;
    else if (est == "lrv")
        cfg.estimator = cpinfer::scale_method::lrv;
    else
        throw cpinfer::parameter_error("estimator must be one of mad|dif|lrv");
    if (cfg.estimator == cpinfer::scale_method::lrv && cfg.mode != cpinfer::noise_mode::dependent)
        throw cpinfer::parameter_error("estimator lrv requires --mode dep");
    cfg.lrv_block = a.lrv_block;
    return cfg;
}

void emit(const std::string& text, const std::string& output) {
    if (output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(output);
    if (!out) throw cpinfer::parameter_error("cannot open output file " + output);
    out << text;
}

int run_detect(const detect_args& a) {
    const cpinfer::time_series ts = cpinfer::ingest_csv(a.input, a.column);
    const cpinfer::detection_config cfg = make_config(a);
    const cpinfer::detection_result res = cpinfer::detect(ts, cfg);
    if (a.format == "json")
        emit(cpinfer::result_to_json(res).dump(2) + "\n", a.output);
    else if (a.format == "csv")
        emit(cpinfer::result_to_csv(res), a.output);
    else
        emit(cpinfer::result_to_human(res), a.output);
    if (!a.plot_data.empty()) cpinfer::write_plot_data(a.plot_data, ts, res);
    return 0;
}

int run_thresholds(long long n, int degree, double alpha, double decay, long long min_scale,
                   const std::string& mode) {
    cpinfer::threshold_params tp;
    tp.n = n;
    tp.degree = degree;
    tp.alpha = alpha;
    tp.decay = decay;
    tp.mode =
        (mode == "dep") ? cpinfer::noise_mode::dependent : cpinfer::noise_mode::gaussian;
    if (min_scale > 0) {
        tp.min_scale = min_scale;
    } else {
        cpinfer::detection_config dflt;
        dflt.mode = tp.mode;
        tp.min_scale = dflt.resolved_min_scale(n);
    }
    const cpinfer::threshold_value lam = cpinfer::lambda_for(tp);
    const json out{
        {"n", tp.n},
        {"min_scale", tp.min_scale},
        {"decay", tp.decay},
        {"degree", tp.degree},
        {"alpha", tp.alpha},
        {"mode", cpinfer::mode_name(tp.mode)},
        {"c_p", cpinfer::c_p(tp.degree)},
        {"h_1_1", cpinfer::h1(tp.decay, tp.degree, tp.d(), cpinfer::h_bound::lower)},
        {"h_1_2", cpinfer::h1(tp.decay, tp.degree, tp.d(), cpinfer::h_bound::upper)},
        {"h_2_1", cpinfer::h2(tp.decay, tp.degree, cpinfer::h_bound::lower)},
        {"h_2_2", cpinfer::h2(tp.decay, tp.degree, cpinfer::h_bound::upper)},
        {"lambda_alpha", lam.lambda_alpha}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_simulate(const std::string& config_path, long long seed_override, int threads,
                 const std::string& out_csv, const std::string& out_json) {
    cpinfer::experiment_config cfg = cpinfer::load_experiment_config(config_path);
    if (seed_override >= 0) {
        cfg.coverage.seed = static_cast<std::uint64_t>(seed_override);
        cfg.performance.seed = static_cast<std::uint64_t>(seed_override);
    }
    if (threads > 0) {
        cfg.coverage.threads = threads;
        cfg.performance.threads = threads;
    }
    if (!out_csv.empty()) cfg.out_csv = out_csv;
    if (!out_json.empty()) cfg.out_json = out_json;
    const cpinfer::experiment_report rep = cpinfer::run_experiment(cfg);
    const std::string csv = cpinfer::report_to_csv(rep);
    if (!cfg.out_csv.empty()) {
        std::ofstream out(cfg.out_csv);
        if (!out) throw cpinfer::parameter_error("cannot open " + cfg.out_csv);
        out << csv;
    }
    if (!cfg.out_json.empty()) {
        std::ofstream out(cfg.out_json);
        if (!out) throw cpinfer::parameter_error("cannot open " + cfg.out_json);
        out << cpinfer::report_to_json(rep).dump(2) << "\n";
    }
    std::cout << csv;
    return 0;
}

// Full-grid scans over white noise: evaluation counts against the grid
// sizes, and wall times for the O(n log n) growth check.
int run_bench(const std::string& sizes_csv, int degree, std::uint64_t seed) {
    std::vector<cpinfer::index_t> sizes;
    for (const std::string& tok : cpinfer::detail::split(sizes_csv, ',')) {
        const std::string t = cpinfer::detail::trim(tok);
        if (!t.empty()) sizes.push_back(std::stoll(t));
    }
    json out = json::array();
    for (const cpinfer::scan_report& r : cpinfer::measure_scans(sizes, degree, seed)) {
        out.push_back(json{{"n", r.n},
                           {"min_scale", r.min_scale},
                           {"grid_candidates", r.grid_candidates},
                           {"stat_evals", r.stat_evals},
                           {"max_stat", r.max_stat},
                           {"scan_seconds", r.scan_seconds}});
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"change-point interval inference for piecewise polynomial signals"};
    app.require_subcommand(1);

    detect_args da;
    CLI::App* detect = app.add_subcommand("detect", "detect significant intervals in a CSV series");
    detect->add_option("--input", da.input, "input CSV path")->required();
    detect->add_option("--column", da.column, "1-based column selector");
    detect->add_option("--degree", da.degree, "polynomial degree p");
    detect->add_option("--alpha", da.alpha, "significance level");
    detect->add_option("--decay", da.decay, "grid decay parameter a");
    detect->add_option("--min-scale", da.min_scale, "minimum grid scale W (0 = mode default)");
    detect->add_option("--mode", da.mode, "noise regime: gauss | dep")
        ->check(CLI::IsMember({"gauss", "dep"}));
    detect->add_option("--estimator", da.estimator, "scale estimator: mad | dif | lrv");
    detect->add_option("--lrv-block", da.lrv_block, "LRV block size W' (0 = n^(1/3))");
    detect->add_option("--format", da.format, "output format")
        ->check(CLI::IsMember({"json", "csv", "human"}));
    detect->add_option("--plot-data", da.plot_data, "write per-observation plot data CSV");
    detect->add_option("--output", da.output, "write results here instead of stdout");

    long long tn = 750, tmin_scale = 0;
    int tdegree = 0;
    double talpha = 0.1, tdecay = std::numbers::sqrt2;
    std::string tmode = "gauss";
    CLI::App* thresholds = app.add_subcommand("thresholds", "print threshold constants as JSON");
    thresholds->add_option("--n", tn, "series length")->required();
    thresholds->add_option("--degree", tdegree, "polynomial degree p");
    thresholds->add_option("--alpha", talpha, "significance level");
    thresholds->add_option("--decay", tdecay, "grid decay parameter a");
    thresholds->add_option("--min-scale", tmin_scale, "minimum grid scale W (0 = mode default)");
    thresholds->add_option("--mode", tmode, "noise regime: gauss | dep")
        ->check(CLI::IsMember({"gauss", "dep"}));

    std::string sim_config, sim_csv, sim_json;
    long long sim_seed = -1;
    int sim_threads = 0;
    CLI::App* simulate = app.add_subcommand("simulate", "run a Monte Carlo experiment config");
    simulate->add_option("--config", sim_config, "experiment config file")->required();
    simulate->add_option("--seed", sim_seed, "override root seed");
    simulate->add_option("--threads", sim_threads, "worker count (0 = CPINFER_THREADS or cores)");
    simulate->add_option("--out-csv", sim_csv, "override CSV report path");
    simulate->add_option("--out-json", sim_json, "override JSON report path");

    std::string bench_sizes = "65536,262144";
    int bench_degree = 0;
    long long bench_seed = 7;
    CLI::App* bench = app.add_subcommand("bench", "time full-grid scans on synthetic noise");
    bench->add_option("--sizes", bench_sizes, "comma separated series lengths");
    bench->add_option("--degree", bench_degree, "polynomial degree p");
    bench->add_option("--seed", bench_seed, "noise seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*detect) return run_detect(da);
        if (*thresholds) return run_thresholds(tn, tdegree, talpha, tdecay, tmin_scale, tmode);
        if (*simulate) return run_simulate(sim_config, sim_seed, sim_threads, sim_csv, sim_json);
        if (*bench) return run_bench(bench_sizes, bench_degree, static_cast<std::uint64_t>(bench_seed));
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
        return 1;
    }
    return 0;
}
