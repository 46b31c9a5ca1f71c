#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpinfer/errors.hpp"
#include "cpinfer/search.hpp"
#include "cpinfer/simulate.hpp"

namespace cpinfer {

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline bool parse_double(const std::string& cell, double& out) {
    const std::string t = trim(cell);
    if (t.empty()) return false;
    char* endp = nullptr;
    out = std::strtod(t.c_str(), &endp);
    return endp == t.c_str() + t.size();
}

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace detail

/// Reads one column (1-based) of a CSV file into a series, in file order.
/// A header row is skipped when its selected cell is not numeric.
inline time_series ingest_csv(const std::string& path, int column = 1) {
    if (column < 1) throw parameter_error("ingest_csv: column selector is 1-based");
    std::ifstream in(path);
    if (!in) throw parse_error("ingest_csv: cannot open " + path, 0);
    std::vector<double> values;
    std::string line;
    long lineno = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty()) continue;
        const std::vector<std::string> cells = detail::split(line, ',');
        if (static_cast<std::size_t>(column) > cells.size())
            throw parse_error("ingest_csv: line " + std::to_string(lineno) + " has no column " +
                                  std::to_string(column),
                              lineno);
        double v = 0.0;
        if (!detail::parse_double(cells[static_cast<std::size_t>(column - 1)], v)) {
            if (first_content) {  // header row
                first_content = false;
                continue;
            }
            throw parse_error("ingest_csv: non-numeric cell at line " + std::to_string(lineno),
                              lineno);
        }
        first_content = false;
        values.push_back(v);
    }
    if (values.empty()) throw parse_error("ingest_csv: no data in " + path, lineno);
    return time_series(std::move(values));
}

inline const char* mode_name(noise_mode m) {
    return m == noise_mode::gaussian ? "gaussian" : "dependent";
}

inline const char* estimator_name(scale_method m) {
    switch (m) {
        case scale_method::mad: return "mad";
        case scale_method::dif: return "dif";
        case scale_method::lrv: return "lrv";
    }
    return "?";
}

inline nlohmann::json result_to_json(const detection_result& res) {
    nlohmann::json intervals = nlohmann::json::array();
    for (const significant_interval& iv : res.intervals) {
        intervals.push_back({{"start", iv.start},
                             {"end", iv.end},
                             {"width", iv.width},
                             {"stat", iv.stat},
                             {"eta_hat", iv.eta_hat},
                             {"midpoint_fallback", iv.midpoint_fallback}});
    }
    return nlohmann::json{
        {"n", res.n},
        {"mode", mode_name(res.config.mode)},
        {"lambda", res.lambda.lambda_alpha},
        {"sigma_hat", res.scale.value},
        {"params",
         {{"degree", res.config.degree},
          {"alpha", res.config.alpha},
          {"decay", res.config.decay},
          {"min_scale", res.config.resolved_min_scale(res.n)},
          {"estimator", estimator_name(res.config.estimator)},
          {"lrv_block", res.scale.block_size},
          {"selection",
           res.config.selection == selection_rule::first_exceedance ? "first" : "argmax"}}},
        {"intervals", intervals},
        {"stat_evals", res.stat_evals},
        {"elapsed_seconds", res.elapsed_seconds}};
}

inline std::vector<significant_interval> intervals_from_json(const nlohmann::json& j) {
    std::vector<significant_interval> out;
    for (const auto& item : j.at("intervals")) {
        significant_interval iv;
        iv.start = item.at("start").get<index_t>();
        iv.end = item.at("end").get<index_t>();
        iv.width = item.at("width").get<index_t>();
        iv.stat = item.at("stat").get<double>();
        iv.eta_hat = item.at("eta_hat").get<index_t>();
        iv.midpoint_fallback = item.value("midpoint_fallback", false);
        out.push_back(iv);
    }
    return out;
}

inline std::string result_to_csv(const detection_result& res) {
    std::ostringstream os;
    os << "start,end,width,stat,eta_hat\n";
    os.precision(10);
    for (const significant_interval& iv : res.intervals)
        os << iv.start << ',' << iv.end << ',' << iv.width << ',' << iv.stat << ',' << iv.eta_hat
           << '\n';
    return os.str();
}

inline std::string result_to_human(const detection_result& res) {
    std::ostringstream os;
    os.precision(6);
    os << "n = " << res.n << ", mode = " << mode_name(res.config.mode)
       << ", estimator = " << estimator_name(res.config.estimator)
       << ", sigma_hat = " << res.scale.value << ", lambda_alpha = " << res.lambda.lambda_alpha
       << "\n";
    if (res.intervals.empty()) {
        os << "no significant intervals\n";
        return os.str();
    }
    os << res.intervals.size() << " significant interval(s):\n";
    for (const significant_interval& iv : res.intervals) {
        os << "  [" << iv.start << ", " << iv.end << "]  width " << iv.width << "  |D| " << iv.stat
           << "  eta_hat " << iv.eta_hat << (iv.midpoint_fallback ? " (midpoint)" : "") << "\n";
    }
    return os.str();
}

/// Plot data: one row per observation, (t, y, id of covering interval or 0,
/// 1 when t is the localised change point).
inline void write_plot_data(const std::string& path, const time_series& ts,
                            const detection_result& res) {
    std::ofstream out(path);
    if (!out) throw parameter_error("write_plot_data: cannot open " + path);
    out << "t,y,interval_id,eta_flag\n";
    out.precision(10);
    for (index_t t = 1; t <= ts.n(); ++t) {
        int id = 0;
        int eta = 0;
        for (std::size_t k = 0; k < res.intervals.size(); ++k) {
            const significant_interval& iv = res.intervals[k];
            if (t >= iv.start && t <= iv.end) {
                id = static_cast<int>(k + 1);
                if (t == iv.eta_hat) eta = 1;
            }
        }
        out << t << ',' << ts.at(t) << ',' << id << ',' << eta << '\n';
    }
}

// ---------------------------------------------------------------------------
// Experiment configs (plain key = value files) and reports
// ---------------------------------------------------------------------------

struct experiment_config {
    std::string kind;  // coverage | performance
    coverage_options coverage;
    performance_options performance;
    std::string out_csv;
    std::string out_json;
};

namespace detail {

inline noise_kind noise_by_name(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (s == "N1") return noise_kind::n1;
    if (s == "N2") return noise_kind::n2;
    if (s == "N3") return noise_kind::n3;
    if (s == "N4") return noise_kind::n4;
    throw parameter_error("unknown noise kind: " + s);
}

inline double parse_decay(const std::string& v) {
    if (v == "sqrt2") return std::numbers::sqrt2;
    double d = 0.0;
    if (!parse_double(v, d)) throw parameter_error("bad decay value: " + v);
    return d;
}

}  // namespace detail

inline experiment_config parse_experiment_config(std::istream& in) {
    experiment_config cfg;
    cfg.kind = "coverage";
    std::string signal = "none";
    double waves_amplitude = kWavesDefaultAmplitude;
    double hills_amplitude = kHillsDefaultAmplitude;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw parse_error("experiment config: expected key = value at line " +
                                  std::to_string(lineno),
                              lineno);
        std::string key = detail::trim(t.substr(0, eq));
        std::string value = detail::trim(t.substr(eq + 1));
        for (char& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        auto as_list = [&value] {
            std::vector<std::string> parts;
            for (const std::string& p : detail::split(value, ','))
                if (!detail::trim(p).empty()) parts.push_back(detail::trim(p));
            return parts;
        };
        if (key == "kind") {
            cfg.kind = value;
        } else if (key == "n") {
            cfg.coverage.n = std::stoll(value);
        } else if (key == "reps") {
            cfg.coverage.reps = cfg.performance.reps = std::stoi(value);
        } else if (key == "alpha") {
            cfg.coverage.alpha = cfg.performance.alpha = std::stod(value);
        } else if (key == "sigma") {
            cfg.coverage.sigma = cfg.performance.sigma = std::stod(value);
        } else if (key == "seed") {
            cfg.coverage.seed = cfg.performance.seed = std::stoull(value);
        } else if (key == "decay") {
            cfg.coverage.decay = cfg.performance.decay = detail::parse_decay(value);
        } else if (key == "threads") {
            cfg.coverage.threads = cfg.performance.threads = std::stoi(value);
        } else if (key == "methods") {
            std::vector<method_spec> ms;
            for (const std::string& name : as_list()) ms.push_back(method_by_name(name));
            cfg.coverage.methods = cfg.performance.methods = ms;
        } else if (key == "noises") {
            std::vector<noise_kind> ns;
            for (const std::string& name : as_list()) ns.push_back(detail::noise_by_name(name));
            cfg.coverage.noises = cfg.performance.noises = ns;
        } else if (key == "degrees") {
            std::vector<int> ds;
            for (const std::string& d : as_list()) ds.push_back(std::stoi(d));
            cfg.coverage.degrees = ds;
        } else if (key == "ar_variance") {
            const ar_variance_reading r = (value == "stationary")
                                              ? ar_variance_reading::stationary
                                              : ar_variance_reading::printed;
            cfg.coverage.ar_reading = cfg.performance.ar_reading = r;
        } else if (key == "signal") {
            signal = value;
        } else if (key == "waves_amplitude") {
            waves_amplitude = std::stod(value);
        } else if (key == "hills_amplitude") {
            hills_amplitude = std::stod(value);
        } else if (key == "out_csv") {
            cfg.out_csv = value;
        } else if (key == "out_json") {
            cfg.out_json = value;
        } else {
            throw parse_error("experiment config: unknown key '" + key + "' at line " +
                                  std::to_string(lineno),
                              lineno);
        }
    }
    if (cfg.kind == "performance") {
        if (signal == "blocks")
            cfg.performance.signal = blocks_signal();
        else if (signal == "waves")
            cfg.performance.signal = waves_signal(waves_amplitude);
        else if (signal == "hills")
            cfg.performance.signal = hills_signal(hills_amplitude);
        else
            throw parameter_error("performance experiment needs signal = blocks|waves|hills");
    } else if (cfg.kind != "coverage") {
        throw parameter_error("experiment kind must be coverage or performance");
    }
    return cfg;
}

inline experiment_config load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parameter_error("cannot open experiment config " + path);
    return parse_experiment_config(in);
}

inline experiment_report run_experiment(const experiment_config& cfg) {
    return cfg.kind == "coverage" ? coverage_experiment(cfg.coverage)
                                  : performance_experiment(cfg.performance);
}

inline nlohmann::json report_to_json(const experiment_report& rep) {
    nlohmann::json rows = nlohmann::json::array();
    for (const report_row& r : rep.rows) {
        nlohmann::json row{{"method", r.method}, {"noise", r.noise},       {"degree", r.degree},
                           {"coverage", r.coverage}, {"empty_count", r.empty_count},
                           {"reps", r.reps}};
        if (rep.kind == "performance") {
            row["no_genuine"] = r.no_genuine;
            row["prop_genuine"] = r.prop_genuine;
            row["mean_length"] = r.mean_length;
        }
        rows.push_back(std::move(row));
    }
    return nlohmann::json{{"kind", rep.kind},     {"n", rep.n},       {"alpha", rep.alpha},
                          {"sigma", rep.sigma},   {"signal", rep.signal},
                          {"seed", rep.seed},     {"reps", rep.reps}, {"rows", rows}};
}

inline std::string report_to_csv(const experiment_report& rep) {
    std::ostringstream os;
    os.precision(10);
    os << "method,noise,degree,no_genuine,prop_genuine,mean_length,coverage,empty_count,reps\n";
    for (const report_row& r : rep.rows) {
        os << r.method << ',' << r.noise << ',' << r.degree << ',' << r.no_genuine << ','
           << r.prop_genuine << ',' << r.mean_length << ',' << r.coverage << ',' << r.empty_count
           << ',' << r.reps << '\n';
    }
    return os.str();
}

}  // namespace cpinfer
