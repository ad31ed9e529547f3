#include "varshift/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "varshift/csv.hpp"
#include "varshift/errors.hpp"
#include "varshift/icss.hpp"
#include "varshift/monte_carlo.hpp"
#include "varshift/preprocess.hpp"

namespace varshift::cli {

namespace {

std::vector<std::string> split(const std::string& text, char separator) {
    std::vector<std::string> parts;
    std::string current;
    for (char c : text) {
        if (c == separator) {
            parts.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    parts.push_back(current);
    return parts;
}

std::string format(const char* fmt, auto... args) {
    char buffer[256];
    std::snprintf(buffer, sizeof(buffer), fmt, args...);
    return buffer;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw parameter_error("cannot open output file: " + path);
    out << content;
}

void quarantine_partial(const std::string& target, const std::string& partial,
                        std::ostream& diagnostics) {
    if (partial.empty() || target.empty()) return;
    const std::string path = target + ".quarantine";
    std::ofstream out(path);
    if (out) {
        out << partial;
        diagnostics << "partial output quarantined at " << path << "\n";
    }
}

const icss::CriticalValueTable& resolve_critical_values(const std::string& explicit_path,
                                                        std::string* provenance) {
    static icss::CriticalValueTable loaded;  // kept alive for the process
    std::string path = explicit_path;
    if (path.empty()) {
        if (const char* env = std::getenv("VARSHIFT_CRITICAL_VALUES")) path = env;
    }
    if (path.empty()) {
        if (provenance) *provenance = "builtin";
        return icss::CriticalValueTable::builtin();
    }
    loaded = icss::CriticalValueTable::load_file(path);
    if (provenance) *provenance = path;
    return loaded;
}

}  // namespace

TimeSeries apply_step(const TimeSeries& series, const std::string& step, std::string* resolved) {
    const auto parts = split(step, ':');
    const std::string& name = parts[0];
    auto arg = [&](std::size_t i) -> const std::string& {
        if (i >= parts.size()) throw parameter_error("step '" + step + "' is missing an argument");
        return parts[i];
    };
    auto describe = [&](const std::string& text) {
        if (resolved) *resolved = text;
    };

    TimeSeries out;
    if (name == "diff") {
        out.values = preprocess::first_differences(series.values);
        if (series.has_labels()) {
            out.labels.assign(series.labels.begin() + 1, series.labels.end());
        }
        out.period = series.period;
        describe("diff");
        return out;
    }
    if (name == "prewhiten") {
        double phi = 0.0;
        if (arg(1) == "auto") {
            phi = preprocess::ar1_coefficient(series.values);
            describe(format("prewhiten(phi=%.6g auto)", phi));
        } else {
            phi = std::stod(arg(1));
            describe(format("prewhiten(phi=%.6g)", phi));
        }
        out.values = preprocess::prewhiten(series.values, phi);
        if (series.has_labels()) {
            out.labels.assign(series.labels.begin() + 1, series.labels.end());
        }
        out.period = series.period;
        return out;
    }
    if (name == "lowess") {
        const double fraction = std::stod(arg(1));
        const int iterations = parts.size() > 2 ? std::stoi(parts[2]) : 0;
        auto fit = preprocess::lowess_detrend(series.values, fraction, iterations);
        out = series;
        out.values = std::move(fit.residuals);
        describe(format("lowess(fraction=%g robustness=%d)", fraction, iterations));
        return out;
    }
    if (name == "anomalies") {
        TimeSeries input = series;
        if (parts.size() > 1) input.period = std::stoi(parts[1]);
        out = preprocess::monthly_anomalies(input);
        describe(format("anomalies(period=%d)", input.period > 0 ? input.period : 12));
        return out;
    }
    if (name == "stepmean") {
        std::vector<int> change_points;
        for (const auto& item : split(arg(1), '+')) change_points.push_back(std::stoi(item));
        out = series;
        out.values = preprocess::remove_stepwise_mean(series.values, change_points);
        std::string indices;
        for (std::size_t i = 0; i < change_points.size(); ++i) {
            if (i > 0) indices += "+";
            indices += std::to_string(change_points[i]);
        }
        describe("stepmean(" + indices + ")");
        return out;
    }
    throw parameter_error("unknown preprocessing step '" + name + "'");
}

namespace {

std::string label_of(const TimeSeries& series, int index) {
    if (!series.has_labels()) return "-";
    return series.labels[static_cast<std::size_t>(index - 1)].to_string();
}

const char* direction_name(srsd::Direction d) {
    return d == srsd::Direction::up ? "up" : "down";
}

void append_srsd_sections(std::string& report, const srsd::DetectionResult& result,
                          const TimeSeries& series) {
    for (const auto& regime : result.regimes) {
        report += format("regime\tsrsd\tstart=%d\tend=%d\tvariance=%.6g\tweighted_variance=%.6g\n",
                         regime.start, regime.end, regime.variance, regime.weighted_variance);
    }
    for (const auto& cp : result.change_points) {
        report += format("changepoint\tsrsd\tindex=%d\tlabel=%s\tdirection=%s\tp=%.3g\n", cp.index,
                         label_of(series, cp.index).c_str(), direction_name(cp.direction),
                         cp.observed_p);
    }
    if (result.trailing_pending) {
        const auto& pending = *result.trailing_pending;
        report += format(
            "pending\tsrsd\tindex=%d\tlabel=%s\tdirection=%s\tpoints_seen=%d\trssi=%.6g\tp=%.3g\n",
            pending.candidate_index, label_of(series, pending.candidate_index).c_str(),
            direction_name(pending.direction), pending.points_seen, pending.rssi,
            pending.observed_p);
    }
}

void append_icss_sections(std::string& report, const icss::Result& result,
                          const TimeSeries& series) {
    const int n = static_cast<int>(series.values.size());
    std::vector<int> bounds{1};
    for (int cp : result.change_points) bounds.push_back(cp);
    bounds.push_back(n + 1);
    for (std::size_t seg = 0; seg + 1 < bounds.size(); ++seg) {
        const int start = bounds[seg];
        const int end = bounds[seg + 1] - 1;
        double sum = 0.0;
        for (int i = start; i <= end; ++i) {
            const double v = series.values[static_cast<std::size_t>(i - 1)];
            sum += v * v;
        }
        const double variance = end > start ? sum / (end - start) : 0.0;
        report += format("regime\ticss\tstart=%d\tend=%d\tvariance=%.6g\n", start, end, variance);
    }
    for (std::size_t k = 0; k < result.change_points.size(); ++k) {
        const int cp = result.change_points[k];
        const int start_before = bounds[k];
        const int end_after = bounds[k + 2] - 1;
        double var_before = 0.0;
        double var_after = 0.0;
        for (int i = start_before; i < cp; ++i) {
            var_before += series.values[static_cast<std::size_t>(i - 1)] *
                          series.values[static_cast<std::size_t>(i - 1)];
        }
        for (int i = cp; i <= end_after; ++i) {
            var_after += series.values[static_cast<std::size_t>(i - 1)] *
                         series.values[static_cast<std::size_t>(i - 1)];
        }
        const int df_before = cp - start_before - 1;
        const int df_after = end_after - cp;
        double p = std::numeric_limits<double>::quiet_NaN();
        if (df_before >= 1 && df_after >= 1 && var_before > 0.0) {
            var_before /= df_before;
            var_after /= df_after;
            if (var_before > 0.0 && var_after > 0.0) {
                p = stats::f_two_tailed_pvalue(var_after / var_before, df_after, df_before);
            }
        }
        report += format("changepoint\ticss\tindex=%d\tlabel=%s\tp=%.3g\n", cp,
                         label_of(series, cp).c_str(), p);
    }
}

}  // namespace

int run_detect(const DetectConfig& config, std::ostream& diagnostics) {
    std::string report;
    try {
        if (config.method != "srsd" && config.method != "icss" && config.method != "both") {
            throw parameter_error("method must be srsd, icss or both");
        }
        TimeSeries series = csv::read_series_file(config.input_path);
        const std::size_t input_rows = series.values.size();

        report += "# varshift detect report v1\n";
        report += format("# tool_version: %s\n", tool_version);
        report += format("# input: %s (rows=%zu)\n", config.input_path.c_str(), input_rows);
        report += format("# method: %s\n", config.method.c_str());

        std::string chain;
        for (const auto& step : config.steps) {
            std::string resolved;
            series = apply_step(series, step, &resolved);
            chain += chain.empty() ? resolved : " -> " + resolved;
        }
        report += format("# preprocess: %s\n", chain.empty() ? "none" : chain.c_str());

        // The detectors assume zero-mean data (variances are about zero).
        const double mean = std::accumulate(series.values.begin(), series.values.end(), 0.0) /
                            static_cast<double>(series.values.size());
        double scatter = 0.0;
        for (double v : series.values) scatter += (v - mean) * (v - mean);
        const double sd = std::sqrt(scatter / std::max<std::size_t>(series.values.size() - 1, 1));
        if (sd > 0.0 && std::fabs(mean) > 0.1 * sd) {
            const std::string warning =
                format("series mean %.4g exceeds 0.1 of its standard deviation %.4g; "
                       "variances are computed about zero",
                       mean, sd);
            diagnostics << "warning: " << warning << "\n";
            report += "# warning: " + warning + "\n";
        }

        const bool with_srsd = config.method != "icss";
        const bool with_icss = config.method != "srsd";

        std::optional<srsd::DetectionResult> srsd_result;
        if (with_srsd) {
            report += format("# srsd: p=%g l=%d h=%g\n", config.srsd.target_probability,
                             config.srsd.cutoff_length, config.srsd.huber_constant);
            srsd_result = srsd::detect(series.values, config.srsd);
        }
        std::optional<icss::Result> icss_result;
        std::string table_provenance;
        if (with_icss) {
            const auto& table =
                resolve_critical_values(config.critical_values_path, &table_provenance);
            report += format("# icss: alpha=%g critical_values=%s\n", config.icss_alpha,
                             table_provenance.c_str());
            icss::Options options;
            options.alpha = config.icss_alpha;
            options.critical_values = &table;
            icss_result = icss::detect(series.values, options);
        }

        report += "section\tdetector\tfields\n";
        if (srsd_result) append_srsd_sections(report, *srsd_result, series);
        if (icss_result) append_icss_sections(report, *icss_result, series);

        // Companion data file for plotting: the analyzed values with regime ids.
        std::string data;
        data += "# varshift detect series v1\n";
        data += format("# source: %s\n", config.input_path.c_str());
        data += "index\tlabel\tvalue\tsrsd_regime\ticss_regime\n";
        std::vector<int> srsd_regime(series.values.size(), 1);
        if (srsd_result) {
            for (std::size_t r = 0; r < srsd_result->regimes.size(); ++r) {
                const auto& regime = srsd_result->regimes[r];
                for (int i = regime.start; i <= regime.end; ++i) {
                    srsd_regime[static_cast<std::size_t>(i - 1)] = static_cast<int>(r) + 1;
                }
            }
            if (srsd_result->trailing_pending) {
                for (std::size_t i = static_cast<std::size_t>(
                         srsd_result->trailing_pending->candidate_index - 1);
                     i < series.values.size(); ++i) {
                    srsd_regime[i] = -1;  // unresolved tail
                }
            }
        }
        std::vector<int> icss_regime(series.values.size(), 1);
        if (icss_result) {
            int regime = 1;
            std::size_t next = 0;
            for (std::size_t i = 0; i < series.values.size(); ++i) {
                if (next < icss_result->change_points.size() &&
                    static_cast<int>(i) + 1 == icss_result->change_points[next]) {
                    ++regime;
                    ++next;
                }
                icss_regime[i] = regime;
            }
        }
        for (std::size_t i = 0; i < series.values.size(); ++i) {
            data += format("%zu\t%s\t%.17g\t%d\t%d\n", i + 1,
                           label_of(series, static_cast<int>(i) + 1).c_str(), series.values[i],
                           with_srsd ? srsd_regime[i] : 0, with_icss ? icss_regime[i] : 0);
        }

        write_file(config.output_path, report);
        write_file(config.output_path + ".series.tsv", data);
        return 0;
    } catch (const std::exception& err) {
        diagnostics << "error: " << err.what() << "\n";
        quarantine_partial(config.output_path, report, diagnostics);
        return 1;
    }
}

int run_simulate(const SimulateConfig& config, std::ostream& diagnostics) {
    try {
        if (config.output_dir.empty()) throw parameter_error("output directory is required");
        if (config.reference_suite) {
            mc::SuiteOptions options;
            if (config.replications_override) options.replications = *config.replications_override;
            if (config.seed_override) options.seed = *config.seed_override;
            options.workers = config.workers;
            mc::run_reference_suite(config.output_dir, options);
            return 0;
        }
        std::ifstream in(config.config_path);
        if (!in) throw parameter_error("cannot open scenario config: " + config.config_path);
        auto scenarios = mc::parse_scenarios(in, config.config_path);
        std::filesystem::create_directories(config.output_dir);
        for (auto& spec : scenarios) {
            if (config.replications_override) spec.replications = *config.replications_override;
            if (config.seed_override) spec.seed = *config.seed_override;
            const auto report = mc::run_experiment(spec, config.workers);
            std::ostringstream report_text;
            mc::write_report(report_text, report);
            std::ostringstream histogram_text;
            mc::write_histogram(histogram_text, report);
            const auto base = std::filesystem::path(config.output_dir) / spec.name;
            write_file(base.string() + ".report.tsv", report_text.str());
            write_file(base.string() + ".hist.tsv", histogram_text.str());
        }
        return 0;
    } catch (const std::exception& err) {
        diagnostics << "error: " << err.what() << "\n";
        return 1;
    }
}

int run_critvals(const CritvalsConfig& config, std::ostream& diagnostics) {
    try {
        if (config.output_path.empty()) throw parameter_error("output path is required");
        const auto& lengths =
            config.lengths.empty() ? icss::CriticalValueTable::default_lengths() : config.lengths;
        const auto& alphas =
            config.alphas.empty() ? icss::CriticalValueTable::default_alphas() : config.alphas;
        const int reps = config.replications > 0 ? config.replications
                                                 : icss::CriticalValueTable::default_replications;
        const std::uint64_t seed =
            config.seed ? *config.seed : icss::CriticalValueTable::default_seed;
        const auto table =
            icss::CriticalValueTable::generate(lengths, alphas, reps, seed, config.workers);
        write_file(config.output_path, table.to_text());
        if (!config.cpp_output_path.empty()) {
            std::string source;
            source +=
                "// Generated by `varshift critvals --cpp`. Do not edit by hand; regenerate "
                "with\n// the shipped seed to reproduce bit-exactly.\n\n";
            source += "namespace varshift::icss::detail {\n\n";
            source += "const char* builtin_critical_values_text() {\n";
            source += "    static const char text[] = R\"TBL(" + table.to_text() + ")TBL\";\n";
            source += "    return text;\n}\n\n";
            source += "}  // namespace varshift::icss::detail\n";
            write_file(config.cpp_output_path, source);
        }
        return 0;
    } catch (const std::exception& err) {
        diagnostics << "error: " << err.what() << "\n";
        return 1;
    }
}

int run_preprocess(const PreprocessConfig& config, std::ostream& diagnostics) {
    try {
        TimeSeries series = csv::read_series_file(config.input_path);
        std::vector<std::string> comments;
        comments.push_back(std::string("varshift preprocess v") + tool_version);
        comments.push_back("source: " + config.input_path);
        for (const auto& step : config.steps) {
            std::string resolved;
            series = apply_step(series, step, &resolved);
            comments.push_back("step: " + resolved);
        }
        if (config.steps.empty()) comments.push_back("step: none");
        std::ostringstream out;
        csv::write_series(out, series, comments);
        write_file(config.output_path, out.str());
        return 0;
    } catch (const std::exception& err) {
        diagnostics << "error: " << err.what() << "\n";
        return 1;
    }
}

}  // namespace varshift::cli
