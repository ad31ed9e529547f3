#include "varshift/monte_carlo.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "parallel.hpp"
#include "varshift/errors.hpp"
#include "varshift/icss.hpp"
#include "varshift/rng.hpp"

namespace varshift::mc {

void ScenarioSpec::validate() const {
    if (length < 2) throw parameter_error("scenario length must be at least 2");
    if (regime_variances.empty()) throw parameter_error("scenario needs regime variances");
    if (regime_variances.size() != change_points.size() + 1) {
        throw parameter_error("need exactly one variance per regime (change points + 1)");
    }
    for (double v : regime_variances) {
        if (v < 0.0) throw parameter_error("regime variances must be nonnegative");
    }
    int previous = 1;
    for (int c : change_points) {
        if (c <= previous || c > length) {
            throw parameter_error("change points must be strictly increasing in (1, n]");
        }
        previous = c;
    }
    if (outlier_index && (*outlier_index < 1 || *outlier_index > length)) {
        throw parameter_error("outlier index must lie in [1, n]");
    }
    if (replications < 1) throw parameter_error("replications must be at least 1");
    if (!run_srsd && !run_icss) throw parameter_error("at least one detector must run");
    srsd.validate();
    if (length < srsd.cutoff_length + 1) {
        throw parameter_error("scenario length must exceed the cut-off length");
    }
    if (!(icss_alpha > 0.0 && icss_alpha < 1.0)) {
        throw parameter_error("icss alpha must lie in (0, 1)");
    }
}

double ScenarioSpec::variance_at(int index) const {
    const auto regime = std::upper_bound(change_points.begin(), change_points.end(), index) -
                        change_points.begin();
    return regime_variances[static_cast<std::size_t>(regime)];
}

std::vector<double> generate_replicate(const ScenarioSpec& spec, int replicate_index) {
    stats::GaussianStream stream(
        stats::GaussianStream::substream_key(spec.seed, static_cast<std::uint64_t>(replicate_index)),
        0.0, 1.0);
    std::vector<double> series(static_cast<std::size_t>(spec.length));
    for (int i = 1; i <= spec.length; ++i) {
        series[static_cast<std::size_t>(i - 1)] = stream.next() * std::sqrt(spec.variance_at(i));
    }
    if (spec.outlier_index) {
        series[static_cast<std::size_t>(*spec.outlier_index - 1)] = spec.outlier_value;
    }
    return series;
}

double DetectorTally::count_percent(int bin) const {
    if (replicates == 0) return 0.0;
    return 100.0 * static_cast<double>(count_histogram[static_cast<std::size_t>(bin)]) /
           static_cast<double>(replicates);
}

double DetectorTally::hit_percent(std::size_t change_point) const {
    if (replicates == 0) return 0.0;
    return 100.0 * static_cast<double>(hits[change_point]) / static_cast<double>(replicates);
}

namespace {

void record(DetectorTally& tally, const std::vector<int>& points, const ScenarioSpec& spec,
            int horizon) {
    tally.replicates += 1;
    tally.count_histogram[static_cast<std::size_t>(
        std::min<std::size_t>(points.size(), 3))] += 1;
    for (int p : points) {
        tally.position_histogram[static_cast<std::size_t>(p - 1)] += 1;
        if (p > horizon) tally.late_points += 1;
    }
    for (std::size_t k = 0; k < spec.change_points.size(); ++k) {
        if (std::find(points.begin(), points.end(), spec.change_points[k]) != points.end()) {
            tally.hits[k] += 1;
        }
    }
}

void merge(DetectorTally& into, const DetectorTally& from) {
    for (std::size_t b = 0; b < into.count_histogram.size(); ++b) {
        into.count_histogram[b] += from.count_histogram[b];
    }
    for (std::size_t i = 0; i < into.position_histogram.size(); ++i) {
        into.position_histogram[i] += from.position_histogram[i];
    }
    for (std::size_t k = 0; k < into.hits.size(); ++k) into.hits[k] += from.hits[k];
    into.late_points += from.late_points;
    into.failures += from.failures;
    into.replicates += from.replicates;
}

DetectorTally empty_tally(const ScenarioSpec& spec) {
    DetectorTally tally;
    tally.position_histogram.assign(static_cast<std::size_t>(spec.length), 0);
    tally.hits.assign(spec.change_points.size(), 0);
    return tally;
}

}  // namespace

ExperimentReport run_experiment(const ScenarioSpec& spec, int workers) {
    spec.validate();
    ExperimentReport report;
    report.spec = spec;
    report.resolvable_horizon = spec.length - spec.srsd.cutoff_length + 1;
    report.rng_algorithm = std::string(stats::GaussianStream::algorithm);
    report.srsd = empty_tally(spec);
    report.icss = empty_tally(spec);

    const int chunk_count = std::clamp(workers, 1, spec.replications);
    std::vector<DetectorTally> srsd_parts(static_cast<std::size_t>(chunk_count),
                                          empty_tally(spec));
    std::vector<DetectorTally> icss_parts(static_cast<std::size_t>(chunk_count),
                                          empty_tally(spec));

    varshift::detail::parallel_chunks(
        spec.replications, chunk_count, [&](int chunk, int begin, int end) {
            DetectorTally& srsd_tally = srsd_parts[static_cast<std::size_t>(chunk)];
            DetectorTally& icss_tally = icss_parts[static_cast<std::size_t>(chunk)];
            std::vector<int> points;
            for (int rep = begin; rep < end; ++rep) {
                const auto series = generate_replicate(spec, rep);
                if (spec.run_srsd) {
                    points.clear();
                    try {
                        const auto result = srsd::detect(series, spec.srsd);
                        for (const auto& cp : result.change_points) points.push_back(cp.index);
                        record(srsd_tally, points, spec, report.resolvable_horizon);
                    } catch (const std::exception&) {
                        srsd_tally.failures += 1;
                    }
                }
                if (spec.run_icss) {
                    try {
                        icss::Options options;
                        options.alpha = spec.icss_alpha;
                        const auto result = icss::detect(series, options);
                        record(icss_tally, result.change_points, spec,
                               report.resolvable_horizon);
                    } catch (const std::exception&) {
                        icss_tally.failures += 1;
                    }
                }
            }
        });

    for (int chunk = 0; chunk < chunk_count; ++chunk) {
        merge(report.srsd, srsd_parts[static_cast<std::size_t>(chunk)]);
        merge(report.icss, icss_parts[static_cast<std::size_t>(chunk)]);
    }
    return report;
}

namespace {

std::string join_doubles(const std::vector<double>& values) {
    std::string out;
    char buffer[64];
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::snprintf(buffer, sizeof(buffer), "%g", values[i]);
        if (i > 0) out += ",";
        out += buffer;
    }
    return out;
}

std::string join_ints(const std::vector<int>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ",";
        out += std::to_string(values[i]);
    }
    return out;
}

void write_header(std::ostream& out, const ExperimentReport& report, const char* kind) {
    const ScenarioSpec& spec = report.spec;
    char buffer[128];
    out << "# varshift experiment " << kind << " v1\n";
    out << "# scenario: " << spec.name << "\n";
    out << "# length: " << spec.length << "\n";
    out << "# regime_variances: " << join_doubles(spec.regime_variances) << "\n";
    out << "# change_points: " << (spec.change_points.empty() ? "none" : join_ints(spec.change_points))
        << "\n";
    if (spec.outlier_index) {
        std::snprintf(buffer, sizeof(buffer), "index=%d value=%g", *spec.outlier_index,
                      spec.outlier_value);
        out << "# outlier: " << buffer << "\n";
    } else {
        out << "# outlier: none\n";
    }
    out << "# replications: " << spec.replications << "\n";
    out << "# seed: " << spec.seed << "\n";
    std::snprintf(buffer, sizeof(buffer), "p=%g l=%d h=%g", spec.srsd.target_probability,
                  spec.srsd.cutoff_length, spec.srsd.huber_constant);
    out << "# srsd: " << (spec.run_srsd ? buffer : "off") << "\n";
    std::snprintf(buffer, sizeof(buffer), "alpha=%g", spec.icss_alpha);
    out << "# icss: " << (spec.run_icss ? buffer : "off") << "\n";
    out << "# rng: " << report.rng_algorithm << "\n";
    out << "# resolvable_horizon: " << report.resolvable_horizon << "\n";
    out << "# counting: srsd confirmed points only; icss all points (late ones audited)\n";
}

void write_tally(std::ostream& out, const char* name, const DetectorTally& tally,
                 const ScenarioSpec& spec) {
    char buffer[64];
    static const char* kBins[] = {"0", "1", "2", "3+"};
    for (int bin = 0; bin < 4; ++bin) {
        std::snprintf(buffer, sizeof(buffer), "%.2f", tally.count_percent(bin));
        out << name << "\tcount_pct\t" << kBins[bin] << "\t" << buffer << "\n";
    }
    for (std::size_t k = 0; k < spec.change_points.size(); ++k) {
        std::snprintf(buffer, sizeof(buffer), "%.2f", tally.hit_percent(k));
        out << name << "\thit_pct\t" << spec.change_points[k] << "\t" << buffer << "\n";
    }
    out << name << "\treplicates\t-\t" << tally.replicates << "\n";
    out << name << "\tfailures\t-\t" << tally.failures << "\n";
    out << name << "\tlate_points\t-\t" << tally.late_points << "\n";
}

}  // namespace

void write_report(std::ostream& out, const ExperimentReport& report) {
    write_header(out, report, "report");
    out << "detector\tmetric\tkey\tvalue\n";
    if (report.spec.run_srsd) write_tally(out, "srsd", report.srsd, report.spec);
    if (report.spec.run_icss) write_tally(out, "icss", report.icss, report.spec);
}

void write_histogram(std::ostream& out, const ExperimentReport& report) {
    write_header(out, report, "histogram");
    out << "index\tsrsd\ticss\n";
    for (int i = 0; i < report.spec.length; ++i) {
        out << (i + 1) << "\t" << report.srsd.position_histogram[static_cast<std::size_t>(i)]
            << "\t" << report.icss.position_histogram[static_cast<std::size_t>(i)] << "\n";
    }
}

namespace {

std::string_view trim(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() &&
           (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
        text.remove_suffix(1);
    }
    return text;
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> items;
    std::string current;
    for (char c : text) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!current.empty()) items.push_back(std::move(current));
            current.clear();
        } else {
            current += c;
        }
    }
    if (!current.empty()) items.push_back(std::move(current));
    return items;
}

struct ScenarioParser {
    std::string source;
    int line_no = 0;
    std::string section;

    [[noreturn]] void fail(const std::string& message) const {
        throw parameter_error(source + ":" + std::to_string(line_no) + ": [" + section + "] " +
                              message);
    }

    double parse_double(const std::string& text, const std::string& key) const {
        try {
            std::size_t used = 0;
            const double value = std::stod(text, &used);
            if (used != text.size()) fail(key + ": cannot parse number '" + text + "'");
            return value;
        } catch (const std::exception&) {
            fail(key + ": cannot parse number '" + text + "'");
        }
    }

    long long parse_int(const std::string& text, const std::string& key) const {
        long long value = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            fail(key + ": cannot parse integer '" + text + "'");
        }
        return value;
    }
};

}  // namespace

std::vector<ScenarioSpec> parse_scenarios(std::istream& in, const std::string& source) {
    std::vector<ScenarioSpec> scenarios;
    ScenarioParser ctx{source, 0, ""};
    std::string line;
    bool in_section = false;

    auto finalize = [&](ScenarioSpec& spec) {
        try {
            spec.validate();
        } catch (const parameter_error& err) {
            throw parameter_error(source + ": [" + spec.name + "] " + err.what());
        }
    };

    while (std::getline(in, line)) {
        ++ctx.line_no;
        std::string_view content = trim(line);
        if (content.empty() || content.front() == '#' || content.front() == ';') continue;
        if (content.front() == '[') {
            if (content.back() != ']') {
                ctx.section = "?";
                ctx.fail("malformed section header");
            }
            if (in_section) finalize(scenarios.back());
            scenarios.emplace_back();
            scenarios.back().name = std::string(trim(content.substr(1, content.size() - 2)));
            ctx.section = scenarios.back().name;
            in_section = true;
            continue;
        }
        if (!in_section) {
            ctx.section = "?";
            ctx.fail("key outside of a [section]");
        }
        const auto equals = content.find('=');
        if (equals == std::string_view::npos) ctx.fail("expected 'key = value'");
        const std::string key{trim(content.substr(0, equals))};
        const std::string value{trim(content.substr(equals + 1))};
        ScenarioSpec& spec = scenarios.back();

        if (key == "length") {
            spec.length = static_cast<int>(ctx.parse_int(value, key));
        } else if (key == "variances") {
            spec.regime_variances.clear();
            for (const auto& item : split_list(value)) {
                spec.regime_variances.push_back(ctx.parse_double(item, key));
            }
        } else if (key == "change_points") {
            spec.change_points.clear();
            for (const auto& item : split_list(value)) {
                spec.change_points.push_back(static_cast<int>(ctx.parse_int(item, key)));
            }
        } else if (key == "outlier_index") {
            spec.outlier_index = static_cast<int>(ctx.parse_int(value, key));
        } else if (key == "outlier_value") {
            spec.outlier_value = ctx.parse_double(value, key);
        } else if (key == "replications") {
            spec.replications = static_cast<int>(ctx.parse_int(value, key));
        } else if (key == "seed") {
            spec.seed = static_cast<std::uint64_t>(ctx.parse_int(value, key));
        } else if (key == "srsd_p") {
            spec.srsd.target_probability = ctx.parse_double(value, key);
        } else if (key == "srsd_cutoff") {
            spec.srsd.cutoff_length = static_cast<int>(ctx.parse_int(value, key));
        } else if (key == "srsd_huber") {
            spec.srsd.huber_constant = ctx.parse_double(value, key);
        } else if (key == "icss_alpha") {
            spec.icss_alpha = ctx.parse_double(value, key);
        } else if (key == "detectors") {
            if (value == "both") {
                spec.run_srsd = spec.run_icss = true;
            } else if (value == "srsd") {
                spec.run_srsd = true;
                spec.run_icss = false;
            } else if (value == "icss") {
                spec.run_srsd = false;
                spec.run_icss = true;
            } else {
                ctx.fail("detectors must be srsd, icss or both");
            }
        } else {
            ctx.fail("unknown key '" + key + "'");
        }
    }
    if (in_section) finalize(scenarios.back());
    if (scenarios.empty()) throw parameter_error(source + ": no scenarios defined");
    return scenarios;
}

namespace {

ScenarioSpec make_scenario(const SuiteOptions& options, int ordinal, std::string name, int length,
                           std::vector<double> variances, std::vector<int> change_points,
                           double p, int cutoff, double huber, bool with_icss,
                           std::optional<int> outlier = std::nullopt) {
    ScenarioSpec spec;
    spec.name = std::move(name);
    spec.length = length;
    spec.regime_variances = std::move(variances);
    spec.change_points = std::move(change_points);
    spec.outlier_index = outlier;
    spec.outlier_value = 6.0;
    spec.replications = options.replications;
    spec.seed = stats::GaussianStream::substream_key(options.seed,
                                                     static_cast<std::uint64_t>(ordinal));
    spec.srsd = srsd::DetectorConfig{p, cutoff, huber};
    spec.icss_alpha = 0.05;
    spec.run_srsd = true;
    spec.run_icss = with_icss;
    return spec;
}

}  // namespace

std::vector<ScenarioSpec> reference_scenarios(const SuiteOptions& options) {
    std::vector<ScenarioSpec> specs;
    int ordinal = 0;
    auto add = [&](std::string name, int length, std::vector<double> variances,
                   std::vector<int> change_points, double p, int cutoff, double huber,
                   bool with_icss, std::optional<int> outlier = std::nullopt) {
        specs.push_back(make_scenario(options, ordinal++, std::move(name), length,
                                      std::move(variances), std::move(change_points), p, cutoff,
                                      huber, with_icss, outlier));
    };

    // Sensitivity to the target probability; one doubling of the variance.
    add("tuning_p005", 100, {1, 2}, {51}, 0.05, 30, 2.0, false);
    add("tuning_p010", 100, {1, 2}, {51}, 0.10, 30, 2.0, false);
    add("tuning_p030", 100, {1, 2}, {51}, 0.30, 30, 2.0, false);

    // Sensitivity to the cut-off length; three regimes of length ~30.
    add("tuning_cutoff_131_l20", 100, {1, 3, 1}, {31, 61}, 0.10, 20, 2.0, false);
    add("tuning_cutoff_131_l30", 100, {1, 3, 1}, {31, 61}, 0.10, 30, 2.0, false);
    add("tuning_cutoff_131_l40", 100, {1, 3, 1}, {31, 61}, 0.10, 40, 2.0, false);
    add("tuning_cutoff_313_l20", 100, {3, 1, 3}, {31, 61}, 0.10, 20, 2.0, false);
    add("tuning_cutoff_313_l30", 100, {3, 1, 3}, {31, 61}, 0.10, 30, 2.0, false);
    add("tuning_cutoff_313_l40", 100, {3, 1, 3}, {31, 61}, 0.10, 40, 2.0, false);

    // One change point, both detectors.
    add("one_cp_a", 100, {1, 2}, {51}, 0.20, 40, 2.0, true);
    add("one_cp_b", 100, {2, 1}, {51}, 0.20, 40, 2.0, true);
    add("one_cp_c", 100, {1, 3}, {25}, 0.05, 20, 2.0, true);
    add("one_cp_d", 100, {1, 3}, {90}, 0.10, 20, 2.0, true);
    add("one_cp_e", 100, {3, 1}, {21}, 0.10, 20, 2.0, true);
    add("one_cp_f", 100, {3, 1}, {71}, 0.10, 25, 2.0, true);

    // Two change points, different regime sequences.
    add("two_cp_a", 100, {1, 3, 1}, {34, 67}, 0.05, 25, 2.0, true);
    add("two_cp_b", 100, {3, 1, 3}, {34, 67}, 0.05, 25, 2.0, true);
    add("two_cp_c", 100, {1, 3, 9}, {34, 67}, 0.20, 25, 3.0, true);
    add("two_cp_d", 100, {9, 3, 1}, {34, 67}, 0.20, 25, 3.0, true);

    // Single outlier of fixed value six.
    add("outlier_a", 100, {6, 1}, {34}, 0.05, 25, 2.0, true, 65);
    add("outlier_b", 100, {6, 1}, {34}, 0.05, 25, 2.0, true, 45);
    add("outlier_c", 100, {6, 1, 6}, {34, 68}, 0.05, 20, 2.0, true);
    add("outlier_d", 100, {6, 1, 6}, {34, 68}, 0.05, 20, 2.0, true, 50);

    // Hit rate as a function of the variance ratio, per target probability.
    const double ratios[] = {1.5, 2, 3, 4, 6, 8};
    const std::pair<const char*, double> probabilities[] = {
        {"p005", 0.05}, {"p010", 0.10}, {"p030", 0.30}};
    for (const auto& [tag, p] : probabilities) {
        for (double ratio : ratios) {
            char name[64];
            std::snprintf(name, sizeof(name), "sweep_%s_r%g", tag, ratio);
            std::string clean(name);
            std::replace(clean.begin(), clean.end(), '.', '_');
            add(clean, 100, {1, ratio}, {51}, p, 30, 2.0, false);
        }
    }
    return specs;
}

void run_reference_suite(const std::string& output_dir, const SuiteOptions& options) {
    namespace fs = std::filesystem;
    fs::create_directories(output_dir);
    const auto specs = reference_scenarios(options);

    std::ofstream summary(fs::path(output_dir) / "summary.tsv");
    summary << "# varshift reference suite summary v1\n";
    summary << "# replications: " << options.replications << "\n";
    summary << "# seed: " << options.seed << "\n";
    summary << "scenario\tdetector\tpct_0\tpct_1\tpct_2\tpct_3plus\thits\n";

    std::ofstream sweep(fs::path(output_dir) / "hit_rate_sweep.tsv");
    sweep << "# varshift hit-rate sweep v1\n";
    sweep << "# scenario: variance ratio 1 -> r at index 51, n = 100, cutoff 30, huber 2\n";
    sweep << "ratio\tp\thit_pct\n";

    char buffer[256];
    for (const auto& spec : specs) {
        const auto report = run_experiment(spec, options.workers);
        {
            std::ofstream out(fs::path(output_dir) / (spec.name + ".report.tsv"));
            write_report(out, report);
        }
        {
            std::ofstream out(fs::path(output_dir) / (spec.name + ".hist.tsv"));
            write_histogram(out, report);
        }
        auto emit_summary = [&](const char* detector, const DetectorTally& tally) {
            std::string hit_text;
            for (std::size_t k = 0; k < spec.change_points.size(); ++k) {
                std::snprintf(buffer, sizeof(buffer), "%.2f", tally.hit_percent(k));
                if (k > 0) hit_text += "/";
                hit_text += buffer;
            }
            if (hit_text.empty()) hit_text = "-";
            std::snprintf(buffer, sizeof(buffer), "%s\t%s\t%.2f\t%.2f\t%.2f\t%.2f\t%s\n",
                          spec.name.c_str(), detector, tally.count_percent(0),
                          tally.count_percent(1), tally.count_percent(2), tally.count_percent(3),
                          hit_text.c_str());
            summary << buffer;
        };
        if (spec.run_srsd) emit_summary("srsd", report.srsd);
        if (spec.run_icss) emit_summary("icss", report.icss);

        if (spec.name.starts_with("sweep_")) {
            std::snprintf(buffer, sizeof(buffer), "%g\t%g\t%.2f\n", spec.regime_variances[1],
                          spec.srsd.target_probability, report.srsd.hit_percent(0));
            sweep << buffer;
        }
    }
}

}  // namespace varshift::mc
