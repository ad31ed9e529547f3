#include "varshift/critical_values.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "parallel.hpp"
#include "varshift/errors.hpp"
#include "varshift/rng.hpp"

namespace varshift::icss {

namespace {

constexpr const char* kFileMagic = "varshift-critical-values v1";

// P(sup |bridge| > a) = 2 * sum_{k>=1} (-1)^(k+1) exp(-2 k^2 a^2)
double bridge_sup_tail(double a) {
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * a * a);
        sum += sign * term;
        sign = -sign;
        if (term < 1e-18) break;
    }
    return 2.0 * sum;
}

// Shortest decimal form that parses back to the same double.
std::string format_double(double v) {
    char buffer[64];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buffer, sizeof(buffer), "%.*g", precision, v);
        if (std::strtod(buffer, nullptr) == v) break;
    }
    return buffer;
}

}  // namespace

double asymptotic_critical_value(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw parameter_error("alpha must lie in (0, 1)");
    double lo = 0.1;
    double hi = 4.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (bridge_sup_tail(mid) > alpha) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

namespace {

// Max statistics of the centered cusum of squares under the null, one value
// per replication, index-keyed substreams so results are worker-independent.
std::vector<double> null_max_statistics(int length, int reps, std::uint64_t seed, int workers) {
    std::vector<double> max_stats(static_cast<std::size_t>(reps));
    const std::uint64_t length_key =
        stats::GaussianStream::substream_key(seed, static_cast<std::uint64_t>(length));
    varshift::detail::parallel_chunks(reps, workers, [&](int, int begin, int end) {
        std::vector<double> squares(static_cast<std::size_t>(length));
        for (int rep = begin; rep < end; ++rep) {
            stats::GaussianStream stream(
                stats::GaussianStream::substream_key(length_key, static_cast<std::uint64_t>(rep)),
                0.0, 1.0);
            double total = 0.0;
            for (int i = 0; i < length; ++i) {
                const double x = stream.next();
                squares[static_cast<std::size_t>(i)] = x * x;
                total += x * x;
            }
            double running = 0.0;
            double max_abs = 0.0;
            for (int i = 0; i < length; ++i) {
                running += squares[static_cast<std::size_t>(i)];
                const double deviation = running / total - static_cast<double>(i + 1) / length;
                max_abs = std::max(max_abs, std::fabs(deviation));
            }
            max_stats[static_cast<std::size_t>(rep)] = std::sqrt(length / 2.0) * max_abs;
        }
    });
    return max_stats;
}

double quantile_from_sorted(const std::vector<double>& sorted, double alpha) {
    const auto reps = static_cast<double>(sorted.size());
    auto k = static_cast<std::size_t>(std::ceil((1.0 - alpha) * reps));
    k = std::clamp<std::size_t>(k, 1, sorted.size());
    return sorted[k - 1];
}

}  // namespace

double simulate_null(int length, double alpha, int reps, std::uint64_t seed, int workers) {
    if (length < 2) throw parameter_error("null simulation length must be at least 2");
    if (!(alpha > 0.0 && alpha < 1.0)) throw parameter_error("alpha must lie in (0, 1)");
    if (reps < 10000) throw parameter_error("null simulation needs at least 10000 replications");
    auto max_stats = null_max_statistics(length, reps, seed, workers);
    std::sort(max_stats.begin(), max_stats.end());
    return quantile_from_sorted(max_stats, alpha);
}

const std::vector<int>& CriticalValueTable::default_lengths() {
    static const std::vector<int> lengths{25, 50, 75, 100, 150, 200, 300, 500, 750, 1000};
    return lengths;
}

const std::vector<double>& CriticalValueTable::default_alphas() {
    static const std::vector<double> alphas{0.01, 0.05, 0.10};
    return alphas;
}

CriticalValueTable CriticalValueTable::generate(std::span<const int> lengths,
                                                std::span<const double> alphas, int reps,
                                                std::uint64_t seed, int workers) {
    if (lengths.empty() || alphas.empty()) {
        throw parameter_error("critical value generation needs lengths and alphas");
    }
    std::vector<int> sorted_lengths(lengths.begin(), lengths.end());
    std::sort(sorted_lengths.begin(), sorted_lengths.end());
    std::vector<double> sorted_alphas(alphas.begin(), alphas.end());
    std::sort(sorted_alphas.begin(), sorted_alphas.end());

    CriticalValueTable table;
    table.reps_ = reps;
    table.seed_ = seed;
    for (int length : sorted_lengths) {
        auto max_stats = null_max_statistics(length, reps, seed, workers);
        std::sort(max_stats.begin(), max_stats.end());
        for (double alpha : sorted_alphas) {
            if (!(alpha > 0.0 && alpha < 1.0)) throw parameter_error("alpha must lie in (0, 1)");
            table.entries_.push_back({length, alpha, quantile_from_sorted(max_stats, alpha)});
        }
    }
    return table;
}

void CriticalValueTable::save(std::ostream& out) const {
    out << kFileMagic << "\n";
    out << "# columns: length alpha value\n";
    out << "# replications: " << reps_ << "\n";
    out << "# seed: " << seed_ << "\n";
    out << "# rng: " << stats::GaussianStream::algorithm << "\n";
    out << "# quantile: k-th smallest with k = ceil((1 - alpha) * replications)\n";
    for (const auto& entry : entries_) {
        out << entry.length << " " << format_double(entry.alpha) << " "
            << format_double(entry.value) << "\n";
    }
}

std::string CriticalValueTable::to_text() const {
    std::ostringstream out;
    save(out);
    return out.str();
}

CriticalValueTable CriticalValueTable::load(std::istream& in, const std::string& source) {
    CriticalValueTable table;
    std::string line;
    if (!std::getline(in, line) || line != kFileMagic) {
        throw parameter_error(source + ": not a varshift critical value table (bad header)");
    }
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream meta(line.substr(1));
            std::string key;
            meta >> key;
            if (key == "replications:") meta >> table.reps_;
            if (key == "seed:") meta >> table.seed_;
            continue;
        }
        std::istringstream row(line);
        CriticalValueEntry entry;
        if (!(row >> entry.length >> entry.alpha >> entry.value)) {
            throw parameter_error(source + ":" + std::to_string(line_no) +
                                  ": expected 'length alpha value'");
        }
        table.entries_.push_back(entry);
    }
    if (table.entries_.empty()) {
        throw parameter_error(source + ": table has no rows");
    }
    std::sort(table.entries_.begin(), table.entries_.end(),
              [](const CriticalValueEntry& a, const CriticalValueEntry& b) {
                  return a.length != b.length ? a.length < b.length : a.alpha < b.alpha;
              });
    return table;
}

CriticalValueTable CriticalValueTable::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parameter_error("cannot open critical value table: " + path);
    return load(in, path);
}

namespace detail {
const char* builtin_critical_values_text();
}

const CriticalValueTable& CriticalValueTable::builtin() {
    static const CriticalValueTable table = [] {
        std::istringstream in(detail::builtin_critical_values_text());
        return load(in, "builtin");
    }();
    return table;
}

double CriticalValueTable::critical_value(int length, double alpha) const {
    if (length < 2) throw parameter_error("critical value length must be at least 2");
    const CriticalValueEntry* below = nullptr;
    const CriticalValueEntry* above = nullptr;
    bool alpha_seen = false;
    for (const auto& entry : entries_) {
        if (std::fabs(entry.alpha - alpha) > 1e-9) continue;
        alpha_seen = true;
        if (entry.length == length) return entry.value;
        if (entry.length < length) below = &entry;
        if (entry.length > length && above == nullptr) above = &entry;
    }
    if (!alpha_seen) {
        throw parameter_error("no simulated critical values for alpha=" + format_double(alpha) +
                              "; regenerate the table with that level");
    }
    if (below == nullptr) return above->value;  // clamp below the grid
    if (above == nullptr) return asymptotic_critical_value(alpha);
    const double t = (std::log(static_cast<double>(length)) -
                      std::log(static_cast<double>(below->length))) /
                     (std::log(static_cast<double>(above->length)) -
                      std::log(static_cast<double>(below->length)));
    return below->value + t * (above->value - below->value);
}

}  // namespace varshift::icss
