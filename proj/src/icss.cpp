#include "varshift/icss.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace varshift::icss {

CusumCurve centered_cusum(std::span<const double> series, int begin, int end) {
    const int n = static_cast<int>(series.size());
    if (begin < 1 || end > n || end - begin + 1 < 2) {
        throw parameter_error("cusum segment must hold at least two observations");
    }
    const int len = end - begin + 1;
    double total = 0.0;
    for (int i = begin - 1; i < end; ++i) total += series[i] * series[i];
    if (!(total > 0.0)) throw degenerate_error("segment sum of squares is zero");

    CusumCurve curve;
    curve.begin = begin;
    curve.end = end;
    curve.deviations.resize(static_cast<std::size_t>(len));
    double running = 0.0;
    int best = 0;
    double best_abs = -1.0;
    for (int j = 0; j < len; ++j) {
        const double x = series[begin - 1 + j];
        running += x * x;
        const double deviation = running / total - static_cast<double>(j + 1) / len;
        curve.deviations[static_cast<std::size_t>(j)] = deviation;
        if (std::fabs(deviation) > best_abs) {
            best_abs = std::fabs(deviation);
            best = j;
        }
    }
    curve.argmax = begin + best;
    curve.max_abs_deviation = best_abs;
    curve.statistic = std::sqrt(len / 2.0) * best_abs;
    return curve;
}

MaxStatistic max_statistic(const CusumCurve& curve) {
    int best = 0;
    double best_abs = -1.0;
    for (std::size_t j = 0; j < curve.deviations.size(); ++j) {
        if (std::fabs(curve.deviations[j]) > best_abs) {
            best_abs = std::fabs(curve.deviations[j]);
            best = static_cast<int>(j);
        }
    }
    const double len = static_cast<double>(curve.deviations.size());
    return {std::sqrt(len / 2.0) * best_abs, curve.begin + best};
}

namespace {

class Searcher {
public:
    Searcher(std::span<const double> series, const CriticalValueTable& table, double alpha,
             int min_segment)
        : series_(series), table_(table), alpha_(alpha), min_segment_(min_segment) {}

    /// Bracket statistic, or nullopt when the bracket is too short, carries no
    /// signal, or fails the critical-value test.
    std::optional<CusumCurve> exceedance(int i1, int i2) const {
        if (i2 - i1 + 1 < std::max(min_segment_, 2)) return std::nullopt;
        double total = 0.0;
        for (int i = i1 - 1; i < i2; ++i) total += series_[i] * series_[i];
        if (!(total > 0.0)) return std::nullopt;
        CusumCurve curve = centered_cusum(series_, i1, i2);
        if (curve.statistic > table_.critical_value(i2 - i1 + 1, alpha_)) return curve;
        return std::nullopt;
    }

    // Whole-bracket test, then shrink toward the first and last change points
    // and recurse on the middle part.
    void search(int i1, int i2, std::vector<int>& candidates) const {
        const auto whole = exceedance(i1, i2);
        if (!whole) return;

        int upper = whole->argmax;
        while (const auto sub = exceedance(i1, upper)) upper = sub->argmax;
        const int first = upper;

        int lower = whole->argmax + 1;
        while (const auto sub = exceedance(lower, i2)) lower = sub->argmax + 1;
        const int last = lower - 1;

        candidates.push_back(first);
        if (first == last) return;
        candidates.push_back(last);
        search(first + 1, last, candidates);
    }

    // One re-testing pass over the candidate set: every point is checked
    // against the bracket spanned by its neighbours and repositioned to the
    // argmax there, or eliminated.
    std::vector<int> refine_pass(const std::vector<int>& candidates) const {
        const int n = static_cast<int>(series_.size());
        std::vector<int> next;
        for (std::size_t j = 0; j < candidates.size(); ++j) {
            const int left = j == 0 ? 0 : candidates[j - 1];
            const int right = j + 1 == candidates.size() ? n : candidates[j + 1];
            if (const auto curve = exceedance(left + 1, right)) next.push_back(curve->argmax);
        }
        normalize(next);
        return next;
    }

    /// Sorts, deduplicates and keeps at least one observation between
    /// consecutive points (the earlier point wins).
    static void normalize(std::vector<int>& points) {
        std::sort(points.begin(), points.end());
        points.erase(std::unique(points.begin(), points.end()), points.end());
        std::vector<int> spaced;
        for (int p : points) {
            if (spaced.empty() || p - spaced.back() >= 2) spaced.push_back(p);
        }
        points = std::move(spaced);
    }

private:
    std::span<const double> series_;
    const CriticalValueTable& table_;
    double alpha_;
    int min_segment_;
};

std::vector<int> to_first_point(const std::vector<int>& last_points) {
    std::vector<int> shifted(last_points.size());
    std::transform(last_points.begin(), last_points.end(), shifted.begin(),
                   [](int p) { return p + 1; });
    return shifted;
}

}  // namespace

Result detect(std::span<const double> series, const Options& options) {
    if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
        throw parameter_error("alpha must lie in (0, 1)");
    }
    if (options.min_segment_length < 2) {
        throw parameter_error("minimum segment length must be at least 2");
    }
    const int n = static_cast<int>(series.size());
    if (n < 2 * options.min_segment_length) {
        throw parameter_error("series shorter than twice the minimum segment length");
    }
    double total = 0.0;
    for (double x : series) total += x * x;
    if (!(total > 0.0)) throw degenerate_error("series sum of squares is zero");

    const CriticalValueTable& table =
        options.critical_values ? *options.critical_values : CriticalValueTable::builtin();
    const Searcher searcher(series, table, options.alpha, options.min_segment_length);

    std::vector<int> candidates;
    searcher.search(1, n, candidates);
    Searcher::normalize(candidates);

    Result result;
    result.alpha = options.alpha;
    result.min_segment_length = options.min_segment_length;

    if (candidates.empty()) return result;

    for (int pass = 1; pass <= options.max_refinement_passes; ++pass) {
        std::vector<int> next = searcher.refine_pass(candidates);
        const bool stable =
            next.size() == candidates.size() &&
            std::equal(next.begin(), next.end(), candidates.begin(), [&](int a, int b) {
                return std::abs(a - b) <= options.refinement_tolerance;
            });
        candidates = std::move(next);
        if (stable) {
            result.change_points = to_first_point(candidates);
            result.refinement_passes = pass;
            return result;
        }
        if (candidates.empty()) {
            result.refinement_passes = pass;
            return result;
        }
    }
    std::ostringstream msg;
    msg << "candidate set failed to stabilize after " << options.max_refinement_passes
        << " passes";
    throw refinement_error(msg.str(), to_first_point(candidates));
}

}  // namespace varshift::icss
