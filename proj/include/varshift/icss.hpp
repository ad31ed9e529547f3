#pragma once

#include <span>
#include <string>
#include <vector>

#include "varshift/critical_values.hpp"
#include "varshift/errors.hpp"

namespace varshift::icss {

/// Centered, normalized cumulative sum of squares over one segment:
/// D_k = C_k / C_end - k / len in local indexing, zero at the segment end.
struct CusumCurve {
    int begin = 0;  // 1-based inclusive global bounds of the segment
    int end = 0;
    std::vector<double> deviations;  // D for global indices begin..end
    int argmax = 0;                  // smallest global index attaining max |D|
    double max_abs_deviation = 0.0;
    double statistic = 0.0;  // sqrt(len / 2) * max |D|
};

/// Cusum curve of series[begin..end] (1-based inclusive). The segment needs
/// at least two points and a positive sum of squares.
CusumCurve centered_cusum(std::span<const double> series, int begin, int end);

inline CusumCurve centered_cusum(std::span<const double> series) {
    return centered_cusum(series, 1, static_cast<int>(series.size()));
}

struct MaxStatistic {
    double statistic = 0.0;
    int k_star = 0;  // smallest global index attaining the maximum
};

/// Scaled max deviation of a curve, recomputed from its stored values.
MaxStatistic max_statistic(const CusumCurve& curve);

struct Options {
    double alpha = 0.05;
    int min_segment_length = 8;    // shorter brackets are declared shift-free
    int max_refinement_passes = 50;
    int refinement_tolerance = 2;  // candidates this close to their previous
                                   // position count as unchanged
    const CriticalValueTable* critical_values = nullptr;  // null = builtin table
};

struct Result {
    std::vector<int> change_points;  // first point of each new regime, 1-based
    int refinement_passes = 0;
    double alpha = 0.05;
    int min_segment_length = 8;
};

/// Step-3 refinement failed to stabilize; carries the last candidate set
/// (in first-point convention).
class refinement_error : public numerical_error {
public:
    refinement_error(const std::string& what, std::vector<int> last_candidates)
        : numerical_error(what), last_candidates_(std::move(last_candidates)) {}
    const std::vector<int>& last_candidates() const { return last_candidates_; }

private:
    std::vector<int> last_candidates_;
};

/// Iterated cumulative-sum-of-squares detection (Inclan & Tiao, 1994):
/// whole-series test, first/last bracketing, recursion on the middle part,
/// then iterative re-testing of every candidate against its neighbours'
/// bracket. Purely retrospective and scale invariant. Returned points use the
/// first-point-of-new-regime convention.
Result detect(std::span<const double> series, const Options& options = {});

}  // namespace varshift::icss
