#include "varshift/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "varshift/errors.hpp"
#include "varshift/stats.hpp"

namespace varshift::preprocess {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double tricube(double u) {
    if (u >= 1.0) return 0.0;
    const double t = 1.0 - u * u * u;
    return t * t * t;
}

// Nearest-q contiguous index window around center, extending toward the
// closer side first (ties go left).
std::pair<int, int> neighbor_window(int center, int q, int n) {
    int lo = center;
    int hi = center;
    while (hi - lo + 1 < q) {
        const bool can_left = lo > 0;
        const bool can_right = hi < n - 1;
        if (can_left && can_right) {
            if (center - (lo - 1) <= (hi + 1) - center) {
                --lo;
            } else {
                ++hi;
            }
        } else if (can_left) {
            --lo;
        } else {
            ++hi;
        }
    }
    return {lo, hi};
}

}  // namespace

LowessFit lowess_detrend(std::span<const double> values, double fraction,
                         int robustness_iterations) {
    const int n = static_cast<int>(values.size());
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw parameter_error("smoothing fraction must lie in (0, 1]");
    }
    if (robustness_iterations < 0 || robustness_iterations > 5) {
        throw parameter_error("robustness iterations must lie in 0..5");
    }
    const int q = static_cast<int>(std::ceil(fraction * n));
    if (n < 4 || q < 2) {
        throw parameter_error("lowess window too small: need length >= 4 and fraction*n >= 2");
    }

    LowessFit fit;
    fit.trend.assign(static_cast<std::size_t>(n), 0.0);
    fit.residuals.assign(static_cast<std::size_t>(n), 0.0);
    std::vector<double> robustness(static_cast<std::size_t>(n), 1.0);

    for (int iteration = 0; iteration <= robustness_iterations; ++iteration) {
        for (int i = 0; i < n; ++i) {
            const auto [lo, hi] = neighbor_window(i, q, n);
            const double bandwidth = std::max(i - lo, hi - i);
            double sum_w = 0.0;
            double sum_wx = 0.0;
            double sum_wy = 0.0;
            for (int j = lo; j <= hi; ++j) {
                const double w =
                    tricube(std::fabs(j - i) / bandwidth) * robustness[static_cast<std::size_t>(j)];
                sum_w += w;
                sum_wx += w * j;
                sum_wy += w * values[static_cast<std::size_t>(j)];
            }
            if (sum_w <= 0.0) {
                fit.trend[static_cast<std::size_t>(i)] = values[static_cast<std::size_t>(i)];
                continue;
            }
            const double mean_x = sum_wx / sum_w;
            const double mean_y = sum_wy / sum_w;
            double sxx = 0.0;
            double sxy = 0.0;
            for (int j = lo; j <= hi; ++j) {
                const double w =
                    tricube(std::fabs(j - i) / bandwidth) * robustness[static_cast<std::size_t>(j)];
                const double dx = j - mean_x;
                sxx += w * dx * dx;
                sxy += w * dx * (values[static_cast<std::size_t>(j)] - mean_y);
            }
            // Near-singular windows fall back to the weighted mean.
            fit.trend[static_cast<std::size_t>(i)] =
                sxx > 1e-9 * bandwidth * bandwidth * sum_w
                    ? mean_y + (sxy / sxx) * (i - mean_x)
                    : mean_y;
        }
        for (int i = 0; i < n; ++i) {
            fit.residuals[static_cast<std::size_t>(i)] =
                values[static_cast<std::size_t>(i)] - fit.trend[static_cast<std::size_t>(i)];
        }
        if (iteration < robustness_iterations) {
            const double spread = stats::mad_about_zero(fit.residuals);
            if (spread <= 0.0) break;
            for (int i = 0; i < n; ++i) {
                const double u = fit.residuals[static_cast<std::size_t>(i)] / (6.0 * spread);
                const double b = std::max(0.0, 1.0 - u * u);
                robustness[static_cast<std::size_t>(i)] = b * b;
            }
        }
    }
    return fit;
}

double ar1_coefficient(std::span<const double> values, bool center) {
    if (values.size() < 3) throw parameter_error("lag-1 regression needs at least 3 observations");
    std::vector<double> centered;
    std::span<const double> y = values;
    if (center) {
        const double mean =
            std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
        centered.resize(values.size());
        std::transform(values.begin(), values.end(), centered.begin(),
                       [mean](double v) { return v - mean; });
        y = centered;
    }
    double numerator = 0.0;
    double denominator = 0.0;
    for (std::size_t i = 1; i < y.size(); ++i) {
        numerator += y[i] * y[i - 1];
        denominator += y[i - 1] * y[i - 1];
    }
    if (denominator <= 0.0) {
        throw degenerate_error("lag-1 predictor has zero variance");
    }
    return numerator / denominator;
}

std::vector<double> prewhiten(std::span<const double> values, double phi) {
    if (values.size() < 2) throw parameter_error("prewhitening needs at least 2 observations");
    std::vector<double> out(values.size() - 1);
    for (std::size_t i = 1; i < values.size(); ++i) out[i - 1] = values[i] - phi * values[i - 1];
    return out;
}

std::vector<double> first_differences(std::span<const double> values) {
    if (values.size() < 2) throw parameter_error("differences need at least 2 observations");
    std::vector<double> out(values.size() - 1);
    for (std::size_t i = 1; i < values.size(); ++i) out[i - 1] = values[i] - values[i - 1];
    return out;
}

TimeSeries monthly_anomalies(const TimeSeries& series) {
    series.validate();
    const int period = series.period > 0 ? series.period : (series.monthly_labels() ? 12 : 0);
    if (period < 2) throw parameter_error("monthly anomalies need a series with a period");
    const int n = static_cast<int>(series.values.size());
    if (n < 2 * period) throw parameter_error("monthly anomalies need at least two complete cycles");

    const bool by_label = series.monthly_labels() && period == 12;
    auto bucket_of = [&](int i) {
        return by_label ? series.labels[static_cast<std::size_t>(i)].month - 1 : i % period;
    };

    std::vector<double> sums(static_cast<std::size_t>(period), 0.0);
    std::vector<int> counts(static_cast<std::size_t>(period), 0);
    for (int i = 0; i < n; ++i) {
        sums[static_cast<std::size_t>(bucket_of(i))] += series.values[static_cast<std::size_t>(i)];
        counts[static_cast<std::size_t>(bucket_of(i))] += 1;
    }
    std::vector<double> means(static_cast<std::size_t>(period), 0.0);
    for (int m = 0; m < period; ++m) {
        if (counts[static_cast<std::size_t>(m)] < 2) {
            throw parameter_error("month " + std::to_string(m + 1) +
                                  " has fewer than two observations");
        }
        means[static_cast<std::size_t>(m)] =
            sums[static_cast<std::size_t>(m)] / counts[static_cast<std::size_t>(m)];
    }
    std::vector<double> scatter(static_cast<std::size_t>(period), 0.0);
    for (int i = 0; i < n; ++i) {
        const int m = bucket_of(i);
        const double d = series.values[static_cast<std::size_t>(i)] - means[static_cast<std::size_t>(m)];
        scatter[static_cast<std::size_t>(m)] += d * d;
    }
    std::vector<double> sds(static_cast<std::size_t>(period), 0.0);
    for (int m = 0; m < period; ++m) {
        const double variance =
            scatter[static_cast<std::size_t>(m)] / (counts[static_cast<std::size_t>(m)] - 1);
        if (!(variance > 0.0)) {
            throw degenerate_error("month " + std::to_string(m + 1) + " has zero variance");
        }
        sds[static_cast<std::size_t>(m)] = std::sqrt(variance);
    }

    TimeSeries out = series;
    for (int i = 0; i < n; ++i) {
        const int m = bucket_of(i);
        out.values[static_cast<std::size_t>(i)] =
            (series.values[static_cast<std::size_t>(i)] - means[static_cast<std::size_t>(m)]) /
            sds[static_cast<std::size_t>(m)];
    }
    return out;
}

void StepwiseMean::validate(int series_length) const {
    if (means.size() != change_points.size() + 1) {
        throw parameter_error("stepwise mean needs one mean per segment");
    }
    int previous = 1;
    for (int c : change_points) {
        if (c <= previous || c > series_length) {
            throw parameter_error("stepwise change points must be strictly increasing in (1, n]");
        }
        previous = c;
    }
}

namespace {

std::vector<double> subtract_segment_means(std::span<const double> values,
                                           std::span<const int> change_points,
                                           const std::vector<double>* supplied) {
    const int n = static_cast<int>(values.size());
    if (n == 0) throw parameter_error("empty series");
    int previous = 1;
    for (int c : change_points) {
        if (c <= previous || c > n) {
            throw parameter_error("change points must be strictly increasing in (1, n]");
        }
        previous = c;
    }
    std::vector<double> out(values.begin(), values.end());
    std::size_t segment = 0;
    int begin = 1;
    auto finish_segment = [&](int end) {  // inclusive 1-based bounds
        double mean = 0.0;
        if (supplied) {
            mean = (*supplied)[segment];
        } else {
            for (int i = begin; i <= end; ++i) mean += values[static_cast<std::size_t>(i - 1)];
            mean /= (end - begin + 1);
        }
        for (int i = begin; i <= end; ++i) out[static_cast<std::size_t>(i - 1)] -= mean;
        ++segment;
    };
    for (int c : change_points) {
        finish_segment(c - 1);
        begin = c;
    }
    finish_segment(n);
    return out;
}

}  // namespace

std::vector<double> remove_stepwise_mean(std::span<const double> values,
                                         std::span<const int> change_points) {
    return subtract_segment_means(values, change_points, nullptr);
}

std::vector<double> remove_stepwise_mean(std::span<const double> values,
                                         const StepwiseMean& stepwise) {
    stepwise.validate(static_cast<int>(values.size()));
    return subtract_segment_means(values, stepwise.change_points, &stepwise.means);
}

std::vector<double> running_std(std::span<const double> values, int window) {
    const int n = static_cast<int>(values.size());
    if (window % 2 == 0) throw parameter_error("window must be odd");
    if (window < 3 || window > n) throw parameter_error("window must lie in [3, n]");
    std::vector<double> out(static_cast<std::size_t>(n), kNaN);
    const int half = (window - 1) / 2;
    for (int center = half; center < n - half; ++center) {
        double mean = 0.0;
        for (int j = center - half; j <= center + half; ++j) {
            mean += values[static_cast<std::size_t>(j)];
        }
        mean /= window;
        double scatter = 0.0;
        for (int j = center - half; j <= center + half; ++j) {
            const double d = values[static_cast<std::size_t>(j)] - mean;
            scatter += d * d;
        }
        out[static_cast<std::size_t>(center)] = std::sqrt(scatter / (window - 1));
    }
    return out;
}

}  // namespace varshift::preprocess
