#pragma once

#include <span>
#include <vector>

#include "varshift/time_series.hpp"

namespace varshift::preprocess {

struct LowessFit {
    std::vector<double> trend;
    std::vector<double> residuals;
};

/// Locally weighted degree-1 regression smoother: per-point fit over the
/// nearest ceil(fraction * n) neighbours with tricube weights, optionally
/// re-weighted by bisquare robustness iterations (0..5, default 0).
/// Residuals of an exactly linear input are zero.
LowessFit lowess_detrend(std::span<const double> values, double fraction,
                         int robustness_iterations = 0);

/// Lag-1 OLS regression slope of x_i on x_{i-1} without intercept. The series
/// is mean-centered first unless center is false (the raw slope is exact for
/// noiseless geometric series).
double ar1_coefficient(std::span<const double> values, bool center = true);

/// e_i = x_i - phi * x_{i-1}; drops the first observation.
std::vector<double> prewhiten(std::span<const double> values, double phi);

/// d_i = x_{i+1} - x_i; drops the first observation.
std::vector<double> first_differences(std::span<const double> values);

/// Per-calendar-month standardization: subtract the month's full-period mean
/// and divide by its sample standard deviation (n-1 divisor). Buckets come
/// from monthly labels when present, else from position modulo the period.
/// A month with zero variance raises degenerate_error naming the month.
TimeSeries monthly_anomalies(const TimeSeries& series);

struct StepwiseMean {
    std::vector<int> change_points;  // first index of each new segment, 1-based
    std::vector<double> means;       // one per segment (change points + 1)

    void validate(int series_length) const;
};

/// Subtracts per-segment means; segments are delimited by the change points
/// (first-point convention). The overload without supplied means estimates
/// each segment mean from the data, so per-segment residual means are zero.
std::vector<double> remove_stepwise_mean(std::span<const double> values,
                                         std::span<const int> change_points);
std::vector<double> remove_stepwise_mean(std::span<const double> values,
                                         const StepwiseMean& stepwise);

/// Centered-window sample standard deviation (n-1 divisor). The first and
/// last (window-1)/2 positions are NaN.
std::vector<double> running_std(std::span<const double> values, int window);

}  // namespace varshift::preprocess
