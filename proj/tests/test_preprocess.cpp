#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "varshift/errors.hpp"
#include "varshift/preprocess.hpp"
#include "varshift/rng.hpp"

using namespace varshift;

namespace {

// Brute-force weighted least squares at one point: tricube weights over the
// same nearest-neighbour window, normal equations solved by Cramer's rule on
// raw (uncentered) sums.
double wls_oracle_at(const std::vector<double>& y, int i, int q) {
    const int n = static_cast<int>(y.size());
    int lo = i;
    int hi = i;
    while (hi - lo + 1 < q) {
        const bool can_left = lo > 0;
        const bool can_right = hi < n - 1;
        if (can_left && can_right) {
            if (i - (lo - 1) <= (hi + 1) - i) {
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
    const double bandwidth = std::max(i - lo, hi - i);
    double s0 = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    double t0 = 0.0;
    double t1 = 0.0;
    for (int j = lo; j <= hi; ++j) {
        const double u = std::fabs(j - i) / bandwidth;
        const double c = u >= 1.0 ? 0.0 : std::pow(1.0 - u * u * u, 3);
        s0 += c;
        s1 += c * j;
        s2 += c * static_cast<double>(j) * j;
        t0 += c * y[static_cast<std::size_t>(j)];
        t1 += c * y[static_cast<std::size_t>(j)] * j;
    }
    const double det = s0 * s2 - s1 * s1;
    if (std::fabs(det) < 1e-9 * std::fabs(s0 * s2)) return t0 / s0;
    const double intercept = (t0 * s2 - t1 * s1) / det;
    const double slope = (s0 * t1 - s1 * t0) / det;
    return intercept + slope * i;
}

}  // namespace

TEST_CASE("lowess reproduces polynomials of degree <= 1 exactly") {
    std::vector<double> linear(60);
    for (int i = 0; i < 60; ++i) linear[static_cast<std::size_t>(i)] = 2.5 + 0.75 * i;
    const auto fit = preprocess::lowess_detrend(linear, 0.2);
    for (double r : fit.residuals) CHECK(std::fabs(r) < 1e-10);

    std::vector<double> constant(40, 3.125);
    const auto flat = preprocess::lowess_detrend(constant, 0.5);
    for (double t : flat.trend) CHECK(t == doctest::Approx(3.125).epsilon(1e-12));
}

TEST_CASE("lowess matches the per-point weighted least squares oracle") {
    const int n = 100;
    std::vector<double> quadratic(n);
    for (int i = 0; i < n; ++i) quadratic[static_cast<std::size_t>(i)] = static_cast<double>(i) * i;
    const auto fit = preprocess::lowess_detrend(quadratic, 0.3);
    const int q = static_cast<int>(std::ceil(0.3 * n));
    for (int i = 0; i < n; ++i) {
        const double expected = quadratic[static_cast<std::size_t>(i)] - wls_oracle_at(quadratic, i, q);
        CHECK(fit.residuals[static_cast<std::size_t>(i)] ==
              doctest::Approx(expected).epsilon(1e-10));
    }

    // And on noisy data.
    std::mt19937 gen(12);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> noisy(n);
    for (int i = 0; i < n; ++i) noisy[static_cast<std::size_t>(i)] = 0.05 * i + normal(gen);
    const auto noisy_fit = preprocess::lowess_detrend(noisy, 0.3);
    for (int i = 0; i < n; ++i) {
        CHECK(noisy_fit.trend[static_cast<std::size_t>(i)] ==
              doctest::Approx(wls_oracle_at(noisy, i, q)).epsilon(1e-10));
    }
}

TEST_CASE("lowess parameter validation") {
    const std::vector<double> few{1, 2, 3};
    CHECK_THROWS_AS(preprocess::lowess_detrend(few, 0.5), parameter_error);
    const std::vector<double> values(50, 1.0);
    CHECK_THROWS_AS(preprocess::lowess_detrend(values, 0.0), parameter_error);
    CHECK_THROWS_AS(preprocess::lowess_detrend(values, 0.02), parameter_error);
    CHECK_THROWS_AS(preprocess::lowess_detrend(values, 0.2, 6), parameter_error);
}

TEST_CASE("ar1 coefficient") {
    SUBCASE("uncentered slope of a geometric series is exact") {
        std::vector<double> geometric(20);
        for (int i = 0; i < 20; ++i) geometric[static_cast<std::size_t>(i)] = std::pow(0.5, i + 1);
        CHECK(preprocess::ar1_coefficient(geometric, false) ==
              doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("alternating series has slope -1") {
        std::vector<double> alternating(24);
        for (int i = 0; i < 24; ++i) alternating[static_cast<std::size_t>(i)] = i % 2 == 0 ? 1.0 : -1.0;
        CHECK(preprocess::ar1_coefficient(alternating) == doctest::Approx(-1.0).epsilon(1e-12));
    }
    SUBCASE("white noise slope is near zero") {
        stats::GaussianStream stream(77, 0.0, 1.0);
        std::vector<double> noise(100000);
        for (auto& v : noise) v = stream.next();
        CHECK(std::fabs(preprocess::ar1_coefficient(noise)) < 0.01);
    }
    SUBCASE("degenerate predictor") {
        const std::vector<double> constant(10, 2.0);
        CHECK_THROWS_AS(preprocess::ar1_coefficient(constant), degenerate_error);
    }
}

TEST_CASE("prewhitening") {
    const std::vector<double> geometric{1.0, 0.5, 0.25, 0.125};
    const auto whitened = preprocess::prewhiten(geometric, 0.5);
    for (double e : whitened) CHECK(e == doctest::Approx(0.0).epsilon(1e-15));

    const std::vector<double> values{1, 2, 3};
    const auto identity = preprocess::prewhiten(values, 0.0);
    CHECK(identity == std::vector<double>{2, 3});
    const auto shifted = preprocess::prewhiten(values, 0.72);
    CHECK(shifted[0] == doctest::Approx(1.28).epsilon(1e-15));
    CHECK(shifted[1] == doctest::Approx(1.56).epsilon(1e-15));
}

TEST_CASE("prewhitening with the estimated coefficient flattens AR(1) noise") {
    for (double phi : {0.3, 0.72, 0.9}) {
        stats::GaussianStream stream(static_cast<std::uint64_t>(phi * 1000), 0.0, 1.0);
        std::vector<double> series(10000);
        double previous = 0.0;
        for (auto& v : series) {
            previous = phi * previous + stream.next();
            v = previous;
        }
        const double estimate = preprocess::ar1_coefficient(series);
        CHECK(estimate == doctest::Approx(phi).epsilon(0.05));
        const auto whitened = preprocess::prewhiten(series, estimate);
        CHECK(std::fabs(preprocess::ar1_coefficient(whitened)) < 0.02);
    }
}

TEST_CASE("first differences") {
    const std::vector<double> squares{1, 4, 9};
    CHECK(preprocess::first_differences(squares) == std::vector<double>{3, 5});
    const std::vector<double> constant(5, 2.0);
    for (double d : preprocess::first_differences(constant)) CHECK(d == 0.0);
    std::vector<double> linear(10);
    for (int i = 0; i < 10; ++i) linear[static_cast<std::size_t>(i)] = 3.0 * i;
    for (double d : preprocess::first_differences(linear)) CHECK(d == doctest::Approx(3.0));
}

TEST_CASE("monthly anomalies") {
    SUBCASE("24-point fixture pins the n-1 convention") {
        TimeSeries series;
        series.period = 12;
        series.values.resize(24, 0.0);
        // month 1 in the two cycles: values 1 and 3
        for (int cycle = 0; cycle < 2; ++cycle) {
            for (int m = 0; m < 12; ++m) {
                series.values[static_cast<std::size_t>(cycle * 12 + m)] =
                    (cycle == 0 ? -1.0 : 1.0) * (m + 1);
            }
        }
        series.values[0] = 1.0;
        series.values[12] = 3.0;
        const auto anomalies = preprocess::monthly_anomalies(series);
        // month-1 deviations {-1, 1} divided by the sample std sqrt(2)
        CHECK(anomalies.values[0] == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-14));
        CHECK(anomalies.values[12] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    }
    SUBCASE("per-month sample mean 0 and variance 1 by construction") {
        stats::GaussianStream stream(5150, 0.0, 1.0);
        TimeSeries series;
        series.period = 12;
        series.values.resize(120);
        for (std::size_t i = 0; i < series.values.size(); ++i) {
            series.values[i] = stream.next() * (1.0 + (i % 12) * 0.3) + 0.2 * (i % 12);
        }
        const auto anomalies = preprocess::monthly_anomalies(series);
        for (int m = 0; m < 12; ++m) {
            double sum = 0.0;
            double sum_sq = 0.0;
            int count = 0;
            for (std::size_t i = static_cast<std::size_t>(m); i < anomalies.values.size(); i += 12) {
                sum += anomalies.values[i];
                ++count;
            }
            const double mean = sum / count;
            for (std::size_t i = static_cast<std::size_t>(m); i < anomalies.values.size(); i += 12) {
                sum_sq += (anomalies.values[i] - mean) * (anomalies.values[i] - mean);
            }
            CHECK(mean == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(sum_sq / (count - 1) == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("a flat month trips the zero-variance guard with its name") {
        TimeSeries series;
        series.period = 12;
        series.values.resize(24);
        for (std::size_t i = 0; i < 24; ++i) series.values[i] = static_cast<double>(i % 7);
        series.values[2] = 5.0;
        series.values[14] = 5.0;  // month 3 sees 5 in both cycles
        try {
            preprocess::monthly_anomalies(series);
            FAIL("expected degenerate_error");
        } catch (const degenerate_error& err) {
            CHECK(std::string(err.what()).find("month 3") != std::string::npos);
        }
    }
    SUBCASE("needs two complete cycles") {
        TimeSeries series;
        series.period = 12;
        series.values.resize(18, 1.0);
        CHECK_THROWS_AS(preprocess::monthly_anomalies(series), parameter_error);
    }
}

TEST_CASE("stepwise mean removal") {
    const std::vector<double> values{1, 1, 5, 5};
    const std::vector<int> change{3};
    const auto residuals = preprocess::remove_stepwise_mean(values, change);
    for (double r : residuals) CHECK(r == doctest::Approx(0.0).epsilon(1e-15));

    // Single segment = plain mean centering.
    const auto centered = preprocess::remove_stepwise_mean(values, std::vector<int>{});
    for (std::size_t i = 0; i < values.size(); ++i) {
        CHECK(centered[i] == doctest::Approx(values[i] - 3.0).epsilon(1e-15));
    }

    // Per-segment residual sums vanish for arbitrary input.
    std::mt19937 gen(44);
    std::normal_distribution<double> normal(1.0, 2.0);
    std::vector<double> random(30);
    for (auto& v : random) v = normal(gen);
    const std::vector<int> cuts{7, 19};
    const auto out = preprocess::remove_stepwise_mean(random, cuts);
    double s1 = 0.0;
    double s2 = 0.0;
    double s3 = 0.0;
    for (int i = 1; i <= 6; ++i) s1 += out[static_cast<std::size_t>(i - 1)];
    for (int i = 7; i <= 18; ++i) s2 += out[static_cast<std::size_t>(i - 1)];
    for (int i = 19; i <= 30; ++i) s3 += out[static_cast<std::size_t>(i - 1)];
    CHECK(s1 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s2 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s3 == doctest::Approx(0.0).epsilon(1e-12));

    // Supplied means are honored.
    preprocess::StepwiseMean stepwise{{3}, {1.0, 5.0}};
    const auto supplied = preprocess::remove_stepwise_mean(values, stepwise);
    for (double r : supplied) CHECK(r == 0.0);

    CHECK_THROWS_AS(preprocess::remove_stepwise_mean(values, std::vector<int>{1}),
                    parameter_error);
    preprocess::StepwiseMean bad{{3}, {1.0}};
    CHECK_THROWS_AS(preprocess::remove_stepwise_mean(values, bad), parameter_error);
}

TEST_CASE("running standard deviation") {
    const std::vector<double> constant(20, 4.0);
    const auto flat = preprocess::running_std(constant, 5);
    for (int i = 0; i < 2; ++i) CHECK(std::isnan(flat[static_cast<std::size_t>(i)]));
    for (int i = 2; i < 18; ++i) CHECK(flat[static_cast<std::size_t>(i)] == 0.0);
    for (int i = 18; i < 20; ++i) CHECK(std::isnan(flat[static_cast<std::size_t>(i)]));

    // Window = n gives one defined value: the full-series sample std.
    std::vector<double> data{1, 2, 3, 4, 5, 6, 7};
    const auto single = preprocess::running_std(data, 7);
    double mean = 4.0;
    double scatter = 0.0;
    for (double v : data) scatter += (v - mean) * (v - mean);
    CHECK(single[3] == doctest::Approx(std::sqrt(scatter / 6.0)).epsilon(1e-14));

    // Alternating +-1 windows of 13: mean +-1/13, direct formula oracle.
    std::vector<double> alternating(40);
    for (int i = 0; i < 40; ++i) alternating[static_cast<std::size_t>(i)] = i % 2 == 0 ? 1.0 : -1.0;
    const auto rolled = preprocess::running_std(alternating, 13);
    const double expected = std::sqrt((13.0 - 1.0 / 13.0) / 12.0);
    for (int i = 6; i < 34; ++i) {
        CHECK(rolled[static_cast<std::size_t>(i)] == doctest::Approx(expected).epsilon(1e-13));
    }

    CHECK_THROWS_AS(preprocess::running_std(data, 4), parameter_error);
    CHECK_THROWS_AS(preprocess::running_std(data, 9), parameter_error);
}
