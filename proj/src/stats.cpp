#include "varshift/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "varshift/errors.hpp"

namespace varshift::stats {

namespace {

// Lentz's continued fraction for the regularized incomplete beta.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIterations = 300;
    constexpr double kEpsilon = 1e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const int m2 = 2 * m;
        double coeff = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + coeff * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + coeff / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        coeff = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + coeff * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + coeff / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEpsilon) return h;
    }
    throw numerical_error("incomplete beta continued fraction failed to converge");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw parameter_error("incomplete beta requires a > 0 and b > 0");
    }
    if (!(x >= 0.0 && x <= 1.0)) {
        throw parameter_error("incomplete beta requires x in [0, 1]");
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front = a * std::log(x) + b * std::log1p(-x) -
                             (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_tail_probability(double f, int df1, int df2) {
    if (!(f > 0.0)) throw parameter_error("F statistic must be positive");
    if (df1 < 1 || df2 < 1) throw parameter_error("degrees of freedom must be positive");
    const double d1 = df1;
    const double d2 = df2;
    return regularized_incomplete_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

double f_quantile(double upper_tail, int df1, int df2) {
    if (!(upper_tail > 0.0 && upper_tail < 1.0)) {
        throw parameter_error("tail probability must lie in (0, 1)");
    }
    if (df1 < 1 || df2 < 1) throw parameter_error("degrees of freedom must be positive");

    constexpr int kMaxIterations = 200;
    int used = 0;

    // Bracket the root; the tail is strictly decreasing in f.
    double lo = 1.0;
    double hi = 1.0;
    while (f_tail_probability(hi, df1, df2) > upper_tail) {
        hi *= 2.0;
        if (++used > kMaxIterations) break;
    }
    while (f_tail_probability(lo, df1, df2) < upper_tail) {
        lo *= 0.5;
        if (++used > kMaxIterations) break;
    }

    double mid = 0.5 * (lo + hi);
    for (; used < kMaxIterations; ++used) {
        mid = 0.5 * (lo + hi);
        if (f_tail_probability(mid, df1, df2) > upper_tail) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-15 * mid) break;
    }
    mid = 0.5 * (lo + hi);

    const double achieved = f_tail_probability(mid, df1, df2);
    if (std::fabs(achieved - upper_tail) > 1e-8) {
        std::ostringstream msg;
        msg << "F quantile inversion did not converge: tail=" << upper_tail << " df1=" << df1
            << " df2=" << df2 << " best=" << mid << " residual=" << achieved - upper_tail;
        throw numerical_error(msg.str());
    }
    return mid;
}

double f_two_tailed_pvalue(double f, int df1, int df2) {
    const double tail = f_tail_probability(f, df1, df2);
    return std::clamp(2.0 * std::min(tail, 1.0 - tail), 0.0, 1.0);
}

double mad_about_zero(std::span<const double> values) {
    if (values.empty()) throw parameter_error("MAD of an empty sequence");
    std::vector<double> magnitudes(values.size());
    std::transform(values.begin(), values.end(), magnitudes.begin(),
                   [](double v) { return std::fabs(v); });
    std::sort(magnitudes.begin(), magnitudes.end());
    const std::size_t n = magnitudes.size();
    if (n % 2 == 1) return magnitudes[n / 2];
    return 0.5 * (magnitudes[n / 2 - 1] + magnitudes[n / 2]);
}

double huber_weight(double value, double scale, double tuning) {
    if (!(tuning > 0.0)) throw parameter_error("Huber tuning constant must be positive");
    if (scale < 0.0) throw parameter_error("Huber scale must be nonnegative");
    if (value == 0.0) return 1.0;
    if (scale == 0.0) return 0.0;
    return std::min(1.0, tuning * scale / std::fabs(value));
}

double weighted_variance(std::span<const double> values, std::span<const double> weights) {
    if (values.size() != weights.size()) {
        throw parameter_error("weighted variance needs matching value/weight lengths");
    }
    if (values.empty()) throw parameter_error("weighted variance of an empty sample");
    double numerator = 0.0;
    double v1 = 0.0;
    double v2 = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double w = weights[i];
        if (!(w >= 0.0 && w <= 1.0)) throw parameter_error("weights must lie in [0, 1]");
        const double w2 = w * w;
        numerator += w2 * values[i] * values[i];
        v1 += w2;
        v2 += w2 * w2;
    }
    if (v1 <= 0.0) throw degenerate_error("weighted variance: all weights are zero");
    const double denominator = v1 - v2 / v1;
    if (denominator <= 0.0) {
        throw degenerate_error("weighted variance: degenerate sample (effective size <= 1)");
    }
    return numerator / denominator;
}

double weighted_variance(const WeightedSample& sample) {
    return weighted_variance(sample.values, sample.weights);
}

RobustVariance two_pass_robust_variance(std::span<const double> values, double tuning) {
    if (values.size() < 2) throw parameter_error("robust variance needs at least two values");
    if (!(tuning > 0.0)) throw parameter_error("Huber tuning constant must be positive");

    const double mad = mad_about_zero(values);
    std::vector<double> weights(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        weights[i] = huber_weight(values[i], mad, tuning);
    }
    const double first_pass = weighted_variance(values, weights);

    const double scale = std::sqrt(first_pass);
    for (std::size_t i = 0; i < values.size(); ++i) {
        weights[i] = huber_weight(values[i], scale, tuning);
    }
    RobustVariance result;
    result.variance = weighted_variance(values, weights);
    result.weights = std::move(weights);
    return result;
}

}  // namespace varshift::stats
