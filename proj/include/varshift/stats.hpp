#pragma once

#include <span>
#include <vector>

namespace varshift::stats {

/// Regularized incomplete beta function I_x(a, b), evaluated by continued
/// fraction with the symmetry split at x = (a + 1) / (a + b + 2).
///
/// Monotone nondecreasing in x with I(a, b, 0) = 0, I(a, b, 1) = 1 and
/// I(a, b, x) = 1 - I(b, a, 1 - x).
double regularized_incomplete_beta(double a, double b, double x);

/// Upper tail P(F > f) of the F distribution with df1 and df2 degrees of
/// freedom. Strictly decreasing in f.
double f_tail_probability(double f, int df1, int df2);

/// Inverse of f_tail_probability in its first argument: the value q with
/// P(F > q) = upper_tail, solved by bracketing bisection. The round trip is
/// accurate to 1e-8 in tail units; failure to reach that raises
/// numerical_error with diagnostics.
double f_quantile(double upper_tail, int df1, int df2);

/// Two-tailed p-value of an observed variance ratio: 2 * min(P(F > f), P(F < f)).
double f_two_tailed_pvalue(double f, int df1, int df2);

/// Median of |values| (deviations about zero, no consistency factor).
/// Even-length medians average the central pair.
double mad_about_zero(std::span<const double> values);

/// Huber-type weight min(1, tuning * scale / |value|).
///
/// A zero value always gets weight 1; a nonzero value with zero scale gets
/// weight 0 (it is infinitely far in scale units).
double huber_weight(double value, double scale, double tuning);

struct WeightedSample {
    std::vector<double> values;
    std::vector<double> weights;  // elementwise in [0, 1], same length as values
};

/// Weighted about-zero variance  sum(w_i^2 x_i^2) / (V1 - V2 / V1)  with
/// V1 = sum(w_i^2), V2 = sum(w_i^4). With unit weights this is exactly
/// sum(x^2) / (n - 1). A nonpositive denominator (e.g. a single point)
/// raises degenerate_error.
double weighted_variance(std::span<const double> values, std::span<const double> weights);
double weighted_variance(const WeightedSample& sample);

struct RobustVariance {
    double variance = 0.0;
    std::vector<double> weights;  // final-pass weights, aligned with the input
};

/// Two-pass Huber-weighted variance: pass one scales weights by the MAD about
/// zero, pass two rescales by the pass-one weighted standard deviation and
/// recomputes the variance.
RobustVariance two_pass_robust_variance(std::span<const double> values, double tuning);

}  // namespace varshift::stats
