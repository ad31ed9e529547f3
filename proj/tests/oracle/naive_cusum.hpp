#pragma once

#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace varshift::oracle {

struct CusumTable {
    std::vector<double> deviations;  // D for local k = 1..len
    double statistic = 0.0;          // sqrt(len / 2) * max |D|
    int k_star = 0;                  // global index (1-based), smallest argmax
};

/// Brute-force cusum-of-squares table for series[i1..i2] (1-based inclusive):
/// every D_k is recomputed from its own full prefix sum.
CusumTable cusum_table(std::span<const double> series, int i1, int i2);

using rational = boost::multiprecision::cpp_rational;

/// Exact-arithmetic deviations for an integer-valued series.
std::vector<rational> rational_cusum(std::span<const long long> series);

}  // namespace varshift::oracle
