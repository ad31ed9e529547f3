#include "oracle/naive_cusum.hpp"

#include <cmath>
#include <stdexcept>

namespace varshift::oracle {

CusumTable cusum_table(std::span<const double> series, int i1, int i2) {
    if (i1 < 1 || i2 > static_cast<int>(series.size()) || i2 - i1 + 1 < 2) {
        throw std::invalid_argument("oracle: bad segment");
    }
    const int len = i2 - i1 + 1;
    double total = 0.0;
    for (int i = i1; i <= i2; ++i) total += series[i - 1] * series[i - 1];

    CusumTable table;
    table.deviations.resize(len);
    for (int k = 1; k <= len; ++k) {
        double prefix = 0.0;
        for (int i = i1; i < i1 + k; ++i) prefix += series[i - 1] * series[i - 1];
        table.deviations[k - 1] = prefix / total - static_cast<double>(k) / len;
    }
    int best = 0;
    for (int k = 1; k < len; ++k) {
        if (std::fabs(table.deviations[k]) > std::fabs(table.deviations[best])) best = k;
    }
    table.k_star = i1 + best;
    table.statistic = std::sqrt(len / 2.0) * std::fabs(table.deviations[best]);
    return table;
}

std::vector<rational> rational_cusum(std::span<const long long> series) {
    const auto n = static_cast<long long>(series.size());
    rational total = 0;
    for (long long x : series) total += rational(x) * x;
    std::vector<rational> deviations;
    deviations.reserve(series.size());
    rational prefix = 0;
    for (long long k = 1; k <= n; ++k) {
        prefix += rational(series[k - 1]) * series[k - 1];
        deviations.push_back(prefix / total - rational(k, n));
    }
    return deviations;
}

}  // namespace varshift::oracle
