#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace varshift::icss {

/// (1 - alpha) quantile of sup |Brownian bridge| (the Kolmogorov
/// distribution), the large-sample limit of the cusum-of-squares max
/// statistic. asymptotic_critical_value(0.05) = 1.358...
double asymptotic_critical_value(double alpha);

/// Empirical (1 - alpha) quantile of the max statistic over `reps`
/// standard-normal series of the given length. Deterministic in the seed; the
/// quantile is the k-th smallest with k = ceil((1 - alpha) * reps).
double simulate_null(int length, double alpha, int reps, std::uint64_t seed, int workers = 1);

struct CriticalValueEntry {
    int length = 0;
    double alpha = 0.0;
    double value = 0.0;
};

/// Simulated finite-sample critical values, keyed by (segment length, alpha).
///
/// Lookups match alpha exactly, interpolate log-linearly in length between
/// grid points, clamp below the smallest simulated length, and fall back to
/// the asymptotic value beyond the largest.
class CriticalValueTable {
public:
    static const std::vector<int>& default_lengths();
    static const std::vector<double>& default_alphas();
    static constexpr int default_replications = 100000;
    static constexpr std::uint64_t default_seed = 12345;

    static CriticalValueTable generate(std::span<const int> lengths,
                                       std::span<const double> alphas, int reps,
                                       std::uint64_t seed, int workers = 1);
    static CriticalValueTable load(std::istream& in, const std::string& source = "table");
    static CriticalValueTable load_file(const std::string& path);

    /// Table shipped with the build (regenerable via the critvals command).
    static const CriticalValueTable& builtin();

    void save(std::ostream& out) const;
    std::string to_text() const;

    double critical_value(int length, double alpha) const;

    std::span<const CriticalValueEntry> entries() const { return entries_; }
    int replications() const { return reps_; }
    std::uint64_t seed() const { return seed_; }

private:
    std::vector<CriticalValueEntry> entries_;  // sorted by (length, alpha)
    int reps_ = 0;
    std::uint64_t seed_ = 0;
};

}  // namespace varshift::icss
