#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "varshift/srsd.hpp"

namespace varshift::mc {

/// One simulated process: piecewise-constant variance regimes over
/// independent zero-mean Gaussian draws, optionally with a single injected
/// outlier that replaces the sampled value at its index.
struct ScenarioSpec {
    std::string name = "scenario";
    int length = 100;
    std::vector<double> regime_variances;  // one per regime
    std::vector<int> change_points;        // first point of each regime after the
                                           // first, 1-based, strictly increasing
    std::optional<int> outlier_index;      // 1-based
    double outlier_value = 6.0;
    int replications = 10000;
    std::uint64_t seed = 1;
    srsd::DetectorConfig srsd;
    double icss_alpha = 0.05;
    bool run_srsd = true;
    bool run_icss = true;

    void validate() const;
    double variance_at(int index) const;  // 1-based
};

/// The series of one replicate. Streams are keyed by (seed, replicate_index),
/// so any subset of replicates can be generated in any order.
std::vector<double> generate_replicate(const ScenarioSpec& spec, int replicate_index);

/// Aggregated outcomes of one detector over the replicates. All counters are
/// integers so aggregation is independent of worker count and order.
struct DetectorTally {
    std::array<std::int64_t, 4> count_histogram{};  // replicates with 0, 1, 2, >=3 points
    std::vector<std::int64_t> position_histogram;   // detections per index 1..n
    std::vector<std::int64_t> hits;                 // replicates hitting each true point exactly
    std::int64_t late_points = 0;  // detections past the resolvable horizon (audit)
    std::int64_t failures = 0;     // replicates the detector errored on (excluded)
    std::int64_t replicates = 0;   // successfully evaluated replicates

    double count_percent(int bin) const;  // bin 0..3, 3 = ">= 3"
    double hit_percent(std::size_t change_point) const;
};

struct ExperimentReport {
    ScenarioSpec spec;
    int resolvable_horizon = 0;  // n - cutoff + 1: last index a sequential
                                 // detector can confirm before the series ends
    DetectorTally srsd;
    DetectorTally icss;
    std::string rng_algorithm;
};

/// Runs both detectors over every replicate and aggregates. SRSD contributes
/// confirmed change points only (a trailing unresolved candidate counts as
/// nothing); ICSS points are convention-shifted to first-point form.
/// Replicates where a detector throws are counted in failures and excluded
/// from that detector's tallies. Deterministic in (spec, seed) for any worker
/// count.
ExperimentReport run_experiment(const ScenarioSpec& spec, int workers = 1);

void write_report(std::ostream& out, const ExperimentReport& report);
void write_histogram(std::ostream& out, const ExperimentReport& report);

/// Parses `[name]` sections of `key = value` lines into scenario specs.
/// Errors carry the source name, line and section.
std::vector<ScenarioSpec> parse_scenarios(std::istream& in,
                                          const std::string& source = "config");

struct SuiteOptions {
    int replications = 10000;
    std::uint64_t seed = 1;
    int workers = 1;
};

/// The bundled reference scenarios: tuning studies for the target probability
/// and cut-off length, one- and two-change-point regime sequences, outlier
/// stress cases, and the hit-rate sweep over variance ratios.
std::vector<ScenarioSpec> reference_scenarios(const SuiteOptions& options);

/// Runs every reference scenario and writes per-scenario report + histogram
/// files, a combined summary, and the hit-rate sweep table into output_dir.
void run_reference_suite(const std::string& output_dir, const SuiteOptions& options);

}  // namespace varshift::mc
