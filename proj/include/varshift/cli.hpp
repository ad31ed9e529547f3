#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "varshift/srsd.hpp"
#include "varshift/time_series.hpp"

namespace varshift::cli {

inline constexpr const char* tool_version = "0.1.0";

/// Applies one preprocessing step given as "name[:arg[:arg]]":
///   lowess:<fraction>[:<robustness-iterations>]
///   prewhiten:<phi>|auto
///   diff
///   anomalies[:<period>]
///   stepmean:<i1>[+<i2>...]
/// When resolved is non-null it receives a description with every parameter
/// pinned (e.g. the estimated phi for prewhiten:auto).
TimeSeries apply_step(const TimeSeries& series, const std::string& step,
                      std::string* resolved = nullptr);

struct DetectConfig {
    std::string input_path;
    std::string output_path;
    std::string method = "both";  // srsd | icss | both
    srsd::DetectorConfig srsd;
    double icss_alpha = 0.05;
    std::vector<std::string> steps;          // applied in order before detection
    std::string critical_values_path;        // overrides the env var and builtin
};

struct SimulateConfig {
    std::string config_path;   // scenario file; empty when running the suite
    std::string output_dir;
    bool reference_suite = false;
    int workers = 1;
    std::optional<int> replications_override;
    std::optional<std::uint64_t> seed_override;
};

struct CritvalsConfig {
    std::vector<int> lengths;     // empty = default grid
    std::vector<double> alphas;   // empty = default levels
    int replications = 0;         // 0 = default
    std::optional<std::uint64_t> seed;
    std::string output_path;
    std::string cpp_output_path;  // optional generated source for the builtin table
    int workers = 1;
};

struct PreprocessConfig {
    std::string input_path;
    std::string output_path;
    std::vector<std::string> steps;
};

/// Each command returns 0 on success and 1 on error; diagnostics go to the
/// given stream. Output files are written whole on success; on failure any
/// partial report lands at "<output>.quarantine" and the target is untouched.
int run_detect(const DetectConfig& config, std::ostream& diagnostics);
int run_simulate(const SimulateConfig& config, std::ostream& diagnostics);
int run_critvals(const CritvalsConfig& config, std::ostream& diagnostics);
int run_preprocess(const PreprocessConfig& config, std::ostream& diagnostics);

}  // namespace varshift::cli
