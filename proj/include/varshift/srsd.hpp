#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "varshift/stats.hpp"

namespace varshift::srsd {

enum class Direction { up, down };

/// Outcome of feeding one observation to the detector.
enum class Event { none, pending_opened, pending_dissolved, shift_confirmed };

struct DetectorConfig {
    double target_probability = 0.1;  // two-tailed significance of the variance F-test
    int cutoff_length = 30;           // confirmation window length; F-test df are cutoff - 1
    double huber_constant = 2.0;      // outlier down-weighting constant

    void validate() const;
};

struct CriticalBand {
    double lower = 0.0;  // regime variance / F_critical
    double upper = 0.0;  // regime variance * F_critical
};

/// Critical variances bracketing a regime variance for the two-tailed F-test.
CriticalBand critical_variances(double regime_variance, double f_critical);

struct ChangePoint {
    int index = 0;  // first observation of the new regime, 1-based
    Direction direction = Direction::up;
    // Two-tailed F p-value against the preceding regime, computed from the
    // final regime extents; NaN while streaming.
    double observed_p = std::numeric_limits<double>::quiet_NaN();
};

struct Regime {
    int start = 0;  // 1-based, inclusive
    int end = 0;
    double weighted_variance = 0.0;  // Huber-weighted estimate the detector ran with
    double variance = 0.0;           // plain about-zero variance sum(x^2)/(len-1)
};

/// An unresolved candidate shift plus the running evidence for it.
struct PendingShift {
    int candidate_index = 0;
    Direction direction = Direction::up;
    double rssi = 0.0;  // current residual-sum-of-squares index
    int points_seen = 0;
    std::vector<double> rssi_history;  // one partial value per window point
    double observed_p = std::numeric_limits<double>::quiet_NaN();
};

struct DetectionResult {
    std::vector<Regime> regimes;
    std::vector<ChangePoint> change_points;
    // Candidate still under test when the series ended; never a confirmed point.
    std::optional<PendingShift> trailing_pending;
};

namespace detail {

/// The streaming state machine behind Detector. Parameters are taken at face
/// value; Detector applies the public validation. Tests drive it directly to
/// pin band, window length and weight mass by hand.
class Engine {
public:
    Engine(int cutoff_length, double huber_constant, double f_critical);

    /// Seed the first regime from its opening observations (two-pass robust fit).
    void seed_regime(int start_index, std::span<const double> values);

    /// Seed with an explicit state; regime observations are not retained, so
    /// snapshots report NaN for that regime's unweighted variance.
    void seed_regime_raw(int start_index, int length, double variance, double weight_mass);

    Event step(double x);

    bool initialized() const { return initialized_; }
    int last_index() const { return next_index_ - 1; }
    double regime_variance() const { return regime_.variance; }
    CriticalBand band() const;
    bool has_pending() const { return pending_.has_value(); }
    std::span<const ChangePoint> confirmed() const { return confirmed_; }

    DetectionResult snapshot() const;

private:
    struct RegimeBuffer {
        int start = 0;
        int length = 0;
        std::vector<double> values;   // may be shorter than length when raw-seeded
        std::vector<double> weights;  // aligned with values
        double weight_mass = 0.0;     // running sum of squared weights
        double variance = 0.0;        // weighted regime variance
    };

    struct PendingBuffer {
        int start = 0;
        Direction direction = Direction::up;
        double critical_variance = 0.0;  // side of the band being tested, fixed at opening
        std::vector<double> values;
        std::vector<double> weights;
        double cumulative = 0.0;  // running sum of w^2 x^2 - critical variance
        std::vector<double> rssi_history;
    };

    Event process_point(int index, double x);
    void accept(double x);
    void append_to_pending(double x);
    bool pending_sign_holds() const;
    void dissolve_pending();
    void confirm_pending();
    void close_regime(int end_index);

    int cutoff_;
    double huber_;
    double f_critical_;
    bool initialized_ = false;
    int next_index_ = 1;
    RegimeBuffer regime_;
    std::optional<PendingBuffer> pending_;
    std::vector<Regime> closed_;
    std::vector<ChangePoint> confirmed_;
};

}  // namespace detail

/// Sequential variance regime shift detector.
///
/// Observations arrive one at a time; each squared value is tested against the
/// F-distribution band around the current regime variance. A value outside the
/// band opens a pending shift that the window of the next cutoff-length
/// observations either confirms (the residual index keeps its sign) or
/// dissolves (the sign flips). On dissolution the rejected candidate joins the
/// regime with a Huber weight and the rest of the window is re-processed as if
/// it were arriving afresh, so a later window point can immediately open the
/// next candidate. A single instance owns one ordered stream; independent
/// instances may run in parallel.
class Detector {
public:
    explicit Detector(const DetectorConfig& config);

    /// Seed the first regime from the first cutoff_length observations of the
    /// series (extra elements are ignored).
    void initialize(std::span<const double> prefix);

    /// Feed one observation; usable beyond the history period for monitoring.
    Event step(double x);

    bool initialized() const { return engine_.initialized(); }
    const DetectorConfig& config() const { return config_; }
    double f_critical() const { return f_critical_; }

    /// Current result: regimes, confirmed change points with observed
    /// p-values, and the trailing pending shift if one is open.
    DetectionResult result() const { return engine_.snapshot(); }

private:
    DetectorConfig config_;
    double f_critical_;
    detail::Engine engine_;
};

/// Run the detector over a complete series: initialize on the first
/// cutoff_length observations, then fold step over the rest.
DetectionResult detect(std::span<const double> series, const DetectorConfig& config);

}  // namespace varshift::srsd
