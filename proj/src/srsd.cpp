#include "varshift/srsd.hpp"

#include <cmath>
#include <utility>

#include "varshift/errors.hpp"

namespace varshift::srsd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double about_zero_variance(std::span<const double> values) {
    if (values.size() < 2) return kNaN;
    double sum = 0.0;
    for (double v : values) sum += v * v;
    return sum / static_cast<double>(values.size() - 1);
}

}  // namespace

void DetectorConfig::validate() const {
    if (!(target_probability > 0.0 && target_probability < 1.0)) {
        throw parameter_error("target probability must lie in (0, 1)");
    }
    if (cutoff_length < 4) {
        throw parameter_error("cut-off length must be at least 4");
    }
    if (!(huber_constant > 0.0)) {
        throw parameter_error("Huber constant must be positive");
    }
}

CriticalBand critical_variances(double regime_variance, double f_critical) {
    if (!(regime_variance > 0.0)) throw parameter_error("regime variance must be positive");
    if (!(f_critical > 0.0)) throw parameter_error("critical F value must be positive");
    return {regime_variance / f_critical, regime_variance * f_critical};
}

namespace detail {

Engine::Engine(int cutoff_length, double huber_constant, double f_critical)
    : cutoff_(cutoff_length), huber_(huber_constant), f_critical_(f_critical) {}

void Engine::seed_regime(int start_index, std::span<const double> values) {
    auto robust = stats::two_pass_robust_variance(values, huber_);
    if (!(robust.variance > 0.0)) {
        throw degenerate_error("initial regime variance is zero; rescale or clean the input");
    }
    regime_.start = start_index;
    regime_.length = static_cast<int>(values.size());
    regime_.values.assign(values.begin(), values.end());
    regime_.weights = std::move(robust.weights);
    regime_.weight_mass = 0.0;
    for (double w : regime_.weights) regime_.weight_mass += w * w;
    regime_.variance = robust.variance;
    next_index_ = start_index + regime_.length;
    initialized_ = true;
}

void Engine::seed_regime_raw(int start_index, int length, double variance, double weight_mass) {
    regime_ = RegimeBuffer{};
    regime_.start = start_index;
    regime_.length = length;
    regime_.weight_mass = weight_mass;
    regime_.variance = variance;
    next_index_ = start_index + length;
    initialized_ = true;
}

CriticalBand Engine::band() const {
    if (!(regime_.variance > 0.0)) return {0.0, 0.0};
    return critical_variances(regime_.variance, f_critical_);
}

Event Engine::step(double x) {
    if (!initialized_) throw state_error("detector is not initialized");
    next_index_ += 1;
    return process_point(next_index_ - 1, x);
}

Event Engine::process_point(int index, double x) {
    if (pending_) {
        append_to_pending(x);
        if (!pending_sign_holds()) {
            dissolve_pending();
            return Event::pending_dissolved;
        }
        if (static_cast<int>(pending_->values.size()) == cutoff_) {
            confirm_pending();
            return Event::shift_confirmed;
        }
        return Event::none;
    }

    const CriticalBand limits = band();
    const double x2 = x * x;
    if (x2 >= limits.lower && x2 <= limits.upper) {
        accept(x);
        return Event::none;
    }

    PendingBuffer opened;
    opened.start = index;
    opened.direction = x2 > limits.upper ? Direction::up : Direction::down;
    opened.critical_variance = opened.direction == Direction::up ? limits.upper : limits.lower;
    pending_ = std::move(opened);
    append_to_pending(x);
    if (!pending_sign_holds()) {
        dissolve_pending();
        return Event::pending_dissolved;
    }
    if (static_cast<int>(pending_->values.size()) == cutoff_) {
        confirm_pending();
        return Event::shift_confirmed;
    }
    return Event::pending_opened;
}

void Engine::accept(double x) {
    const double scale = std::sqrt(std::max(regime_.variance, 0.0));
    const double w = stats::huber_weight(x, scale, huber_);
    const double w2 = w * w;
    if (regime_.weight_mass + w2 > 0.0) {
        regime_.variance =
            (regime_.weight_mass * regime_.variance + w2 * x * x) / (regime_.weight_mass + w2);
    }
    regime_.weight_mass += w2;
    regime_.length += 1;
    regime_.values.push_back(x);
    regime_.weights.push_back(w);
}

void Engine::append_to_pending(double x) {
    // Test-window weights widen the scale for upward shifts (s_j + s_cr); the
    // matching difference for downward shifts can collapse to zero, so those
    // windows use the regime scale alone.
    const double regime_sd = std::sqrt(std::max(regime_.variance, 0.0));
    const double scale = pending_->direction == Direction::up
                             ? regime_sd + std::sqrt(pending_->critical_variance)
                             : regime_sd;
    const double w = stats::huber_weight(x, scale, huber_);
    pending_->values.push_back(x);
    pending_->weights.push_back(w);
    pending_->cumulative += w * w * x * x - pending_->critical_variance;
    pending_->rssi_history.push_back(pending_->cumulative / static_cast<double>(cutoff_));
}

bool Engine::pending_sign_holds() const {
    const double rssi = pending_->rssi_history.back();
    return pending_->direction == Direction::up ? rssi > 0.0 : rssi < 0.0;
}

void Engine::dissolve_pending() {
    // The rejected candidate joins the regime; the remaining window points are
    // re-processed in arrival order and may open the next candidate at once.
    const std::vector<double> window = std::move(pending_->values);
    const int start = pending_->start;
    pending_.reset();
    accept(window.front());
    for (std::size_t k = 1; k < window.size(); ++k) {
        process_point(start + static_cast<int>(k), window[k]);
    }
}

void Engine::confirm_pending() {
    const int start = pending_->start;
    const Direction direction = pending_->direction;
    std::vector<double> window = std::move(pending_->values);
    pending_.reset();

    close_regime(start - 1);
    confirmed_.push_back(ChangePoint{start, direction, kNaN});

    auto robust = stats::two_pass_robust_variance(window, huber_);
    regime_ = RegimeBuffer{};
    regime_.start = start;
    regime_.length = static_cast<int>(window.size());
    regime_.weight_mass = 0.0;
    for (double w : robust.weights) regime_.weight_mass += w * w;
    regime_.variance = robust.variance;
    regime_.values = std::move(window);
    regime_.weights = std::move(robust.weights);
}

void Engine::close_regime(int end_index) {
    Regime closed;
    closed.start = regime_.start;
    closed.end = end_index;
    closed.weighted_variance = regime_.variance;
    closed.variance = static_cast<int>(regime_.values.size()) == regime_.length
                          ? about_zero_variance(regime_.values)
                          : kNaN;
    closed_.push_back(closed);
}

DetectionResult Engine::snapshot() const {
    DetectionResult result;
    result.regimes = closed_;

    Regime live;
    live.start = regime_.start;
    live.end = pending_ ? pending_->start - 1 : next_index_ - 1;
    live.weighted_variance = regime_.variance;
    live.variance = static_cast<int>(regime_.values.size()) == regime_.length
                        ? about_zero_variance(regime_.values)
                        : kNaN;
    result.regimes.push_back(live);

    result.change_points = confirmed_;
    for (std::size_t k = 0; k < result.change_points.size(); ++k) {
        const Regime& before = result.regimes[k];
        const Regime& after = result.regimes[k + 1];
        const int df_before = before.end - before.start;
        const int df_after = after.end - after.start;
        if (before.variance > 0.0 && after.variance > 0.0 && df_before >= 1 && df_after >= 1) {
            result.change_points[k].observed_p =
                stats::f_two_tailed_pvalue(after.variance / before.variance, df_after, df_before);
        }
    }

    if (pending_) {
        PendingShift view;
        view.candidate_index = pending_->start;
        view.direction = pending_->direction;
        view.points_seen = static_cast<int>(pending_->values.size());
        view.rssi = pending_->rssi_history.back();
        view.rssi_history = pending_->rssi_history;
        const Regime& before = result.regimes.back();
        const double window_variance = about_zero_variance(pending_->values);
        const int df_before = before.end - before.start;
        const int df_window = view.points_seen - 1;
        if (before.variance > 0.0 && window_variance > 0.0 && df_before >= 1 && df_window >= 1) {
            view.observed_p = stats::f_two_tailed_pvalue(window_variance / before.variance,
                                                         df_window, df_before);
        }
        result.trailing_pending = std::move(view);
    }
    return result;
}

}  // namespace detail

Detector::Detector(const DetectorConfig& config)
    : config_(config),
      f_critical_((config.validate(),
                   stats::f_quantile(config.target_probability / 2.0, config.cutoff_length - 1,
                                     config.cutoff_length - 1))),
      engine_(config.cutoff_length, config.huber_constant, f_critical_) {}

void Detector::initialize(std::span<const double> prefix) {
    if (static_cast<int>(prefix.size()) < config_.cutoff_length) {
        throw parameter_error("initialization needs at least cut-off length observations");
    }
    engine_.seed_regime(1, prefix.first(static_cast<std::size_t>(config_.cutoff_length)));
}

Event Detector::step(double x) { return engine_.step(x); }

DetectionResult detect(std::span<const double> series, const DetectorConfig& config) {
    config.validate();
    if (static_cast<int>(series.size()) < config.cutoff_length + 1) {
        throw parameter_error("series must be longer than the cut-off length");
    }
    Detector detector(config);
    detector.initialize(series);
    for (std::size_t i = static_cast<std::size_t>(config.cutoff_length); i < series.size(); ++i) {
        detector.step(series[i]);
    }
    return detector.result();
}

}  // namespace varshift::srsd
