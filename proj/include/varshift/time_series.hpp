#pragma once

#include <string>
#include <vector>

namespace varshift {

/// Calendar label of one observation: a year, optionally with a month.
struct TimeLabel {
    int year = 0;
    int month = 0;  // 0 = annual label, 1..12 = monthly

    static TimeLabel parse(const std::string& text);
    std::string to_string() const;

    friend auto operator<=>(const TimeLabel&, const TimeLabel&) = default;
};

/// Ordered real-valued observations with optional time labels.
struct TimeSeries {
    std::vector<double> values;
    std::vector<TimeLabel> labels;  // empty, or one per value
    int period = 0;                 // observations per cycle (12 = monthly), 0 = none

    bool has_labels() const { return !labels.empty(); }
    bool monthly_labels() const { return has_labels() && labels.front().month > 0; }

    /// Checks label/value alignment, strict label ordering and a consistent
    /// annual-or-monthly labelling scheme.
    void validate() const;
};

}  // namespace varshift
