#include "varshift/time_series.hpp"

#include <charconv>
#include <cstdio>

#include "varshift/errors.hpp"

namespace varshift {

namespace {

int parse_int(std::string_view text, const char* what) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw parameter_error(std::string("cannot parse ") + what + " '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

TimeLabel TimeLabel::parse(const std::string& text) {
    TimeLabel label;
    const auto dash = text.find('-', 1);  // skip a possible leading sign
    if (dash == std::string::npos) {
        label.year = parse_int(text, "year label");
        return label;
    }
    label.year = parse_int(std::string_view(text).substr(0, dash), "year label");
    label.month = parse_int(std::string_view(text).substr(dash + 1), "month label");
    if (label.month < 1 || label.month > 12) {
        throw parameter_error("month out of range in label '" + text + "'");
    }
    return label;
}

std::string TimeLabel::to_string() const {
    char buffer[16];
    if (month == 0) {
        std::snprintf(buffer, sizeof(buffer), "%d", year);
    } else {
        std::snprintf(buffer, sizeof(buffer), "%d-%02d", year, month);
    }
    return buffer;
}

void TimeSeries::validate() const {
    if (!labels.empty() && labels.size() != values.size()) {
        throw parameter_error("label count does not match value count");
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if ((labels[i].month > 0) != (labels.front().month > 0)) {
            throw parameter_error("labels mix annual and monthly formats");
        }
        if (i > 0 && !(labels[i - 1] < labels[i])) {
            throw parameter_error("time labels must be strictly increasing (offending label " +
                                  labels[i].to_string() + ")");
        }
    }
    if (period < 0) throw parameter_error("period must be nonnegative");
}

}  // namespace varshift
