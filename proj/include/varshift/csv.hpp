#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "varshift/time_series.hpp"

namespace varshift::csv {

/// Reads a one- or two-column CSV: `value` or `time,value`, optional single
/// header line, '#' comment lines. Monthly labels set the series period to 12.
/// Parse failures carry the source name and line number.
TimeSeries read_series(std::istream& in, const std::string& source = "input");
TimeSeries read_series_file(const std::string& path);

/// Writes `time,value` (or bare `value`) rows, preceded by '#' comment lines.
void write_series(std::ostream& out, const TimeSeries& series,
                  std::span<const std::string> comments = {});
void write_series_file(const std::string& path, const TimeSeries& series,
                       std::span<const std::string> comments = {});

}  // namespace varshift::csv
