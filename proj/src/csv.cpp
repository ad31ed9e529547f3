#include "varshift/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "varshift/errors.hpp"

namespace varshift::csv {

namespace {

std::string_view trim(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() &&
           (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
        text.remove_suffix(1);
    }
    return text;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

bool try_parse_double(std::string_view text, double& value) {
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

std::string location(const std::string& source, int line_no) {
    return source + ":" + std::to_string(line_no) + ": ";
}

}  // namespace

TimeSeries read_series(std::istream& in, const std::string& source) {
    TimeSeries series;
    std::string line;
    int line_no = 0;
    int columns = 0;
    bool header_allowed = true;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view content = trim(line);
        if (content.empty() || content.front() == '#') continue;
        const auto fields = split_fields(content);
        if (fields.size() > 2) {
            throw parameter_error(location(source, line_no) + "expected 1 or 2 columns, got " +
                                  std::to_string(fields.size()));
        }
        double value = 0.0;
        if (!try_parse_double(fields.back(), value)) {
            if (header_allowed) {  // a single leading header line is tolerated
                header_allowed = false;
                continue;
            }
            throw parameter_error(location(source, line_no) + "cannot parse value '" +
                                  std::string(fields.back()) + "'");
        }
        header_allowed = false;
        if (columns == 0) {
            columns = static_cast<int>(fields.size());
        } else if (columns != static_cast<int>(fields.size())) {
            throw parameter_error(location(source, line_no) + "inconsistent column count");
        }
        if (fields.size() == 2) {
            try {
                series.labels.push_back(TimeLabel::parse(std::string(fields.front())));
            } catch (const parameter_error& err) {
                throw parameter_error(location(source, line_no) + err.what());
            }
        }
        series.values.push_back(value);
    }
    if (series.values.empty()) {
        throw parameter_error(source + ": no data rows");
    }
    try {
        series.validate();
    } catch (const parameter_error& err) {
        throw parameter_error(source + ": " + err.what());
    }
    if (series.monthly_labels()) series.period = 12;
    return series;
}

TimeSeries read_series_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parameter_error("cannot open input file: " + path);
    return read_series(in, path);
}

void write_series(std::ostream& out, const TimeSeries& series,
                  std::span<const std::string> comments) {
    for (const auto& comment : comments) out << "# " << comment << "\n";
    char buffer[64];
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        std::snprintf(buffer, sizeof(buffer), "%.17g", series.values[i]);
        if (series.has_labels()) {
            out << series.labels[i].to_string() << "," << buffer << "\n";
        } else {
            out << buffer << "\n";
        }
    }
}

void write_series_file(const std::string& path, const TimeSeries& series,
                       std::span<const std::string> comments) {
    std::ofstream out(path);
    if (!out) throw parameter_error("cannot open output file: " + path);
    write_series(out, series, comments);
}

}  // namespace varshift::csv
