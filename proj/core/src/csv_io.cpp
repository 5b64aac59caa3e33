#include "eitline/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "eitline/errors.hpp"

namespace eitline {

std::string format_g12(double value) {
    char buffer[40];
    const int n = std::snprintf(buffer, sizeof buffer, "%.12g", value);
    return std::string(buffer, static_cast<std::size_t>(n));
}

void CsvWriter::comment(std::string_view text) {
    os_ << "# " << text << "\n";
}

void CsvWriter::columns(std::span<const std::string_view> names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) os_ << ",";
        os_ << names[i];
    }
    os_ << "\n";
}

void CsvWriter::row(std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) os_ << ",";
        os_ << format_g12(values[i]);
    }
    os_ << "\n";
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) {
        while (!item.empty() && (item.back() == ' ' || item.back() == '\r')) item.pop_back();
        std::size_t b = 0;
        while (b < item.size() && item[b] == ' ') ++b;
        fields.push_back(item.substr(b));
    }
    return fields;
}

double parse_field(const std::string& text, const std::string& origin, int line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw BadTrace(origin + ":" + std::to_string(line) + ": bad numeric field '" + text +
                       "'");
    }
    return v;
}

}  // namespace

Trace read_trace_csv(std::istream& is, const std::string& origin) {
    std::string line;
    int line_no = 0;
    std::vector<std::string> header;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        header = split_csv(line);
        break;
    }
    if (header.empty()) {
        throw BadTrace(origin + ": no header line found");
    }

    int col_delta = -1, col_re = -1, col_im = -1, col_abs = -1, col_power = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "delta_p_over_2pi_hz") col_delta = static_cast<int>(i);
        if (header[i] == "re_t") col_re = static_cast<int>(i);
        if (header[i] == "im_t") col_im = static_cast<int>(i);
        if (header[i] == "abs_t") col_abs = static_cast<int>(i);
        if (header[i] == "T") col_power = static_cast<int>(i);
    }
    if (col_delta < 0) {
        throw BadTrace(origin + ": missing column 'delta_p_over_2pi_hz'");
    }
    const bool complex_data = col_re >= 0 && col_im >= 0;
    if (!complex_data && col_abs < 0 && col_power < 0) {
        throw BadTrace(origin + ": need re_t+im_t, abs_t, or T columns");
    }

    Trace trace;
    trace.magnitude_only = !complex_data;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto fields = split_csv(line);
        if (fields.size() != header.size()) {
            throw BadTrace(origin + ":" + std::to_string(line_no) + ": expected " +
                           std::to_string(header.size()) + " fields, got " +
                           std::to_string(fields.size()));
        }
        const double delta = parse_field(fields[static_cast<std::size_t>(col_delta)], origin,
                                         line_no) * two_pi;
        double re = 0.0;
        double im = 0.0;
        if (complex_data) {
            re = parse_field(fields[static_cast<std::size_t>(col_re)], origin, line_no);
            im = parse_field(fields[static_cast<std::size_t>(col_im)], origin, line_no);
        } else if (col_abs >= 0) {
            re = parse_field(fields[static_cast<std::size_t>(col_abs)], origin, line_no);
        } else {
            re = std::sqrt(parse_field(fields[static_cast<std::size_t>(col_power)], origin,
                                       line_no));
        }
        if (!std::isfinite(delta) || !std::isfinite(re) || !std::isfinite(im)) {
            continue;  // poisoned sweep point; skip
        }
        trace.delta_p.push_back(delta);
        trace.t.emplace_back(re, im);
    }
    return trace;
}

Trace read_trace_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open trace file: " + path);
    }
    return read_trace_csv(in, path);
}

}  // namespace eitline
