#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "eitline/fit.hpp"

namespace eitline {

/// Deterministic float formatting for all emitted data: 12 significant
/// digits, '.' decimal separator, no locale dependence.
std::string format_g12(double value);

/// Comment/header/row emitter; '\n' line endings throughout.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void comment(std::string_view text);
    void columns(std::span<const std::string_view> names);
    void row(std::span<const double> values);

private:
    std::ostream& os_;
};

/// Reads a transmission trace from spectrum-format CSV: '#' comments are
/// skipped, columns are located by name. Complex samples need re_t and
/// im_t; abs_t or T alone yields a magnitude-only trace.
Trace read_trace_csv(std::istream& is, const std::string& origin);
Trace read_trace_file(const std::string& path);

}  // namespace eitline
