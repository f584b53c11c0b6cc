#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavemix::panel_io {

/// Malformed input data (bad CSV, ragged rows, non-numeric fields).
/// Carries a 1-based line number when one applies.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_number(line) {}
    std::size_t line_number = 0;
};

/// Reads a panel CSV: one row per replicate, comma-separated decimal values,
/// optional single header row (skipped when the first field is not numeric).
/// All rows must have equal length. Throws InputError with a line number.
std::vector<std::vector<double>> read_panel_csv(std::istream& in);
std::vector<std::vector<double>> read_panel_file(const std::string& path);

void write_row_csv(std::ostream& out, std::span<const double> row);
void write_matrix_csv(std::ostream& out, const std::vector<std::vector<double>>& rows);

/// Shortest round-trippable decimal form of x ("%.17g" tier, trimmed).
std::string format_double(double x);

}  // namespace wavemix::panel_io
