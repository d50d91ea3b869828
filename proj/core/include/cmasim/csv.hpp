#pragma once

// Minimal CSV dialect used for every file this project reads or writes:
// comma separated, '.' decimal, LF line endings (CRLF tolerated on input),
// one header row, no quoting.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cmasim::csv {

struct Document {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  /// 1-based source line of each row, for error messages.
  std::vector<std::size_t> row_lines;
};

/// Splits text into header and rows. Blank lines are skipped, fields are
/// trimmed. Throws ParseError when a row's field count differs from the header.
Document parse(std::string_view text);

/// Index of `name` in the header; throws ParseError if absent.
std::size_t column(const Document& doc, std::string_view name);

/// Strict decimal parse of a whole field. Throws ParseError with the given location.
double to_double(std::string_view field, std::size_t line, std::size_t column);

/// Empty field -> nullopt, otherwise to_double.
std::optional<double> to_optional_double(std::string_view field, std::size_t line,
                                         std::size_t column);

/// Six significant digits, round-half-even on the binary value ("%.6g");
/// negative zero prints as "0".
std::string format_number(double value);

std::string join(const std::vector<std::string>& fields);

}  // namespace cmasim::csv
