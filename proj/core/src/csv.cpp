#include "cmasim/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "cmasim/errors.hpp"

namespace cmasim::csv {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    const auto end = comma == std::string_view::npos ? line.size() : comma;
    fields.emplace_back(trim(line.substr(start, end - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

Document parse(std::string_view text) {
  Document doc;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    const auto line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (trim(line).empty()) {
      if (nl == std::string_view::npos) break;
      continue;
    }
    auto fields = split_fields(line);
    if (!have_header) {
      doc.header = std::move(fields);
      have_header = true;
    } else {
      if (fields.size() != doc.header.size()) {
        throw ParseError("csv line " + std::to_string(line_no) + ": expected " +
                             std::to_string(doc.header.size()) + " fields, found " +
                             std::to_string(fields.size()),
                         line_no, 1);
      }
      doc.rows.push_back(std::move(fields));
      doc.row_lines.push_back(line_no);
    }
    if (nl == std::string_view::npos) break;
  }
  if (!have_header) throw ParseError("csv: missing header row", 1, 1);
  return doc;
}

std::size_t column(const Document& doc, std::string_view name) {
  for (std::size_t i = 0; i < doc.header.size(); ++i) {
    if (doc.header[i] == name) return i;
  }
  throw ParseError("csv: missing column '" + std::string(name) + "'", 1, 1);
}

double to_double(std::string_view field, std::size_t line, std::size_t column) {
  const std::string buf(field);
  if (buf.empty()) {
    throw ParseError("csv line " + std::to_string(line) + ": empty numeric field", line, column);
  }
  char* end = nullptr;
  errno = 0;
  const double value = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || errno == ERANGE || !std::isfinite(value)) {
    throw ParseError("csv line " + std::to_string(line) + ": not a number: '" + buf + "'", line,
                     column);
  }
  return value;
}

std::optional<double> to_optional_double(std::string_view field, std::size_t line,
                                         std::size_t column) {
  if (field.empty()) return std::nullopt;
  return to_double(field, line, column);
}

std::string format_number(double value) {
  if (value == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  return out;
}

}  // namespace cmasim::csv
