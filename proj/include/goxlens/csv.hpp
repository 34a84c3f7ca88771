#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace goxlens::csv {

/// Streaming RFC-4180 reader. Fields are returned with surrounding
/// whitespace trimmed (the leak exports pad after commas).
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Next record, or nullopt at end of input. Blank lines are skipped.
  std::optional<std::vector<std::string>> next();

  /// 1-based physical line number where the last returned record started.
  std::size_t line() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
};

/// Header lookup: case-insensitive column name -> index.
class Header {
 public:
  explicit Header(std::vector<std::string> names);
  std::optional<std::size_t> find(std::string_view name) const;
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
};

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Shortest round-trip decimal form of a double; "inf", "-inf", "nan" for
/// non-finite values.
std::string format_double(double v);

}  // namespace goxlens::csv
