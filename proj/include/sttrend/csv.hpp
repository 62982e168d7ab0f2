#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sttrend::csv {

using Record = std::vector<std::string>;

/// RFC 4180 reader: quoted fields may contain separators, doubled quotes and
/// line breaks. CRLF and LF line endings are both accepted.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Next record, or nullopt at end of input. Throws DataError on an
  /// unterminated quoted field.
  std::optional<Record> next();

  /// 1-based line number where the last returned record started.
  std::size_t line() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
};

/// Quote a field if it contains a separator, quote or line break.
std::string quote(std::string_view field);

/// Join fields into one line (no terminator).
std::string join(const Record& fields);

/// Index of `name` in a header record; throws DataError if absent.
std::size_t column(const Record& header, std::string_view name);

/// Shortest decimal text that round-trips to the same double; "NA" for NaN.
std::string exact(double v);

/// Fixed-point text with `decimals` digits; "NA" for NaN.
std::string fixed(double v, int decimals);

/// Parse a double, accepting surrounding whitespace. Nullopt on empty/"NA".
/// Throws DataError on malformed text.
std::optional<double> parse_number(std::string_view text);

}  // namespace sttrend::csv
