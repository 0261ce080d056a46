#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hyperviz::csv {

/// RFC 4180 record reader over an in-memory UTF-8 buffer.
///
/// Accepts LF and CRLF record terminators, quoted fields with embedded
/// delimiters, newlines and doubled quotes. A leading UTF-8 byte order mark
/// is skipped. A terminator at the very end of the buffer does not start a
/// new record, so "a\n1\n" holds two records while "a\n1\n\n" holds three.
class Reader {
 public:
  explicit Reader(std::string_view data, char delimiter = ',');

  /// Reads the next record into `fields`. Returns false at end of input.
  /// Throws Error(MalformedCsv) on an unterminated quoted field.
  bool next(std::vector<std::string>& fields);

  /// Number of records returned so far.
  std::uint64_t records_read() const noexcept { return records_; }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
  char delimiter_;
  std::uint64_t records_ = 0;
};

/// Renders one field, quoting it when it contains the delimiter, a quote,
/// CR or LF.
std::string escape_field(std::string_view field, char delimiter = ',');

/// Joins fields into a record without the trailing terminator.
std::string join_record(const std::vector<std::string>& fields, char delimiter = ',');

}  // namespace hyperviz::csv
