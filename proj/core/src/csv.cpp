#include "hyperviz/csv.hpp"

#include "hyperviz/error.hpp"

namespace hyperviz::csv {

Reader::Reader(std::string_view data, char delimiter) : data_(data), delimiter_(delimiter) {
  if (data_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
}

bool Reader::next(std::vector<std::string>& fields) {
  fields.clear();
  if (pos_ >= data_.size()) return false;

  std::string field;
  const std::size_t n = data_.size();
  while (true) {
    field.clear();
    if (pos_ < n && data_[pos_] == '"') {
      const std::size_t start = pos_;
      ++pos_;
      bool closed = false;
      while (pos_ < n) {
        char c = data_[pos_];
        if (c == '"') {
          if (pos_ + 1 < n && data_[pos_ + 1] == '"') {
            field.push_back('"');
            pos_ += 2;
            continue;
          }
          ++pos_;
          closed = true;
          break;
        }
        field.push_back(c);
        ++pos_;
      }
      if (!closed) {
        throw Error(ErrorCode::MalformedCsv,
                    "unterminated quoted field starting at byte " + std::to_string(start),
                    records_);
      }
      // Lenient: text between a closing quote and the next separator is kept.
      while (pos_ < n && data_[pos_] != delimiter_ && data_[pos_] != '\n' &&
             !(data_[pos_] == '\r' && pos_ + 1 < n && data_[pos_ + 1] == '\n')) {
        field.push_back(data_[pos_++]);
      }
    } else {
      const std::size_t start = pos_;
      while (pos_ < n && data_[pos_] != delimiter_ && data_[pos_] != '\n') ++pos_;
      std::size_t end = pos_;
      if (end > start && pos_ < n && data_[pos_] == '\n' && data_[end - 1] == '\r') --end;
      field.assign(data_.substr(start, end - start));
    }
    fields.push_back(field);

    if (pos_ >= n) break;
    char c = data_[pos_];
    if (c == delimiter_) {
      ++pos_;
      continue;
    }
    if (c == '\r') ++pos_;
    if (pos_ < n && data_[pos_] == '\n') ++pos_;
    break;
  }
  ++records_;
  return true;
}

std::string escape_field(std::string_view field, char delimiter) {
  bool needs_quotes = false;
  for (char c : field) {
    if (c == delimiter || c == '"' || c == '\n' || c == '\r') {
      needs_quotes = true;
      break;
    }
  }
  if (!needs_quotes) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join_record(const std::vector<std::string>& fields, char delimiter) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(delimiter);
    out += escape_field(fields[i], delimiter);
  }
  return out;
}

}  // namespace hyperviz::csv
