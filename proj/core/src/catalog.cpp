#include "hyperviz/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <set>
#include <sstream>

#include "hyperviz/csv.hpp"
#include "hyperviz/error.hpp"

namespace hyperviz {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto lower = [](unsigned char c) { return (c >= 'A' && c <= 'Z') ? c + ('a' - 'A') : c; };
    if (lower(static_cast<unsigned char>(a[i])) != lower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

std::string shortest_decimal(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

std::string_view to_string(ColumnKind kind) noexcept {
  return kind == ColumnKind::numeric ? "numeric" : "categorical";
}

// ---------------------------------------------------------------------------
// Column

Column Column::numeric(std::string name, std::span<const std::optional<double>> values) {
  std::vector<double> dense;
  dense.reserve(values.size());
  for (const auto& v : values) dense.push_back(v ? *v : kMissing);
  return numeric(std::move(name), std::move(dense));
}

Column Column::numeric(std::string name, std::vector<double> values) {
  Column c(std::move(name), ColumnKind::numeric);
  for (double& v : values) {
    if (!std::isfinite(v)) {
      v = kMissing;
      ++c.missing_;
    }
  }
  c.numbers_ = std::move(values);
  return c;
}

Column Column::categorical(std::string name, std::vector<std::optional<std::string>> values) {
  Column c(std::move(name), ColumnKind::categorical);
  c.missing_ = static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [](const auto& v) { return !v.has_value(); }));
  c.labels_ = std::move(values);
  return c;
}

std::size_t Column::size() const noexcept {
  return is_numeric() ? numbers_.size() : labels_.size();
}

bool Column::is_missing(std::size_t row) const {
  return is_numeric() ? std::isnan(numbers_.at(row)) : !labels_.at(row).has_value();
}

std::optional<double> Column::number(std::size_t row) const {
  if (!is_numeric()) {
    throw Error(ErrorCode::KindMismatch, "column '" + name_ + "' is categorical");
  }
  double v = numbers_.at(row);
  if (std::isnan(v)) return std::nullopt;
  return v;
}

const std::optional<std::string>& Column::label(std::size_t row) const {
  if (is_numeric()) {
    throw Error(ErrorCode::KindMismatch, "column '" + name_ + "' is numeric");
  }
  return labels_.at(row);
}

std::string Column::cell_text(std::size_t row) const {
  if (is_numeric()) {
    double v = numbers_.at(row);
    return std::isnan(v) ? std::string() : shortest_decimal(v);
  }
  const auto& l = labels_.at(row);
  return l ? *l : std::string();
}

Column Column::renamed(std::string name) const {
  Column c = *this;
  c.name_ = std::move(name);
  return c;
}

ColumnStats column_stats(const Column& column) {
  ColumnStats stats;
  stats.n_present = column.present_count();
  if (stats.n_present == 0) {
    throw Error(ErrorCode::AllMissing, "column '" + column.name() + "' has no present cells");
  }
  if (column.is_numeric()) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    // Neumaier-compensated sum.
    double sum = 0.0, comp = 0.0;
    for (double v : column.numbers()) {
      if (std::isnan(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      double t = sum + v;
      if (std::abs(sum) >= std::abs(v)) {
        comp += (sum - t) + v;
      } else {
        comp += (v - t) + sum;
      }
      sum = t;
    }
    stats.min = lo;
    stats.max = hi;
    stats.mean = std::clamp((sum + comp) / static_cast<double>(stats.n_present), lo, hi);
  } else {
    std::set<std::string> distinct;
    for (const auto& l : column.labels()) {
      if (l) distinct.insert(*l);
    }
    stats.distinct_categories.assign(distinct.begin(), distinct.end());
  }
  return stats;
}

// ---------------------------------------------------------------------------
// Catalog

Catalog::Catalog(std::vector<Column> columns) : columns_(std::move(columns)) {
  n_rows_ = columns_.empty() ? 0 : columns_.front().size();
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const Column& c = columns_[i];
    if (c.size() != n_rows_) {
      throw Error(ErrorCode::InvalidArgument,
                  "column '" + c.name() + "' has " + std::to_string(c.size()) +
                      " rows, expected " + std::to_string(n_rows_));
    }
    if (!by_name_.emplace(c.name(), i).second) {
      throw Error(ErrorCode::DuplicateHeader, "duplicate column name '" + c.name() + "'");
    }
  }
}

const Column* Catalog::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  return it == by_name_.end() ? nullptr : &columns_[it->second];
}

const Column& Catalog::column(std::string_view name) const {
  if (const Column* c = find(name)) return *c;
  throw Error(ErrorCode::UnknownColumn, "unknown column '" + std::string(name) + "'");
}

std::vector<std::string> Catalog::column_names() const {
  std::vector<std::string> names;
  names.reserve(columns_.size());
  for (const auto& c : columns_) names.push_back(c.name());
  return names;
}

// ---------------------------------------------------------------------------
// Parsing

std::optional<double> parse_finite_decimal(std::string_view text) noexcept {
  if (!text.empty() && text.front() == '+') {
    text.remove_prefix(1);
    if (!text.empty() && text.front() == '-') return std::nullopt;
  }
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value,
                                   std::chars_format::general);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

ColumnKind infer_column_kind(std::span<const std::optional<std::string_view>> cells) {
  bool any_present = false;
  bool numeric = true;
  for (const auto& cell : cells) {
    if (!cell) continue;
    any_present = true;
    if (numeric && !parse_finite_decimal(*cell)) numeric = false;
  }
  if (!any_present) throw Error(ErrorCode::AllMissing, "no present cells to infer a kind from");
  return numeric ? ColumnKind::numeric : ColumnKind::categorical;
}

namespace {

struct ColumnScan {
  bool any_present = false;
  bool numeric = true;
};

bool is_missing_token(std::string_view cell, const ParseOptions& options) {
  return std::any_of(options.missing_tokens.begin(), options.missing_tokens.end(),
                     [&](const std::string& t) { return iequals(cell, t); });
}

}  // namespace

Catalog parse_catalog(std::string_view input, const ParseOptions& options) {
  std::vector<std::string> fields;
  csv::Reader header_reader(input, options.delimiter);
  if (!header_reader.next(fields) || (fields.size() == 1 && fields[0].empty())) {
    throw Error(ErrorCode::EmptyInput, "input has no header row");
  }
  const std::vector<std::string> header = fields;
  {
    std::set<std::string_view> seen;
    for (const auto& h : header) {
      if (!seen.insert(h).second) {
        throw Error(ErrorCode::DuplicateHeader, "duplicate header field '" + h + "'");
      }
    }
  }
  const std::size_t width = header.size();

  // Pass 1: shape validation and kind inference.
  std::vector<ColumnScan> scans(width);
  std::size_t n_rows = 0;
  {
    csv::Reader reader(input, options.delimiter);
    reader.next(fields);
    while (reader.next(fields)) {
      if (fields.size() != width) {
        throw Error(ErrorCode::RaggedRow,
                    "ragged row at data row " + std::to_string(n_rows) + ": expected " +
                        std::to_string(width) + " fields, got " + std::to_string(fields.size()),
                    n_rows);
      }
      for (std::size_t c = 0; c < width; ++c) {
        if (is_missing_token(fields[c], options)) continue;
        scans[c].any_present = true;
        if (scans[c].numeric && !parse_finite_decimal(fields[c])) scans[c].numeric = false;
      }
      ++n_rows;
    }
  }

  // Pass 2: materialize.
  std::vector<std::vector<double>> numeric(width);
  std::vector<std::vector<std::optional<std::string>>> labels(width);
  for (std::size_t c = 0; c < width; ++c) {
    if (scans[c].numeric) {
      numeric[c].reserve(n_rows);
    } else {
      labels[c].reserve(n_rows);
    }
  }
  {
    csv::Reader reader(input, options.delimiter);
    reader.next(fields);
    while (reader.next(fields)) {
      for (std::size_t c = 0; c < width; ++c) {
        const bool missing = is_missing_token(fields[c], options);
        if (scans[c].numeric) {
          numeric[c].push_back(missing ? kMissing : *parse_finite_decimal(fields[c]));
        } else if (missing) {
          labels[c].emplace_back(std::nullopt);
        } else {
          labels[c].emplace_back(std::move(fields[c]));
        }
      }
    }
  }

  std::vector<Column> columns;
  columns.reserve(width);
  for (std::size_t c = 0; c < width; ++c) {
    if (scans[c].numeric) {
      columns.push_back(Column::numeric(header[c], std::move(numeric[c])));
    } else {
      columns.push_back(Column::categorical(header[c], std::move(labels[c])));
    }
  }
  return Catalog(std::move(columns));
}

Catalog parse_catalog(std::istream& input, const ParseOptions& options) {
  std::string data{std::istreambuf_iterator<char>(input), std::istreambuf_iterator<char>()};
  return parse_catalog(std::string_view(data), options);
}

Catalog load_catalog(const std::filesystem::path& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  return parse_catalog(in, options);
}

std::string serialize_catalog(const Catalog& catalog, char delimiter) {
  std::string out = csv::join_record(catalog.column_names(), delimiter);
  out.push_back('\n');
  std::vector<std::string> fields(catalog.n_columns());
  for (std::size_t r = 0; r < catalog.n_rows(); ++r) {
    for (std::size_t c = 0; c < catalog.n_columns(); ++c) {
      fields[c] = catalog.columns()[c].cell_text(r);
    }
    out += csv::join_record(fields, delimiter);
    out.push_back('\n');
  }
  return out;
}

}  // namespace hyperviz
