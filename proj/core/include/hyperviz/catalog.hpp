#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hyperviz {

enum class ColumnKind { numeric, categorical };

std::string_view to_string(ColumnKind kind) noexcept;

/// One typed catalog column.
///
/// Numeric cells are stored densely as doubles with NaN marking an absent
/// cell; every stored value is finite. Categorical cells are optional text.
class Column {
 public:
  /// Non-finite inputs are stored as missing.
  static Column numeric(std::string name, std::span<const std::optional<double>> values);
  /// Takes ownership of a dense buffer; non-finite entries become missing.
  static Column numeric(std::string name, std::vector<double> values);
  static Column categorical(std::string name, std::vector<std::optional<std::string>> values);

  const std::string& name() const noexcept { return name_; }
  ColumnKind kind() const noexcept { return kind_; }
  bool is_numeric() const noexcept { return kind_ == ColumnKind::numeric; }
  std::size_t size() const noexcept;
  std::size_t missing_count() const noexcept { return missing_; }
  std::size_t present_count() const noexcept { return size() - missing_; }

  bool is_missing(std::size_t row) const;
  std::optional<double> number(std::size_t row) const;
  const std::optional<std::string>& label(std::size_t row) const;

  /// Numeric storage, NaN where missing. Empty for categorical columns.
  std::span<const double> numbers() const noexcept { return numbers_; }
  std::span<const std::optional<std::string>> labels() const noexcept { return labels_; }

  /// Cell rendered as text: shortest round-trip decimal for numbers, the
  /// label for categories, empty when missing.
  std::string cell_text(std::size_t row) const;

  Column renamed(std::string name) const;

 private:
  Column(std::string name, ColumnKind kind) : name_(std::move(name)), kind_(kind) {}

  std::string name_;
  ColumnKind kind_;
  std::vector<double> numbers_;
  std::vector<std::optional<std::string>> labels_;
  std::size_t missing_ = 0;
};

struct ColumnStats {
  std::size_t n_present = 0;
  // numeric only
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  // categorical only; sorted, unique
  std::vector<std::string> distinct_categories;
};

/// Statistics over present cells. Throws Error(AllMissing) when there are none.
ColumnStats column_stats(const Column& column);

/// Immutable columnar table. All columns share the row count; names are unique.
class Catalog {
 public:
  Catalog() = default;
  /// Throws Error(DuplicateHeader) on repeated names and
  /// Error(InvalidArgument) when column lengths differ.
  explicit Catalog(std::vector<Column> columns);

  std::size_t n_rows() const noexcept { return n_rows_; }
  std::size_t n_columns() const noexcept { return columns_.size(); }
  const std::vector<Column>& columns() const noexcept { return columns_; }

  const Column* find(std::string_view name) const;
  /// Throws Error(UnknownColumn).
  const Column& column(std::string_view name) const;

  std::vector<std::string> column_names() const;

 private:
  std::vector<Column> columns_;
  std::unordered_map<std::string, std::size_t> by_name_;
  std::size_t n_rows_ = 0;
};

struct ParseOptions {
  char delimiter = ',';
  /// Compared case-insensitively against the raw cell text.
  std::vector<std::string> missing_tokens = {"", "NA", "NaN", "null"};
};

/// Strict decimal parse: the whole text must be a finite floating-point
/// literal (an optional leading '+' is allowed). "inf", "nan", hex and
/// surrounding whitespace are rejected.
std::optional<double> parse_finite_decimal(std::string_view text) noexcept;

/// Numeric iff every present cell parses as a finite decimal.
/// Throws Error(AllMissing) when no cell is present.
ColumnKind infer_column_kind(std::span<const std::optional<std::string_view>> cells);

/// Parses CSV text with a mandatory header row.
///
/// Errors: EmptyInput (no header), DuplicateHeader, RaggedRow (carries the
/// zero-based data row index), MalformedCsv. A column whose cells are all
/// missing is typed numeric.
Catalog parse_catalog(std::string_view input, const ParseOptions& options = {});
Catalog parse_catalog(std::istream& input, const ParseOptions& options = {});
Catalog load_catalog(const std::filesystem::path& path, const ParseOptions& options = {});

/// Writes the catalog back to CSV (header + one record per row, LF
/// terminated). Missing cells are written as empty fields.
std::string serialize_catalog(const Catalog& catalog, char delimiter = ',');

}  // namespace hyperviz
