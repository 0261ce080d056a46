#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hyperviz/catalog.hpp"

namespace hyperviz {

/// URL template with `{column_name}` placeholders, e.g.
/// "https://archive.example/obj?id={objid}".
class LinkTemplate {
 public:
  /// Throws Error(BadTemplate) on an unbalanced brace or an empty
  /// placeholder name.
  explicit LinkTemplate(std::string_view text);

  const std::string& text() const noexcept { return text_; }
  std::vector<std::string> placeholders() const;

  /// Throws Error(UnknownPlaceholder) naming the first placeholder that is
  /// not a catalog column.
  void validate(const Catalog& catalog) const;

 private:
  struct Placeholder {
    std::string column;
  };
  using Piece = std::variant<std::string, Placeholder>;

  friend std::string resolve_link(const LinkTemplate&, const Catalog&, std::uint64_t);

  std::string text_;
  std::vector<Piece> pieces_;
};

/// RFC 3986 percent-encoding of everything outside the unreserved set.
std::string percent_encode(std::string_view text);

/// Substitutes the row's cells into the template. Cell text is
/// percent-encoded (numbers in shortest round-trip form, missing cells as
/// the empty string). Literal template characters outside the RFC 3986
/// reserved and unreserved sets are percent-encoded as well; '%' is kept.
/// Errors: UnknownPlaceholder, RowOutOfRange.
std::string resolve_link(const LinkTemplate& link, const Catalog& catalog, std::uint64_t row_id);

}  // namespace hyperviz
