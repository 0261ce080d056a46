#include "hyperviz/link.hpp"

#include "hyperviz/error.hpp"

namespace hyperviz {

namespace {

bool is_unreserved(unsigned char c) noexcept {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' ||
         c == '.' || c == '_' || c == '~';
}

bool is_reserved(unsigned char c) noexcept {
  constexpr std::string_view kReserved = ":/?#[]@!$&'()*+,;=";
  return kReserved.find(static_cast<char>(c)) != std::string_view::npos;
}

void append_escaped(std::string& out, unsigned char c) {
  constexpr char kHex[] = "0123456789ABCDEF";
  out.push_back('%');
  out.push_back(kHex[c >> 4]);
  out.push_back(kHex[c & 0x0F]);
}

}  // namespace

std::string percent_encode(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_unreserved(c)) {
      out.push_back(ch);
    } else {
      append_escaped(out, c);
    }
  }
  return out;
}

LinkTemplate::LinkTemplate(std::string_view text) : text_(text) {
  std::string literal;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '}') {
      throw Error(ErrorCode::BadTemplate, "unmatched '}' at offset " + std::to_string(i));
    }
    if (c != '{') {
      literal.push_back(c);
      ++i;
      continue;
    }
    const std::size_t close = text.find_first_of("{}", i + 1);
    if (close == std::string_view::npos || text[close] != '}') {
      throw Error(ErrorCode::BadTemplate, "unterminated placeholder at offset " + std::to_string(i));
    }
    if (close == i + 1) {
      throw Error(ErrorCode::BadTemplate, "empty placeholder at offset " + std::to_string(i));
    }
    if (!literal.empty()) pieces_.emplace_back(std::move(literal));
    literal.clear();
    pieces_.emplace_back(Placeholder{std::string(text.substr(i + 1, close - i - 1))});
    i = close + 1;
  }
  if (!literal.empty()) pieces_.emplace_back(std::move(literal));
}

std::vector<std::string> LinkTemplate::placeholders() const {
  std::vector<std::string> names;
  for (const auto& piece : pieces_) {
    if (const auto* p = std::get_if<Placeholder>(&piece)) names.push_back(p->column);
  }
  return names;
}

void LinkTemplate::validate(const Catalog& catalog) const {
  for (const auto& name : placeholders()) {
    if (!catalog.find(name)) {
      throw Error(ErrorCode::UnknownPlaceholder,
                  "link template placeholder {" + name + "} names no catalog column");
    }
  }
}

std::string resolve_link(const LinkTemplate& link, const Catalog& catalog, std::uint64_t row_id) {
  link.validate(catalog);
  if (row_id >= catalog.n_rows()) {
    throw Error(ErrorCode::RowOutOfRange,
                "row " + std::to_string(row_id) + " is outside the catalog (" +
                    std::to_string(catalog.n_rows()) + " rows)",
                row_id);
  }
  std::string url;
  for (const auto& piece : link.pieces_) {
    if (const auto* literal = std::get_if<std::string>(&piece)) {
      for (char ch : *literal) {
        const auto c = static_cast<unsigned char>(ch);
        if (is_unreserved(c) || is_reserved(c) || c == '%') {
          url.push_back(ch);
        } else {
          append_escaped(url, c);
        }
      }
    } else {
      const auto& column = catalog.column(std::get<LinkTemplate::Placeholder>(piece).column);
      url += percent_encode(column.cell_text(static_cast<std::size_t>(row_id)));
    }
  }
  return url;
}

}  // namespace hyperviz
