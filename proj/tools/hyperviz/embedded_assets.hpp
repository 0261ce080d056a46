#pragma once

#include <string_view>

namespace hyperviz::serve {

/// Built-in page served at `GET /` when no assets directory is given.
std::string_view embedded_index_html() noexcept;

}  // namespace hyperviz::serve
