#pragma once

#include <memory>
#include <string>

#include <spdlog/logger.h>

namespace hyperviz::cli {

/// stderr logger whose level comes from HYPERVIZ_LOG (trace, debug, info,
/// warn, error, critical, off). Unset or unrecognized means info.
std::shared_ptr<spdlog::logger> make_logger(const std::string& name = "hyperviz");

}  // namespace hyperviz::cli
