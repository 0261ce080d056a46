#include "hyperviz/logging.hpp"

#include <cstdlib>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace hyperviz::cli {

std::shared_ptr<spdlog::logger> make_logger(const std::string& name) {
  auto sink = std::make_shared<spdlog::sinks::stderr_color_sink_mt>();
  auto log = std::make_shared<spdlog::logger>(name, std::move(sink));
  log->set_level(spdlog::level::info);
  if (const char* env = std::getenv("HYPERVIZ_LOG"); env && *env) {
    const std::string wanted = env;
    const auto level = spdlog::level::from_str(wanted);
    if (level == spdlog::level::off && wanted != "off") {
      log->warn("ignoring unknown HYPERVIZ_LOG level '{}'", wanted);
    } else {
      log->set_level(level);
    }
  }
  return log;
}

}  // namespace hyperviz::cli
