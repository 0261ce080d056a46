#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <spdlog/logger.h>

#include "hyperviz/catalog.hpp"
#include "hyperviz/session.hpp"

namespace hyperviz::serve {

struct ServeConfig {
  std::string address = "127.0.0.1";
  unsigned short port = 8080;  // 0 picks a free port
  std::optional<std::string> link_template;
  std::size_t budget = 200'000;  // points per scene response
  double viewpoint_rate = 30.0;  // viewpoint_bcast per second per room
  std::optional<std::filesystem::path> assets;
  std::size_t io_threads = 2;

  /// Throws Error(InvalidArgument) on a zero budget, rate or thread count.
  void validate() const;
};

/// Splits "host:port". Throws Error(InvalidArgument).
std::pair<std::string, unsigned short> parse_bind(std::string_view text);

/// The log line written for one room event, e.g.
/// "event room=lab user=ann type=join -> welcome,user_joined".
std::string describe_event(std::string_view room, std::string_view user, std::string_view type,
                           const std::vector<session::Delivery>& outbox);

/// HTTP + WebSocket front end for the room state machine.
///
///   GET /              viewer page (built in, or index.html from assets)
///   GET /<file>        other files from the assets directory
///   GET /scene/<room>  HVSC bytes for the room's mapping, decimated to the
///                      budget; X-Hyperviz-Mapping-Version names the version
///   /ws/<room>?user=   session protocol, one JSON envelope per text frame
///
/// Rooms live in memory only and disappear when their last member leaves.
class Server {
 public:
  /// Throws Error(UnknownPlaceholder) if the link template does not fit the
  /// catalog, Error(InvalidArgument) on a bad config.
  Server(ServeConfig config, Catalog catalog, std::shared_ptr<spdlog::logger> log);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts the I/O threads. Throws boost::system::system_error
  /// when the address cannot be bound.
  void start();
  /// Bound port; valid after start().
  unsigned short port() const;
  /// Stops on SIGINT/SIGTERM.
  void stop_on_signals();
  /// Blocks until the server stops.
  void wait();
  /// Closes everything; rooms are dropped.
  void stop();

  std::size_t room_count() const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace hyperviz::serve
