#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace hyperviz::testing {

/// Network-free run of scripted clients against the room state machine.
///
/// Clients emit random protocol messages (joins, mapping changes,
/// viewpoints, broadcast contention, annotations, links, malformed
/// requests, leaves and abrupt disconnects). The server drains client
/// connections in a random receipt order, and server messages reach each
/// client in order but interleaved randomly across clients; viewpoint_bcast
/// messages may be dropped. Every envelope crosses the JSON codec.
struct SimulationConfig {
  std::uint64_t seed = 1;
  std::size_t clients = 5;
  std::size_t messages = 200;
  double drop_rate = 0.2;  // viewpoint_bcast only
};

struct SimulationReport {
  std::size_t steps = 0;
  std::size_t messages_sent = 0;
  std::size_t broadcasts_started = 0;
  std::size_t busy_errors = 0;
  std::size_t navigator_disconnects = 0;
  std::size_t dropped_viewpoints = 0;

  bool invariants_ok = true;        // server state after every event
  bool single_navigator_ok = true;  // never two overlapping broadcasts in the emitted stream
  bool fidelity_ok = true;          // followers display the latest navigator viewpoint received
  bool converged = true;            // connected replicas equal the server after quiescence
  bool replay_identical = true;     // same receipt order, new delivery interleaving: same result
  std::string failure;

  bool ok() const noexcept {
    return invariants_ok && single_navigator_ok && fidelity_ok && converged && replay_identical;
  }
};

SimulationReport run_simulation(const SimulationConfig& config);

}  // namespace hyperviz::testing
