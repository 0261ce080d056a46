#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "hyperviz/session.hpp"

namespace hyperviz::session {

// JSON encoding of the session protocol. Envelopes are objects with `type`,
// `seq` and `payload`; server messages add `mapping_version`. Unknown fields
// are ignored.

/// Throws Error(BadPayload) on invalid JSON, a non-object envelope or a
/// missing/non-string `type`.
Envelope parse_envelope(std::string_view text);
std::string serialize_envelope(const Envelope& envelope);

/// Throws Error(BadPayload) for an unknown type or a malformed payload.
ClientMessage decode_client_message(const Envelope& envelope);
/// Client-side encoder, used by scripted clients and tests.
Envelope encode_client_message(const ClientMessage& message, std::uint64_t seq);

nlohmann::json to_json(const Viewpoint& viewpoint);
Viewpoint viewpoint_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Annotation& annotation);
Annotation annotation_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Snapshot& snapshot);
Snapshot snapshot_from_json(const nlohmann::json& j);

/// True when `text` is well-formed UTF-8 (no overlongs or surrogates).
bool is_valid_utf8(std::string_view text) noexcept;

}  // namespace hyperviz::session
